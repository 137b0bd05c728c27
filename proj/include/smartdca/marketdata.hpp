#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace smartdca {

/// A point in time: either a calendar date (days since 1970-01-01) or an
/// integer tick.
class Timestamp {
public:
    enum class Kind { date, tick };

    static Timestamp date(int year, unsigned month, unsigned day);
    static Timestamp from_days(std::int64_t days_since_epoch) { return {Kind::date, days_since_epoch}; }
    static Timestamp tick(std::int64_t n) { return {Kind::tick, n}; }

    /// ISO-8601 date (YYYY-MM-DD) or a decimal integer tick. Throws DomainError.
    static Timestamp parse(std::string_view text);

    Kind kind() const noexcept { return kind_; }
    std::int64_t value() const noexcept { return value_; }
    bool is_date() const noexcept { return kind_ == Kind::date; }

    /// Calendar year for dates; for ticks, floor((tick - 1) / ticks_per_year),
    /// so ticks 1..ticks_per_year form year 0.
    std::int64_t year(std::int64_t ticks_per_year = 365) const;

    std::string to_string() const;

    friend bool operator==(const Timestamp&, const Timestamp&) = default;
    friend std::strong_ordering operator<=>(const Timestamp&, const Timestamp&) = default;

private:
    Timestamp(Kind kind, std::int64_t value) : kind_(kind), value_(value) {}

    Kind kind_ = Kind::tick;
    std::int64_t value_ = 0;
};

/// Calendar or tick length, e.g. "1y", "5y", "6m", "30d", "250t".
struct Duration {
    enum class Unit { days, months, years, ticks };

    std::int64_t count = 1;
    Unit unit = Unit::years;

    static Duration parse(std::string_view text);
    std::string to_string() const;
};

/// `t + d`. Month arithmetic clamps to the last day of the target month.
/// On tick timestamps, years are `ticks_per_year` ticks; days and months are rejected.
Timestamp advance(const Timestamp& t, const Duration& d, std::int64_t ticks_per_year = 365);

/// Ordered, strictly increasing, strictly positive price observations.
class PriceSeries {
public:
    PriceSeries() = default;
    PriceSeries(std::vector<Timestamp> timestamps, std::vector<double> prices);

    /// Integer ticks 1..n.
    static PriceSeries from_prices(std::vector<double> prices);

    std::size_t size() const noexcept { return prices_.size(); }
    bool empty() const noexcept { return prices_.empty(); }
    std::span<const double> prices() const noexcept { return prices_; }
    std::span<const Timestamp> timestamps() const noexcept { return timestamps_; }
    double price(std::size_t i) const { return prices_.at(i); }
    const Timestamp& timestamp(std::size_t i) const { return timestamps_.at(i); }
    double last_price() const { return prices_.back(); }

    /// Points with index in [first, last).
    PriceSeries slice(std::size_t first, std::size_t last) const;

    /// Points with from <= timestamp < to.
    PriceSeries between(const Timestamp& from, const Timestamp& to) const;

    friend bool operator==(const PriceSeries&, const PriceSeries&) = default;

private:
    std::vector<Timestamp> timestamps_;
    std::vector<double> prices_;
};

/// Column selection for CSV ingestion. Empty names mean auto-detect: the
/// time column is the first of date/tick/time/timestamp, the price column the
/// first of price/close (case-insensitive). Files without a header are read
/// as (time, price).
struct CsvColumns {
    std::string time_column;
    std::string price_column;
};

PriceSeries parse_csv(std::istream& in, const CsvColumns& columns = {});
PriceSeries load_csv(const std::filesystem::path& path, const CsvColumns& columns = {});

/// Writes `date,price` or `tick,price` with shortest round-trip price literals.
void write_csv(const PriceSeries& series, std::ostream& out);
void save_csv(const PriceSeries& series, const std::filesystem::path& path);

inline constexpr double uniform_price_floor = 1e-6;
inline constexpr std::string_view rng_algorithm = "mt19937_64";

/// n prices drawn uniformly from (max(lo, 1e-6), hi) with a mt19937_64 seeded
/// by `seed`; ticks 1..n. Each draw uses the top 53 bits of one engine output.
PriceSeries synth_uniform(std::size_t n, double lo, double hi, std::uint64_t seed);

/// Indices of the series at which buys happen.
class BuySchedule {
public:
    BuySchedule(std::vector<std::size_t> indices, std::size_t series_size);

    std::span<const std::size_t> indices() const noexcept { return indices_; }
    std::size_t size() const noexcept { return indices_.size(); }

private:
    std::vector<std::size_t> indices_;
};

/// 0, k, 2k, ... below the series length. Requires k >= 1 and a non-empty series.
BuySchedule schedule_every(const PriceSeries& series, std::size_t k);

inline BuySchedule schedule_all(const PriceSeries& series) { return schedule_every(series, 1); }

} // namespace smartdca
