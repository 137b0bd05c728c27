#include "smartdca/marketdata.hpp"

#include "smartdca/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <random>

namespace smartdca {

namespace chr = std::chrono;

const char* to_string(DataErrorKind kind)
{
    switch (kind) {
    case DataErrorKind::io: return "io";
    case DataErrorKind::missing_column: return "missing_column";
    case DataErrorKind::bad_timestamp: return "bad_timestamp";
    case DataErrorKind::bad_price: return "bad_price";
    case DataErrorKind::non_positive_price: return "non_positive_price";
    case DataErrorKind::unsorted: return "unsorted";
    case DataErrorKind::duplicate_timestamp: return "duplicate_timestamp";
    case DataErrorKind::empty: return "empty";
    }
    return "unknown";
}

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = s.substr(1, s.size() - 2);
    }
    return s;
}

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

template <class Int>
std::optional<Int> parse_int(std::string_view s)
{
    Int v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<Timestamp> try_parse_timestamp(std::string_view text)
{
    text = trim(text);
    if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
        const auto y = parse_int<int>(text.substr(0, 4));
        const auto m = parse_int<unsigned>(text.substr(5, 2));
        const auto d = parse_int<unsigned>(text.substr(8, 2));
        if (!y || !m || !d) return std::nullopt;
        const chr::year_month_day ymd{chr::year{*y}, chr::month{*m}, chr::day{*d}};
        if (!ymd.ok()) return std::nullopt;
        return Timestamp::from_days(chr::sys_days{ymd}.time_since_epoch().count());
    }
    if (const auto n = parse_int<std::int64_t>(text)) {
        return Timestamp::tick(*n);
    }
    return std::nullopt;
}

std::optional<double> parse_double(std::string_view s)
{
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<std::size_t> find_column(const std::vector<std::string_view>& header,
                                       const std::string& wanted,
                                       std::initializer_list<const char*> fallbacks)
{
    auto lookup = [&](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (lower(header[i]) == lower(name)) return i;
        }
        return std::nullopt;
    };
    if (!wanted.empty()) return lookup(wanted);
    for (const char* name : fallbacks) {
        if (auto i = lookup(name)) return i;
    }
    return std::nullopt;
}

chr::year_month_day to_ymd(std::int64_t days)
{
    return chr::year_month_day{chr::sys_days{chr::days{days}}};
}

} // namespace

Timestamp Timestamp::date(int year, unsigned month, unsigned day)
{
    const chr::year_month_day ymd{chr::year{year}, chr::month{month}, chr::day{day}};
    if (!ymd.ok()) {
        throw DomainError("invalid calendar date");
    }
    return from_days(chr::sys_days{ymd}.time_since_epoch().count());
}

Timestamp Timestamp::parse(std::string_view text)
{
    if (auto t = try_parse_timestamp(text)) return *t;
    throw DomainError("cannot parse timestamp '" + std::string(text) + "'");
}

std::int64_t Timestamp::year(std::int64_t ticks_per_year) const
{
    if (kind_ == Kind::date) {
        return static_cast<int>(to_ymd(value_).year());
    }
    if (ticks_per_year <= 0) {
        throw DomainError("ticks_per_year must be positive");
    }
    const std::int64_t shifted = value_ - 1;
    return shifted >= 0 ? shifted / ticks_per_year : -((-shifted + ticks_per_year - 1) / ticks_per_year);
}

std::string Timestamp::to_string() const
{
    if (kind_ == Kind::tick) {
        return std::to_string(value_);
    }
    const auto ymd = to_ymd(value_);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Duration Duration::parse(std::string_view text)
{
    text = trim(text);
    if (text.size() < 2) {
        throw ConfigError("duration '" + std::string(text) + "' must look like 1y, 6m, 30d or 250t");
    }
    const auto count = parse_int<std::int64_t>(text.substr(0, text.size() - 1));
    if (!count || *count <= 0) {
        throw ConfigError("duration '" + std::string(text) + "' needs a positive count");
    }
    Duration d;
    d.count = *count;
    switch (text.back()) {
    case 'd': d.unit = Unit::days; break;
    case 'm': d.unit = Unit::months; break;
    case 'y': d.unit = Unit::years; break;
    case 't': d.unit = Unit::ticks; break;
    default: throw ConfigError("duration '" + std::string(text) + "' has unknown unit");
    }
    return d;
}

std::string Duration::to_string() const
{
    const char suffix = unit == Unit::days ? 'd' : unit == Unit::months ? 'm' : unit == Unit::years ? 'y' : 't';
    return std::to_string(count) + suffix;
}

Timestamp advance(const Timestamp& t, const Duration& d, std::int64_t ticks_per_year)
{
    if (!t.is_date()) {
        switch (d.unit) {
        case Duration::Unit::ticks: return Timestamp::tick(t.value() + d.count);
        case Duration::Unit::years: return Timestamp::tick(t.value() + d.count * ticks_per_year);
        default: throw ConfigError("tick series accept only tick (t) or year (y) durations");
        }
    }
    switch (d.unit) {
    case Duration::Unit::days:
        return Timestamp::from_days(t.value() + d.count);
    case Duration::Unit::months:
    case Duration::Unit::years: {
        const auto months = chr::months{d.unit == Duration::Unit::years ? d.count * 12 : d.count};
        const auto ymd = to_ymd(t.value());
        auto shifted = chr::year_month{ymd.year(), ymd.month()} + months;
        const auto last = chr::year_month_day_last{shifted.year(), chr::month_day_last{shifted.month()}};
        const auto day = std::min(ymd.day(), last.day());
        const chr::year_month_day out{shifted.year(), shifted.month(), day};
        return Timestamp::from_days(chr::sys_days{out}.time_since_epoch().count());
    }
    case Duration::Unit::ticks:
        throw ConfigError("date series do not accept tick durations");
    }
    return t;
}

PriceSeries::PriceSeries(std::vector<Timestamp> timestamps, std::vector<double> prices)
    : timestamps_(std::move(timestamps)), prices_(std::move(prices))
{
    if (timestamps_.size() != prices_.size()) {
        throw DomainError("timestamp and price counts differ");
    }
    for (std::size_t i = 0; i < prices_.size(); ++i) {
        if (!(prices_[i] > 0.0) || !std::isfinite(prices_[i])) {
            throw DataError(DataErrorKind::non_positive_price, 0,
                            "price at index " + std::to_string(i) + " must be positive and finite");
        }
        if (i == 0) continue;
        if (timestamps_[i].kind() != timestamps_[0].kind()) {
            throw DataError(DataErrorKind::bad_timestamp, 0, "mixed date and tick timestamps");
        }
        if (timestamps_[i] == timestamps_[i - 1]) {
            throw DataError(DataErrorKind::duplicate_timestamp, 0,
                            "duplicate timestamp " + timestamps_[i].to_string());
        }
        if (timestamps_[i] < timestamps_[i - 1]) {
            throw DataError(DataErrorKind::unsorted, 0,
                            "timestamp " + timestamps_[i].to_string() + " is before its predecessor");
        }
    }
}

PriceSeries PriceSeries::from_prices(std::vector<double> prices)
{
    std::vector<Timestamp> ticks;
    ticks.reserve(prices.size());
    for (std::size_t i = 0; i < prices.size(); ++i) {
        ticks.push_back(Timestamp::tick(static_cast<std::int64_t>(i) + 1));
    }
    return PriceSeries(std::move(ticks), std::move(prices));
}

PriceSeries PriceSeries::slice(std::size_t first, std::size_t last) const
{
    last = std::min(last, size());
    first = std::min(first, last);
    return PriceSeries(std::vector<Timestamp>(timestamps_.begin() + first, timestamps_.begin() + last),
                       std::vector<double>(prices_.begin() + first, prices_.begin() + last));
}

PriceSeries PriceSeries::between(const Timestamp& from, const Timestamp& to) const
{
    const auto lo = std::lower_bound(timestamps_.begin(), timestamps_.end(), from);
    const auto hi = std::lower_bound(timestamps_.begin(), timestamps_.end(), to);
    return slice(static_cast<std::size_t>(lo - timestamps_.begin()),
                 static_cast<std::size_t>(std::max(lo, hi) - timestamps_.begin()));
}

PriceSeries parse_csv(std::istream& in, const CsvColumns& columns)
{
    std::vector<Timestamp> timestamps;
    std::vector<double> prices;
    std::optional<std::size_t> time_col;
    std::optional<std::size_t> price_col;

    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (row == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (trim(line).empty()) continue;
        const auto fields = split(line);

        if (!time_col) {
            const bool explicit_names = !columns.time_column.empty() || !columns.price_column.empty();
            const bool headerless = !explicit_names && fields.size() >= 2 &&
                                    try_parse_timestamp(fields[0]).has_value();
            if (headerless) {
                time_col = 0;
                price_col = 1;
            } else {
                time_col = find_column(fields, columns.time_column, {"date", "tick", "time", "timestamp"});
                price_col = find_column(fields, columns.price_column, {"price", "close"});
                if (!time_col) {
                    throw DataError(DataErrorKind::missing_column, row,
                                    "no time column" + (columns.time_column.empty() ? std::string{}
                                                                                   : " '" + columns.time_column + "'"));
                }
                if (!price_col) {
                    throw DataError(DataErrorKind::missing_column, row,
                                    "no price column" + (columns.price_column.empty() ? std::string{}
                                                                                     : " '" + columns.price_column + "'"));
                }
                continue;
            }
        }

        if (fields.size() <= std::max(*time_col, *price_col)) {
            throw DataError(DataErrorKind::missing_column, row, "record has too few fields");
        }
        const auto t = try_parse_timestamp(fields[*time_col]);
        if (!t || (!timestamps.empty() && t->kind() != timestamps.front().kind())) {
            throw DataError(DataErrorKind::bad_timestamp, row,
                            "bad timestamp '" + std::string(fields[*time_col]) + "'");
        }
        const auto p = parse_double(fields[*price_col]);
        if (!p || !std::isfinite(*p)) {
            throw DataError(DataErrorKind::bad_price, row, "price '" + std::string(fields[*price_col]) + "' is not a number");
        }
        if (*p <= 0.0) {
            throw DataError(DataErrorKind::non_positive_price, row,
                            "price '" + std::string(fields[*price_col]) + "' must be positive");
        }
        if (!timestamps.empty()) {
            if (*t == timestamps.back()) {
                throw DataError(DataErrorKind::duplicate_timestamp, row, "duplicate timestamp " + t->to_string());
            }
            if (*t < timestamps.back()) {
                throw DataError(DataErrorKind::unsorted, row,
                                "timestamp " + t->to_string() + " is before " + timestamps.back().to_string());
            }
        }
        timestamps.push_back(*t);
        prices.push_back(*p);
    }
    if (prices.empty()) {
        throw DataError(DataErrorKind::empty, 0, "no price records");
    }
    return PriceSeries(std::move(timestamps), std::move(prices));
}

PriceSeries load_csv(const std::filesystem::path& path, const CsvColumns& columns)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError(DataErrorKind::io, 0, "cannot open " + path.string());
    }
    return parse_csv(in, columns);
}

void write_csv(const PriceSeries& series, std::ostream& out)
{
    const bool dates = !series.empty() && series.timestamp(0).is_date();
    out << (dates ? "date,price\n" : "tick,price\n");
    char buf[64];
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, series.price(i));
        out << series.timestamp(i).to_string() << ',' << std::string_view(buf, static_cast<std::size_t>(end - buf))
            << '\n';
    }
}

void save_csv(const PriceSeries& series, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError(DataErrorKind::io, 0, "cannot write " + path.string());
    }
    write_csv(series, out);
}

PriceSeries synth_uniform(std::size_t n, double lo, double hi, std::uint64_t seed)
{
    if (n == 0) {
        throw DomainError("synth_uniform needs n >= 1");
    }
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo < 0.0 || !(lo < hi)) {
        throw DomainError("synth_uniform needs 0 <= lo < hi");
    }
    const double a = std::max(lo, uniform_price_floor);
    if (!(a < hi)) {
        throw DomainError("synth_uniform upper bound must exceed the price floor 1e-6");
    }
    std::mt19937_64 engine(seed);
    std::vector<double> prices(n);
    for (auto& p : prices) {
        // (k + 0.5) / 2^53 lies strictly inside (0, 1).
        const double u = (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
        p = std::clamp(a + (hi - a) * u, std::nextafter(a, hi), std::nextafter(hi, a));
    }
    return PriceSeries::from_prices(std::move(prices));
}

BuySchedule::BuySchedule(std::vector<std::size_t> indices, std::size_t series_size)
    : indices_(std::move(indices))
{
    if (indices_.empty()) {
        throw DomainError("buy schedule must not be empty");
    }
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        if (indices_[i] >= series_size) {
            throw DomainError("buy schedule index " + std::to_string(indices_[i]) + " is out of range");
        }
        if (i > 0 && indices_[i] <= indices_[i - 1]) {
            throw DomainError("buy schedule indices must be strictly increasing");
        }
    }
}

BuySchedule schedule_every(const PriceSeries& series, std::size_t k)
{
    if (k == 0) {
        throw DomainError("schedule step must be >= 1");
    }
    if (series.empty()) {
        throw DomainError("cannot schedule buys on an empty series");
    }
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < series.size(); i += k) {
        idx.push_back(i);
    }
    return BuySchedule(std::move(idx), series.size());
}

} // namespace smartdca
