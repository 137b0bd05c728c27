#pragma once

#include "smartdca/marketdata.hpp"
#include "smartdca/strategy.hpp"

#include <optional>
#include <string>
#include <vector>

namespace smartdca {

struct LedgerEntry {
    Timestamp time;
    BuyOrder order;
};

/// Append-only record of purchases with compensated running totals.
class Ledger {
public:
    void add(const Timestamp& time, const BuyOrder& order);

    std::span<const LedgerEntry> entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    double c_tot() const noexcept { return cash_.value(); }
    double q_tot() const noexcept { return quantity_.value(); }

private:
    // Neumaier running sum.
    struct Accumulator {
        double sum = 0.0;
        double carry = 0.0;
        void add(double x);
        double value() const noexcept { return sum + carry; }
    };

    std::vector<LedgerEntry> entries_;
    Accumulator cash_;
    Accumulator quantity_;
};

enum class RunStatus { ok, no_purchase };

const char* to_string(RunStatus s);

struct BacktestReport {
    StrategySpec strategy;
    RunStatus status = RunStatus::ok;
    std::optional<double> mu;   ///< c_tot / q_tot; empty when nothing was bought
    double q_tot = 0.0;
    double c_tot = 0.0;
    std::optional<double> roi;  ///< (q_tot * final_price - c_tot) / c_tot
    double final_price = 0.0;   ///< last price of the (window) series
    double ref_price = 0.0;
    std::size_t buys = 0;
    double max_single_investment = 0.0;
    Timestamp start = Timestamp::tick(0);
    Timestamp end = Timestamp::tick(0);
    std::vector<BacktestReport> windows;
};

struct BacktestOptions {
    /// Length of a "year" on tick series, for sig+ recalibration and year windows.
    std::int64_t ticks_per_year = 365;
};

/// Applies the strategy at every scheduled index. Throws InvestmentCapError
/// naming the offending timestamp when a buy exceeds the cap.
Ledger run_ledger(const PriceSeries& series, const BuySchedule& schedule, const StrategySpec& spec,
                  const BacktestOptions& options = {});

/// Summary of a ledger. mu is clamped into [min buy price, max buy price],
/// the interval that contains the exact value.
BacktestReport summarize(const Ledger& ledger, const StrategySpec& spec, const PriceSeries& series,
                         double ref_price);

BacktestReport run(const PriceSeries& series, const BuySchedule& schedule, const StrategySpec& spec,
                   const BacktestOptions& options = {});

/// Independent runs over [start, start + window_len) for start = first,
/// first + step, ... while the window fits in the series. Each window
/// re-resolves p_r and buys every `every`-th point. Throws DomainError when
/// not even one window fits.
std::vector<BacktestReport> sliding_windows(const PriceSeries& series, const StrategySpec& spec,
                                            const Duration& window_len, const Duration& step,
                                            std::size_t every = 1, const BacktestOptions& options = {});

struct ComparisonRow {
    StrategySpec strategy;
    std::optional<BacktestReport> report;  ///< empty when the run failed
    std::string error;
};

/// One row per strategy, in the given order. A failing strategy yields a
/// row with an error message instead of a report.
std::vector<ComparisonRow> compare(const PriceSeries& series, const BuySchedule& schedule,
                                   std::span<const StrategySpec> specs, const BacktestOptions& options = {});

} // namespace smartdca
