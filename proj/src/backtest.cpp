#include "smartdca/backtest.hpp"

#include "smartdca/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace smartdca {

namespace {

// sig+ modulators keyed by the year they are used in: fitted on the previous
// year with data, or on the year itself when no earlier data exists.
std::map<std::int64_t, Modulator> sig_plus_schedule(const PriceSeries& series, std::int64_t ticks_per_year)
{
    std::map<std::int64_t, std::vector<double>> by_year;
    for (std::size_t i = 0; i < series.size(); ++i) {
        by_year[series.timestamp(i).year(ticks_per_year)].push_back(series.price(i));
    }
    std::map<std::int64_t, Modulator> out;
    const std::vector<double>* previous = nullptr;
    for (const auto& [year, prices] : by_year) {
        out.emplace(year, calibrate_sig_plus(previous ? *previous : prices));
        previous = &prices;
    }
    return out;
}

} // namespace

void Ledger::Accumulator::add(double x)
{
    const double s = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
        carry += (sum - s) + x;
    } else {
        carry += (x - s) + sum;
    }
    sum = s;
}

void Ledger::add(const Timestamp& time, const BuyOrder& order)
{
    entries_.push_back({time, order});
    cash_.add(order.cash);
    quantity_.add(order.quantity);
}

const char* to_string(RunStatus s)
{
    return s == RunStatus::ok ? "ok" : "no_purchase";
}

Ledger run_ledger(const PriceSeries& series, const BuySchedule& schedule, const StrategySpec& spec,
                  const BacktestOptions& options)
{
    spec.validate();
    if (series.empty()) {
        throw DomainError("cannot backtest an empty series");
    }
    if (schedule.indices().back() >= series.size()) {
        throw DomainError("buy schedule does not fit the series");
    }
    const double ref_price = resolve_ref_price(spec, series);

    std::map<std::int64_t, Modulator> sig_plus;
    if (spec.variant == Variant::sig_plus) {
        sig_plus = sig_plus_schedule(series, options.ticks_per_year);
    }

    Ledger ledger;
    StrategySpec current = spec;
    for (std::size_t idx : schedule.indices()) {
        const Timestamp& t = series.timestamp(idx);
        if (spec.variant == Variant::sig_plus) {
            current.modulator = sig_plus.at(t.year(options.ticks_per_year));
        }
        try {
            ledger.add(t, make_order(current, series.price(idx), ref_price));
        } catch (const InvestmentCapError& e) {
            throw e.at(t.to_string());
        }
    }
    return ledger;
}

BacktestReport summarize(const Ledger& ledger, const StrategySpec& spec, const PriceSeries& series,
                         double ref_price)
{
    BacktestReport r;
    r.strategy = spec;
    r.ref_price = ref_price;
    r.final_price = series.last_price();
    r.start = series.timestamp(0);
    r.end = series.timestamps().back();
    r.buys = ledger.size();
    r.c_tot = ledger.c_tot();
    r.q_tot = ledger.q_tot();

    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& e : ledger.entries()) {
        r.max_single_investment = std::max(r.max_single_investment, e.order.cash);
        if (e.order.quantity > 0.0) {
            lo = std::min(lo, e.order.price);
            hi = std::max(hi, e.order.price);
        }
    }
    if (!(r.q_tot > 0.0) || !(r.c_tot > 0.0)) {
        r.status = RunStatus::no_purchase;
        return r;
    }
    r.mu = std::clamp(r.c_tot / r.q_tot, lo, hi);
    r.roi = (r.q_tot * r.final_price - r.c_tot) / r.c_tot;
    return r;
}

BacktestReport run(const PriceSeries& series, const BuySchedule& schedule, const StrategySpec& spec,
                   const BacktestOptions& options)
{
    const Ledger ledger = run_ledger(series, schedule, spec, options);
    return summarize(ledger, spec, series, resolve_ref_price(spec, series));
}

std::vector<BacktestReport> sliding_windows(const PriceSeries& series, const StrategySpec& spec,
                                            const Duration& window_len, const Duration& step,
                                            std::size_t every, const BacktestOptions& options)
{
    if (series.empty()) {
        throw DomainError("cannot window an empty series");
    }
    const Timestamp first = series.timestamp(0);
    const Timestamp last = series.timestamps().back();
    // The last observation covers one day (or tick) of the span.
    const Timestamp span_end = last.is_date() ? Timestamp::from_days(last.value() + 1) : Timestamp::tick(last.value() + 1);

    std::vector<BacktestReport> reports;
    Timestamp start = first;
    for (std::int64_t k = 1;; ++k) {
        const Timestamp end = advance(start, window_len, options.ticks_per_year);
        if (end > span_end) break;
        const PriceSeries window = series.between(start, end);
        if (!window.empty()) {
            auto report = run(window, schedule_every(window, every), spec, options);
            report.start = start;
            reports.push_back(std::move(report));
        }
        Duration offset = step;
        offset.count = step.count * k;
        const Timestamp next = advance(first, offset, options.ticks_per_year);
        if (!(next > start)) {
            throw DomainError("window step must move forward");
        }
        start = next;
    }
    if (reports.empty()) {
        throw DomainError("window " + window_len.to_string() + " is longer than the series");
    }
    return reports;
}

std::vector<ComparisonRow> compare(const PriceSeries& series, const BuySchedule& schedule,
                                   std::span<const StrategySpec> specs, const BacktestOptions& options)
{
    if (specs.empty()) {
        throw ConfigError("compare needs at least one strategy");
    }
    std::vector<ComparisonRow> rows;
    rows.reserve(specs.size());
    for (const auto& spec : specs) {
        ComparisonRow row{spec, std::nullopt, {}};
        try {
            row.report = run(series, schedule, spec, options);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace smartdca
