#include "smartdca/proofs.hpp"

#include "smartdca/error.hpp"
#include "smartdca/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace smartdca {

namespace {

void require_positive(double p, const char* what)
{
    if (!(p > 0.0) || !std::isfinite(p)) {
        throw DomainError(std::string(what) + " must be positive and finite");
    }
}

std::string fmt(double v)
{
    std::ostringstream os;
    os << v;
    return os.str();
}

std::vector<double> random_prices(Rng& rng, std::size_t min_len, std::size_t max_len, double lo, double hi)
{
    const auto n = static_cast<std::size_t>(rng.integer(static_cast<std::int64_t>(min_len),
                                                        static_cast<std::int64_t>(max_len)));
    std::vector<double> out(n);
    for (auto& p : out) p = rng.log_uniform(lo, hi);
    return out;
}

double relative_error(double value, double expected)
{
    return std::abs(value - expected) / std::abs(expected);
}

// Equality as an inequality: -|rel error| >= 0 within tol.
InequalityReport make_equality(std::string check, double value, double expected, double rel_tol,
                               std::vector<double> witness = {})
{
    auto r = make_inequality(std::move(check), -relative_error(value, expected), 0.0, rel_tol, std::move(witness));
    r.note = "value=" + fmt(value) + " expected=" + fmt(expected);
    return r;
}

InequalityReport flipped(InequalityReport r)
{
    std::swap(r.lhs, r.rhs);
    r.slack = -r.slack;
    r.holds = r.slack >= -r.tolerance;
    r.note = "sign-flip fault injected; " + r.note;
    return r;
}

std::vector<double> uniform_grid(double lo, double hi, double step)
{
    std::vector<double> g;
    const auto n = static_cast<int>(std::llround((hi - lo) / step));
    for (int i = 0; i <= n; ++i) g.push_back(lo + step * i);
    return g;
}

PriceSeries random_series(Rng& rng, std::size_t min_len, std::size_t max_len, double lo, double hi)
{
    return PriceSeries::from_prices(random_prices(rng, min_len, max_len, lo, hi));
}

std::vector<double> ratios(const PriceSeries& s, double ref)
{
    std::vector<double> r(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) r[i] = ref / s.price(i);
    return r;
}

} // namespace

InequalityReport make_inequality(std::string check, double lhs, double rhs, double tolerance,
                                 std::vector<double> witness)
{
    InequalityReport r;
    r.check = std::move(check);
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = lhs - rhs;
    r.tolerance = tolerance;
    r.holds = r.slack >= -tolerance;
    r.witness = std::move(witness);
    return r;
}

void merge_worst(InequalityReport& into, const InequalityReport& other)
{
    const std::size_t cases = into.cases + other.cases;
    const bool holds = into.holds && other.holds;
    // A failing case always wins; among equals, the smaller margin wins.
    const bool take = (!other.holds && into.holds) ||
                      (other.holds == into.holds && other.slack + other.tolerance < into.slack + into.tolerance);
    if (take) {
        const std::string check = into.check;
        into = other;
        into.check = check;
    }
    into.cases = cases;
    into.holds = holds;
}

TwoBuyMeans two_buy_closed_forms(double p1, double p2)
{
    require_positive(p1, "p1");
    require_positive(p2, "p2");
    TwoBuyMeans m;
    m.mu_ri = (p1 + p2) / 2.0;
    m.mu_dca = 2.0 * p1 * p2 / (p1 + p2);
    m.mu_smart = p1 * p2 * (p1 + p2) / (p1 * p1 + p2 * p2);
    return m;
}

double mu_n_closed_form(double p1, double p2, double n)
{
    require_positive(p1, "p1");
    require_positive(p2, "p2");
    if (!std::isfinite(n)) {
        throw DomainError("n must be finite");
    }
    // Normalize so the powers stay within [0, 1] for n >= 0 (and >= 1 below).
    const double s = n >= 0.0 ? std::max(p1, p2) : std::min(p1, p2);
    const double a = p1 / s;
    const double b = p2 / s;
    return p1 * p2 * (std::pow(a, n) + std::pow(b, n)) / (s * (std::pow(a, n + 1.0) + std::pow(b, n + 1.0)));
}

InequalityReport cauchy_schwarz_check(const SampleVector& prices, double rel_tol)
{
    const double m = static_cast<double>(prices.size());
    const double lo = prices.min();
    std::vector<double> y(prices.size());
    std::vector<double> y2(prices.size());
    for (std::size_t i = 0; i < prices.size(); ++i) {
        y[i] = lo / prices[i];
        y2[i] = y[i] * y[i];
    }
    const double sum = compensated_sum(y);
    const double lhs = m * compensated_sum(y2);
    const double rhs = sum * sum;
    return make_inequality("cauchy_schwarz", lhs, rhs, rel_tol * rhs,
                           std::vector<double>(prices.begin(), prices.end()));
}

const char* to_string(MeanKind k)
{
    switch (k) {
    case MeanKind::lehmer: return "lehmer";
    case MeanKind::quasi_out: return "quasi_out";
    case MeanKind::quasi_in: return "quasi_in";
    case MeanKind::moment: return "moment";
    }
    return "unknown";
}

double evaluate_mean(MeanKind kind, const SampleVector& x, const Modulator& f, double rho, double xi)
{
    switch (kind) {
    case MeanKind::lehmer: return lehmer_mean(x, rho);
    case MeanKind::quasi_out: return quasi_lehmer_out(x, rho, f);
    case MeanKind::quasi_in: return quasi_lehmer_in(x, rho, f);
    case MeanKind::moment: return quasi_lehmer_moment(x, rho, xi, f);
    }
    return 0.0;
}

std::vector<InequalityReport> finite_difference_monotonicity(MeanKind kind, const SampleVector& x,
                                                             const Modulator& f,
                                                             std::span<const double> rho_grid,
                                                             const FiniteDifferenceOptions& options)
{
    if (rho_grid.empty()) {
        throw ConfigError("finite-difference grid is empty");
    }
    for (std::size_t i = 1; i < rho_grid.size(); ++i) {
        if (!(rho_grid[i] > rho_grid[i - 1])) {
            throw ConfigError("finite-difference grid must be strictly ascending");
        }
        if (rho_grid[i] - rho_grid[i - 1] > 0.5) {
            throw ConfigError("finite-difference grid step " + fmt(rho_grid[i] - rho_grid[i - 1]) +
                              " is coarser than 0.5");
        }
    }
    if (!(options.step > 0.0)) {
        throw ConfigError("finite-difference step must be positive");
    }

    const std::vector<double> witness(x.begin(), x.end());
    std::vector<InequalityReport> out;
    out.reserve(rho_grid.size() + 1);
    const double h = options.step;
    for (double rho : rho_grid) {
        const double d = (evaluate_mean(kind, x, f, rho + h, options.xi) -
                          evaluate_mean(kind, x, f, rho - h, options.xi)) / (2.0 * h);
        auto r = make_inequality(std::string("fd:") + to_string(kind) + ":" + f.name() + ":rho=" + fmt(rho), d, 0.0,
                                 options.tolerance, witness);
        out.push_back(std::move(r));
    }

    if (kind == MeanKind::quasi_in) {
        return out;
    }
    const Modulator g = kind == MeanKind::lehmer ? Modulator::identity() : f;
    std::vector<double> v(x.size());
    std::vector<double> lf(x.size());
    double scale = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        v[i] = kind == MeanKind::moment ? std::pow(x[i], options.xi) : x[i];
        lf[i] = g.log_eval(x[i]);
        scale = std::max(scale, std::abs(v[i]));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            worst = std::min(worst, (v[i] - v[j]) * (lf[i] - lf[j]));
        }
    }
    out.push_back(make_inequality(std::string("pair_summands:") + to_string(kind) + ":" + f.name(), worst, 0.0,
                                  1e-12 * scale, witness));
    return out;
}

InCounterexample find_in_counterexample(double rho)
{
    if (!(rho > 0.0) || !std::isfinite(rho)) {
        throw DomainError("counterexample search needs rho > 0");
    }
    const double threshold = std::exp(-1.0 / rho);
    const Modulator f = Modulator::sigmoid();
    constexpr double dx = 0.01;
    constexpr double drho = 0.01;
    constexpr int rho_steps = 100;

    std::vector<double> grid;
    for (int k = 1; dx * k < threshold; ++k) grid.push_back(dx * k);

    InCounterexample best;
    std::vector<double> curve(rho_steps + 1);
    for (std::size_t a = 0; a < grid.size(); ++a) {
        for (std::size_t b = a + 1; b < grid.size(); ++b) {
            const SampleVector x{grid[a], grid[b]};
            for (int j = 0; j <= rho_steps; ++j) curve[j] = quasi_lehmer_in(x, rho + drho * j, f);
            for (int j = 0; j < rho_steps; ++j) {
                const double slope = (curve[j + 1] - curve[j]) / drho;
                if (slope < best.slope) {
                    best.values = {grid[a], grid[b]};
                    best.rho_at = rho + drho * j;
                    best.slope = slope;
                }
            }
        }
    }
    if (best.values.empty()) {
        throw std::runtime_error("no decreasing quasi-Lehmer in-mean found below exp(-1/rho) for rho=" + fmt(rho));
    }
    return best;
}

std::vector<InequalityReport> ordering_chain_check(const PriceSeries& series, std::span<const double> rhos,
                                                   const Modulator& f, ChainVariant variant,
                                                   const ChainOptions& options)
{
    if (rhos.empty()) {
        throw ConfigError("ordering chain needs at least one rho");
    }
    for (std::size_t i = 1; i < rhos.size(); ++i) {
        if (rhos[i] < rhos[i - 1]) {
            throw ConfigError("ordering chain rhos must be ascending");
        }
    }
    const auto schedule = schedule_all(series);
    std::vector<double> mus;
    std::vector<std::string> labels;
    for (double rho : rhos) {
        StrategySpec spec;
        if (variant == ChainVariant::out) {
            spec = StrategySpec::f_rho_out(rho, f, options.base_cost);
        } else if (rho == -1.0) {
            spec = StrategySpec::ri(options.base_cost);
        } else if (rho == 0.0) {
            spec = StrategySpec::dca(options.base_cost);
        } else {
            spec = StrategySpec::smart(rho, options.base_cost);
        }
        spec.ref_price = options.ref_price;
        const auto report = run(series, schedule, spec, {});
        mus.push_back(report.mu.value_or(std::numeric_limits<double>::quiet_NaN()));
        labels.push_back(spec.label());
    }

    const std::vector<double> witness(series.prices().begin(), series.prices().end());
    std::vector<InequalityReport> out;
    for (std::size_t i = 0; i + 1 < mus.size(); ++i) {
        out.push_back(make_inequality("mu(" + labels[i] + ") >= mu(" + labels[i + 1] + ")", mus[i], mus[i + 1],
                                      options.rel_tol * std::abs(mus[i]), witness));
    }
    const double lowest = *std::min_element(series.prices().begin(), series.prices().end());
    out.push_back(make_inequality("mu(" + labels.back() + ") >= min price", mus.back(), lowest,
                                  options.rel_tol * lowest, witness));
    for (auto& r : out) {
        if (std::isnan(r.lhs) || std::isnan(r.rhs)) {
            r.holds = false;
            r.note = "a strategy bought nothing";
        }
    }
    return out;
}

std::vector<InequalityReport> run_verification_suite(const VerifyOptions& options)
{
    std::vector<InequalityReport> suite;
    std::uint64_t stream = 0;
    const std::size_t n = std::max<std::size_t>(options.random_cases, 1);
    const double tol = options.tolerance;

    auto aggregate = [&](const std::string& name, auto&& body) {
        Rng rng(derive_seed(options.seed, stream++));
        InequalityReport agg;
        agg.check = name;
        agg.cases = 0;
        agg.slack = std::numeric_limits<double>::infinity();
        body(rng, [&](const InequalityReport& r) { merge_worst(agg, r); });
        if (agg.cases == 0) {
            agg.holds = false;
            agg.note = "no cases ran";
        }
        suite.push_back(std::move(agg));
    };

    // Worked two-buy example: 1, 0.75, 0.6 per unit.
    aggregate("two_buy.gas_example", [&](Rng&, auto&& add) {
        const auto m = two_buy_closed_forms(0.5, 1.5);
        add(make_equality("ri", m.mu_ri, 1.0, 1e-12, {0.5, 1.5}));
        add(make_equality("dca", m.mu_dca, 0.75, 1e-12, {0.5, 1.5}));
        add(make_equality("smart", m.mu_smart, 0.6, 1e-12, {0.5, 1.5}));
    });

    aggregate("two_buy.ordering", [&](Rng& rng, auto&& add) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p1 = rng.log_uniform(1e-3, 1e3);
            const double p2 = rng.log_uniform(1e-3, 1e3);
            const auto m = two_buy_closed_forms(p1, p2);
            add(make_inequality("ri>=dca", m.mu_ri, m.mu_dca, tol * m.mu_ri, {p1, p2}));
            add(make_inequality("dca>=smart", m.mu_dca, m.mu_smart, tol * m.mu_dca, {p1, p2}));
        }
    });

    aggregate("two_buy.matches_backtest", [&](Rng& rng, auto&& add) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p1 = rng.log_uniform(1e-2, 1e2);
            const double p2 = rng.log_uniform(1e-2, 1e2);
            const auto series = PriceSeries::from_prices({p1, p2});
            const auto sched = schedule_all(series);
            const auto m = two_buy_closed_forms(p1, p2);
            add(make_equality("ri", *run(series, sched, StrategySpec::ri()).mu, m.mu_ri, 1e-12, {p1, p2}));
            add(make_equality("dca", *run(series, sched, StrategySpec::dca()).mu, m.mu_dca, 1e-12, {p1, p2}));
            add(make_equality("smart", *run(series, sched, StrategySpec::smart(1.0)).mu, m.mu_smart, 1e-12, {p1, p2}));
        }
    });

    aggregate("mu_n.non_increasing", [&](Rng& rng, auto&& add) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p1 = rng.log_uniform(1e-2, 1e2);
            const double p2 = rng.log_uniform(1e-2, 1e2);
            for (double k = 0.0; k < 5.0; k += 0.5) {
                const double a = mu_n_closed_form(p1, p2, k);
                const double b = mu_n_closed_form(p1, p2, k + 0.5);
                add(make_inequality("mu_n>=mu_n+0.5", a, b, tol * a, {p1, p2, k}));
            }
        }
    });

    aggregate("mu_n.matches_backtest", [&](Rng& rng, auto&& add) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p1 = rng.log_uniform(1e-1, 1e1);
            const double p2 = rng.log_uniform(1e-1, 1e1);
            const double k = rng.uniform(0.0, 5.0);
            const auto series = PriceSeries::from_prices({p1, p2});
            const auto mu = run(series, schedule_all(series), StrategySpec::smart(k)).mu;
            add(make_equality("mu_n", *mu, mu_n_closed_form(p1, p2, k), 1e-12, {p1, p2, k}));
        }
    });

    aggregate("cauchy_schwarz", [&](Rng& rng, auto&& add) {
        for (std::size_t i = 0; i < 10 * n; ++i) {
            add(cauchy_schwarz_check(random_prices(rng, 1, 100, 1e-4, 1e4)));
        }
    });

    aggregate("lehmer.monotone", [&](Rng& rng, auto&& add) {
        for (std::size_t i = 0; i < n; ++i) {
            const SampleVector x(random_prices(rng, 1, 50, 1e-3, 1e3));
            double a = rng.uniform(-5.0, 10.0);
            double b = rng.uniform(-5.0, 10.0);
            if (a > b) std::swap(a, b);
            add(make_inequality("L(rho')>=L(rho)", lehmer_mean(x, b), lehmer_mean(x, a), 1e-9 * x.max(),
                                std::vector<double>(x.begin(), x.end())));
        }
    });

    aggregate("lehmer.limit_rho60", [&](Rng& rng, auto&& add) {
        for (std::size_t i = 0; i < n; ++i) {
            auto v = random_prices(rng, 2, 100, 1e-2, 1e2);
            std::sort(v.begin(), v.end());
            v.back() = std::max(v.back(), 1.5 * v[v.size() - 2]);
            const SampleVector x(v);
            add(make_equality("L60~max", lehmer_mean(x, 60.0), x.max(), 1e-6, v));
        }
    });

    const std::vector<double> fd_grid = uniform_grid(-1.0, 5.0, 0.25);
    for (const auto& f : {Modulator::identity(), Modulator::tanh(), Modulator::sigmoid(), Modulator::sin1()}) {
        aggregate("fd.quasi_out." + f.name(), [&](Rng& rng, auto&& add) {
            for (std::size_t i = 0; i < n; ++i) {
                const SampleVector x(random_prices(rng, 2, 20, 0.05, 20.0));
                for (const auto& r : finite_difference_monotonicity(MeanKind::quasi_out, x, f, fd_grid)) add(r);
            }
        });
    }

    aggregate("fd.moment.tanh.xi=2", [&](Rng& rng, auto&& add) {
        FiniteDifferenceOptions o;
        o.xi = 2.0;
        for (std::size_t i = 0; i < n; ++i) {
            const SampleVector x(random_prices(rng, 2, 20, 0.05, 5.0));
            for (const auto& r : finite_difference_monotonicity(MeanKind::moment, x, Modulator::tanh(), fd_grid, o)) {
                add(r);
            }
        }
    });

    for (double rho : {1.0, 2.0, 3.0, 5.0}) {
        aggregate("in_counterexample.rho=" + fmt(rho), [&](Rng&, auto&& add) {
            InequalityReport r;
            r.check = "in_counterexample";
            r.tolerance = 0.0;
            try {
                const auto ce = find_in_counterexample(rho);
                const double threshold = std::exp(-1.0 / rho);
                const bool below = std::all_of(ce.values.begin(), ce.values.end(),
                                               [&](double v) { return v < threshold; });
                const std::vector<double> grid{ce.rho_at, ce.rho_at + 0.005, ce.rho_at + 0.01};
                double d_min = std::numeric_limits<double>::infinity();
                for (const auto& fd : finite_difference_monotonicity(MeanKind::quasi_in, SampleVector(ce.values),
                                                                     Modulator::sigmoid(), grid)) {
                    d_min = std::min(d_min, fd.lhs);
                }
                // Holds when L_in is confirmed to decrease: 0 > d_min.
                r.lhs = 0.0;
                r.rhs = d_min;
                r.slack = -d_min;
                r.holds = below && d_min < 0.0;
                r.witness = ce.values;
                r.note = "rho_at=" + fmt(ce.rho_at) + " slope=" + fmt(ce.slope);
            } catch (const std::exception& e) {
                r.holds = false;
                r.note = e.what();
            }
            add(r);
        });
    }

    aggregate("ordering_chain.smart", [&](Rng& rng, auto&& add) {
        ChainOptions o;
        o.rel_tol = tol;
        for (std::size_t i = 0; i < n; ++i) {
            const auto series = random_series(rng, 2, 200, 0.1, 10.0);
            for (const auto& r : ordering_chain_check(series, options.chain_rhos, Modulator::identity(),
                                                      ChainVariant::smart, o)) {
                add(r);
            }
        }
    });

    for (const auto& f : {Modulator::sin1(), Modulator::tanh(), Modulator::sigmoid()}) {
        aggregate("ordering_chain.out." + f.name(), [&](Rng& rng, auto&& add) {
            ChainOptions o;
            o.rel_tol = tol;
            const std::vector<double> rhos{0.0, 1.0, 2.0};
            for (std::size_t i = 0; i < n; ++i) {
                const auto series = random_series(rng, 2, 200, 0.1, 10.0);
                for (const auto& r : ordering_chain_check(series, rhos, f, ChainVariant::out, o)) add(r);
            }
        });
    }

    aggregate("backtest.lehmer_identity", [&](Rng& rng, auto&& add) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto series = random_series(rng, 2, 200, 0.1, 10.0);
            const double ref = series.price(0);
            const SampleVector r(ratios(series, ref));
            for (double rho : options.chain_rhos) {
                const auto mu = run(series, schedule_all(series), StrategySpec::smart(rho)).mu;
                add(make_equality("mu=p_r/L(r)", *mu, ref / lehmer_mean(r, rho + 1.0), 1e-9,
                                  std::vector<double>(series.prices().begin(), series.prices().end())));
            }
        }
    });

    aggregate("backtest.out_identity", [&](Rng& rng, auto&& add) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto series = random_series(rng, 2, 200, 0.1, 10.0);
            const double ref = series.price(0);
            const SampleVector r(ratios(series, ref));
            for (const auto& f : {Modulator::tanh(), Modulator::sigmoid(), Modulator::sin1()}) {
                for (double rho : {0.0, 1.0, 2.0}) {
                    const auto mu = run(series, schedule_all(series), StrategySpec::f_rho_out(rho, f)).mu;
                    add(make_equality("mu=p_r/Lout(r)", *mu, ref / quasi_lehmer_out(r, rho, f), 1e-9,
                                      std::vector<double>(series.prices().begin(), series.prices().end())));
                }
            }
        }
    });

    if (options.inject_sign_flip) {
        for (auto& r : suite) r = flipped(r);
    }
    return suite;
}

} // namespace smartdca
