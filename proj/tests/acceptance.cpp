// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failing criteria.

#include "commands.hpp"

#include "smartdca/backtest.hpp"
#include "smartdca/means.hpp"
#include "smartdca/modulators.hpp"
#include "smartdca/proofs.hpp"
#include "smartdca/random.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace smartdca;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t root_seed = 20240229;

// Pinned tolerances and budgets.
constexpr double gas_tol = 1e-12;
constexpr double gas_budget_ms = 1.0;
constexpr double chain_rel_tol = 1e-9;
constexpr double chain_budget_s = 10.0;
constexpr double cs_equality_tol = 1e-12;
constexpr double cs_budget_s = 10.0;
constexpr double lehmer_identity_tol = 1e-9;
constexpr double fd_tol = 1e-7;
constexpr double fd_step = 1e-4;
constexpr double fd_budget_s = 30.0;
constexpr double limit_tol = 1e-6;
constexpr double sim_bounded_tol = 1e-12;

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Criteria {
public:
    void run(int id, const std::string& title, const std::function<Outcome()>& body)
    {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = body();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s criterion %d: %s -- %s [%.1f ms]\n", o.pass ? "PASS" : "FAIL", id, title.c_str(),
                    o.detail.c_str(), ms);
        std::fflush(stdout);
        if (!o.pass) ++failures_;
    }

    int failures() const { return failures_; }

private:
    int failures_ = 0;
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double elapsed_s(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::vector<double> log_uniform_prices(Rng& rng, std::size_t lo_len, std::size_t hi_len, double lo, double hi)
{
    std::vector<double> p(static_cast<std::size_t>(rng.integer(lo_len, hi_len)));
    for (auto& v : p) v = rng.log_uniform(lo, hi);
    return p;
}

Outcome gas_example()
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto m = two_buy_closed_forms(0.5, 1.5);
    const auto s = PriceSeries::from_prices({0.5, 1.5});
    const auto all = schedule_all(s);
    const double ri = *run(s, all, StrategySpec::ri()).mu;
    const double dca = *run(s, all, StrategySpec::dca()).mu;
    const double smart = *run(s, all, StrategySpec::smart(1.0)).mu;
    const double ms = elapsed_s(t0) * 1e3;

    const double err = std::max({std::abs(m.mu_ri - 1.0), std::abs(m.mu_dca - 0.75), std::abs(m.mu_smart - 0.6),
                                 std::abs(ri - 1.0), std::abs(dca - 0.75), std::abs(smart - 0.6)});
    return {err <= gas_tol && ms < gas_budget_ms,
            "max error " + num(err) + " (tol " + num(gas_tol) + "), " + num(ms) + " ms (budget 1 ms)"};
}

Outcome ordering_chain()
{
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(derive_seed(root_seed, 2));
    const std::vector<double> rhos = {-1.0, 0.0, 1.0, 2.0, 3.0};
    std::size_t violations = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 1000; ++i) {
        const auto s = PriceSeries::from_prices(log_uniform_prices(rng, 2, 500, 0.1, 10.0));
        for (const auto& r : ordering_chain_check(s, rhos, Modulator::identity(), ChainVariant::smart,
                                                  {1.0, RefPricePolicy::first_price(), chain_rel_tol})) {
            if (!r.holds) ++violations;
            worst = std::min(worst, r.slack / std::abs(r.lhs));
        }
    }
    const double secs = elapsed_s(t0);
    return {violations == 0 && secs < chain_budget_s,
            "1000 series, " + std::to_string(violations) + " violations, worst relative slack " + num(worst) +
                ", " + num(secs) + " s"};
}

Outcome cauchy_schwarz()
{
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(derive_seed(root_seed, 3));
    std::size_t violations = 0;
    std::size_t equality_mismatch = 0;
    std::size_t constants = 0;
    for (int i = 0; i < 100000; ++i) {
        std::vector<double> p;
        const bool constant = rng.uniform01() < 0.1;
        if (constant) {
            p.assign(static_cast<std::size_t>(rng.integer(1, 50)), rng.log_uniform(0.01, 100.0));
            ++constants;
        } else {
            p = log_uniform_prices(rng, 2, 50, 0.01, 100.0);
        }
        const auto r = cauchy_schwarz_check(p);
        if (!r.holds) ++violations;
        const bool equal = r.slack < cs_equality_tol * r.rhs;
        const bool is_constant = std::all_of(p.begin(), p.end(), [&](double v) { return v == p[0]; });
        if (equal != is_constant) ++equality_mismatch;
    }
    const double secs = elapsed_s(t0);
    return {violations == 0 && equality_mismatch == 0 && secs < cs_budget_s,
            "100000 vectors (" + std::to_string(constants) + " constant), " + std::to_string(violations) +
                " violations, " + std::to_string(equality_mismatch) + " equality mismatches, " + num(secs) + " s"};
}

Outcome lehmer_identity()
{
    Rng rng(derive_seed(root_seed, 4));
    double worst = 0.0;
    std::size_t runs = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto p = log_uniform_prices(rng, 1, 200, 0.1, 10.0);
        const auto s = PriceSeries::from_prices(p);
        const double pr = rng.uniform01() < 0.5 ? p[0] : rng.log_uniform(0.1, 10.0);
        std::vector<double> ratios;
        for (double v : p) ratios.push_back(pr / v);
        const double rho = rng.uniform(-1.0, 3.0);
        for (const auto& spec : {StrategySpec::smart(rho), StrategySpec::f_rho_out(rho, Modulator::identity()),
                                 StrategySpec::f_rho_in(rho, Modulator::identity())}) {
            const auto r = run(s, schedule_all(s), spec.with_ref_price(RefPricePolicy::fixed(pr)));
            const double expected = pr / lehmer_mean(ratios, rho + 1.0);
            worst = std::max(worst, std::abs(*r.mu - expected) / *r.mu);
            ++runs;
        }
    }
    return {worst < lehmer_identity_tol,
            std::to_string(runs) + " backtests, worst relative gap " + num(worst) + " (tol 1e-9)"};
}

Outcome out_monotonicity()
{
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(derive_seed(root_seed, 5));
    std::vector<double> grid;
    for (int k = -4; k <= 20; ++k) grid.push_back(0.25 * k);
    const Modulator mods[] = {Modulator::tanh(), Modulator::sigmoid(), Modulator::sin1()};

    std::size_t failures = 0;
    double worst_mean = std::numeric_limits<double>::infinity();
    double worst_mu = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 1000; ++i) {
        const auto p = log_uniform_prices(rng, 2, 40, 0.1, 10.0);
        const auto s = PriceSeries::from_prices(p);
        std::vector<double> ratios;
        for (double v : p) ratios.push_back(p[0] / v);
        const SampleVector x = ratios;
        for (const auto& f : mods) {
            for (const auto& r : finite_difference_monotonicity(MeanKind::quasi_out, x, f, grid,
                                                                {fd_step, fd_tol, 1.0})) {
                if (!r.holds) ++failures;
                if (r.check.starts_with("fd:")) worst_mean = std::min(worst_mean, r.lhs);
            }
            for (double rho : grid) {
                auto mu = [&](double e) { return *run(s, schedule_all(s), StrategySpec::f_rho_out(e, f)).mu; };
                const double d = -(mu(rho + fd_step) - mu(rho - fd_step)) / (2.0 * fd_step);
                worst_mu = std::min(worst_mu, d);
                if (d < -fd_tol) ++failures;
            }
        }
    }
    const double secs = elapsed_s(t0);
    return {failures == 0 && secs < fd_budget_s,
            "1000 vectors x 3 modulators x 25 exponents, min dL " + num(worst_mean) + ", min d(-mu) " +
                num(worst_mu) + ", " + std::to_string(failures) + " below -1e-7, " + num(secs) + " s"};
}

Outcome in_counterexample()
{
    std::ostringstream detail;
    bool pass = true;
    for (double rho : {1.0, 2.0, 3.0, 5.0}) {
        const auto c = find_in_counterexample(rho);
        const SampleVector x = c.values;
        const double step = quasi_lehmer_in(x, c.rho_at + 0.01, Modulator::sigmoid()) -
                            quasi_lehmer_in(x, c.rho_at, Modulator::sigmoid());
        const bool below = std::all_of(c.values.begin(), c.values.end(),
                                       [&](double v) { return v < std::exp(-1.0 / rho); });
        pass = pass && below && step < 0.0 && c.slope < 0.0;
        detail << "rho=" << rho << ": (" << c.values[0] << ", " << c.values[1] << ") slope " << num(c.slope) << "; ";
    }
    return {pass, detail.str()};
}

Outcome limit_bound()
{
    Rng rng(derive_seed(root_seed, 7));
    double worst_mean = 0.0;
    double worst_mu = 0.0;
    for (int i = 0; i < 1000; ++i) {
        auto p = log_uniform_prices(rng, 2, 50, 0.1, 10.0);
        // Separate the extremes by at least 1.5x.
        std::sort(p.begin(), p.end());
        const double ratio = 1.5 * rng.uniform(1.0, 2.0);
        p.back() = std::max(p.back(), p[p.size() - 2] * ratio);
        p.front() = std::min(p.front(), p[1] / ratio);
        std::vector<double> shuffled = p;
        for (std::size_t k = shuffled.size() - 1; k > 0; --k) {
            std::swap(shuffled[k], shuffled[static_cast<std::size_t>(rng.integer(0, k))]);
        }
        worst_mean = std::max(worst_mean, rel(lehmer_mean(shuffled, 60.0), p.back()));

        const auto s = PriceSeries::from_prices(shuffled);
        const auto spec = StrategySpec::smart(60.0).with_ref_price(RefPricePolicy::fixed(p.front()));
        worst_mu = std::max(worst_mu, rel(*run(s, schedule_all(s), spec).mu, p.front()));
    }
    return {worst_mean < limit_tol && worst_mu < limit_tol,
            "1000 vectors, L_60 vs max " + num(worst_mean) + ", mu_60 vs min " + num(worst_mu) + " (tol 1e-6)"};
}

std::vector<std::vector<std::string>> read_rows(const fs::path& path)
{
    std::ifstream in(path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        rows.push_back(f);
    }
    return rows;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome simulate_figure()
{
    const auto base = fs::temp_directory_path() / "smartdca_acceptance_simulate";
    fs::remove_all(base);
    cli::RunConfig config;  // n = 100, uniform (0, 2), c_b = 1, p_r = 1, rho 0..3
    std::ostringstream out, err;
    config.out_dir = base / "a";
    const int code_a = cli::cmd_simulate(config, out, err);
    config.out_dir = base / "b";
    const int code_b = cli::cmd_simulate(config, out, err);
    if (code_a != 0 || code_b != 0) return {false, "simulate exited with " + std::to_string(code_a) + ": " + err.str()};

    bool identical = true;
    for (const char* f : {"simulate_mu.csv", "simulate_investments.csv", "metadata.json"}) {
        identical = identical && slurp(base / "a" / f) == slurp(base / "b" / f);
    }

    std::map<std::string, double> dca_mu;
    for (const auto& r : read_rows(base / "a" / "simulate_mu.csv")) {
        if (r[1] == "dca") dca_mu[r[0]] = std::stod(r[3]);
    }
    std::size_t above_dca = 0;
    double bounded_max = 0.0;
    double rho3_max = 0.0;
    for (const auto& r : read_rows(base / "a" / "simulate_mu.csv")) {
        const double rho = std::stod(r[0]);
        const double mu = std::stod(r[3]);
        const double peak = std::stod(r[4]);
        if (rho >= 0.0 && mu > dca_mu.at(r[0]) * (1.0 + sim_bounded_tol)) ++above_dca;
        if (r[1] == "in" || r[1] == "out") bounded_max = std::max(bounded_max, peak);
        if (r[1] == "rho" && rho == 3.0) rho3_max = peak;
    }
    const bool pass = identical && above_dca == 0 && rho3_max > 10.0 && bounded_max <= 1.0;
    return {pass, std::string(identical ? "byte-identical reruns" : "reruns differ") + ", " +
                      std::to_string(above_dca) + " variants above DCA, max buy rho=3 " + num(rho3_max) +
                      ", max bounded buy " + num(bounded_max)};
}

Outcome appreciating_series()
{
    const auto series = load_csv(SMARTDCA_SAMPLE_CSV);
    const std::vector<StrategySpec> specs = {StrategySpec::dca(), StrategySpec::smart(1.0), StrategySpec::smart(2.0),
                                             StrategySpec::smart(3.0)};
    const auto rows = compare(series, schedule_all(series), specs);
    for (const auto& r : rows) {
        if (!r.report) return {false, r.strategy.label() + " failed: " + r.error};
    }
    const auto& dca = *rows[0].report;
    const auto& r1 = *rows[1].report;
    const auto& r3 = *rows[3].report;
    const bool roi_order = *r3.roi >= *r1.roi && *r1.roi >= *dca.roi;
    const bool mu_order = *r3.mu <= *r1.mu && *r1.mu <= *dca.mu;
    const bool appreciating = series.last_price() > series.price(0);

    const auto year = Duration::parse("1y");
    const auto dca_w = sliding_windows(series, StrategySpec::dca(), year, year);
    std::size_t bad_windows = 0;
    std::size_t checked = 0;
    for (const auto& smart : {StrategySpec::smart(1.0), StrategySpec::smart(2.0), StrategySpec::smart(3.0),
                              StrategySpec::f_rho_out(1.0, Modulator::tanh()), StrategySpec::sig_plus()}) {
        const auto w = sliding_windows(series, smart, year, year);
        for (std::size_t i = 0; i < w.size(); ++i) {
            ++checked;
            if (*w[i].mu > *dca_w[i].mu) ++bad_windows;
        }
    }
    return {appreciating && roi_order && mu_order && bad_windows == 0,
            "ROI dca/rho1/rho3 " + num(*dca.roi) + "/" + num(*r1.roi) + "/" + num(*r3.roi) + ", " +
                std::to_string(dca_w.size()) + " one-year windows, " + std::to_string(bad_windows) + " of " +
                std::to_string(checked) + " window runs above DCA"};
}

Outcome calibration()
{
    const std::vector<double> prices = {1.0, 2.0, 4.0};
    const auto c = calibrate_sig_plus_window(prices);
    const auto f = c.modulator();
    const bool pass = c.x0 == 0.625 && c.lambda == 0.09375 && f(c.y_min) < 0.05 && f(c.y_max) > 0.95;
    return {pass, "x0 " + std::to_string(c.x0) + ", lambda " + std::to_string(c.lambda) + ", f(y_min) " +
                      num(f(c.y_min)) + ", f(y_max) " + num(f(c.y_max))};
}

} // namespace

int main()
{
    Criteria c;
    c.run(1, "two-buy gas example", gas_example);
    c.run(2, "ordering chain ri >= dca >= rho1 >= rho2 >= rho3 >= min", ordering_chain);
    c.run(3, "Cauchy-Schwarz with equality on constant vectors", cauchy_schwarz);
    c.run(4, "price per unit equals p_r over a Lehmer mean", lehmer_identity);
    c.run(5, "out-variant monotonicity by finite differences", out_monotonicity);
    c.run(6, "in-variant counterexamples", in_counterexample);
    c.run(7, "limit at rho = 60", limit_bound);
    c.run(8, "uniform-price simulation", simulate_figure);
    c.run(9, "appreciating sample series and yearly windows", appreciating_series);
    c.run(10, "sig+ calibration", calibration);
    std::printf("%d of 10 criteria failed\n", c.failures());
    return c.failures();
}
