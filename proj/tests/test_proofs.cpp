#include "smartdca/error.hpp"
#include "smartdca/proofs.hpp"

#include "support/generators.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace smartdca;

TEST_CASE("two-buy closed forms")
{
    const auto gas = two_buy_closed_forms(0.5, 1.5);
    CHECK(gas.mu_ri == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(gas.mu_dca == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(gas.mu_smart == doctest::Approx(0.6).epsilon(1e-12));

    const auto m = two_buy_closed_forms(1.0, 3.0);
    CHECK(m.mu_ri == 2.0);
    CHECK(m.mu_dca == 1.5);
    CHECK(m.mu_smart == doctest::Approx(1.2).epsilon(1e-15));
    CHECK_THROWS_AS(two_buy_closed_forms(0.0, 1.0), DomainError);
}

TEST_CASE("mu_n closed form")
{
    CHECK(mu_n_closed_form(1.0, 2.0, 5.0) == doctest::Approx(66.0 / 65.0).epsilon(1e-15));
    CHECK(mu_n_closed_form(0.5, 1.5, 0.0) == doctest::Approx(0.75));
    CHECK(mu_n_closed_form(0.5, 1.5, 1.0) == doctest::Approx(0.6));
    CHECK(mu_n_closed_form(0.5, 1.5, -1.0) == doctest::Approx(1.0));
    CHECK(mu_n_closed_form(1.0, 2.0, 2000.0) == doctest::Approx(1.0));
    CHECK(mu_n_closed_form(1.0, 2.0, -2000.0) == doctest::Approx(2.0));
    gen::Source src(61);
    for (int i = 0; i < 300; ++i) {
        const double p1 = src.log_uniform(0.01, 100.0);
        const double p2 = src.log_uniform(0.01, 100.0);
        const double n = src.uniform(-5.0, 5.0);
        CHECK(mu_n_closed_form(p1, p2, n) >= mu_n_closed_form(p1, p2, n + 0.25) * (1.0 - 1e-12));
    }
}

TEST_CASE("Cauchy-Schwarz slack is zero exactly on constant vectors")
{
    const auto eq = cauchy_schwarz_check(SampleVector{3.0, 3.0, 3.0});
    CHECK(eq.holds);
    CHECK(eq.slack == 0.0);
    const auto strict = cauchy_schwarz_check(SampleVector{1.0, 2.0});
    CHECK(strict.holds);
    CHECK(strict.slack > 1e-3);

    gen::Source src(62);
    for (int i = 0; i < 500; ++i) {
        const auto r = cauchy_schwarz_check(src.coin() ? src.positives(1, 50) : src.constant(1, 50));
        CHECK(r.holds);
    }
}

TEST_CASE("inequality reports and merging")
{
    const auto ok = make_inequality("a", 2.0, 1.0, 0.0);
    CHECK(ok.holds);
    CHECK(ok.slack == 1.0);
    const auto edge = make_inequality("b", 1.0, 1.0 + 1e-10, 1e-9);
    CHECK(edge.holds);
    const auto bad = make_inequality("c", 1.0, 2.0, 1e-9, {7.0});

    InequalityReport agg = ok;
    merge_worst(agg, edge);
    CHECK(agg.check == "a");
    CHECK(agg.cases == 2);
    CHECK(agg.slack == edge.slack);
    merge_worst(agg, bad);
    CHECK_FALSE(agg.holds);
    CHECK(agg.witness == std::vector<double>{7.0});
    merge_worst(agg, ok);
    CHECK_FALSE(agg.holds);
    CHECK(agg.cases == 4);
}

TEST_CASE("finite-difference monotonicity")
{
    std::vector<double> grid;
    for (int k = -4; k <= 20; ++k) grid.push_back(0.25 * k);
    const SampleVector x{0.3, 1.1, 2.7, 0.9};
    for (auto kind : {MeanKind::lehmer, MeanKind::quasi_out, MeanKind::moment}) {
        const auto reports = finite_difference_monotonicity(kind, x, Modulator::tanh(), grid, {1e-4, 1e-7, 2.0});
        CHECK(reports.size() == grid.size() + 1);
        for (const auto& r : reports) {
            INFO(r.check);
            CHECK(r.holds);
        }
    }
    const auto in = finite_difference_monotonicity(MeanKind::quasi_in, x, Modulator::sigmoid(), grid);
    CHECK(in.size() == grid.size());
    CHECK(in.front().check == "fd:quasi_in:sigmoid:rho=-1");

    const std::vector<double> coarse = {0.0, 1.0};
    CHECK_THROWS_AS(finite_difference_monotonicity(MeanKind::lehmer, x, Modulator::tanh(), coarse), ConfigError);
    const std::vector<double> backwards = {1.0, 0.5};
    CHECK_THROWS_AS(finite_difference_monotonicity(MeanKind::lehmer, x, Modulator::tanh(), backwards), ConfigError);
}

TEST_CASE("in-variant counterexamples")
{
    for (double rho : {1.0, 2.0, 3.0, 5.0}) {
        const auto c = find_in_counterexample(rho);
        INFO("rho=" << rho);
        REQUIRE(c.values.size() == 2);
        for (double v : c.values) CHECK(v < std::exp(-1.0 / rho));
        CHECK(c.slope < 0.0);
        CHECK(c.rho_at >= rho);
        CHECK(c.rho_at <= rho + 1.0);
        const SampleVector x = c.values;
        CHECK(quasi_lehmer_in(x, c.rho_at + 0.01, Modulator::sigmoid()) <
              quasi_lehmer_in(x, c.rho_at, Modulator::sigmoid()));
    }
    CHECK_THROWS_AS(find_in_counterexample(0.0), DomainError);
}

TEST_CASE("ordering chain on random series")
{
    gen::Source src(63);
    const std::vector<double> rhos = {-1.0, 0.0, 1.0, 2.0, 3.0};
    for (int i = 0; i < 100; ++i) {
        const auto s = PriceSeries::from_prices(src.positives(2, 200, 0.1, 10.0));
        const auto reports = ordering_chain_check(s, rhos, Modulator::identity(), ChainVariant::smart);
        REQUIRE(reports.size() == 5);
        CHECK(reports[0].check == "mu(ri) >= mu(dca)");
        CHECK(reports[1].check == "mu(dca) >= mu(rho:1)");
        for (const auto& r : reports) CHECK(r.holds);
        for (const auto& r : ordering_chain_check(s, std::vector<double>{0.0, 1.0, 2.0}, Modulator::sigmoid(),
                                                  ChainVariant::out)) {
            CHECK(r.holds);
        }
    }
    const auto s = PriceSeries::from_prices({1.0, 2.0});
    CHECK_THROWS_AS(ordering_chain_check(s, std::vector<double>{2.0, 1.0}, Modulator::identity(),
                                         ChainVariant::smart),
                    ConfigError);
}

TEST_CASE("verification suite passes and the sign-flip fault is caught")
{
    VerifyOptions opts;
    opts.random_cases = 40;
    const auto reports = run_verification_suite(opts);
    CHECK(reports.size() >= 20);
    for (const auto& r : reports) {
        INFO(r.check << " slack=" << r.slack);
        CHECK(r.holds);
    }
    const auto again = run_verification_suite(opts);
    REQUIRE(again.size() == reports.size());
    for (std::size_t i = 0; i < reports.size(); ++i) CHECK(again[i].slack == reports[i].slack);

    opts.inject_sign_flip = true;
    const auto faulty = run_verification_suite(opts);
    const auto failing = std::count_if(faulty.begin(), faulty.end(), [](const auto& r) { return !r.holds; });
    CHECK(failing > 0);
    for (const auto& r : faulty) {
        if (!r.holds) CHECK_FALSE(r.witness.empty());
    }
}
