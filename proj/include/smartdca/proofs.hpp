#pragma once

#include "smartdca/backtest.hpp"
#include "smartdca/means.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace smartdca {

/// Outcome of checking lhs >= rhs. `holds` is exactly `slack >= -tolerance`.
/// Aggregated checks keep the worst case and count how many cases were run.
struct InequalityReport {
    std::string check;
    bool holds = true;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;      ///< lhs - rhs
    double tolerance = 0.0;  ///< absolute
    std::vector<double> witness;
    std::size_t cases = 1;
    std::string note;
};

InequalityReport make_inequality(std::string check, double lhs, double rhs, double tolerance,
                                 std::vector<double> witness = {});

/// Keeps the report with the smallest `slack + tolerance` and sums cases.
void merge_worst(InequalityReport& into, const InequalityReport& other);

struct TwoBuyMeans {
    double mu_ri = 0.0;     ///< arithmetic mean
    double mu_dca = 0.0;    ///< harmonic mean
    double mu_smart = 0.0;  ///< p1 p2 (p1 + p2) / (p1^2 + p2^2)
};

TwoBuyMeans two_buy_closed_forms(double p1, double p2);

/// p1 p2 (p1^n + p2^n) / (p1^(n+1) + p2^(n+1)): the price per unit of two buys
/// where the second invests (p1/p2)^n times the first.
double mu_n_closed_form(double p1, double p2, double n);

/// m * sum 1/p^2 >= (sum 1/p)^2, evaluated on y = min(p) / p so that constant
/// vectors give exactly zero slack. lhs and rhs are reported in those units;
/// the tolerance is `rel_tol * rhs`.
InequalityReport cauchy_schwarz_check(const SampleVector& prices, double rel_tol = 1e-12);

enum class MeanKind { lehmer, quasi_out, quasi_in, moment };

const char* to_string(MeanKind k);

struct FiniteDifferenceOptions {
    double step = 1e-4;       ///< central-difference half width in rho
    double tolerance = 1e-7;  ///< on the derivative estimate
    double xi = 1.0;          ///< moment order for MeanKind::moment
};

/// Evaluates the mean of the given kind at exponent rho: lehmer_mean(x, rho),
/// quasi_lehmer_out/in(x, rho, f) or quasi_lehmer_moment(x, rho, xi, f).
double evaluate_mean(MeanKind kind, const SampleVector& x, const Modulator& f, double rho, double xi = 1.0);

/// Central finite differences of the mean in rho, one report per grid point
/// (lhs = derivative estimate, rhs = 0). For lehmer, out and moment kinds a
/// final report checks the sign of every pairwise derivative summand
/// (v_i - v_j)(log f(x_i) - log f(x_j)). Throws ConfigError when the grid is
/// not ascending or has a gap wider than 0.5.
std::vector<InequalityReport> finite_difference_monotonicity(MeanKind kind, const SampleVector& x,
                                                             const Modulator& f,
                                                             std::span<const double> rho_grid,
                                                             const FiniteDifferenceOptions& options = {});

struct InCounterexample {
    std::vector<double> values;  ///< two samples, both below exp(-1/rho)
    double rho_at = 0.0;         ///< start of the decreasing step
    double slope = 0.0;          ///< (L_in(rho_at + 0.01) - L_in(rho_at)) / 0.01, negative
};

/// Grid search over pairs on 0.01, 0.02, ... below exp(-1/rho) and exponents
/// rho, rho + 0.01, ..., rho + 1 with f = sigmoid, returning the pair and step
/// where quasi_lehmer_in falls fastest. Throws std::runtime_error when no
/// decreasing step exists.
InCounterexample find_in_counterexample(double rho);

enum class ChainVariant { smart, out };

struct ChainOptions {
    double base_cost = 1.0;
    RefPricePolicy ref_price = RefPricePolicy::first_price();
    double rel_tol = 1e-9;
};

/// Backtests every rho (ascending) on all points of the series and checks
/// mu(rho_k) >= mu(rho_k+1) and finally mu(last) >= min price. For the smart
/// variant rho = -1 and rho = 0 run as RI and DCA.
std::vector<InequalityReport> ordering_chain_check(const PriceSeries& series, std::span<const double> rhos,
                                                   const Modulator& f, ChainVariant variant,
                                                   const ChainOptions& options = {});

struct VerifyOptions {
    std::uint64_t seed = 20240229;
    double tolerance = 1e-9;  ///< relative slack allowed on mean orderings
    std::size_t random_cases = 200;
    std::vector<double> chain_rhos = {-1.0, 0.0, 1.0, 2.0, 3.0};
    /// Test mode: swaps lhs and rhs of every check so the harness must fail.
    bool inject_sign_flip = false;
};

/// Every theorem check, each aggregated to its worst case.
std::vector<InequalityReport> run_verification_suite(const VerifyOptions& options = {});

} // namespace smartdca
