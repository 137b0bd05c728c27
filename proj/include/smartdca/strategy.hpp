#pragma once

#include "smartdca/marketdata.hpp"
#include "smartdca/modulators.hpp"

#include <string>
#include <string_view>

namespace smartdca {

enum class Variant { ri, dca, rho, f_rho_in, f_rho_out, sig_plus };

const char* to_string(Variant v);

/// How the reference price p_r is chosen for a run.
struct RefPricePolicy {
    enum class Kind { first_price, fixed };

    Kind kind = Kind::first_price;
    double value = 0.0;

    static RefPricePolicy first_price() { return {}; }
    static RefPricePolicy fixed(double p) { return {Kind::fixed, p}; }

    friend bool operator==(const RefPricePolicy&, const RefPricePolicy&) = default;
};

/// One member of the recurring-investment family. The cash invested at a buy
/// with price p and ratio r = p_r / p is
///
///     RI          c_b * r^-1            (fixed quantity c_b / p_r)
///     DCA         c_b
///     RHO         c_b * r^rho
///     F_RHO_OUT   c_b * f(r)^rho
///     F_RHO_IN    c_b * f(r^rho)
///     SIG_PLUS    c_b * f(1/p)^rho      f recalibrated yearly by the backtest
struct StrategySpec {
    Variant variant = Variant::dca;
    double rho = 0.0;
    double base_cost = 1.0;
    RefPricePolicy ref_price = RefPricePolicy::first_price();
    Modulator modulator = Modulator::identity();
    /// A single buy may not exceed cap_multiple * base_cost.
    double cap_multiple = 1e12;

    static StrategySpec ri(double base_cost = 1.0);
    static StrategySpec dca(double base_cost = 1.0);
    static StrategySpec smart(double rho, double base_cost = 1.0);
    static StrategySpec f_rho_out(double rho, Modulator f, double base_cost = 1.0);
    static StrategySpec f_rho_in(double rho, Modulator f, double base_cost = 1.0);
    static StrategySpec sig_plus(double rho = 1.0, double base_cost = 1.0);

    StrategySpec with_ref_price(RefPricePolicy p) const
    {
        auto s = *this;
        s.ref_price = p;
        return s;
    }

    /// Throws DomainError on a non-positive base cost, reference price or cap.
    void validate() const;

    /// RI and DCA become RHO with rho = -1 and rho = 0; other variants are unchanged.
    StrategySpec canonical() const;

    /// Compact form accepted by parse_strategy, e.g. "dca", "rho:2", "out:1:tanh".
    std::string label() const;

    friend bool operator==(const StrategySpec&, const StrategySpec&) = default;
};

/// Parses ri | dca | rho:R | in:R:F | out:R:F | sig+ | sig+:R. Throws ConfigError.
StrategySpec parse_strategy(std::string_view text, double base_cost = 1.0,
                            RefPricePolicy ref_price = RefPricePolicy::first_price());

/// One executed purchase.
struct BuyOrder {
    double cash = 0.0;      ///< currency
    double quantity = 0.0;  ///< asset units, cash / price
    double price = 0.0;     ///< currency per asset unit
};

/// Cash to invest at `price`. Evaluated through logarithms so tiny prices
/// never overflow silently; throws InvestmentCapError (without timestamp) when
/// the amount exceeds the cap and DomainError on invalid prices.
double investment_amount(const StrategySpec& spec, double price, double ref_price);

BuyOrder make_order(const StrategySpec& spec, double price, double ref_price);

/// The configured fixed price, or the first price of the series. SIG_PLUS
/// always resolves to 1 because its sigmoid is fitted on raw inverse prices.
double resolve_ref_price(const StrategySpec& spec, const PriceSeries& series);

} // namespace smartdca
