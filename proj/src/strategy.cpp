#include "smartdca/strategy.hpp"

#include "smartdca/error.hpp"

#include <charconv>
#include <limits>
#include <cmath>
#include <vector>

namespace smartdca {

namespace {

std::string shortest(double v)
{
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

double parse_number(std::string_view s, std::string_view context)
{
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw ConfigError("strategy '" + std::string(context) + "': '" + std::string(s) + "' is not a number");
    }
    return v;
}

std::vector<std::string_view> split_colon(std::string_view s)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(':', start);
        parts.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

void require_positive_price(double p, const char* what)
{
    if (!(p > 0.0) || !std::isfinite(p)) {
        throw DomainError(std::string(what) + " must be positive and finite, got " + shortest(p));
    }
}

// log(cash / c_b) for the canonical spec.
double log_multiplier(const StrategySpec& s, double ratio)
{
    const double log_r = std::log(ratio);
    switch (s.variant) {
    case Variant::ri:
    case Variant::dca:
    case Variant::rho:
        return s.rho == 0.0 ? 0.0 : s.rho * log_r;
    case Variant::f_rho_out:
    case Variant::sig_plus: {
        if (s.rho == 0.0) return 0.0;
        return s.rho * s.modulator.log_eval(ratio);
    }
    case Variant::f_rho_in:
        return s.modulator.log_eval_at_log(s.rho * log_r);
    }
    return 0.0;
}

// cash / c_b, preferring the direct power form so identity modulators agree
// bit-for-bit with RHO.
double multiplier(const StrategySpec& s, double ratio, double log_mult)
{
    double direct = std::numeric_limits<double>::quiet_NaN();
    switch (s.variant) {
    case Variant::ri:
    case Variant::dca:
    case Variant::rho:
        direct = std::pow(ratio, s.rho);
        break;
    case Variant::f_rho_out:
    case Variant::sig_plus: {
        const double fr = s.modulator(ratio);
        if (fr > 0.0) direct = std::pow(fr, s.rho);
        break;
    }
    case Variant::f_rho_in: {
        const double arg = std::pow(ratio, s.rho);
        if (arg > 0.0 && std::isfinite(arg)) direct = s.modulator(arg);
        break;
    }
    }
    if (std::isfinite(direct) && (direct > 0.0 || log_mult == -std::numeric_limits<double>::infinity())) {
        return direct;
    }
    return std::exp(log_mult);
}

} // namespace

const char* to_string(Variant v)
{
    switch (v) {
    case Variant::ri: return "ri";
    case Variant::dca: return "dca";
    case Variant::rho: return "rho";
    case Variant::f_rho_in: return "in";
    case Variant::f_rho_out: return "out";
    case Variant::sig_plus: return "sig+";
    }
    return "unknown";
}

StrategySpec StrategySpec::ri(double base_cost)
{
    StrategySpec s;
    s.variant = Variant::ri;
    s.rho = -1.0;
    s.base_cost = base_cost;
    return s;
}

StrategySpec StrategySpec::dca(double base_cost)
{
    StrategySpec s;
    s.variant = Variant::dca;
    s.rho = 0.0;
    s.base_cost = base_cost;
    return s;
}

StrategySpec StrategySpec::smart(double rho, double base_cost)
{
    StrategySpec s;
    s.variant = Variant::rho;
    s.rho = rho;
    s.base_cost = base_cost;
    return s;
}

StrategySpec StrategySpec::f_rho_out(double rho, Modulator f, double base_cost)
{
    StrategySpec s = smart(rho, base_cost);
    s.variant = Variant::f_rho_out;
    s.modulator = f;
    return s;
}

StrategySpec StrategySpec::f_rho_in(double rho, Modulator f, double base_cost)
{
    StrategySpec s = smart(rho, base_cost);
    s.variant = Variant::f_rho_in;
    s.modulator = f;
    return s;
}

StrategySpec StrategySpec::sig_plus(double rho, double base_cost)
{
    StrategySpec s = smart(rho, base_cost);
    s.variant = Variant::sig_plus;
    // Placeholder until the backtest fits it on the previous year.
    s.modulator = Modulator::sigmoid();
    return s;
}

void StrategySpec::validate() const
{
    if (!(base_cost > 0.0) || !std::isfinite(base_cost)) {
        throw DomainError("base cost must be positive and finite, got " + shortest(base_cost));
    }
    if (!std::isfinite(rho)) {
        throw DomainError("rho must be finite");
    }
    if (ref_price.kind == RefPricePolicy::Kind::fixed) {
        require_positive_price(ref_price.value, "reference price");
    }
    if (!(cap_multiple > 0.0)) {
        throw DomainError("investment cap multiple must be positive");
    }
}

StrategySpec StrategySpec::canonical() const
{
    StrategySpec s = *this;
    if (variant == Variant::ri || variant == Variant::dca) {
        s.rho = variant == Variant::ri ? -1.0 : 0.0;
        s.variant = Variant::rho;
        s.modulator = Modulator::identity();
    }
    return s;
}

std::string StrategySpec::label() const
{
    switch (variant) {
    case Variant::ri: return "ri";
    case Variant::dca: return "dca";
    case Variant::rho: return "rho:" + shortest(rho);
    case Variant::f_rho_in: return "in:" + shortest(rho) + ":" + modulator.name();
    case Variant::f_rho_out: return "out:" + shortest(rho) + ":" + modulator.name();
    case Variant::sig_plus: return "sig+:" + shortest(rho);
    }
    return "unknown";
}

StrategySpec parse_strategy(std::string_view text, double base_cost, RefPricePolicy ref_price)
{
    const auto parts = split_colon(text);
    const auto head = parts.front();
    StrategySpec s;
    auto need = [&](std::size_t n) {
        if (parts.size() != n) {
            throw ConfigError("strategy '" + std::string(text) + "' has the wrong number of fields");
        }
    };
    if (head == "ri") {
        need(1);
        s = StrategySpec::ri(base_cost);
    } else if (head == "dca") {
        need(1);
        s = StrategySpec::dca(base_cost);
    } else if (head == "rho") {
        need(2);
        s = StrategySpec::smart(parse_number(parts[1], text), base_cost);
    } else if (head == "in" || head == "out") {
        need(3);
        const double rho = parse_number(parts[1], text);
        const auto f = Modulator::parse(parts[2]);
        s = head == "in" ? StrategySpec::f_rho_in(rho, f, base_cost) : StrategySpec::f_rho_out(rho, f, base_cost);
    } else if (head == "sig+") {
        if (parts.size() > 2) need(2);
        s = StrategySpec::sig_plus(parts.size() == 2 ? parse_number(parts[1], text) : 1.0, base_cost);
    } else {
        throw ConfigError("unknown strategy '" + std::string(text) + "'");
    }
    s.ref_price = ref_price;
    try {
        s.validate();
    } catch (const DomainError& e) {
        throw ConfigError("strategy '" + std::string(text) + "': " + e.what());
    }
    return s;
}

double investment_amount(const StrategySpec& spec, double price, double ref_price)
{
    require_positive_price(price, "price");
    require_positive_price(ref_price, "reference price");
    const StrategySpec s = spec.canonical();
    const double ratio = s.variant == Variant::sig_plus ? 1.0 / price : ref_price / price;
    require_positive_price(ratio, "price ratio");

    const double log_mult = log_multiplier(s, ratio);
    if (std::isnan(log_mult)) {
        throw DomainError("investment amount is undefined at price " + shortest(price));
    }
    if (log_mult > std::log(s.cap_multiple)) {
        throw InvestmentCapError("", log_mult + std::log(s.base_cost), s.cap_multiple * s.base_cost);
    }
    const double cash = s.base_cost * multiplier(s, ratio, log_mult);
    if (!std::isfinite(cash)) {
        throw InvestmentCapError("", log_mult + std::log(s.base_cost), s.cap_multiple * s.base_cost);
    }
    return cash;
}

BuyOrder make_order(const StrategySpec& spec, double price, double ref_price)
{
    const double cash = investment_amount(spec, price, ref_price);
    return BuyOrder{cash, cash / price, price};
}

double resolve_ref_price(const StrategySpec& spec, const PriceSeries& series)
{
    if (series.empty()) {
        throw DomainError("cannot resolve a reference price on an empty series");
    }
    if (spec.variant == Variant::sig_plus) {
        return 1.0;
    }
    if (spec.ref_price.kind == RefPricePolicy::Kind::fixed) {
        require_positive_price(spec.ref_price.value, "reference price");
        return spec.ref_price.value;
    }
    return series.price(0);
}

} // namespace smartdca
