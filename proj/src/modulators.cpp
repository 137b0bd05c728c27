#include "smartdca/modulators.hpp"

#include "smartdca/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace smartdca {

namespace {

// Below this log-argument every bounded kind is linear in x to double precision.
constexpr double tiny_log_x = -20.0;

void require_positive(double x)
{
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError("modulator argument must be positive and finite, got " + std::to_string(x));
    }
}

// log(sigmoid(z)) for any z, including +-inf.
double log_sigmoid(double z)
{
    if (z >= 0.0) {
        return -std::log1p(std::exp(-z));
    }
    return z - std::log1p(std::exp(z));
}

double logistic(double z)
{
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

} // namespace

Modulator Modulator::adaptive_sigmoid(double x0, double lambda)
{
    if (!std::isfinite(x0)) {
        throw DomainError("adaptive sigmoid center must be finite");
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw DomainError("adaptive sigmoid lambda must be positive and finite, got " + std::to_string(lambda));
    }
    Modulator m(ModulatorKind::adaptive_sigmoid);
    m.x0_ = x0;
    m.lambda_ = lambda;
    return m;
}

Modulator Modulator::parse(std::string_view name)
{
    if (name == "identity") return identity();
    if (name == "tanh") return tanh();
    if (name == "sigmoid") return sigmoid();
    if (name == "sin1" || name == "sin-1") return sin1();
    if (name == "sig+") {
        throw ConfigError("sig+ is calibrated from price data; use the sig+ strategy variant");
    }
    throw ConfigError("unknown modulator '" + std::string(name) + "'");
}

std::string Modulator::name() const
{
    switch (kind_) {
    case ModulatorKind::identity: return "identity";
    case ModulatorKind::tanh: return "tanh";
    case ModulatorKind::sigmoid: return "sigmoid";
    case ModulatorKind::sin1: return "sin1";
    case ModulatorKind::adaptive_sigmoid: return "adaptive_sigmoid";
    }
    return "unknown";
}

double Modulator::operator()(double x) const
{
    require_positive(x);
    switch (kind_) {
    case ModulatorKind::identity: return x;
    case ModulatorKind::tanh: return std::tanh(x);
    case ModulatorKind::sigmoid: return logistic(x);
    case ModulatorKind::sin1: return x >= 1.0 ? 1.0 : std::sin(std::numbers::pi / 2.0 * x);
    case ModulatorKind::adaptive_sigmoid: return logistic((x - x0_) / lambda_);
    }
    return x;
}

double Modulator::log_eval(double x) const
{
    require_positive(x);
    return log_eval_at_log(std::log(x));
}

double Modulator::log_eval_at_log(double log_x) const
{
    if (std::isnan(log_x)) {
        throw DomainError("modulator log-argument is NaN");
    }
    // x may be 0 or +inf here; every branch handles those limits.
    const double x = std::exp(log_x);
    switch (kind_) {
    case ModulatorKind::identity:
        return log_x;
    case ModulatorKind::tanh: {
        if (log_x < tiny_log_x) {
            return log_x;
        }
        // tanh x = (1 - e^-2x) / (1 + e^-2x)
        const double e = std::exp(-2.0 * x);
        return std::log(-std::expm1(-2.0 * x)) - std::log1p(e);
    }
    case ModulatorKind::sigmoid:
        return log_sigmoid(x);
    case ModulatorKind::sin1:
        if (x >= 1.0) {
            return 0.0;
        }
        if (log_x < tiny_log_x) {
            return std::log(std::numbers::pi / 2.0) + log_x;
        }
        return std::log(std::sin(std::numbers::pi / 2.0 * x));
    case ModulatorKind::adaptive_sigmoid:
        return log_sigmoid((x - x0_) / lambda_);
    }
    return log_x;
}

SigPlusCalibration calibrate_sig_plus_window(std::span<const double> prices)
{
    if (prices.empty()) {
        throw DomainError("sig+ calibration window is empty");
    }
    SigPlusCalibration cal;
    cal.y_min = std::numeric_limits<double>::infinity();
    cal.y_max = -std::numeric_limits<double>::infinity();
    for (double p : prices) {
        if (!(p > 0.0) || !std::isfinite(p)) {
            throw DomainError("sig+ calibration price must be positive and finite, got " + std::to_string(p));
        }
        const double y = 1.0 / p;
        cal.y_min = std::min(cal.y_min, y);
        cal.y_max = std::max(cal.y_max, y);
    }
    cal.x0 = (cal.y_max + cal.y_min) / 2.0;
    cal.lambda = (cal.y_max - cal.y_min) / 8.0;
    if (!(cal.lambda > 0.0)) {
        cal.lambda = std::max(1e-12, std::abs(cal.x0) * 1e-9);
        cal.floored = true;
    }
    return cal;
}

} // namespace smartdca
