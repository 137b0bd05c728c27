#pragma once

#include <span>
#include <string>
#include <string_view>

namespace smartdca {

enum class ModulatorKind { identity, tanh, sigmoid, sin1, adaptive_sigmoid };

/// Positive, monotonic non-decreasing function f applied to price ratios.
///
/// The adaptive sigmoid is `1 / (1 + exp(-(x - x0) / lambda))`; its parameters
/// are ignored for every other kind.
class Modulator {
public:
    Modulator() = default;

    static Modulator identity() { return Modulator(ModulatorKind::identity); }
    static Modulator tanh() { return Modulator(ModulatorKind::tanh); }
    static Modulator sigmoid() { return Modulator(ModulatorKind::sigmoid); }
    static Modulator sin1() { return Modulator(ModulatorKind::sin1); }
    static Modulator adaptive_sigmoid(double x0, double lambda);

    /// Accepts identity | tanh | sigmoid | sin1 (also "sin-1").
    static Modulator parse(std::string_view name);

    ModulatorKind kind() const noexcept { return kind_; }
    double x0() const noexcept { return x0_; }
    double lambda() const noexcept { return lambda_; }
    bool bounded() const noexcept { return kind_ != ModulatorKind::identity; }
    std::string name() const;

    /// f(x) for x > 0. Throws DomainError for x <= 0 or non-finite x.
    double operator()(double x) const;

    /// log f(x), evaluated without forming f(x) where that would underflow.
    double log_eval(double x) const;

    /// log f(exp(log_x)). Lets callers evaluate f at arguments such as x^rho
    /// that are not representable as doubles. Bounded kinds saturate cleanly.
    double log_eval_at_log(double log_x) const;

    friend bool operator==(const Modulator&, const Modulator&) = default;

private:
    explicit Modulator(ModulatorKind kind) : kind_(kind) {}

    ModulatorKind kind_ = ModulatorKind::identity;
    double x0_ = 0.0;
    double lambda_ = 1.0;
};

/// Free-function spelling of `f(x)`.
inline double eval(const Modulator& f, double x) { return f(x); }

/// Result of fitting the sig+ sigmoid to one window of prices.
struct SigPlusCalibration {
    double y_min = 0.0;  ///< min of 1/p over the window
    double y_max = 0.0;  ///< max of 1/p over the window
    double x0 = 0.0;
    double lambda = 0.0;
    bool floored = false;  ///< lambda was floored because y_max == y_min

    Modulator modulator() const { return Modulator::adaptive_sigmoid(x0, lambda); }
};

/// Centers the sigmoid between the extreme inverse prices of the window and
/// scales it so that the window spans -4..4 in sigmoid units.
SigPlusCalibration calibrate_sig_plus_window(std::span<const double> prices);

inline Modulator calibrate_sig_plus(std::span<const double> prices)
{
    return calibrate_sig_plus_window(prices).modulator();
}

} // namespace smartdca
