#pragma once

#include "smartdca/modulators.hpp"

#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace smartdca {

/// Non-empty vector of strictly positive, finite reals.
class SampleVector {
public:
    SampleVector(std::vector<double> values);
    SampleVector(std::initializer_list<double> values) : SampleVector(std::vector<double>(values)) {}
    SampleVector(std::span<const double> values) : SampleVector(std::vector<double>(values.begin(), values.end())) {}

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double min() const noexcept { return min_; }
    double max() const noexcept { return max_; }

    auto begin() const noexcept { return values_.begin(); }
    auto end() const noexcept { return values_.end(); }

private:
    std::vector<double> values_;
    double min_ = 0.0;
    double max_ = 0.0;
};

enum class QuasiVariant { in, out };

/// Neumaier-compensated sum in index order.
double compensated_sum(std::span<const double> terms);

/// log(sum(exp(a_i))) with the max shift; -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> log_terms);

/// Lehmer mean L_rho(x) = sum x^rho / sum x^(rho-1).
///
/// Evaluated as a weighted arithmetic mean with weights x^(rho-1) normalized by
/// their largest member, so |rho| in the hundreds does not overflow.
double lehmer_mean(const SampleVector& x, double rho);

/// L^(out)_{rho+1}(x) = sum x f(x)^rho / sum f(x)^rho.
double quasi_lehmer_out(const SampleVector& x, double rho, const Modulator& f);

/// L^(in)_{rho+1}(x) = sum x f(x^rho) / sum f(x^rho). Not monotonic in rho in general.
double quasi_lehmer_in(const SampleVector& x, double rho, const Modulator& f);

/// L^(out)_{rho+1,xi}(x) = sum x^xi f(x)^rho / sum f(x)^rho, for xi >= 1.
double quasi_lehmer_moment(const SampleVector& x, double rho, double xi, const Modulator& f);

/// L^(out)_{rho+1,g}(x) = sum g(x) f(x)^rho / sum f(x)^rho. g must be monotonic
/// increasing for the ordering results to apply; it may take any real values.
double quasi_lehmer_expectation(const SampleVector& x, double rho,
                                const std::function<double(double)>& g, const Modulator& f);

/// Quasi-Gini mean (sum x w(rho) / sum w(gamma))^(1/(rho+1-gamma)) where w is
/// f(x)^e for the out variant and f(x^e) for the in variant. Requires rho+1 != gamma.
double quasi_gini(const SampleVector& x, double rho, double gamma, const Modulator& f,
                  QuasiVariant variant);

} // namespace smartdca
