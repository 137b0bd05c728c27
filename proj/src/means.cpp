#include "smartdca/means.hpp"

#include "smartdca/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace smartdca {

namespace {

void require_finite(double v, const char* what)
{
    if (!std::isfinite(v)) {
        throw DomainError(std::string(what) + " must be finite");
    }
}

std::string describe(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// log f(x_i) for every sample, rejecting samples where f vanishes.
std::vector<double> log_modulated(const SampleVector& x, const Modulator& f)
{
    std::vector<double> out;
    out.reserve(x.size());
    for (double v : x) {
        const double lf = f.log_eval(v);
        if (!std::isfinite(lf)) {
            throw DomainError("modulator " + f.name() + " is not positive at sample " + describe(v));
        }
        out.push_back(lf);
    }
    return out;
}

// log f(x_i^e), evaluated through log x_i so x_i^e never has to be representable.
std::vector<double> log_modulated_power(const SampleVector& x, double e, const Modulator& f)
{
    std::vector<double> out;
    out.reserve(x.size());
    for (double v : x) {
        const double lf = f.log_eval_at_log(e * std::log(v));
        if (!std::isfinite(lf)) {
            throw DomainError("modulator " + f.name() + " is not positive at sample " + describe(v) +
                              "^" + describe(e));
        }
        out.push_back(lf);
    }
    return out;
}

// sum v_i w_i / sum w_i with w_i = exp(log_w_i), shifted by max log_w. The
// result is clamped into [min v, max v], which contains the exact value.
double weighted_mean(std::span<const double> values, std::span<const double> log_w)
{
    const double shift = *std::max_element(log_w.begin(), log_w.end());
    std::vector<double> num(values.size());
    std::vector<double> den(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double w = std::exp(log_w[i] - shift);
        num[i] = values[i] * w;
        den[i] = w;
    }
    const double mean = compensated_sum(num) / compensated_sum(den);
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return std::clamp(mean, *lo, *hi);
}

} // namespace

SampleVector::SampleVector(std::vector<double> values) : values_(std::move(values))
{
    if (values_.empty()) {
        throw DomainError("sample vector must not be empty");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double v = values_[i];
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw DomainError("sample " + std::to_string(i) + " must be positive and finite, got " + describe(v));
        }
    }
    const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
    min_ = *lo;
    max_ = *hi;
}

double compensated_sum(std::span<const double> terms)
{
    double sum = 0.0;
    double c = 0.0;
    for (double t : terms) {
        const double s = sum + t;
        if (std::abs(sum) >= std::abs(t)) {
            c += (sum - s) + t;
        } else {
            c += (t - s) + sum;
        }
        sum = s;
    }
    return sum + c;
}

double log_sum_exp(std::span<const double> log_terms)
{
    if (log_terms.empty()) {
        return -std::numeric_limits<double>::infinity();
    }
    const double shift = *std::max_element(log_terms.begin(), log_terms.end());
    if (std::isinf(shift)) {
        return shift;
    }
    std::vector<double> terms(log_terms.size());
    std::transform(log_terms.begin(), log_terms.end(), terms.begin(),
                   [shift](double a) { return std::exp(a - shift); });
    return shift + std::log(compensated_sum(terms));
}

double lehmer_mean(const SampleVector& x, double rho)
{
    require_finite(rho, "Lehmer exponent");
    std::vector<double> log_w(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        log_w[i] = (rho - 1.0) * std::log(x[i]);
    }
    return weighted_mean(x.values(), log_w);
}

double quasi_lehmer_out(const SampleVector& x, double rho, const Modulator& f)
{
    require_finite(rho, "quasi-Lehmer exponent");
    auto log_w = log_modulated(x, f);
    for (double& lw : log_w) {
        lw *= rho;
    }
    return weighted_mean(x.values(), log_w);
}

double quasi_lehmer_in(const SampleVector& x, double rho, const Modulator& f)
{
    require_finite(rho, "quasi-Lehmer exponent");
    const auto log_w = log_modulated_power(x, rho, f);
    return weighted_mean(x.values(), log_w);
}

double quasi_lehmer_moment(const SampleVector& x, double rho, double xi, const Modulator& f)
{
    require_finite(rho, "quasi-Lehmer exponent");
    require_finite(xi, "moment order");
    if (xi < 1.0) {
        throw DomainError("moment order xi must be >= 1, got " + describe(xi));
    }
    if (xi == 1.0) {
        return quasi_lehmer_out(x, rho, f);
    }
    auto log_w = log_modulated(x, f);
    for (double& lw : log_w) {
        lw *= rho;
    }
    std::vector<double> powers(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        powers[i] = std::pow(x[i], xi);
        if (!std::isfinite(powers[i]) || powers[i] == 0.0) {
            throw DomainError("sample " + describe(x[i]) + "^" + describe(xi) + " is not representable");
        }
    }
    return weighted_mean(powers, log_w);
}

double quasi_lehmer_expectation(const SampleVector& x, double rho,
                                const std::function<double(double)>& g, const Modulator& f)
{
    require_finite(rho, "quasi-Lehmer exponent");
    auto log_w = log_modulated(x, f);
    for (double& lw : log_w) {
        lw *= rho;
    }
    std::vector<double> values(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        values[i] = g(x[i]);
        if (!std::isfinite(values[i])) {
            throw DomainError("g is not finite at sample " + describe(x[i]));
        }
    }
    return weighted_mean(values, log_w);
}

double quasi_gini(const SampleVector& x, double rho, double gamma, const Modulator& f,
                  QuasiVariant variant)
{
    require_finite(rho, "quasi-Gini exponent rho");
    require_finite(gamma, "quasi-Gini exponent gamma");
    const double outer = rho + 1.0 - gamma;
    if (outer == 0.0) {
        throw DomainError("quasi-Gini mean is singular for rho + 1 == gamma");
    }
    std::vector<double> log_num(x.size());
    std::vector<double> log_den(x.size());
    if (variant == QuasiVariant::out) {
        const auto lf = log_modulated(x, f);
        for (std::size_t i = 0; i < x.size(); ++i) {
            log_num[i] = std::log(x[i]) + rho * lf[i];
            log_den[i] = gamma * lf[i];
        }
    } else {
        const auto lf_rho = log_modulated_power(x, rho, f);
        const auto lf_gamma = log_modulated_power(x, gamma, f);
        for (std::size_t i = 0; i < x.size(); ++i) {
            log_num[i] = std::log(x[i]) + lf_rho[i];
            log_den[i] = lf_gamma[i];
        }
    }
    return std::exp((log_sum_exp(log_num) - log_sum_exp(log_den)) / outer);
}

} // namespace smartdca
