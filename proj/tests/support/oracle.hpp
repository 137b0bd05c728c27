#pragma once

// Reference implementations evaluated by direct summation in 50-digit
// binary floating point. They share no code with the library.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <functional>
#include <string>
#include <vector>

namespace oracle {

using Real = boost::multiprecision::cpp_bin_float_50;

inline Real f_eval(const std::string& name, const Real& x)
{
    using boost::multiprecision::exp;
    using boost::multiprecision::sin;
    using boost::multiprecision::tanh;
    if (name == "identity") return x;
    if (name == "tanh") return tanh(x);
    if (name == "sigmoid") return 1 / (1 + exp(-x));
    if (name == "sin1") {
        if (x >= 1) return Real(1);
        return sin(boost::math::constants::half_pi<Real>() * x);
    }
    throw std::invalid_argument("oracle: unknown f " + name);
}

inline Real rpow(const Real& x, double e) { return boost::multiprecision::pow(x, Real(e)); }

inline double lehmer(const std::vector<double>& x, double rho)
{
    Real num = 0, den = 0;
    for (double v : x) {
        num += rpow(Real(v), rho);
        den += rpow(Real(v), rho - 1);
    }
    return static_cast<double>(num / den);
}

/// sum g(x) w(x) / sum w(x) with w = f(x)^rho.
inline double weighted_out(const std::vector<double>& x, double rho, const std::string& f,
                           const std::function<Real(const Real&)>& g)
{
    Real num = 0, den = 0;
    for (double v : x) {
        const Real w = rpow(f_eval(f, Real(v)), rho);
        num += g(Real(v)) * w;
        den += w;
    }
    return static_cast<double>(num / den);
}

inline double quasi_out(const std::vector<double>& x, double rho, const std::string& f)
{
    return weighted_out(x, rho, f, [](const Real& v) { return v; });
}

inline double moment(const std::vector<double>& x, double rho, double xi, const std::string& f)
{
    return weighted_out(x, rho, f, [xi](const Real& v) { return rpow(v, xi); });
}

inline double quasi_in(const std::vector<double>& x, double rho, const std::string& f)
{
    Real num = 0, den = 0;
    for (double v : x) {
        const Real w = f_eval(f, rpow(Real(v), rho));
        num += Real(v) * w;
        den += w;
    }
    return static_cast<double>(num / den);
}

inline double quasi_gini_out(const std::vector<double>& x, double rho, double gamma, const std::string& f)
{
    Real num = 0, den = 0;
    for (double v : x) {
        const Real fx = f_eval(f, Real(v));
        num += Real(v) * rpow(fx, rho);
        den += rpow(fx, gamma);
    }
    return static_cast<double>(boost::multiprecision::pow(num / den, Real(1) / Real(rho + 1 - gamma)));
}

/// Price per unit of buying cash_i = c_b * (p_r / p_i)^rho at every price.
inline double mu_power(const std::vector<double>& p, double rho, double p_r)
{
    Real cash = 0, qty = 0;
    for (double v : p) {
        const Real c = rpow(Real(p_r) / Real(v), rho);
        cash += c;
        qty += c / Real(v);
    }
    return static_cast<double>(cash / qty);
}

/// Same with cash_i = f(p_r / p_i)^rho.
inline double mu_out(const std::vector<double>& p, double rho, const std::string& f, double p_r)
{
    Real cash = 0, qty = 0;
    for (double v : p) {
        const Real c = rpow(f_eval(f, Real(p_r) / Real(v)), rho);
        cash += c;
        qty += c / Real(v);
    }
    return static_cast<double>(cash / qty);
}

} // namespace oracle
