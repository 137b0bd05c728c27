#pragma once

#include <stdexcept>
#include <string>

namespace smartdca {

/// Input outside the mathematical domain of an operation (non-positive sample,
/// singular exponent, empty vector, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid configuration: bad flag values, missing strategies, grids that are
/// too coarse for a finite-difference check.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class DataErrorKind {
    io,
    missing_column,
    bad_timestamp,
    bad_price,
    non_positive_price,
    unsorted,
    duplicate_timestamp,
    empty,
};

const char* to_string(DataErrorKind kind);

/// Malformed or invalid price data. `row()` is the 1-based line number in the
/// source file (header line included), or 0 when not tied to a line.
class DataError : public std::runtime_error {
public:
    DataError(DataErrorKind kind, std::size_t row, const std::string& what)
        : std::runtime_error(row > 0 ? "row " + std::to_string(row) + ": " + what : what),
          kind_(kind), row_(row) {}

    DataErrorKind kind() const noexcept { return kind_; }
    std::size_t row() const noexcept { return row_; }

private:
    DataErrorKind kind_;
    std::size_t row_;
};

/// A strategy asked for more cash than the configured cap allows at one buy.
class InvestmentCapError : public std::runtime_error {
public:
    InvestmentCapError(std::string timestamp, double log_cash, double cap)
        : std::runtime_error("investment cap exceeded" + (timestamp.empty() ? "" : " at " + timestamp) + ": log(cash)=" +
                             std::to_string(log_cash) + ", cap=" + std::to_string(cap)),
          timestamp_(std::move(timestamp)), log_cash_(log_cash), cap_(cap) {}

    /// Same error, attributed to the buy at `timestamp`.
    InvestmentCapError at(std::string timestamp) const { return {std::move(timestamp), log_cash_, cap_}; }

    const std::string& timestamp() const noexcept { return timestamp_; }
    double log_cash() const noexcept { return log_cash_; }
    double cap() const noexcept { return cap_; }

private:
    std::string timestamp_;
    double log_cash_;
    double cap_;
};

} // namespace smartdca
