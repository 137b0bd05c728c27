#pragma once

#include "smartdca/backtest.hpp"
#include "smartdca/marketdata.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace smartdca::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_data = 2,
    exit_verification = 3,
    exit_partial = 4,
};

struct SyntheticSource {
    std::size_t n = 100;
    double lo = 0.0;
    double hi = 2.0;
};

/// Everything a subcommand needs. Built from an optional JSON config file,
/// then overridden by command-line flags.
struct RunConfig {
    std::optional<std::filesystem::path> csv;
    CsvColumns columns;
    SyntheticSource synthetic;
    std::size_t every = 1;

    /// Strategy entries as written (strings or objects), resolved against
    /// base_cost / ref_price / cap_multiple when a command runs.
    std::vector<nlohmann::json> strategies;
    double base_cost = 1.0;
    /// Unset means the first price for backtests and 1 for simulate.
    std::optional<RefPricePolicy> ref_price;
    double cap_multiple = 1e12;

    std::optional<Duration> window;
    std::optional<Duration> step;
    std::int64_t ticks_per_year = 365;

    std::filesystem::path out_dir = "out";
    std::uint64_t seed = 20240229;
    double tolerance = 1e-9;

    std::vector<double> rho_grid;  ///< simulate; empty means 0..3 step 0.25
    std::vector<std::string> modulators = {"tanh", "sigmoid", "sin1"};

    std::size_t random_cases = 200;
    std::vector<double> chain_rhos = {-1.0, 0.0, 1.0, 2.0, 3.0};
    bool inject_sign_flip = false;

    std::optional<Timestamp> from;
    std::optional<Timestamp> to;
};

/// Reads the JSON config; relative paths resolve against the file's directory.
/// Throws ConfigError.
RunConfig load_config(const std::filesystem::path& path);

/// Applies the keys present in `j` on top of `config`.
void apply_config(RunConfig& config, const nlohmann::json& j, const std::filesystem::path& base_dir = {});

std::vector<StrategySpec> resolve_strategies(const RunConfig& config);

/// Runs `body` and maps exceptions to exit codes, printing the message to `err`.
int guarded(std::ostream& err, const std::function<int()>& body);

int cmd_backtest(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_compare(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_calibrate(const RunConfig& config, std::ostream& out, std::ostream& err);

} // namespace smartdca::cli
