#include "commands.hpp"

#include "smartdca/error.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace smartdca;
using namespace smartdca::cli;

namespace {

struct Flags {
    std::string config;
    std::uint64_t seed = 0;
    std::string out;
    double tolerance = 0.0;
    std::string csv;
    std::string time_column;
    std::string price_column;
    std::vector<std::string> strategies;
    std::size_t every = 1;
    double base_cost = 1.0;
    std::string ref_price;
    double cap_multiple = 0.0;
    std::string window;
    std::string step;
    std::int64_t ticks_per_year = 365;
    std::size_t n = 100;
    double lo = 0.0;
    double hi = 2.0;
    std::vector<double> rho_grid;
    std::vector<std::string> modulators;
    std::size_t random_cases = 200;
    std::vector<double> chain_rhos;
    std::string inject_fault;
    std::string from;
    std::string to;
};

Timestamp parse_time(const std::string& flag, const std::string& text)
{
    try {
        return Timestamp::parse(text);
    } catch (const DomainError& e) {
        throw ConfigError(flag + ": " + e.what());
    }
}

bool given(const CLI::App& app, const char* name)
{
    const auto* opt = app.get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
}

RunConfig build_config(const CLI::App& app, const Flags& f)
{
    RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
    if (given(app, "--seed")) c.seed = f.seed;
    if (given(app, "--out")) c.out_dir = f.out;
    if (given(app, "--tolerance")) c.tolerance = f.tolerance;
    if (given(app, "--csv")) {
        c.csv = f.csv;
        if (!std::filesystem::exists(*c.csv)) throw ConfigError("data file not found: " + f.csv);
    }
    if (given(app, "--time-column")) c.columns.time_column = f.time_column;
    if (given(app, "--price-column")) c.columns.price_column = f.price_column;
    if (given(app, "--strategy")) c.strategies.assign(f.strategies.begin(), f.strategies.end());
    if (given(app, "--every")) c.every = f.every;
    if (given(app, "--base-cost")) c.base_cost = f.base_cost;
    if (given(app, "--ref-price")) {
        if (f.ref_price == "first") {
            c.ref_price = RefPricePolicy::first_price();
        } else {
            try {
                c.ref_price = RefPricePolicy::fixed(std::stod(f.ref_price));
            } catch (const std::exception&) {
                throw ConfigError("--ref-price must be 'first' or a number");
            }
        }
    }
    if (given(app, "--cap-multiple")) c.cap_multiple = f.cap_multiple;
    if (given(app, "--window")) c.window = Duration::parse(f.window);
    if (given(app, "--step")) c.step = Duration::parse(f.step);
    if (given(app, "--ticks-per-year")) c.ticks_per_year = f.ticks_per_year;
    if (given(app, "--n")) c.synthetic.n = f.n;
    if (given(app, "--lo")) c.synthetic.lo = f.lo;
    if (given(app, "--hi")) c.synthetic.hi = f.hi;
    if (given(app, "--rho")) c.rho_grid = f.rho_grid;
    if (given(app, "--modulator")) c.modulators = f.modulators;
    if (given(app, "--cases")) c.random_cases = f.random_cases;
    if (given(app, "--chain-rho")) c.chain_rhos = f.chain_rhos;
    if (given(app, "--inject-fault")) c.inject_sign_flip = f.inject_fault == "sign-flip";
    if (given(app, "--from")) c.from = parse_time("--from", f.from);
    if (given(app, "--to")) c.to = parse_time("--to", f.to);
    return c;
}

void common_flags(CLI::App* sub, Flags& f)
{
    sub->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "root seed");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--tolerance", f.tolerance, "relative tolerance for verification checks");
}

void data_flags(CLI::App* sub, Flags& f)
{
    sub->add_option("--csv", f.csv, "price CSV (date|tick, price)");
    sub->add_option("--time-column", f.time_column, "name of the timestamp column");
    sub->add_option("--price-column", f.price_column, "name of the price column");
    sub->add_option("--ticks-per-year", f.ticks_per_year, "ticks per year on tick-indexed series");
}

void strategy_flags(CLI::App* sub, Flags& f)
{
    sub->add_option("--strategy,-s", f.strategies, "ri | dca | rho:R | in:R:F | out:R:F | sig+[:R]");
    sub->add_option("--every", f.every, "buy at every k-th point")->check(CLI::PositiveNumber);
    sub->add_option("--base-cost", f.base_cost, "base cash per buy");
    sub->add_option("--ref-price", f.ref_price, "'first' or a fixed reference price");
    sub->add_option("--cap-multiple", f.cap_multiple, "largest allowed buy as a multiple of the base cost");
    sub->add_option("--window", f.window, "sliding window length, e.g. 1y, 6m, 30d, 250t");
    sub->add_option("--step", f.step, "sliding window step (defaults to the window length)");
    sub->add_option("--n", f.n, "synthetic series length");
    sub->add_option("--lo", f.lo, "synthetic price lower bound");
    sub->add_option("--hi", f.hi, "synthetic price upper bound");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Recurring-investment strategy backtests and mean-inequality checks", "smartdca"};
    app.require_subcommand(1);
    Flags f;

    auto* backtest = app.add_subcommand("backtest", "run strategies over a series, one JSON report each");
    common_flags(backtest, f);
    data_flags(backtest, f);
    strategy_flags(backtest, f);

    auto* compare = app.add_subcommand("compare", "print a comparison table of strategies");
    common_flags(compare, f);
    data_flags(compare, f);
    strategy_flags(compare, f);

    auto* simulate = app.add_subcommand("simulate", "uniform-price simulation over a grid of exponents");
    common_flags(simulate, f);
    simulate->add_option("--n", f.n, "number of prices");
    simulate->add_option("--lo", f.lo, "lower price bound");
    simulate->add_option("--hi", f.hi, "upper price bound");
    simulate->add_option("--rho", f.rho_grid, "exponent grid (repeatable)");
    simulate->add_option("--modulator,-f", f.modulators, "bounded modulators (repeatable)");
    simulate->add_option("--base-cost", f.base_cost, "base cash per buy");
    simulate->add_option("--ref-price", f.ref_price, "'first' or a fixed reference price");
    simulate->add_option("--cap-multiple", f.cap_multiple, "largest allowed buy as a multiple of the base cost");

    auto* verify = app.add_subcommand("verify", "run every inequality check and write verdicts");
    common_flags(verify, f);
    verify->add_option("--cases", f.random_cases, "random cases per suite");
    verify->add_option("--chain-rho", f.chain_rhos, "exponents of the ordering chain (repeatable)");
    verify->add_option("--inject-fault", f.inject_fault, "test mode: sign-flip")
        ->check(CLI::IsMember({"sign-flip"}));

    auto* calibrate = app.add_subcommand("calibrate", "fit the adaptive sigmoid per calendar year");
    common_flags(calibrate, f);
    data_flags(calibrate, f);
    calibrate->add_option("--from", f.from, "explicit window start (inclusive)");
    calibrate->add_option("--to", f.to, "explicit window end (inclusive)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    CLI::App* sub = app.get_subcommands().front();
    return guarded(std::cerr, [&] {
        const RunConfig config = build_config(*sub, f);
        if (sub == backtest) return cmd_backtest(config, std::cout, std::cerr);
        if (sub == compare) return cmd_compare(config, std::cout, std::cerr);
        if (sub == simulate) return cmd_simulate(config, std::cout, std::cerr);
        if (sub == verify) return cmd_verify(config, std::cout, std::cerr);
        return cmd_calibrate(config, std::cout, std::cerr);
    });
}
