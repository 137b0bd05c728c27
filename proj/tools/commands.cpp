#include "commands.hpp"

#include "smartdca/error.hpp"
#include "smartdca/proofs.hpp"
#include "smartdca/report_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace smartdca::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError(DataErrorKind::io, 0, "cannot write " + path.string());
    f << text;
}

void write_json(const fs::path& path, const json& j)
{
    write_text(path, j.dump(2) + "\n");
}

json header(const RunConfig& config)
{
    return {{"seed", config.seed}, {"rng", std::string(rng_algorithm)}};
}

std::string file_stem(std::size_t index, const StrategySpec& spec)
{
    std::ostringstream name;
    name << std::setw(2) << std::setfill('0') << index << '_';
    for (char c : spec.label()) {
        if (c == '+') {
            name << "plus";
        } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-') {
            name << c;
        } else {
            name << '_';
        }
    }
    return name.str();
}

PriceSeries load_series(const RunConfig& config)
{
    if (config.csv) return load_csv(*config.csv, config.columns);
    return synth_uniform(config.synthetic.n, config.synthetic.lo, config.synthetic.hi, config.seed);
}

std::string source_description(const RunConfig& config)
{
    if (config.csv) return config.csv->string();
    std::ostringstream s;
    s << "synthetic:uniform(" << format12(config.synthetic.lo) << ',' << format12(config.synthetic.hi)
      << "),n=" << config.synthetic.n;
    return s.str();
}

struct Comparison {
    std::vector<ComparisonRow> rows;
    std::size_t failed = 0;
};

Comparison run_comparison(const RunConfig& config, std::ostream& err)
{
    const auto specs = resolve_strategies(config);
    const auto series = load_series(config);
    const auto schedule = schedule_every(series, config.every);
    const BacktestOptions options{config.ticks_per_year};

    Comparison result;
    result.rows = compare(series, schedule, specs, options);
    if (config.window) {
        const Duration step = config.step.value_or(*config.window);
        for (auto& row : result.rows) {
            if (!row.report) continue;
            try {
                row.report->windows = sliding_windows(series, row.strategy, *config.window, step, config.every, options);
            } catch (const InvestmentCapError& e) {
                row.error = std::string("window: ") + e.what();
                row.report.reset();
            }
        }
    }
    for (const auto& row : result.rows) {
        if (!row.report) {
            ++result.failed;
            err << "strategy " << row.strategy.label() << " failed: " << row.error << '\n';
        }
    }
    return result;
}

int comparison_exit(const Comparison& c)
{
    if (c.failed == 0) return exit_ok;
    return c.failed == c.rows.size() ? exit_data : exit_partial;
}

std::string reports_csv(const std::vector<ComparisonRow>& rows)
{
    std::ostringstream csv;
    write_reports_csv(rows, csv);
    return csv.str();
}

std::vector<double> default_rho_grid()
{
    std::vector<double> grid;
    for (int k = 0; k <= 12; ++k) grid.push_back(0.25 * k);
    return grid;
}

double as_double(const json& j, const char* key)
{
    if (!j.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
    return j.get<double>();
}

} // namespace

void apply_config(RunConfig& config, const json& j, const fs::path& base_dir)
{
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::vector<std::string> known = {
        "data", "schedule", "strategies", "base_cost", "ref_price", "cap_multiple", "windows", "ticks_per_year",
        "out", "seed", "tolerance", "simulate", "verify", "calibrate"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }

    try {
        if (j.contains("data")) {
            const auto& d = j["data"];
            if (d.contains("csv")) {
                fs::path p = d["csv"].get<std::string>();
                if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
                config.csv = p;
            }
            config.columns.time_column = d.value("time_column", config.columns.time_column);
            config.columns.price_column = d.value("price_column", config.columns.price_column);
            if (d.contains("synthetic")) {
                const auto& s = d["synthetic"];
                config.synthetic.n = s.value("n", config.synthetic.n);
                config.synthetic.lo = s.value("lo", config.synthetic.lo);
                config.synthetic.hi = s.value("hi", config.synthetic.hi);
            }
        }
        if (j.contains("schedule")) config.every = j["schedule"].value("every", config.every);
        if (j.contains("strategies")) {
            if (!j["strategies"].is_array()) throw ConfigError("'strategies' must be an array");
            config.strategies.assign(j["strategies"].begin(), j["strategies"].end());
        }
        if (j.contains("base_cost")) config.base_cost = as_double(j["base_cost"], "base_cost");
        if (j.contains("ref_price")) {
            const auto& rp = j["ref_price"];
            if (rp.is_string() && rp.get<std::string>() == "first") {
                config.ref_price = RefPricePolicy::first_price();
            } else if (rp.is_number()) {
                config.ref_price = RefPricePolicy::fixed(rp.get<double>());
            } else {
                throw ConfigError("'ref_price' must be \"first\" or a number");
            }
        }
        if (j.contains("cap_multiple")) config.cap_multiple = as_double(j["cap_multiple"], "cap_multiple");
        if (j.contains("windows")) {
            const auto& w = j["windows"];
            if (w.contains("length")) config.window = Duration::parse(w["length"].get<std::string>());
            if (w.contains("step")) config.step = Duration::parse(w["step"].get<std::string>());
        }
        if (j.contains("ticks_per_year")) config.ticks_per_year = j["ticks_per_year"].get<std::int64_t>();
        if (j.contains("out")) {
            fs::path p = j["out"].get<std::string>();
            if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
            config.out_dir = p;
        }
        if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("tolerance")) config.tolerance = as_double(j["tolerance"], "tolerance");
        if (j.contains("simulate")) {
            const auto& s = j["simulate"];
            if (s.contains("rho_grid")) {
                const auto& g = s["rho_grid"];
                config.rho_grid.clear();
                if (g.is_array()) {
                    for (const auto& v : g) config.rho_grid.push_back(as_double(v, "rho_grid"));
                } else {
                    const double from = g.at("from").get<double>();
                    const double to = g.at("to").get<double>();
                    const double step = g.at("step").get<double>();
                    if (!(step > 0.0) || to < from) throw ConfigError("bad rho_grid range");
                    const auto n = static_cast<long>(std::floor((to - from) / step + 1e-9));
                    for (long k = 0; k <= n; ++k) config.rho_grid.push_back(from + step * static_cast<double>(k));
                }
            }
            if (s.contains("modulators")) config.modulators = s["modulators"].get<std::vector<std::string>>();
        }
        if (j.contains("verify")) {
            const auto& v = j["verify"];
            config.random_cases = v.value("random_cases", config.random_cases);
            if (v.contains("chain_rhos")) config.chain_rhos = v["chain_rhos"].get<std::vector<double>>();
            config.inject_sign_flip = v.value("inject_sign_flip", config.inject_sign_flip);
        }
        if (j.contains("calibrate")) {
            const auto& c = j["calibrate"];
            if (c.contains("from")) config.from = Timestamp::parse(c["from"].get<std::string>());
            if (c.contains("to")) config.to = Timestamp::parse(c["to"].get<std::string>());
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config: ") + e.what());
    } catch (const DataError& e) {
        throw ConfigError(std::string("bad config: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(std::string("bad config: ") + e.what());
    }

    if (config.csv && !fs::exists(*config.csv)) {
        throw ConfigError("data file not found: " + config.csv->string());
    }
}

RunConfig load_config(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    RunConfig config;
    apply_config(config, j, path.parent_path());
    return config;
}

std::vector<StrategySpec> resolve_strategies(const RunConfig& config)
{
    if (config.strategies.empty()) throw ConfigError("no strategies configured");
    StrategySpec defaults;
    defaults.base_cost = config.base_cost;
    defaults.ref_price = config.ref_price.value_or(RefPricePolicy::first_price());
    defaults.cap_multiple = config.cap_multiple;
    try {
        defaults.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    std::vector<StrategySpec> specs;
    for (const auto& j : config.strategies) specs.push_back(strategy_from_json(j, defaults));
    return specs;
}

int guarded(std::ostream& err, const std::function<int()>& body)
{
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_usage;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return exit_data;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return exit_data;
    } catch (const fs::filesystem_error& e) {
        err << "io error: " << e.what() << '\n';
        return exit_data;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_data;
    }
}

int cmd_backtest(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    const auto result = run_comparison(config, err);

    json index = header(config);
    index["source"] = source_description(config);
    index["reports"] = json::array();
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const auto& row = result.rows[i];
        if (!row.report) continue;
        const auto name = file_stem(i + 1, row.strategy) + ".json";
        json j = header(config);
        j["report"] = report_to_json(*row.report);
        write_json(config.out_dir / "reports" / name, j);
        index["reports"].push_back("reports/" + name);
    }
    write_text(config.out_dir / "comparison.csv", reports_csv(result.rows));
    write_json(config.out_dir / "run.json", index);

    out << "seed " << config.seed << ", " << result.rows.size() - result.failed << '/' << result.rows.size()
        << " strategies ok, output in " << config.out_dir.string() << '\n';
    return comparison_exit(result);
}

int cmd_compare(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    const auto result = run_comparison(config, err);

    out << "seed " << config.seed << '\n';
    out << std::left << std::setw(22) << "strategy" << std::right << std::setw(16) << "mu" << std::setw(16)
        << "roi" << std::setw(16) << "q_tot" << std::setw(16) << "c_tot" << '\n';
    json rows = json::array();
    for (const auto& row : result.rows) {
        out << std::left << std::setw(22) << row.strategy.label() << std::right;
        if (row.report) {
            const auto& r = *row.report;
            out << std::setw(16) << (r.mu ? format12(*r.mu) : "-") << std::setw(16)
                << (r.roi ? format12(*r.roi) : "-") << std::setw(16) << format12(r.q_tot) << std::setw(16)
                << format12(r.c_tot) << '\n';
            rows.push_back(report_to_json(r));
        } else {
            out << "  failed: " << row.error << '\n';
            rows.push_back({{"strategy", strategy_to_json(row.strategy)}, {"status", "error"}, {"error", row.error}});
        }
    }
    json j = header(config);
    j["source"] = source_description(config);
    j["rows"] = rows;
    write_json(config.out_dir / "comparison.json", j);
    write_text(config.out_dir / "comparison.csv", reports_csv(result.rows));
    return comparison_exit(result);
}

int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    const auto series = synth_uniform(config.synthetic.n, config.synthetic.lo, config.synthetic.hi, config.seed);
    const auto schedule = schedule_all(series);
    const auto grid = config.rho_grid.empty() ? default_rho_grid() : config.rho_grid;

    std::vector<Modulator> mods;
    for (const auto& name : config.modulators) mods.push_back(Modulator::parse(name));

    // Rows are ordered by rho, then dca, rho, then in/out per modulator.
    struct Item {
        double rho;
        StrategySpec spec;
        std::string f;
    };
    std::vector<Item> items;
    for (double rho : grid) {
        items.push_back({rho, StrategySpec::dca(config.base_cost), "identity"});
        items.push_back({rho, StrategySpec::smart(rho, config.base_cost), "identity"});
        for (const auto& f : mods) {
            items.push_back({rho, StrategySpec::f_rho_in(rho, f, config.base_cost), f.name()});
            items.push_back({rho, StrategySpec::f_rho_out(rho, f, config.base_cost), f.name()});
        }
    }

    std::ostringstream curves;
    std::ostringstream investments;
    curves << "rho,variant,f,mu,max_single_investment\n";
    investments << "rho,variant,f,event,price,cash\n";
    std::size_t failed = 0;
    const RefPricePolicy ref_price = config.ref_price.value_or(RefPricePolicy::fixed(1.0));
    for (auto& item : items) {
        item.spec.ref_price = ref_price;
        item.spec.cap_multiple = config.cap_multiple;
        const std::string variant = to_string(item.spec.variant);
        const std::string prefix = format12(item.rho) + ',' + variant + ',' + item.f + ',';
        try {
            const auto ledger = run_ledger(series, schedule, item.spec, BacktestOptions{config.ticks_per_year});
            const auto report = summarize(ledger, item.spec, series, resolve_ref_price(item.spec, series));
            curves << prefix << (report.mu ? format12(*report.mu) : "") << ','
                   << format12(report.max_single_investment) << '\n';
            for (const auto& e : ledger.entries()) {
                investments << prefix << e.time.to_string() << ',' << format12(e.order.price) << ','
                            << format12(e.order.cash) << '\n';
            }
        } catch (const InvestmentCapError& e) {
            ++failed;
            err << "simulate " << item.spec.label() << ": " << e.what() << '\n';
            curves << prefix << ",\n";
        }
    }

    write_text(config.out_dir / "simulate_mu.csv", curves.str());
    write_text(config.out_dir / "simulate_investments.csv", investments.str());
    std::ostringstream prices;
    write_csv(series, prices);
    write_text(config.out_dir / "simulate_prices.csv", prices.str());
    json meta = header(config);
    meta["source"] = source_description(config);
    meta["base_cost"] = round12(config.base_cost);
    meta["ref_price"] =
        ref_price.kind == RefPricePolicy::Kind::fixed ? json(round12(ref_price.value)) : json("first");
    meta["rho_grid"] = json::array();
    for (double r : grid) meta["rho_grid"].push_back(round12(r));
    meta["modulators"] = config.modulators;
    meta["files"] = {"simulate_mu.csv", "simulate_investments.csv", "simulate_prices.csv"};
    write_json(config.out_dir / "metadata.json", meta);

    out << "seed " << config.seed << ", " << items.size() - failed << '/' << items.size()
        << " runs ok, output in " << config.out_dir.string() << '\n';
    if (failed == 0) return exit_ok;
    return failed == items.size() ? exit_data : exit_partial;
}

int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    VerifyOptions options;
    options.seed = config.seed;
    options.tolerance = config.tolerance;
    options.random_cases = config.random_cases;
    options.chain_rhos = config.chain_rhos;
    options.inject_sign_flip = config.inject_sign_flip;

    const auto reports = run_verification_suite(options);
    bool all_hold = true;
    json checks = json::array();
    for (const auto& r : reports) {
        all_hold = all_hold && r.holds;
        checks.push_back(verdict_to_json(r));
        out << (r.holds ? "PASS " : "FAIL ") << r.check << " (" << r.cases << " cases)\n";
        if (!r.holds) {
            err << "violated: " << r.check << " lhs=" << format12(r.lhs) << " rhs=" << format12(r.rhs)
                << " slack=" << format12(r.slack) << " witness=[";
            for (std::size_t i = 0; i < r.witness.size(); ++i) err << (i ? "," : "") << format12(r.witness[i]);
            err << "]\n";
        }
    }
    json j = header(config);
    j["tolerance"] = config.tolerance;
    j["all_hold"] = all_hold;
    j["checks"] = checks;
    write_json(config.out_dir / "verdicts.json", j);
    return all_hold ? exit_ok : exit_verification;
}

int cmd_calibrate(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    (void)err;
    if (!config.csv) throw ConfigError("calibrate needs a csv data source");
    const auto series = load_csv(*config.csv, config.columns);

    struct Window {
        std::string name;
        PriceSeries prices;
    };
    std::vector<Window> windows;
    if (config.from || config.to) {
        const Timestamp from = config.from.value_or(series.timestamp(0));
        const Timestamp to = config.to.value_or(series.timestamp(series.size() - 1));
        if (from.kind() != to.kind() || from.kind() != series.timestamp(0).kind()) {
            throw ConfigError("calibration window and series use different timestamp kinds");
        }
        const std::string name = from.to_string() + ".." + to.to_string();
        // The explicit window is inclusive of `to`.
        const Timestamp end = to.is_date() ? Timestamp::from_days(to.value() + 1) : Timestamp::tick(to.value() + 1);
        windows.push_back({name, series.between(from, end)});
    } else {
        std::map<std::int64_t, std::vector<std::size_t>> years;
        for (std::size_t i = 0; i < series.size(); ++i) {
            years[series.timestamp(i).year(config.ticks_per_year)].push_back(i);
        }
        for (const auto& [year, idx] : years) {
            windows.push_back({std::to_string(year), series.slice(idx.front(), idx.back() + 1)});
        }
    }

    json rows = json::array();
    for (const auto& w : windows) {
        if (w.prices.empty()) {
            throw DataError(DataErrorKind::empty, 0, "calibration window " + w.name + " has no prices");
        }
        const auto c = calibrate_sig_plus_window(w.prices.prices());
        rows.push_back({{"window", w.name},
                        {"start", w.prices.timestamp(0).to_string()},
                        {"end", w.prices.timestamp(w.prices.size() - 1).to_string()},
                        {"count", w.prices.size()},
                        {"y_min", round12(c.y_min)},
                        {"y_max", round12(c.y_max)},
                        {"x0", c.x0},
                        {"lambda", c.lambda},
                        {"floored", c.floored}});
        out << w.name << ": x0=" << format12(c.x0) << " lambda=" << format12(c.lambda)
            << (c.floored ? " (lambda floored)" : "") << '\n';
    }
    json j = header(config);
    j["source"] = source_description(config);
    j["windows"] = rows;
    write_json(config.out_dir / "calibration.json", j);
    return exit_ok;
}

} // namespace smartdca::cli
