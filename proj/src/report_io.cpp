#include "smartdca/report_io.hpp"

#include "smartdca/error.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace smartdca {

using nlohmann::json;

namespace {

json number(double v)
{
    return std::isfinite(v) ? json(round12(v)) : json(nullptr);
}

json optional_number(const std::optional<double>& v)
{
    return v ? number(*v) : json(nullptr);
}

std::string csv_field(const std::optional<double>& v)
{
    return v ? format12(*v) : std::string{};
}

Variant parse_variant(const std::string& s)
{
    if (s == "ri") return Variant::ri;
    if (s == "dca") return Variant::dca;
    if (s == "rho") return Variant::rho;
    if (s == "in") return Variant::f_rho_in;
    if (s == "out") return Variant::f_rho_out;
    if (s == "sig+") return Variant::sig_plus;
    throw ConfigError("unknown strategy variant '" + s + "'");
}

void write_row(std::ostream& out, const StrategySpec& spec, const BacktestReport* r, const std::string& error)
{
    out << spec.label() << ',' << to_string(spec.variant) << ',' << format12(spec.canonical().rho) << ','
        << (spec.variant == Variant::sig_plus ? std::string("sig+") : spec.modulator.name()) << ',';
    if (r) {
        out << to_string(r->status) << ',' << csv_field(r->mu) << ',' << format12(r->q_tot) << ','
            << format12(r->c_tot) << ',' << csv_field(r->roi) << ',' << format12(r->final_price) << ','
            << format12(r->max_single_investment) << ',' << r->start.to_string() << ',' << r->end.to_string()
            << ',';
    } else {
        out << "error,,,,,,,,,";
    }
    // Error messages may contain commas.
    std::string e = error;
    for (auto& c : e) {
        if (c == ',' || c == '\n') c = ';';
    }
    out << e << '\n';
}

} // namespace

double round12(double v)
{
    if (!std::isfinite(v) || v == 0.0) return v;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

std::string format12(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

json strategy_to_json(const StrategySpec& spec)
{
    json j;
    j["label"] = spec.label();
    j["variant"] = to_string(spec.variant);
    j["rho"] = number(spec.canonical().rho);
    j["base_cost"] = number(spec.base_cost);
    if (spec.ref_price.kind == RefPricePolicy::Kind::fixed) {
        j["ref_price"] = number(spec.ref_price.value);
    } else {
        j["ref_price"] = "first";
    }
    if (spec.variant == Variant::sig_plus) {
        j["modulator"] = "sig+";
    } else {
        j["modulator"] = spec.modulator.name();
        if (spec.modulator.kind() == ModulatorKind::adaptive_sigmoid) {
            j["x0"] = number(spec.modulator.x0());
            j["lambda"] = number(spec.modulator.lambda());
        }
    }
    j["cap_multiple"] = number(spec.cap_multiple);
    return j;
}

StrategySpec strategy_from_json(const json& j, const StrategySpec& defaults)
{
    if (j.is_string()) {
        auto s = parse_strategy(j.get<std::string>(), defaults.base_cost, defaults.ref_price);
        s.cap_multiple = defaults.cap_multiple;
        return s;
    }
    if (!j.is_object()) {
        throw ConfigError("strategy must be a string or an object");
    }
    try {
        StrategySpec s = defaults;
        const auto variant = parse_variant(j.at("variant").get<std::string>());
        s.variant = variant;
        s.rho = j.value("rho", variant == Variant::ri ? -1.0 : variant == Variant::sig_plus ? 1.0 : 0.0);
        s.base_cost = j.value("base_cost", defaults.base_cost);
        s.cap_multiple = j.value("cap_multiple", defaults.cap_multiple);
        if (j.contains("ref_price")) {
            const auto& rp = j["ref_price"];
            if (rp.is_string() && rp.get<std::string>() == "first") {
                s.ref_price = RefPricePolicy::first_price();
            } else if (rp.is_number()) {
                s.ref_price = RefPricePolicy::fixed(rp.get<double>());
            } else {
                throw ConfigError("ref_price must be \"first\" or a number");
            }
        }
        const std::string mod = j.value("modulator", std::string("identity"));
        if (variant == Variant::sig_plus) {
            s.modulator = StrategySpec::sig_plus().modulator;
        } else if (mod == "adaptive_sigmoid") {
            s.modulator = Modulator::adaptive_sigmoid(j.at("x0").get<double>(), j.at("lambda").get<double>());
        } else {
            s.modulator = Modulator::parse(mod);
        }
        if (variant == Variant::ri || variant == Variant::dca) {
            s = s.canonical();
            s.variant = variant;
        }
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad strategy object: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(std::string("bad strategy object: ") + e.what());
    }
}

json report_to_json(const BacktestReport& r)
{
    json j;
    j["strategy"] = strategy_to_json(r.strategy);
    j["status"] = to_string(r.status);
    j["mu"] = optional_number(r.mu);
    j["q_tot"] = number(r.q_tot);
    j["c_tot"] = number(r.c_tot);
    j["roi"] = optional_number(r.roi);
    j["final_price"] = number(r.final_price);
    j["ref_price"] = number(r.ref_price);
    j["buys"] = r.buys;
    j["max_single_investment"] = number(r.max_single_investment);
    j["start"] = r.start.to_string();
    j["end"] = r.end.to_string();
    j["windows"] = json::array();
    for (const auto& w : r.windows) {
        j["windows"].push_back(report_to_json(w));
    }
    return j;
}

json verdict_to_json(const InequalityReport& r)
{
    json j;
    j["check"] = r.check;
    j["holds"] = r.holds;
    j["lhs"] = number(r.lhs);
    j["rhs"] = number(r.rhs);
    j["slack"] = number(r.slack);
    j["tolerance"] = number(r.tolerance);
    j["cases"] = r.cases;
    j["witness"] = json::array();
    for (double v : r.witness) j["witness"].push_back(number(v));
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

void write_reports_csv(std::span<const ComparisonRow> rows, std::ostream& out)
{
    out << "strategy,variant,rho,modulator,status,mu,q_tot,c_tot,roi,final_price,max_single_investment,start,end,"
           "error\n";
    for (const auto& row : rows) {
        write_row(out, row.strategy, row.report ? &*row.report : nullptr, row.error);
        if (row.report) {
            for (const auto& w : row.report->windows) write_row(out, row.strategy, &w, {});
        }
    }
}

} // namespace smartdca
