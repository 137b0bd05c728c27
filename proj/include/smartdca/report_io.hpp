#pragma once

#include "smartdca/backtest.hpp"
#include "smartdca/proofs.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace smartdca {

/// `v` rounded to 12 significant digits, the precision of every emitted number.
double round12(double v);

/// "%.12g" formatting used by the CSV writers.
std::string format12(double v);

nlohmann::json strategy_to_json(const StrategySpec& spec);

/// Accepts either a compact string ("rho:2") or an object
/// {variant, rho, base_cost, ref_price: "first" | number, modulator, cap_multiple}.
/// Missing fields fall back to `defaults`.
StrategySpec strategy_from_json(const nlohmann::json& j, const StrategySpec& defaults = {});

/// {strategy, status, mu, q_tot, c_tot, roi, final_price, ref_price, buys,
///  max_single_investment, start, end, windows[]}; mu and roi are null when
/// nothing was bought.
nlohmann::json report_to_json(const BacktestReport& report);

nlohmann::json verdict_to_json(const InequalityReport& report);

/// Header: strategy,variant,rho,modulator,status,mu,q_tot,c_tot,roi,final_price,
/// max_single_investment,start,end,error. Windows of each report follow it
/// as extra rows.
void write_reports_csv(std::span<const ComparisonRow> rows, std::ostream& out);

} // namespace smartdca
