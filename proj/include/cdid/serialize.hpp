#pragma once

#include "cdid/bootstrap.hpp"
#include "cdid/data_model.hpp"
#include "cdid/effects.hpp"
#include "cdid/empirical.hpp"
#include "cdid/simulation.hpp"
#include "cdid/trend.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace cdid {

using Json = nlohmann::ordered_json;

/// Non-finite values become null.
Json number(double v);

Json to_json(const CrossingPoint& c);
Json to_json(const PiecewiseQFit& fit);
Json to_json(const BootstrapResult& b);
Json to_json(const std::vector<PeriodSummary>& summary);
Json to_json(const EffectEstimate& e);
Json to_json(const BoundsResult& b);
Json to_json(const DominanceResult& d);
Json to_json(const LinearityTest& t);
/// Metadata only; the grid goes to CSV.
Json trend_metadata(const TrendMap& trend);
Json to_json(const DgpSpec& dgp);

/// Accepts either the per-kind parameter arrays, e.g.
///   {"kind": "linear_system", "alpha": [1, 0], "beta": 2, "gamma": [0, 1],
///    "delta": [2, 1], "rho": 0.5}
/// or the generic {"kind", "periods": [{loc, scale, ...}], ...} form written by to_json.
DgpSpec dgp_from_json(const Json& j);

/// Minimal TOML reader: `key = value` pairs with numbers, strings, booleans and
/// (possibly multi-line) arrays, `#` comments, and `[table]` headers.
Json parse_toml(std::istream& in, const std::string& source = "<toml>");

/// Reads a DGP config; `.toml` files go through parse_toml, anything else is JSON.
DgpSpec load_dgp(const std::filesystem::path& path);

void write_trend_csv(std::ostream& out, const TrendMap& trend);
void write_summary_csv(std::ostream& out, const std::vector<PeriodSummary>& summary);

/// `x,q_x,value,ci_lo,ci_hi`; missing CIs are empty fields.
void write_effects_csv(std::ostream& out, const std::vector<EffectEstimate>& effects);
/// `x,lower,upper,point_identified`.
void write_bounds_csv(std::ostream& out, const std::vector<BoundsResult>& bounds);

/// Shortest round-trip decimal; "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double v);

}  // namespace cdid
