#include "binmargin/json_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "binmargin/errors.hpp"

namespace binmargin {

void to_json(Json& j, const MarginPair& mp) { j = Json{{"r", mp.rows()}, {"c", mp.cols()}}; }

void from_json(const Json& j, MarginPair& mp) {
  if (!j.is_object() || !j.contains("r") || !j.contains("c"))
    throw InvalidArgument("margins JSON needs keys \"r\" and \"c\"");
  for (const auto& [key, _] : j.items())
    if (key != "r" && key != "c") throw InvalidArgument("margins JSON: unknown key \"" + key + "\"");
  try {
    mp = MarginPair(j.at("r").get<std::vector<std::int64_t>>(), j.at("c").get<std::vector<std::int64_t>>());
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("margins JSON: ") + e.what());
  }
}

void to_json(Json& j, const BlockParams& p) { j = Json{{"n", p.n}, {"delta", p.delta}, {"b", p.b}, {"c", p.c}}; }

void from_json(const Json& j, BlockParams& p) {
  try {
    p.n = j.at("n").get<std::int64_t>();
    p.delta = j.at("delta").get<double>();
    p.b = j.at("b").get<double>();
    p.c = j.at("c").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("block params JSON: ") + e.what());
  }
  p.validate();
}

void to_json(Json& j, const Cell& c) { j = Json::array({c.row, c.col}); }

void to_json(Json& j, const BinaryTable& t) {
  j = Json::array();
  for (std::size_t i = 0; i < t.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t c = 0; c < t.cols(); ++c) row.push_back(static_cast<int>(t(i, c)));
    j.push_back(std::move(row));
  }
}

void to_json(Json& j, const TypicalTable& t) {
  Json z = Json::array();
  for (std::size_t i = 0; i < t.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t c = 0; c < t.cols(); ++c) row.push_back(t.z(i, c));
    z.push_back(std::move(row));
  }
  j = Json{{"z", std::move(z)},
           {"row_duals", t.row_duals},
           {"col_duals", t.col_duals},
           {"entropy", t.entropy},
           {"residual", t.residual}};
}

void to_json(Json& j, const BlockSolution& s) {
  j = Json{{"p", s.p_var},       {"q", s.q_var},         {"z_tl", s.z_tl},
           {"z_side", s.z_side}, {"z_br", s.z_br},       {"residual", s.residual},
           {"iterations", s.iterations}};
}

void to_json(Json& j, const LimitLaw& l) {
  j = Json{{"p_star", l.p_star},
           {"q_star", l.q_star},
           {"mean_tl", l.mean_tl},
           {"mean_side", l.mean_side},
           {"mean_br", l.mean_br}};
}

void to_json(Json& j, const RegimeSet& r) {
  Json members = Json::array();
  for (Regime g : r.members()) members.push_back(to_string(g));
  j = Json{{"regimes", std::move(members)}, {"global_bound", r.global_bound}};
}

void to_json(Json& j, const UniformityReport& r) {
  j = Json{{"count", to_decimal(r.count)},
           {"entropy", r.entropy},
           {"max_deviation", r.max_deviation},
           {"log_acceptance", r.log_acceptance},
           {"acceptance", r.acceptance}};
}

void to_json(Json& j, const MarginalReport& r) {
  Json rows = Json::array();
  for (const auto& b : r.blocks) {
    Json row{{"params", r.params},
             {"block", to_string(b.block)},
             {"n", r.params.n},
             {"k", r.k},
             {"cell", b.cell},
             {"empirical", b.empirical},
             {"target", b.target},
             {"tv", b.tv},
             {"stderr", b.stderr_},
             {"pooled", b.pooled},
             {"pooled_tv", b.pooled_tv}};
    row["exact"] = b.exact ? Json(*b.exact) : Json(nullptr);
    rows.push_back(std::move(row));
  }
  j = Json{{"params", r.params}, {"sampler", to_string(r.sampler)}, {"k", r.k}, {"seed", r.seed},
           {"blocks", std::move(rows)}};
}

void to_json(Json& j, const JointReport& r) {
  j = Json{{"params", r.params},
           {"block", to_string(r.block)},
           {"n", r.params.n},
           {"k", r.k},
           {"cells", r.cells},
           {"window", r.window},
           {"pattern_counts", r.pattern_counts},
           {"empirical", r.empirical},
           {"target", r.target_mean},
           {"target_law", r.target_law},
           {"tv", r.tv},
           {"tv_product_empirical", r.tv_product_empirical}};
}

void to_json(Json& j, const ExactJointReport& r) {
  j = Json{{"params", r.params},         {"block", to_string(r.block)}, {"n", r.params.n},
           {"cells", r.cells},           {"law", r.law},                {"marginals", r.marginals},
           {"product_law", r.product_law}, {"tv_product", r.tv_product}};
}

void to_json(Json& j, const MomentReport& r) {
  j = Json{{"params", r.params},
           {"block", to_string(r.block)},
           {"n", r.params.n},
           {"k", r.k},
           {"cells", r.cells},
           {"powers", r.powers},
           {"empirical", r.empirical},
           {"first_moment", r.first_moment},
           {"target", r.target},
           {"gap", r.gap}};
  j["exact"] = r.exact ? Json(*r.exact) : Json(nullptr);
}

void to_json(Json& j, const LlnReport& r) {
  Json pts = Json::array();
  for (const auto& p : r.points) {
    Json row{{"n", p.n},         {"heavy_count", p.heavy_count}, {"k", p.k},     {"empirical", p.mean},
             {"std", p.stddev},  {"target", p.target},           {"gap", p.gap}};
    row["exact"] = p.exact_mean ? Json(*p.exact_mean) : Json(nullptr);
    pts.push_back(std::move(row));
  }
  j = Json{{"params", r.params},
           {"block", to_string(r.which)},
           {"points", std::move(pts)},
           {"std_decreasing", r.std_decreasing},
           {"gap_decreasing", r.gap_decreasing}};
}

void to_json(Json& j, const BlockFit& f) {
  j = Json{{"slope", f.slope},
           {"intercept", f.intercept},
           {"r_squared", f.r_squared},
           {"theoretical", f.theoretical},
           {"floored", f.floored}};
}

void to_json(Json& j, const RateFit& f) {
  Json fits = Json::object();
  for (const auto& [label, fit] : f.fits) fits[label] = fit;
  j = Json{{"exponents", f.exponents()}, {"r_squared", f.r_squared}, {"fits", std::move(fits)}, {"advisory", true}};
}

MarginPair read_margins_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open margins file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("margins file '" + path + "': " + e.what());
  }
  return j.get<MarginPair>();
}

std::string to_decimal(const BigInt& x) { return x.str(); }

std::string marginal_csv_header() { return "n,delta,b,c,block,k,empirical,target,tv,stderr,pooled,pooled_tv,exact\n"; }

std::string marginal_csv_rows(const MarginalReport& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (const auto& b : r.blocks) {
    os << r.params.n << ',' << r.params.delta << ',' << r.params.b << ',' << r.params.c << ',' << to_string(b.block)
       << ',' << r.k << ',' << b.empirical << ',' << b.target << ',' << b.tv << ',' << b.stderr_ << ',' << b.pooled
       << ',' << b.pooled_tv << ',';
    if (b.exact) os << *b.exact;
    os << '\n';
  }
  return os.str();
}

}  // namespace binmargin
