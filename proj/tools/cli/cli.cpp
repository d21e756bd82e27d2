#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "binmargin/entropy.hpp"
#include "binmargin/errors.hpp"
#include "binmargin/exact_oracle.hpp"
#include "binmargin/json_io.hpp"
#include "binmargin/mcmc.hpp"

namespace binmargin::cli {

namespace {

const std::map<std::string, Command>& command_names() {
  static const std::map<std::string, Command> names = {
      {"typical", Command::kTypical}, {"count", Command::kCount},       {"enumerate", Command::kEnumerate},
      {"sample", Command::kSample},   {"marginal", Command::kMarginal}, {"joint", Command::kJoint},
      {"moments", Command::kMoments}, {"lln", Command::kLln},           {"rates", Command::kRates},
      {"verify", Command::kVerify}};
  return names;
}

Command parse_command(const std::string& s) {
  auto it = command_names().find(s);
  if (it == command_names().end()) throw InvalidArgument("unknown command '" + s + "'");
  return it->second;
}

Format parse_format(const std::string& s) {
  if (s == "json") return Format::kJson;
  if (s == "jsonl") return Format::kJsonl;
  if (s == "csv") return Format::kCsv;
  throw InvalidArgument("--format: expected json, jsonl or csv, got '" + s + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

double to_real(const std::string& s, const std::string& flag) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument(flag + ": '" + s + "' is not a number");
  }
}

std::int64_t to_int(const std::string& s, const std::string& flag) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument(flag + ": '" + s + "' is not an integer");
  }
}

BlockParams parse_params(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 4) throw InvalidArgument("--params: expected n,delta,b,c, got '" + s + "'");
  BlockParams p;
  p.n = to_int(parts[0], "--params");
  p.delta = to_real(parts[1], "--params");
  p.b = to_real(parts[2], "--params");
  p.c = to_real(parts[3], "--params");
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(std::string("--params: ") + e.what());
  }
  return p;
}

std::vector<std::int64_t> parse_int_list(const std::string& s, const std::string& flag) {
  std::vector<std::int64_t> out;
  for (const auto& part : split(s, ',')) out.push_back(to_int(part, flag));
  if (out.empty()) throw InvalidArgument(flag + ": empty list");
  return out;
}

std::vector<Cell> parse_cells(const std::string& s) {
  std::vector<Cell> out;
  for (const auto& part : split(s, ',')) {
    const auto ij = split(part, ':');
    if (ij.size() != 2) throw InvalidArgument("--cells: expected i:j pairs, got '" + part + "'");
    const auto i = to_int(ij[0], "--cells");
    const auto j = to_int(ij[1], "--cells");
    if (i < 0 || j < 0) throw InvalidArgument("--cells: indices must be nonnegative");
    out.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
  }
  if (out.empty()) throw InvalidArgument("--cells: empty list");
  return out;
}

// Raw flag values; every field stays a string until resolution so that
// config-file values and flags go through the same conversion.
struct RawFlags {
  std::string command;
  std::map<std::string, std::string> values;
  std::map<std::string, bool> switches;
};

const std::vector<std::string>& value_keys() {
  static const std::vector<std::string> keys = {"params", "margins", "sampler", "seed",     "tol",     "out",
                                                "format", "threads", "k",       "burn-in",  "thin",    "csv",
                                                "block",  "k-cells", "n-sweep", "cells",    "powers",  "cap",
                                                "max-states", "max-tries"};
  return keys;
}

const std::vector<std::string>& switch_keys() {
  static const std::vector<std::string> keys = {"dry-run", "exact", "mcmc", "rejection", "oracle"};
  return keys;
}

std::string json_scalar(const Json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_float()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return os.str();
  }
  if (v.is_array()) {
    std::string out;
    for (const auto& e : v) {
      if (!out.empty()) out += ',';
      out += json_scalar(e, key);
    }
    return out;
  }
  if (v.is_object() && key == "params") {
    const BlockParams p = v.get<BlockParams>();
    std::ostringstream os;
    os.precision(17);
    os << p.n << ',' << p.delta << ',' << p.b << ',' << p.c;
    return os.str();
  }
  throw InvalidArgument("config key \"" + key + "\": unsupported value");
}

void apply_config_file(const std::string& path, RawFlags& raw, const std::map<std::string, bool>& given) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("--config: cannot open '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("--config: " + std::string(e.what()));
  }
  if (!j.is_object()) throw InvalidArgument("--config: expected a flat JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "command") {
      if (raw.command.empty()) raw.command = json_scalar(v, key);
      continue;
    }
    const bool is_value = std::find(value_keys().begin(), value_keys().end(), key) != value_keys().end();
    const bool is_switch = std::find(switch_keys().begin(), switch_keys().end(), key) != switch_keys().end();
    if (!is_value && !is_switch) throw InvalidArgument("--config: unknown key \"" + key + "\"");
    if (given.count(key) && given.at(key)) continue;
    if (is_switch) {
      if (!v.is_boolean()) throw InvalidArgument("--config: key \"" + key + "\" must be true or false");
      raw.switches[key] = v.get<bool>();
    } else {
      raw.values[key] = json_scalar(v, key);
    }
  }
}

RunConfig resolve(const RawFlags& raw) {
  RunConfig cfg;
  if (raw.command.empty()) throw InvalidArgument("missing command (one of typical, count, enumerate, sample, "
                                                 "marginal, joint, moments, lln, rates, verify)");
  cfg.command = parse_command(raw.command);
  auto value = [&](const std::string& key) -> std::optional<std::string> {
    auto it = raw.values.find(key);
    if (it == raw.values.end()) return std::nullopt;
    return it->second;
  };
  auto on = [&](const std::string& key) {
    auto it = raw.switches.find(key);
    return it != raw.switches.end() && it->second;
  };
  auto positive = [&](const std::string& key, std::int64_t lo) {
    const auto v = to_int(*value(key), "--" + key);
    if (v < lo) throw InvalidArgument("--" + key + ": must be >= " + std::to_string(lo));
    return v;
  };

  if (auto v = value("params")) cfg.params = parse_params(*v);
  if (auto v = value("margins")) cfg.margins_file = *v;
  if (cfg.params && cfg.margins_file) throw InvalidArgument("--params and --margins are mutually exclusive");
  if (!cfg.params && !cfg.margins_file) throw InvalidArgument("one of --params or --margins is required");

  int sampler_flags = on("exact") + on("mcmc") + on("rejection");
  if (sampler_flags > 1) throw InvalidArgument("--exact, --mcmc and --rejection are mutually exclusive");
  if (auto v = value("sampler")) {
    if (sampler_flags) throw InvalidArgument("--sampler conflicts with --exact/--mcmc/--rejection");
    try {
      cfg.sampler = parse_sampler(*v);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(std::string("--sampler: ") + e.what());
    }
  }
  if (on("exact")) cfg.sampler = SamplerKind::kExact;
  if (on("mcmc")) cfg.sampler = SamplerKind::kMcmc;
  if (on("rejection")) cfg.sampler = SamplerKind::kRejection;

  if (value("seed")) {
    const auto& s = *value("seed");
    try {
      std::size_t used = 0;
      cfg.seed = std::stoull(s, &used);
      if (used != s.size() || s.front() == '-') throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw InvalidArgument("--seed: '" + s + "' is not a nonnegative integer");
    }
  }
  if (value("tol")) {
    cfg.tol = to_real(*value("tol"), "--tol");
    if (!(cfg.tol > 0.0)) throw InvalidArgument("--tol: must be positive");
  }
  if (auto v = value("out")) cfg.output = *v;
  if (auto v = value("format")) {
    cfg.format = parse_format(*v);
  } else {
    auto ends_with = [&](const std::string& ext) {
      return cfg.output.size() >= ext.size() && cfg.output.compare(cfg.output.size() - ext.size(), ext.size(), ext) == 0;
    };
    if (ends_with(".jsonl") || (cfg.command == Command::kSample && cfg.output.empty()))
      cfg.format = Format::kJsonl;
    else if (ends_with(".csv"))
      cfg.format = Format::kCsv;
  }
  if (value("threads")) cfg.threads = static_cast<std::size_t>(positive("threads", 1));
  if (value("k")) cfg.k = static_cast<std::size_t>(positive("k", 1));
  if (value("burn-in")) cfg.burn_in = positive("burn-in", 0);
  if (value("thin")) cfg.thin = positive("thin", 1);
  if (auto v = value("csv")) cfg.csv = *v;
  if (auto v = value("block")) {
    try {
      cfg.block = parse_block(*v);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(std::string("--block: ") + e.what());
    }
  }
  if (value("k-cells")) cfg.k_cells = static_cast<std::size_t>(positive("k-cells", 1));
  if (auto v = value("n-sweep")) {
    cfg.n_sweep = parse_int_list(*v, "--n-sweep");
    for (auto n : cfg.n_sweep)
      if (n < 1) throw InvalidArgument("--n-sweep: entries must be >= 1");
  }
  if (auto v = value("cells")) cfg.cells = parse_cells(*v);
  if (auto v = value("powers")) {
    for (auto x : parse_int_list(*v, "--powers")) {
      if (x < 1) throw InvalidArgument("--powers: entries must be >= 1");
      cfg.powers.push_back(static_cast<int>(x));
    }
  }
  if (value("cap")) cfg.cap = static_cast<std::size_t>(positive("cap", 0));
  if (value("max-states")) cfg.max_states = static_cast<std::size_t>(positive("max-states", 1));
  if (value("max-tries")) cfg.max_tries = static_cast<std::uint64_t>(positive("max-tries", 0));
  cfg.oracle = on("oracle");
  cfg.dry_run = on("dry-run");
  return cfg;
}

struct App {
  CLI::App app{"Typical tables, exact oracles and samplers for binary contingency tables with block margins",
               "binmargin"};
  RawFlags raw;
  std::map<std::string, CLI::Option*> options;
  std::string config_path;
  std::map<std::string, std::string> value_store;
  std::map<std::string, bool> switch_store;

  App() {
    app.add_option("command", raw.command,
                   "typical | count | enumerate | sample | marginal | joint | moments | lln | rates | verify");
    auto value_opt = [&](const std::string& name, const std::string& flags, const std::string& help) {
      options[name] = app.add_option(flags, value_store[name], help);
    };
    value_opt("params", "--params", "Block parameters n,delta,b,c");
    value_opt("margins", "--margins", "Margins file {\"r\": [...], \"c\": [...]}");
    value_opt("sampler", "--sampler", "exact | mcmc | rejection");
    value_opt("seed", "--seed", "Random seed (default 0)");
    value_opt("tol", "--tol", "Solver tolerance on the max margin residual (default 1e-10)");
    value_opt("out", "--out", "Write the primary output to this file instead of stdout");
    value_opt("format", "--format", "json | jsonl | csv");
    value_opt("threads", "--threads", "Worker cap for sweeps and chains");
    value_opt("k", "-k", "Number of samples");
    value_opt("burn-in", "--burn-in", "MCMC burn-in steps (default 50 mn ln(mn))");
    value_opt("thin", "--thin", "MCMC steps between retained samples (default mn)");
    value_opt("csv", "--csv", "Also write per-(n, block) rows to this CSV file");
    value_opt("block", "--block", "TL | SIDE | BR");
    value_opt("k-cells", "--k-cells", "Number of jointly observed cells");
    value_opt("n-sweep", "--n-sweep", "Comma-separated n values");
    value_opt("cells", "--cells", "Cells as i:j pairs, comma-separated, 0-indexed");
    value_opt("powers", "--powers", "Exponents, one per cell");
    value_opt("cap", "--cap", "Largest table count enumerate will list");
    value_opt("max-states", "--max-states", "Exact oracle state budget");
    value_opt("max-tries", "--max-tries", "Rejection sampler attempts per draw");
    auto switch_opt = [&](const std::string& name, const std::string& flags, const std::string& help) {
      options[name] = app.add_flag(flags, switch_store[name], help);
    };
    switch_opt("dry-run", "--dry-run", "Print the resolved configuration and regime, then exit");
    switch_opt("exact", "--exact", "Use the exact uniform sampler");
    switch_opt("mcmc", "--mcmc", "Use the swap chain");
    switch_opt("rejection", "--rejection", "Use Bernoulli rejection sampling");
    switch_opt("oracle", "--oracle", "joint: exact joint law instead of sampling");
    app.add_option("--config", config_path, "Flat JSON file of flag defaults");
  }

  RunConfig parse(const std::vector<std::string>& args) {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
      app.parse(rev);
    } catch (const CLI::CallForHelp&) {
      throw;
    } catch (const CLI::ParseError& e) {
      throw InvalidArgument(e.what());
    }
    std::map<std::string, bool> given;
    for (const auto& [name, opt] : options) {
      given[name] = opt->count() > 0;
      if (!given[name]) continue;
      if (switch_store.count(name))
        raw.switches[name] = switch_store[name];
      else
        raw.values[name] = value_store[name];
    }
    if (!config_path.empty()) apply_config_file(config_path, raw, given);
    return resolve(raw);
  }
};

enum class LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

LogLevel log_level() {
  const char* env = std::getenv("BINMARGIN_LOG");
  if (!env) return LogLevel::kInfo;
  const std::string v = env;
  if (v == "error") return LogLevel::kError;
  if (v == "debug") return LogLevel::kDebug;
  return LogLevel::kInfo;
}

class Runner {
 public:
  Runner(const RunConfig& cfg, std::ostream& out, std::ostream& err) : cfg_(cfg), out_(out), err_(err) {}

  int execute() {
    if (cfg_.params) {
      const RegimeSet regimes = classify_regime(*cfg_.params);
      if (regimes.empty()) info("warning: parameters classify into regime {} (" + bound_note(regimes) + ")");
    }
    if (cfg_.dry_run) {
      out_ << describe_config(cfg_) << '\n';
      return 0;
    }
    switch (cfg_.command) {
      case Command::kTypical:
        return typical();
      case Command::kCount:
        return count();
      case Command::kEnumerate:
        return enumerate();
      case Command::kSample:
        return sample();
      case Command::kMarginal:
        return marginal();
      case Command::kJoint:
        return joint();
      case Command::kMoments:
        return moments();
      case Command::kLln:
        return lln();
      case Command::kRates:
        return rates();
      case Command::kVerify:
        return verify();
    }
    return 0;
  }

 private:
  static std::string bound_note(const RegimeSet& r) {
    return r.global_bound ? "no theorem regime applies" : "global bound on B and C violated";
  }

  void info(const std::string& msg) {
    if (log_level() >= LogLevel::kInfo) err_ << "binmargin: " << msg << '\n';
  }
  void debug(const std::string& msg) {
    if (log_level() >= LogLevel::kDebug) err_ << "binmargin: " << msg << '\n';
  }
  void announce_seed() { err_ << "binmargin: seed " << cfg_.seed << '\n'; }

  MarginPair margins() const {
    if (cfg_.margins_file) return read_margins_file(*cfg_.margins_file);
    return build_block_margins(*cfg_.params);
  }

  const BlockParams& require_params(const char* what) const {
    if (!cfg_.params) throw InvalidArgument(std::string(what) + " needs --params (block family experiments)");
    return *cfg_.params;
  }

  OracleLimits limits() const {
    OracleLimits l;
    l.max_states = cfg_.max_states;
    return l;
  }

  SamplerOptions sampler() const {
    SamplerOptions s;
    s.kind = cfg_.sampler;
    s.burn_in = cfg_.burn_in;
    s.thin = cfg_.thin;
    s.max_tries = cfg_.max_tries;
    s.limits = limits();
    return s;
  }

  std::vector<std::int64_t> sweep() const {
    if (!cfg_.n_sweep.empty()) return cfg_.n_sweep;
    return {16, 24, 36, 54};
  }

  void emit(const std::string& text) {
    if (cfg_.output.empty()) {
      out_ << text;
      return;
    }
    std::ofstream f(cfg_.output, std::ios::binary);
    if (!f) throw InvalidArgument("--out: cannot write '" + cfg_.output + "'");
    f << text;
  }

  void emit_json(const Json& j) { emit(j.dump(2) + "\n"); }

  void write_csv(const std::string& text) {
    if (cfg_.csv.empty()) return;
    std::ofstream f(cfg_.csv, std::ios::binary);
    if (!f) throw InvalidArgument("--csv: cannot write '" + cfg_.csv + "'");
    f << text;
  }

  Json header(const char* command) const {
    Json j;
    j["command"] = command;
    if (cfg_.params) j["params"] = *cfg_.params;
    return j;
  }

  int typical() {
    const MarginPair mp = margins();
    SolverOptions opts;
    opts.tol = cfg_.tol;
    const TypicalTable t = solve_typical(mp, opts);
    debug("solver: " + std::to_string(t.sweeps) + " sweeps, " + std::to_string(t.newton_steps) + " Newton steps");
    Json j = t;
    j["margins"] = mp;
    if (cfg_.params) {
      j["params"] = *cfg_.params;
      j["regime"] = classify_regime(*cfg_.params);
      try {
        j["block"] = solve_block(*cfg_.params, std::min(cfg_.tol, 1e-12));
      } catch (const Error& e) {
        debug(std::string("block solver skipped: ") + e.what());
      }
      try {
        j["limit"] = limit_law(*cfg_.params);
      } catch (const InvalidArgument&) {
      }
    }
    emit_json(j);
    return 0;
  }

  int count() {
    const MarginPair mp = margins();
    const CountTable ct = count_tables(mp, limits());
    Json j = header("count");
    j["margins"] = mp;
    j["count"] = to_decimal(ct.count);
    j["log_count"] = std::isfinite(ct.log_count) ? Json(ct.log_count) : Json(nullptr);
    j["feasible"] = ct.count > 0;
    emit_json(j);
    return 0;
  }

  int enumerate() {
    const MarginPair mp = margins();
    const auto tables = enumerate_tables(mp, cfg_.cap, limits());
    emit_tables("enumerate", mp, tables, false);
    return 0;
  }

  void emit_tables(const char* command, const MarginPair& mp, const std::vector<BinaryTable>& tables, bool seeded) {
    if (cfg_.format == Format::kJsonl) {
      std::string text;
      for (const auto& t : tables) text += Json(t).dump() + "\n";
      emit(text);
      return;
    }
    if (cfg_.format == Format::kCsv) {
      std::string text = "index,table\n";
      for (std::size_t i = 0; i < tables.size(); ++i) text += std::to_string(i) + "," + tables[i].key() + "\n";
      emit(text);
      return;
    }
    Json j = header(command);
    j["margins"] = mp;
    if (seeded) {
      j["sampler"] = to_string(cfg_.sampler);
      j["seed"] = cfg_.seed;
    }
    j["count"] = tables.size();
    j["tables"] = tables;
    emit(j.dump() + "\n");
  }

  int sample() {
    announce_seed();
    const MarginPair mp = margins();
    if (!check_feasible(mp)) throw Infeasible("sample: margins admit no binary table");
    const auto tables = draw_tables(mp, sampler(), cfg_.k, cfg_.seed);
    emit_tables("sample", mp, tables, true);
    return 0;
  }

  int marginal() {
    announce_seed();
    const BlockParams& p = require_params("marginal");
    std::vector<MarginalReport> reports;
    if (cfg_.n_sweep.empty())
      reports.push_back(marginal_experiment(p, sampler(), cfg_.k, cfg_.seed));
    else
      reports = marginal_sweep(p, cfg_.n_sweep, sampler(), cfg_.k, cfg_.seed, cfg_.threads);
    std::string csv = marginal_csv_header();
    for (const auto& r : reports) csv += marginal_csv_rows(r);
    write_csv(csv);
    if (cfg_.format == Format::kCsv) {
      emit(csv);
    } else if (cfg_.format == Format::kJsonl) {
      std::string text;
      for (const auto& r : reports)
        for (const auto& row : Json(r)["blocks"]) text += row.dump() + "\n";
      emit(text);
    } else {
      Json j = header("marginal");
      j["seed"] = cfg_.seed;
      j["reports"] = reports;
      emit_json(j);
    }
    return 0;
  }

  int joint() {
    const BlockParams& p = require_params("joint");
    Json j = header("joint");
    if (cfg_.oracle) {
      j["report"] = exact_joint_block(p, cfg_.block, cfg_.k_cells, limits());
    } else {
      announce_seed();
      j["seed"] = cfg_.seed;
      j["report"] = joint_block_experiment(p, cfg_.block, cfg_.k_cells, cfg_.k, cfg_.seed, sampler());
    }
    emit_json(j);
    return 0;
  }

  int moments() {
    announce_seed();
    const BlockParams& p = require_params("moments");
    if (cfg_.cells.empty()) throw InvalidArgument("moments needs --cells");
    std::vector<int> powers = cfg_.powers;
    if (powers.empty()) powers.assign(cfg_.cells.size(), 1);
    Json j = header("moments");
    j["seed"] = cfg_.seed;
    j["report"] = moment_experiment(p, cfg_.cells, powers, cfg_.k, cfg_.seed, sampler());
    emit_json(j);
    return 0;
  }

  int lln() {
    announce_seed();
    const BlockParams& p = require_params("lln");
    const LlnRow which = cfg_.block == Block::kSide ? LlnRow::kSide : LlnRow::kBottomRight;
    if (cfg_.block == Block::kTopLeft) throw InvalidArgument("--block: lln supports SIDE or BR");
    const LlnReport rep = lln_experiment(p, which, sweep(), sampler(), cfg_.k, cfg_.seed, cfg_.threads);
    std::ostringstream csv;
    csv.precision(17);
    csv << "n,block,k,empirical,std,target,gap\n";
    for (const auto& pt : rep.points)
      csv << pt.n << ',' << to_string(which) << ',' << pt.k << ',' << pt.mean << ',' << pt.stddev << ','
          << pt.target << ',' << pt.gap << '\n';
    write_csv(csv.str());
    if (cfg_.format == Format::kCsv) {
      emit(csv.str());
      return 0;
    }
    Json j = header("lln");
    j["seed"] = cfg_.seed;
    j["report"] = rep;
    emit_json(j);
    return 0;
  }

  int rates() {
    announce_seed();
    const BlockParams& p = require_params("rates");
    const auto reports = marginal_sweep(p, sweep(), sampler(), cfg_.k, cfg_.seed, cfg_.threads, false);
    std::string csv = marginal_csv_header();
    for (const auto& r : reports) csv += marginal_csv_rows(r);
    write_csv(csv);
    Json j = header("rates");
    j["seed"] = cfg_.seed;
    j["fit"] = rate_fit(reports);
    j["reports"] = reports;
    emit_json(j);
    return 0;
  }

  int verify() {
    const MarginPair mp = margins();
    SolverOptions opts;
    opts.tol = cfg_.tol;
    const TypicalTable t = solve_typical(mp, opts);
    const UniformityReport rep = verify_barvinok_uniformity(mp, t, cfg_.cap);
    Json j = header("verify");
    j["margins"] = mp;
    j["report"] = rep;
    j["passed"] = true;
    emit_json(j);
    return 0;
  }

  const RunConfig& cfg_;
  std::ostream& out_;
  std::ostream& err_;
};

void write_error(std::ostream& err, ErrorKind kind, const std::string& message) {
  Json j;
  j["error"] = to_string(kind);
  j["exit_code"] = static_cast<int>(kind);
  j["message"] = message;
  err << j.dump() << '\n';
}

}  // namespace

const char* to_string(Command c) {
  for (const auto& [name, cmd] : command_names())
    if (cmd == c) return name.c_str();
  return "?";
}

const char* to_string(Format f) {
  switch (f) {
    case Format::kJson:
      return "json";
    case Format::kJsonl:
      return "jsonl";
    case Format::kCsv:
      return "csv";
  }
  return "?";
}

RunConfig parse_config(const std::vector<std::string>& args) {
  App app;
  try {
    return app.parse(args);
  } catch (const CLI::CallForHelp&) {
    throw InvalidArgument("help requested");
  }
}

std::string describe_config(const RunConfig& cfg) {
  Json j;
  j["command"] = to_string(cfg.command);
  if (cfg.params) j["params"] = *cfg.params;
  if (cfg.margins_file) j["margins"] = *cfg.margins_file;
  j["sampler"] = to_string(cfg.sampler);
  j["k"] = cfg.k;
  j["seed"] = cfg.seed;
  j["tol"] = cfg.tol;
  j["out"] = cfg.output;
  j["format"] = to_string(cfg.format);
  j["threads"] = cfg.threads;
  j["burn-in"] = cfg.burn_in ? Json(*cfg.burn_in) : Json(nullptr);
  j["thin"] = cfg.thin ? Json(*cfg.thin) : Json(nullptr);
  j["csv"] = cfg.csv;
  j["block"] = to_string(cfg.block);
  j["k-cells"] = cfg.k_cells;
  j["n-sweep"] = cfg.n_sweep;
  j["cells"] = cfg.cells;
  j["powers"] = cfg.powers;
  j["cap"] = cfg.cap;
  j["oracle"] = cfg.oracle;
  j["max-states"] = cfg.max_states;
  j["max-tries"] = cfg.max_tries;
  if (cfg.params) j["regime"] = classify_regime(*cfg.params);
  j["dry-run"] = cfg.dry_run;
  return j.dump(2);
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    return Runner(cfg, out, err).execute();
  } catch (const Error& e) {
    write_error(err, e.kind(), e.what());
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    write_error(err, ErrorKind::kUsage, e.what());
    return static_cast<int>(ErrorKind::kUsage);
  }
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  App app;
  RunConfig cfg;
  try {
    cfg = app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.app.help();
    return 0;
  } catch (const Error& e) {
    write_error(err, e.kind(), e.what());
    return static_cast<int>(e.kind());
  }
  return run(cfg, out, err);
}

}  // namespace binmargin::cli
