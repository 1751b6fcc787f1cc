#include "cflab/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "cflab/cf_core.hpp"
#include "cflab/constructions.hpp"
#include "cflab/dimension.hpp"
#include "cflab/errors.hpp"
#include "cflab/growth.hpp"
#include "cflab/verify.hpp"

namespace cflab::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// ---- strict schema helpers -------------------------------------------------

void require_object(const json& j, const std::string& ctx) {
  if (!j.is_object()) throw InvalidInput("config: " + ctx + " must be an object");
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const std::string& ctx) {
  require_object(j, ctx);
  std::string bad;
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) bad += (bad.empty() ? "" : ", ") + it.key();
  }
  if (!bad.empty())
    throw InvalidInput("config: unknown field(s) in " + ctx + ": " + bad);
}

double get_num(const json& j, const char* key, std::optional<double> def = {}) {
  if (!j.contains(key)) {
    if (def) return *def;
    throw InvalidInput(std::string("config: missing field ") + key);
  }
  if (!j[key].is_number()) throw InvalidInput(std::string("config: ") + key + " must be a number");
  return j[key].get<double>();
}

long get_int(const json& j, const char* key, std::optional<long> def = {}) {
  if (!j.contains(key)) {
    if (def) return *def;
    throw InvalidInput(std::string("config: missing field ") + key);
  }
  if (!j[key].is_number_integer())
    throw InvalidInput(std::string("config: ") + key + " must be an integer");
  return j[key].get<long>();
}

std::string get_str(const json& j, const char* key, std::optional<std::string> def = {}) {
  if (!j.contains(key)) {
    if (def) return *def;
    throw InvalidInput(std::string("config: missing field ") + key);
  }
  if (!j[key].is_string()) throw InvalidInput(std::string("config: ") + key + " must be a string");
  return j[key].get<std::string>();
}

// numbers that may be the string "inf"
double get_num_or_inf(const json& j, const char* key) {
  if (!j.contains(key)) throw InvalidInput(std::string("config: missing field ") + key);
  if (j[key].is_string() && j[key].get<std::string>() == "inf")
    return std::numeric_limits<double>::infinity();
  if (j[key].is_number()) return j[key].get<double>();
  throw InvalidInput(std::string("config: ") + key + " must be a number or \"inf\"");
}

// ---- growth family parsing -------------------------------------------------

growth::GrowthSequence parse_family(const json& j) {
  reject_unknown(j, {"family", "params"}, "family");
  growth::Family fam = growth::family_from_string(get_str(j, "family"));
  growth::Params p;
  json params = j.contains("params") ? j["params"] : json::object();
  reject_unknown(params, {"alpha", "beta", "b", "c", "N", "scale", "log_values", "values"},
                 "family.params");
  if (params.contains("alpha")) p.alpha = get_num(params, "alpha");
  if (params.contains("beta")) p.beta = get_num(params, "beta");
  if (params.contains("b")) p.b = get_num(params, "b");
  if (params.contains("c")) p.c = get_num(params, "c");
  if (params.contains("N")) p.N = get_int(params, "N");
  if (params.contains("scale")) p.scale = get_num(params, "scale");
  if (params.contains("log_values")) {
    if (!params["log_values"].is_array())
      throw InvalidInput("config: log_values must be an array");
    p.log_values = params["log_values"].get<std::vector<double>>();
  }
  if (params.contains("values")) {
    if (params.contains("log_values"))
      throw InvalidInput("config: give values or log_values, not both");
    if (!params["values"].is_array()) throw InvalidInput("config: values must be an array");
    for (double v : params["values"].get<std::vector<double>>()) {
      if (!(v > 0)) throw InvalidInput("config: table values must be positive");
      p.log_values.push_back(std::log(v));
    }
  }
  return growth::GrowthSequence::make(fam, p);
}

growth::AsymptoticHints parse_hints(const json& j) {
  growth::AsymptoticHints h;
  reject_unknown(j,
                 {"limsup_phi_over_n", "liminf_log_phi_over_n", "liminf_loglog_phi_over_n",
                  "limsup_loglog_phi_over_log_n"},
                 "hints");
  if (j.contains("limsup_phi_over_n")) h.limsup_phi_over_n = get_num_or_inf(j, "limsup_phi_over_n");
  if (j.contains("liminf_log_phi_over_n"))
    h.liminf_log_phi_over_n = get_num_or_inf(j, "liminf_log_phi_over_n");
  if (j.contains("liminf_loglog_phi_over_n"))
    h.liminf_loglog_phi_over_n = get_num_or_inf(j, "liminf_loglog_phi_over_n");
  if (j.contains("limsup_loglog_phi_over_log_n"))
    h.limsup_loglog_phi_over_log_n = get_num_or_inf(j, "limsup_loglog_phi_over_log_n");
  return h;
}

// ---- sequence specs for the ratio-formula estimators -----------------------

dim::SequenceSpec parse_seq_spec(const json& j) {
  reject_unknown(j, {"kind", "a", "b", "c", "r", "tends_to_infinity"}, "sequence spec");
  std::string kind = get_str(j, "kind");
  dim::SequenceSpec spec;
  spec.name = kind;
  if (kind == "double_exp") {
    double b = get_num(j, "b"), c = get_num(j, "c");
    if (!(b > 1) || !(c > 1)) throw InvalidInput("sequence spec double_exp: b, c must be > 1");
    spec.log_value = [b, c](long n) {
      return exp(num::Real(n) * log(num::Real(b))) * log(num::Real(c));
    };
    spec.tends_to_infinity = true;
  } else if (kind == "affine") {
    double a = get_num(j, "a"), b = get_num(j, "b", 0.0);
    if (!(a > 0)) throw InvalidInput("sequence spec affine: a must be > 0");
    spec.log_value = [a, b](long n) { return log(num::Real(a * n + b)); };
    spec.tends_to_infinity = true;
  } else if (kind == "geometric") {
    double r = get_num(j, "r"), c = get_num(j, "c", 1.0);
    if (!(r > 1) || !(c > 0)) throw InvalidInput("sequence spec geometric: r > 1, c > 0");
    spec.log_value = [r, c](long n) { return num::Real(n) * log(num::Real(r)) + log(num::Real(c)); };
    spec.tends_to_infinity = true;
  } else {
    throw InvalidInput("unknown sequence spec kind: " + kind);
  }
  if (j.contains("tends_to_infinity")) spec.tends_to_infinity = j["tends_to_infinity"].get<bool>();
  return spec;
}

std::function<double(long)> parse_t_spec(const json& j, bool& vanishing) {
  reject_unknown(j, {"kind", "value"}, "t spec");
  std::string kind = get_str(j, "kind");
  if (kind == "constant") {
    double v = get_num(j, "value");
    vanishing = true;  // log(v-1)/log s_n -> 0 for s_n -> inf
    return [v](long) { return v; };
  }
  if (kind == "one_plus_inv") {
    vanishing = true;
    return [](long n) { return 1.0 + 1.0 / static_cast<double>(n); };
  }
  throw InvalidInput("unknown t spec kind: " + kind);
}

// ---- serializers ------------------------------------------------------------

ordered_json to_json(const dim::DimensionEstimate& e) {
  ordered_json j;
  j["value"] = e.value;
  j["method"] = e.method;
  j["bracket_lo"] = e.bracket_lo;
  j["bracket_hi"] = e.bracket_hi;
  ordered_json roots = ordered_json::array();
  for (const auto& r : e.roots)
    roots.push_back({{"depth", r.depth},
                     {"root", r.root},
                     {"bracket_lo", r.bracket_lo},
                     {"bracket_hi", r.bracket_hi}});
  j["roots"] = roots;
  j["flags"] = e.flags;
  return j;
}

ordered_json to_json(const growth::ExponentReport& r) {
  ordered_json j;
  j["n_lo"] = r.n_lo;
  j["n_hi"] = r.n_hi;
  j["sup_phi_over_n"] = std::isfinite(r.sup_phi_over_n) ? ordered_json(r.sup_phi_over_n)
                                                        : ordered_json("inf");
  j["arg_sup_phi_over_n"] = r.arg_sup_phi_over_n;
  j["inf_log_phi_over_n"] = r.inf_log_phi_over_n;
  j["arg_inf_log_phi_over_n"] = r.arg_inf_log_phi_over_n;
  j["sup_loglog_phi_over_log_n"] = r.sup_loglog_phi_over_log_n;
  j["arg_sup_loglog_phi_over_log_n"] = r.arg_sup_loglog_phi_over_log_n;
  ordered_json trend = ordered_json::array();
  for (const auto& d : r.trend)
    trend.push_back({{"n_lo", d.n_lo},
                     {"n_hi", d.n_hi},
                     {"sup_phi_over_n", std::isfinite(d.sup_phi_over_n)
                                            ? ordered_json(d.sup_phi_over_n)
                                            : ordered_json("inf")},
                     {"inf_log_phi_over_n", d.inf_log_phi_over_n},
                     {"sup_loglog_phi_over_log_n", d.sup_loglog_phi_over_log_n}});
  j["trend"] = trend;
  return j;
}

ordered_json to_json(const verify::CheckReport& r) {
  ordered_json j;
  j["instance"] = r.instance;
  j["hypothesis_satisfied"] = r.hypothesis_satisfied;
  j["conclusion_holds"] = r.conclusion_holds;
  j["margin_kind"] = r.margin_kind;
  j["margin"] = r.margin;
  j["margin_value"] = r.margin_value;
  j["vacuous"] = r.vacuous;
  if (r.counterexample) j["counterexample"] = *r.counterexample;
  if (r.side_lower)
    j["side_lower"] = {{"gate", r.side_lower->gate},
                       {"holds", r.side_lower->holds},
                       {"margin", r.side_lower->margin}};
  if (r.side_upper)
    j["side_upper"] = {{"gate", r.side_upper->gate},
                       {"holds", r.side_upper->holds},
                       {"margin", r.side_upper->margin}};
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

ordered_json to_json(const verify::SweepSummary& s) {
  ordered_json j;
  j["instances"] = s.instances;
  j["hypothesis_pass"] = s.hypothesis_pass;
  j["conclusion_pass"] = s.conclusion_pass;
  j["counterexamples"] = s.counterexamples;
  if (s.first_counterexample) j["first_counterexample"] = to_json(*s.first_counterexample);
  return j;
}

ordered_json word_json(const cf::Word& w) {
  ordered_json arr = ordered_json::array();
  for (const auto& d : w.digits()) arr.push_back(d.get_str());
  return arr;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += "\"";
  return out;
}

// ---- command handlers -------------------------------------------------------

struct CommandResult {
  ordered_json result;
  std::string csv;
  std::string jsonl;
};

// Top-level resource limits; per-command fields override them.
struct Budget {
  int max_depth = 64;
  std::uint64_t max_words = 20'000'000;
  std::size_t max_digit_bits = 1u << 20;
};

Budget parse_budget(const json& config) {
  Budget b;
  if (!config.contains("budget")) return b;
  const json& j = config["budget"];
  reject_unknown(j, {"max_depth", "max_words", "max_digit_bits"}, "budget");
  if (j.contains("max_depth")) b.max_depth = static_cast<int>(get_int(j, "max_depth"));
  if (j.contains("max_words")) b.max_words = j["max_words"].get<std::uint64_t>();
  if (j.contains("max_digit_bits")) b.max_digit_bits = j["max_digit_bits"].get<std::size_t>();
  if (b.max_depth < 1 || b.max_words < 1 || b.max_digit_bits < 64)
    throw InvalidInput("config: budget limits must be positive (max_digit_bits >= 64)");
  return b;
}

void check_depth_budget(int depth, const Budget& budget) {
  if (depth > budget.max_depth)
    throw GateRefusal("depth_budget", "depth " + std::to_string(depth) +
                                          " exceeds max_depth budget " +
                                          std::to_string(budget.max_depth));
}

CommandResult run_classify(const json& blk, int threads) {
  (void)threads;
  reject_unknown(blk, {"family", "window", "hints", "use_family_hints"}, "classify");
  if (!blk.contains("family")) throw InvalidInput("classify: missing family");
  auto seq = parse_family(blk["family"]);
  long n_lo = 1, n_hi = 100000;
  if (blk.contains("window")) {
    if (!blk["window"].is_array() || blk["window"].size() != 2)
      throw InvalidInput("classify: window must be [n_lo, n_hi]");
    n_lo = blk["window"][0].get<long>();
    n_hi = blk["window"][1].get<long>();
  }
  auto report = growth::growth_exponents(seq, n_lo, n_hi);
  bool use_family_hints = !blk.contains("use_family_hints") || blk["use_family_hints"].get<bool>();
  growth::AsymptoticHints hints;
  if (use_family_hints) hints = seq.derived_hints();
  if (blk.contains("hints")) {
    auto user = parse_hints(blk["hints"]);
    if (user.limsup_phi_over_n) hints.limsup_phi_over_n = user.limsup_phi_over_n;
    if (user.liminf_log_phi_over_n) hints.liminf_log_phi_over_n = user.liminf_log_phi_over_n;
    if (user.liminf_loglog_phi_over_n)
      hints.liminf_loglog_phi_over_n = user.liminf_loglog_phi_over_n;
    if (user.limsup_loglog_phi_over_log_n)
      hints.limsup_loglog_phi_over_log_n = user.limsup_loglog_phi_over_log_n;
  }
  auto verdict = growth::classify_necessary(report, hints);

  CommandResult out;
  out.result["verdict"] = growth::status_name(verdict.status);
  out.result["cited_rule"] = verdict.cited_rule;
  if (verdict.dimension_upper_bound)
    out.result["dimension_upper_bound"] = *verdict.dimension_upper_bound;
  out.result["exponents"] = to_json(report);

  std::ostringstream csv;
  csv << "n,value\n";
  for (const auto& d : report.trend) csv << d.n_hi << "," << d.sup_loglog_phi_over_log_n << "\n";
  out.csv = csv.str();
  return out;
}

CommandResult run_pressure(const json& blk, int threads, const Budget& budget) {
  reject_unknown(blk, {"s", "B", "M", "depth", "method", "collocation_order", "max_words"},
                 "pressure");
  dim::PressureConfig cfg;
  cfg.geometric_base = get_num(blk, "B", 1.0);
  cfg.alphabet_max = static_cast<int>(get_int(blk, "M"));
  cfg.depth = static_cast<int>(get_int(blk, "depth", 12));
  check_depth_budget(cfg.depth, budget);
  cfg.collocation_order = static_cast<int>(get_int(blk, "collocation_order", 32));
  cfg.max_words = budget.max_words;
  if (blk.contains("max_words")) cfg.max_words = blk["max_words"].get<std::uint64_t>();
  cfg.threads = threads;
  std::string method = get_str(blk, "method", "cylinder_sum");
  if (method == "collocation")
    cfg.method = dim::Method::collocation;
  else if (method != "cylinder_sum")
    throw InvalidInput("pressure: method must be cylinder_sum or collocation");
  double s = get_num(blk, "s");
  double P = dim::pressure(s, cfg);
  CommandResult out;
  out.result["s"] = s;
  out.result["pressure"] = P;
  out.csv = "n,value\n" + std::to_string(cfg.depth) + "," + std::to_string(P) + "\n";
  return out;
}

dim::PressureConfig parse_pressure_cfg(const json& blk, int threads, const Budget& budget) {
  dim::PressureConfig cfg;
  if (blk.contains("B")) {
    double B = get_num_or_inf(blk, "B");
    if (std::isinf(B)) throw InvalidInput("solve_root: B must be finite (use estimator ww)");
    cfg.geometric_base = B;
  }
  cfg.alphabet_max = static_cast<int>(get_int(blk, "M", 2));
  cfg.depth = static_cast<int>(get_int(blk, "depth", 12));
  check_depth_budget(cfg.depth, budget);
  cfg.collocation_order = static_cast<int>(get_int(blk, "collocation_order", 32));
  cfg.max_words = budget.max_words;
  if (blk.contains("max_words")) cfg.max_words = blk["max_words"].get<std::uint64_t>();
  cfg.threads = threads;
  std::string method = get_str(blk, "method", "cylinder_sum");
  if (method == "collocation")
    cfg.method = dim::Method::collocation;
  else if (method != "cylinder_sum")
    throw InvalidInput("dim: method must be cylinder_sum or collocation");
  return cfg;
}

std::string dim_csv(const dim::DimensionEstimate& est) {
  std::ostringstream csv;
  csv << "depth,root,bracket_lo,bracket_hi\n";
  for (const auto& r : est.roots)
    csv << r.depth << "," << r.root << "," << r.bracket_lo << "," << r.bracket_hi << "\n";
  return csv.str();
}

CommandResult run_dim(const json& blk, int threads, const Budget& budget) {
  reject_unknown(blk,
                 {"estimator", "B", "b", "M", "depth", "method", "collocation_order", "max_words",
                  "tol", "s", "t", "alpha", "cover_words"},
                 "dim");
  std::string estimator = get_str(blk, "estimator", "solve_root");
  double tol = get_num(blk, "tol", 1e-10);
  CommandResult out;

  if (estimator == "solve_root") {
    auto est = dim::solve_root(parse_pressure_cfg(blk, threads, budget), tol);
    out.result = to_json(est);
    out.csv = dim_csv(est);
  } else if (estimator == "ww") {
    double B = get_num_or_inf(blk, "B");
    dim::ExtendedReal Be =
        std::isinf(B) ? dim::ExtendedReal::inf() : dim::ExtendedReal::finite(B);
    std::optional<dim::ExtendedReal> be;
    if (blk.contains("b")) {
      double b = get_num_or_inf(blk, "b");
      be = std::isinf(b) ? dim::ExtendedReal::inf() : dim::ExtendedReal::finite(b);
    }
    auto est = dim::ww_dimension(Be, be, parse_pressure_cfg(blk, threads, budget), tol);
    out.result = to_json(est);
    out.csv = dim_csv(est);
  } else if (estimator == "flww" || estimator == "lr") {
    if (!blk.contains("s")) throw InvalidInput("dim: missing sequence spec s");
    auto s = parse_seq_spec(blk["s"]);
    int depth = static_cast<int>(get_int(blk, "depth", 20));
    dim::DimensionEstimate est;
    if (estimator == "flww") {
      est = dim::flww_dimension(s, depth);
    } else {
      if (!blk.contains("t")) throw InvalidInput("dim: lr estimator needs a t spec");
      bool vanishing = false;
      auto t = parse_t_spec(blk["t"], vanishing);
      est = dim::lr_dimension(s, t, vanishing, depth);
    }
    out.result = to_json(est);
    std::ostringstream csv;
    csv << "n,value\n";
    for (const auto& r : est.roots) csv << r.depth << "," << r.root << "\n";
    out.csv = csv.str();
  } else if (estimator == "cv_gap") {
    double alpha = get_num(blk, "alpha");
    double g = dim::cv_gap(alpha);
    out.result["alpha"] = alpha;
    out.result["gap"] = g;
    out.csv = "n,value\n0," + std::to_string(g) + "\n";
  } else if (estimator == "cover") {
    if (!blk.contains("cover_words") || !blk["cover_words"].is_array())
      throw InvalidInput("dim: cover estimator needs cover_words (array of digit arrays)");
    std::vector<cf::Cylinder> cover;
    for (const auto& wj : blk["cover_words"]) {
      std::vector<cf::BigInt> ds;
      for (const auto& d : wj) ds.emplace_back(d.get<long>());
      cover.push_back(cf::cylinder(cf::Word(std::move(ds))));
    }
    auto est = dim::cover_dimension(cover, tol);
    out.result = to_json(est);
    out.csv = dim_csv(est);
  } else {
    throw InvalidInput("dim: unknown estimator " + estimator);
  }
  return out;
}

cons::ConstructionSpec parse_construction(const json& j, std::uint64_t seed,
                                          const Budget& budget) {
  reject_unknown(j, {"kind", "M", "beta", "N", "alpha", "b", "c", "policy", "max_digit_bits"},
                 "construct.spec");
  cons::ConstructionSpec spec;
  spec.kind = cons::kind_from_string(get_str(j, "kind"));
  spec.M = get_int(j, "M", 1);
  spec.beta = get_num(j, "beta", 0.5);
  spec.N = get_int(j, "N", 2);
  spec.alpha = get_num(j, "alpha", 1.0);
  spec.b = get_num(j, "b", 2.0);
  spec.c = get_num(j, "c", 2.0);
  spec.seed = seed;
  spec.max_digit_bits = budget.max_digit_bits;
  if (j.contains("max_digit_bits"))
    spec.max_digit_bits = j["max_digit_bits"].get<std::size_t>();
  std::string policy = get_str(j, "policy", "all_ones");
  if (policy == "all_ones")
    spec.policy = cons::FreePolicy::all_ones;
  else if (policy == "random_uniform")
    spec.policy = cons::FreePolicy::random_uniform;
  else if (policy == "enumerate")
    spec.policy = cons::FreePolicy::enumerate_all;
  else
    throw InvalidInput("construct: unknown policy " + policy);
  return spec;
}

CommandResult run_construct(const json& blk, std::uint64_t seed, const Budget& budget) {
  reject_unknown(blk, {"spec", "n", "family", "cap", "base", "emit"}, "construct");
  if (!blk.contains("spec")) throw InvalidInput("construct: missing spec");
  const json& sj = blk["spec"];
  std::string kind = get_str(sj, "kind");
  std::size_t n = static_cast<std::size_t>(get_int(blk, "n"));
  CommandResult out;
  std::ostringstream csv;
  csv << "n,value\n";

  if (kind == "tracking") {
    if (!blk.contains("family")) throw InvalidInput("construct tracking: missing family");
    auto seq = parse_family(blk["family"]);
    std::optional<cf::BigInt> cap;
    if (blk.contains("cap")) cap = cf::BigInt(get_int(blk, "cap"));
    auto tr = cons::track_phi(seq, n, cap, budget.max_digit_bits);
    out.result["word"] = word_json(tr.word);
    out.result["capped"] = tr.capped;
    auto stats = cf::digit_stats(tr.word);
    out.result["s_n"] = stats.running_sum.back().get_str();
    for (std::size_t i = 0; i < tr.word.size(); ++i)
      csv << (i + 1) << "," << tr.word.digits()[i].get_str() << "\n";
  } else if (kind == "perturbed") {
    cf::Word base;
    if (blk.contains("base")) {
      std::vector<cf::BigInt> ds;
      for (const auto& d : blk["base"]) ds.emplace_back(d.get<long>());
      base = cf::Word(std::move(ds));
      if (base.size() != n) throw InvalidInput("construct perturbed: base length must equal n");
    } else {
      // policy-filled base over 1..M
      auto spec = parse_construction(sj, seed, budget);
      std::vector<cf::BigInt> ds(n, cf::BigInt(1));
      if (spec.policy == cons::FreePolicy::random_uniform) {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<long> dist(1, spec.M);
        for (auto& d : ds) d = cf::BigInt(dist(rng));
      }
      base = cf::Word(std::move(ds));
    }
    auto word = cons::perturb(base);
    out.result["base"] = word_json(base);
    out.result["word"] = word_json(word);
    for (std::size_t i = 0; i < word.size(); ++i)
      csv << (i + 1) << "," << word.digits()[i].get_str() << "\n";
  } else {
    auto spec = parse_construction(sj, seed, budget);
    auto pw = cons::generate(spec, n);
    out.result["word"] = word_json(pw.word);
    ordered_json pins = ordered_json::array();
    for (const auto& [idx, val] : pw.pinned)
      pins.push_back({{"index", idx}, {"digit", val.get_str()}});
    out.result["pinned"] = pins;
    out.result["t_count"] = pw.t_count;
    out.result["pinned_count"] = pw.pinned_count;
    out.result["deleted"] = word_json(cons::delete_pinned(pw));
    for (std::size_t i = 0; i < pw.word.size(); ++i)
      csv << (i + 1) << "," << pw.word.digits()[i].get_str() << "\n";
  }
  out.csv = csv.str();
  return out;
}

CommandResult run_verify(const json& blk, std::uint64_t seed, int threads, const Budget& budget) {
  reject_unknown(blk,
                 {"check", "mode", "max_len", "max_digit", "count", "n_max", "digit_max",
                  "sigma", "tau", "epsilon", "psi", "word", "spec", "n"},
                 "verify");
  std::string check = get_str(blk, "check");
  std::string mode = get_str(blk, "mode", "single");
  CommandResult out;
  std::ostringstream csv, jsonl;
  csv << "instance,hypothesis,conclusion,margin\n";
  std::uint64_t emitted = 0;
  verify::ReportSink sink = [&](const verify::CheckReport& r) {
    // keep exports bounded on huge sweeps
    if (emitted < 200000) {
      csv << csv_escape(r.instance) << "," << (r.hypothesis_satisfied ? 1 : 0) << ","
          << (r.conclusion_holds ? 1 : 0) << "," << r.margin_value << "\n";
      jsonl << to_json(r).dump() << "\n";
      ++emitted;
    }
  };

  auto word_from = [&](const char* key) {
    if (!blk.contains(key)) throw InvalidInput(std::string("verify: missing ") + key);
    std::vector<cf::BigInt> ds;
    for (const auto& d : blk[key]) ds.emplace_back(d.get<long>());
    return cf::Word(std::move(ds));
  };

  if (check == "ratio_bounds") {
    if (mode == "exhaustive") {
      auto sum = verify::sweep_ratio_bounds(static_cast<std::size_t>(get_int(blk, "max_len", 5)),
                                            get_int(blk, "max_digit", 3), threads, sink);
      out.result = to_json(sum);
    } else {
      auto rep = verify::check_ratio_bounds(
          verify::make_pair_instance(word_from("sigma"), word_from("tau")));
      sink(rep);
      out.result = to_json(rep);
    }
  } else if (check == "comparison") {
    if (mode == "random") {
      verify::RandomComparisonParams p;
      p.seed = seed;
      p.count = static_cast<int>(get_int(blk, "count", 1000));
      p.n_max = static_cast<std::size_t>(get_int(blk, "n_max", 20));
      p.digit_max = get_int(blk, "digit_max", 8);
      auto sum = verify::sweep_comparison_random(p, sink);
      out.result = to_json(sum);
    } else {
      double eps = get_num(blk, "epsilon");
      double psi = get_num(blk, "psi");
      auto rep = verify::check_comparison(
          verify::make_pair_instance(word_from("sigma"), word_from("tau")), eps, psi);
      sink(rep);
      out.result = to_json(rep);
    }
  } else if (check == "interval_bounds") {
    if (mode == "exhaustive") {
      auto sum = verify::sweep_interval_bounds(
          static_cast<std::size_t>(get_int(blk, "max_len", 8)), get_int(blk, "max_digit", 4),
          threads, sink);
      out.result = to_json(sum);
    } else {
      auto rep = verify::check_interval_bounds(word_from("word"));
      sink(rep);
      out.result = to_json(rep);
    }
  } else if (check == "deletion") {
    if (!blk.contains("spec")) throw InvalidInput("verify deletion: missing construction spec");
    auto spec = parse_construction(blk["spec"], seed, budget);
    std::size_t n = static_cast<std::size_t>(get_int(blk, "n"));
    double eps = get_num(blk, "epsilon");
    auto pw = cons::generate(spec, n);
    auto rep = verify::check_deletion_inequality(pw, eps);
    sink(rep);
    out.result = to_json(rep);
  } else {
    throw InvalidInput("verify: unknown check " + check);
  }
  out.csv = csv.str();
  out.jsonl = jsonl.str();
  return out;
}

void atomic_write(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open output file " + tmp);
    f << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

}  // namespace

namespace {
RunOutcome execute_impl(const json& config, std::optional<std::uint64_t> seed_override,
                        std::optional<int> threads_override);
}

RunOutcome execute(const json& config, std::optional<std::uint64_t> seed_override,
                   std::optional<int> threads_override) {
  // json type mismatches anywhere in the config are schema errors, not
  // internal ones
  try {
    return execute_impl(config, seed_override, threads_override);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }
}

namespace {
RunOutcome execute_impl(const json& config, std::optional<std::uint64_t> seed_override,
                        std::optional<int> threads_override) {
  auto t0 = std::chrono::steady_clock::now();
  reject_unknown(config,
                 {"command", "seed", "threads", "budget", "output", "classify", "dim",
                  "pressure", "construct", "verify"},
                 "config");
  std::string command = get_str(config, "command");
  if (config.contains("seed") && !config["seed"].is_number_unsigned())
    throw InvalidInput("config: seed must be a non-negative integer");
  std::uint64_t seed = seed_override.value_or(
      config.contains("seed") ? config["seed"].get<std::uint64_t>() : 0);
  int threads =
      threads_override.value_or(config.contains("threads") ? config["threads"].get<int>() : 1);
  if (threads < 1 || threads > 512) throw InvalidInput("config: threads must be in 1..512");

  RunOutcome out;
  if (config.contains("output")) {
    reject_unknown(config["output"], {"path", "format"}, "output");
    out.out_path = get_str(config["output"], "path", "");
    out.format = get_str(config["output"], "format", "json");
  }
  if (out.format != "json" && out.format != "csv" && out.format != "jsonl")
    throw InvalidInput("config: output.format must be json, csv or jsonl");
  if (out.format == "jsonl" && command != "verify")
    throw InvalidInput("config: jsonl output is only available for verify runs");

  static const std::set<std::string> commands = {"classify", "dim", "pressure", "construct",
                                                 "verify"};
  if (!commands.count(command)) throw InvalidInput("config: unknown command " + command);
  if (!config.contains(command))
    throw InvalidInput("config: missing block \"" + command + "\" for the command");

  ordered_json report;
  report["tool"] = "cflab";
  report["version"] = kToolVersion;
  report["config"] = ordered_json(config);
  report["seed"] = seed;
  report["threads"] = threads;

  CommandResult res;
  try {
    const json& blk = config[command];
    Budget budget = parse_budget(config);
    if (command == "classify")
      res = run_classify(blk, threads);
    else if (command == "pressure")
      res = run_pressure(blk, threads, budget);
    else if (command == "dim")
      res = run_dim(blk, threads, budget);
    else if (command == "construct")
      res = run_construct(blk, seed, budget);
    else
      res = run_verify(blk, seed, threads, budget);
  } catch (const GateRefusal& g) {
    report["result"] = {{"refusal", {{"gate", g.gate}, {"message", g.what()}}}};
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    report["wall_time_ms"] = ms;
    out.report = std::move(report);
    out.exit_code = 2;
    return out;
  }

  report["result"] = res.result;
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - t0)
                .count();
  report["wall_time_ms"] = ms;
  out.report = std::move(report);
  if (out.format == "csv")
    out.text = res.csv;
  else if (out.format == "jsonl")
    out.text = res.jsonl;
  out.exit_code = 0;
  return out;
}
}  // namespace

int run_main(int argc, char** argv) {
  std::string config_path, out_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    auto need_value = [&](const char* flag) -> std::string {
      if (i + 1 >= argc) {
        throw InvalidInput(std::string("missing value for ") + flag);
      }
      return argv[++i];
    };
    if (arg == "--config")
      config_path = need_value("--config");
    else if (arg == "--out")
      out_path = need_value("--out");
    else if (arg == "--seed")
      seed = std::stoull(need_value("--seed"));
    else if (arg == "--threads")
      threads = std::stoi(need_value("--threads"));
    else if (arg == "--help" || arg == "-h") {
      std::cout << "usage: cflab --config run.json [--out report.json] [--seed N] [--threads T]\n";
      return 0;
    } else {
      std::cerr << "unknown argument: " << arg << "\n";
      return 1;
    }
  }

  try {
    if (config_path.empty()) throw InvalidInput("--config is required");
    std::ifstream f(config_path);
    if (!f) throw InvalidInput("cannot open config file " + config_path);
    json config;
    try {
      config = json::parse(f);
    } catch (const json::exception& e) {
      throw InvalidInput(std::string("config is not valid JSON: ") + e.what());
    }

    RunOutcome outcome = execute(config, seed, threads);
    if (!out_path.empty()) outcome.out_path = out_path;

    std::string payload = outcome.format == "json" || outcome.exit_code == 2
                              ? outcome.report.dump(2) + "\n"
                              : outcome.text;
    if (outcome.out_path.empty())
      std::cout << payload;
    else
      atomic_write(outcome.out_path, payload);
    if (outcome.exit_code == 2)
      std::cerr << "refusal: " << outcome.report["result"]["refusal"]["message"] << "\n";
    return outcome.exit_code;
  } catch (const InvalidInput& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const GateRefusal& e) {
    std::cerr << "refusal (" << e.gate << "): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace cflab::cli
