#include "cflab/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "cflab/errors.hpp"

namespace cflab::dim {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

void check_config(const PressureConfig& cfg) {
  if (cfg.geometric_base < 1.0) throw InvalidInput("pressure: B must be >= 1");
  if (cfg.alphabet_max < 1) throw InvalidInput("pressure: alphabet_max must be >= 1");
  if (cfg.depth < 1) throw InvalidInput("pressure: depth must be >= 1");
  if (cfg.method == Method::collocation && cfg.collocation_order < 8)
    throw InvalidInput("pressure: collocation_order must be >= 8");
}

std::uint64_t words_at_depth(int M, int depth) {
  std::uint64_t n = 1;
  for (int i = 0; i < depth; ++i) {
    if (n > UINT64_MAX / static_cast<std::uint64_t>(M)) return UINT64_MAX;
    n *= static_cast<std::uint64_t>(M);
  }
  return n;
}

void check_budget(const PressureConfig& cfg, int depth) {
  std::uint64_t n = words_at_depth(cfg.alphabet_max, depth);
  if (n > cfg.max_words)
    throw GateRefusal("enumeration_budget",
                      "word count " + std::to_string(cfg.alphabet_max) + "^" +
                          std::to_string(depth) + " exceeds max_words budget " +
                          std::to_string(cfg.max_words));
}

// Depth-first sum over words in {1..M}^depth of term(q_n, q_{n-1}). The
// continuants stay exact in double up to 2^53, which the budget keeps us
// well under for feasible M^depth.
double enumerate_sum(int M, int depth, int first_digit,
                     const std::function<double(double, double)>& term) {
  double total = 0;
  // iterative DFS: stack of (level, q_{n-2}, q_{n-1}) with pending digits
  struct Frame {
    int digit;
    double qm2, qm1;
  };
  std::vector<Frame> stack(depth + 1);
  stack[1] = {first_digit, 0.0, 1.0};
  int level = 1;
  while (level >= 1) {
    Frame& f = stack[level];
    if (f.digit > (level == 1 ? first_digit : M)) {
      --level;
      continue;
    }
    double q = f.digit * f.qm1 + f.qm2;
    ++f.digit;
    if (level == depth) {
      total += term(q, f.qm1);
    } else {
      stack[level + 1] = {1, f.qm1, q};
      ++level;
    }
  }
  return total;
}

// Shard the outermost digit across threads; reduce in digit order so the
// result is identical for every thread count.
double sharded_word_sum(const PressureConfig& cfg, int depth,
                        const std::function<double(double, double)>& term) {
  int M = cfg.alphabet_max;
  std::vector<double> partial(M, 0.0);
  int nthreads = std::max(1, std::min(cfg.threads, M));
  if (nthreads == 1) {
    for (int a = 1; a <= M; ++a) partial[a - 1] = enumerate_sum(M, depth, a, term);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back([&, t]() {
        for (int a = t + 1; a <= M; a += nthreads)
          partial[a - 1] = enumerate_sum(M, depth, a, term);
      });
    for (auto& th : pool) th.join();
  }
  double total = 0;
  for (double p : partial) total += p;
  return total;
}

// ---- collocation path ----------------------------------------------------

// Transfer operator L_s f(x) = sum_{a<=M} (a+x)^{-2s} f(1/(a+x)) discretized
// by Lagrange interpolation on Chebyshev-Lobatto nodes over [0,1]; the
// leading eigenvalue comes from power iteration (the operator is positive,
// so the Perron eigenvalue dominates).
struct Collocation {
  int m;
  int M;
  std::vector<double> nodes, bary;

  Collocation(int order, int alphabet) : m(order), M(alphabet), nodes(order + 1), bary(order + 1) {
    for (int j = 0; j <= m; ++j) {
      nodes[j] = 0.5 * (1.0 - std::cos(M_PI * j / m));
      bary[j] = (j % 2 == 0) ? 1.0 : -1.0;
    }
    bary[0] *= 0.5;
    bary[m] *= 0.5;
  }

  void basis_row(double y, std::vector<double>& out) const {
    for (int k = 0; k <= m; ++k) {
      if (y == nodes[k]) {
        std::fill(out.begin(), out.end(), 0.0);
        out[k] = 1.0;
        return;
      }
    }
    double denom = 0;
    for (int k = 0; k <= m; ++k) {
      out[k] = bary[k] / (y - nodes[k]);
      denom += out[k];
    }
    for (int k = 0; k <= m; ++k) out[k] /= denom;
  }

  double leading_eigenvalue(double s) const {
    std::vector<std::vector<double>> A(m + 1, std::vector<double>(m + 1, 0.0));
    std::vector<double> row(m + 1);
    for (int j = 0; j <= m; ++j) {
      for (int a = 1; a <= M; ++a) {
        double t = a + nodes[j];
        double w = std::pow(t, -2.0 * s);
        basis_row(1.0 / t, row);
        for (int k = 0; k <= m; ++k) A[j][k] += w * row[k];
      }
    }
    std::vector<double> v(m + 1, 1.0), nv(m + 1);
    double lambda = 0;
    for (int it = 0; it < 5000; ++it) {
      double norm = 0;
      for (int j = 0; j <= m; ++j) {
        double acc = 0;
        for (int k = 0; k <= m; ++k) acc += A[j][k] * v[k];
        nv[j] = acc;
        norm = std::max(norm, std::fabs(acc));
      }
      if (norm == 0) throw GateRefusal("power_iteration", "eigenvector collapsed to zero");
      for (auto& x : nv) x /= norm;
      std::swap(v, nv);
      if (it > 16 && std::fabs(norm - lambda) <= 1e-15 * norm) return norm;
      lambda = norm;
    }
    return lambda;
  }
};

// ---- root finding ---------------------------------------------------------

struct BisectResult {
  double root, lo, hi;
};

// g must be strictly decreasing. Requires g(lo) > 0 > g(hi).
BisectResult bisect_root(const std::function<double(double)>& g, double lo, double hi,
                         double tol, const char* what) {
  double glo = g(lo), ghi = g(hi);
  if (!(glo > 0) || !(ghi < 0))
    throw GateRefusal("no_sign_change", std::string(what) +
                                            ": no sign change on bracket [" +
                                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
  for (int i = 0; i < 400 && hi - lo > tol; ++i) {
    double mid = 0.5 * (lo + hi);
    double gm = g(mid);
    if (gm > 0)
      lo = mid;
    else
      hi = mid;
  }
  return {0.5 * (lo + hi), lo, hi};
}

// Covering-sum objective at a single depth: sum (B^{-n} |I_n|)^s - 1 with
// |I_n| = 1/(q_n (q_n + q_{n-1})).
double cover_sum_minus_one(const PressureConfig& cfg, int depth, double s) {
  double logB = std::log(cfg.geometric_base);
  double bfac = std::exp(-s * depth * logB);
  double sum = sharded_word_sum(cfg, depth, [s](double q, double qp) {
    return std::pow(q * (q + qp), -s);
  });
  return bfac * sum - 1.0;
}

}  // namespace

double pressure(double s, const PressureConfig& cfg) {
  if (s < 0) throw InvalidInput("pressure: s must be >= 0");
  check_config(cfg);
  double logB = std::log(cfg.geometric_base);
  if (cfg.method == Method::collocation) {
    Collocation coll(cfg.collocation_order, cfg.alphabet_max);
    return std::log(coll.leading_eigenvalue(s)) - s * logB;
  }
  check_budget(cfg, cfg.depth);
  double sum = sharded_word_sum(cfg, cfg.depth, [s](double q, double qp) {
    (void)qp;
    return std::pow(q, -2.0 * s);
  });
  return std::log(sum) / cfg.depth - s * logB;
}

DimensionEstimate solve_root(const PressureConfig& cfg, double tol,
                             std::optional<std::pair<double, double>> bracket) {
  check_config(cfg);
  if (tol <= 0) throw InvalidInput("solve_root: tol must be positive");
  double lo = bracket ? bracket->first : 0.0;
  double hi = bracket ? bracket->second : 1.5;

  DimensionEstimate est;

  // Single-word alphabet: the covering sum is one term, equal to 1 only at
  // s = 0, so the root sits on the bracket edge regardless of method.
  if (cfg.alphabet_max == 1) {
    est.value = 0.0;
    est.method = cfg.method == Method::collocation ? "collocation" : "cylinder_sum";
    est.bracket_lo = 0.0;
    est.bracket_hi = tol;
    est.roots.push_back({cfg.depth, 0.0, 0.0, tol});
    est.flags.push_back("singleton_alphabet");
    return est;
  }

  if (cfg.method == Method::collocation) {
    Collocation coll(cfg.collocation_order, cfg.alphabet_max);
    double logB = std::log(cfg.geometric_base);
    auto g = [&](double s) { return std::log(coll.leading_eigenvalue(s)) - s * logB; };
    auto r = bisect_root(g, lo, hi, tol, "collocation pressure");
    est.value = r.root;
    est.method = "collocation";
    est.bracket_lo = r.lo;
    est.bracket_hi = r.hi;
    est.roots.push_back({cfg.collocation_order, r.root, r.lo, r.hi});
    return est;
  }

  est.method = "cylinder_sum";
  check_budget(cfg, cfg.depth);

  for (int d = 1; d <= cfg.depth; ++d) {
    auto g = [&](double s) { return cover_sum_minus_one(cfg, d, s); };
    auto r = bisect_root(g, lo, hi, tol, "cylinder-sum root");
    est.roots.push_back({d, r.root, r.lo, r.hi});
  }

  // Aitken extrapolation on the depth-doubling subsequence (d/4, d/2, d):
  // the per-depth roots behave like s* + a/d, and geometric index spacing
  // turns that into a geometric error sequence, which Aitken cancels.
  double value;
  int d2 = cfg.depth;
  int d1 = d2 / 2, d0 = d2 / 4;
  if (d0 >= 1 && d1 > d0 && d2 > d1) {
    double s0 = est.roots[d0 - 1].root;
    double s1 = est.roots[d1 - 1].root;
    double s2 = est.roots[d2 - 1].root;
    value = num::aitken(s0, s1, s2);
  } else {
    value = est.roots.back().root;
  }
  double last = est.roots.back().root;
  est.value = value;
  est.bracket_lo = std::min(value, last) - tol;
  est.bracket_hi = std::max(value, last) + tol;
  return est;
}

DimensionEstimate ww_dimension(ExtendedReal B, std::optional<ExtendedReal> b,
                               const PressureConfig& cfg, double tol) {
  DimensionEstimate est;
  if (B.infinite) {
    if (!b) throw InvalidInput("ww_dimension: b is required when B = inf");
    if (!b->infinite && b->value < 1) throw InvalidInput("ww_dimension: b must be >= 1");
    est.value = b->infinite ? 0.0 : 1.0 / (1.0 + b->value);
    est.method = "ww_case_B_inf";
    est.bracket_lo = est.bracket_hi = est.value;
    return est;
  }
  if (B.value < 1) throw InvalidInput("ww_dimension: B must be >= 1");
  if (B.value == 1.0) {
    est.value = 1.0;
    est.method = "ww_case_B_one";
    est.bracket_lo = est.bracket_hi = 1.0;
    return est;
  }
  PressureConfig c = cfg;
  c.geometric_base = B.value;
  est = solve_root(c, tol);
  est.method = "ww_case_s_B/" + est.method;
  return est;
}

namespace {

// Shared tail machinery for the FLWW/LR formula: ratios
// r_n = log s_{n+1} / (log s_1 + .. + log s_n), running sup, and the
// extrapolated limsup estimate.
DimensionEstimate ratio_formula(const SequenceSpec& s, int depth, const char* method) {
  if (depth < 4) throw InvalidInput("ratio formula: depth must be >= 4");
  std::vector<num::Real> ratios;
  DimensionEstimate est;
  est.method = method;
  num::Real cum = 0;
  for (long n = 1; n < depth; ++n) {
    cum += s.log_value(n);
    if (cum <= 0)
      throw InvalidInput("ratio formula: log s_1..s_n not positive; sequence too small");
    num::Real r = s.log_value(n + 1) / cum;
    ratios.push_back(r);
    double rd = num::to_double(r);
    est.roots.push_back({static_cast<int>(n), rd, rd, rd});
  }
  auto tail = num::extrapolate_tail(ratios);
  num::Real limit = tail.value;
  if (limit < 0) limit = 0;  // limsup of nonnegative ratios
  double running_sup = num::to_double(tail.tail_sup);
  est.value = num::to_double(num::Real(1) / (2 + limit));
  double sup_value = 1.0 / (2.0 + running_sup);
  double last_value = 1.0 / (2.0 + num::to_double(ratios.back()));
  est.bracket_lo = std::min({est.value, sup_value, last_value});
  est.bracket_hi = std::max({est.value, sup_value, last_value});
  est.flags.push_back(std::string("tail_sup_ratio=") + std::to_string(running_sup));
  est.flags.push_back(std::string("extrapolated_ratio=") +
                      std::to_string(num::to_double(limit)));
  if (!tail.monotone_tail) est.flags.push_back("tail_not_monotone_used_sup");
  return est;
}

}  // namespace

DimensionEstimate flww_dimension(const SequenceSpec& s, int depth) {
  if (!s.tends_to_infinity)
    throw GateRefusal("flww_hypothesis",
                      "FLWW formula requires s_n -> infinity (family tag not asserted)");
  static const num::Real log3 = log(num::Real(3));
  for (long n = 1; n <= depth; ++n) {
    if (s.log_value(n) < log3 - num::Real(1e-30))
      throw GateRefusal("flww_hypothesis",
                        "FLWW formula requires s_n >= 3; violated at n = " + std::to_string(n));
  }
  return ratio_formula(s, depth, "flww");
}

DimensionEstimate lr_dimension(const SequenceSpec& s, const std::function<double(long)>& t,
                               bool ratio_tends_to_zero, int depth) {
  for (long n = 1; n <= depth; ++n) {
    if (!(t(n) > 1.0))
      throw InvalidInput("lr_dimension: t_n must be > 1; violated at n = " + std::to_string(n));
  }
  DimensionEstimate est = ratio_formula(s, depth, "lr");
  // hypothesis diagnostic: log(t_n - 1) / log s_n on the tail
  double diag = 0;
  bool first = true;
  for (long n = std::max(1, depth - 4); n <= depth; ++n) {
    double ls = num::to_double(s.log_value(n));
    if (ls <= 0) continue;
    double h = std::log(t(n) - 1.0) / ls;
    if (first || h > diag) diag = h;
    first = false;
  }
  est.flags.push_back("lr_hypothesis_ratio=" + std::to_string(diag));
  if (!ratio_tends_to_zero || diag > 0.5) {
    est.flags.push_back("lr_hypothesis_not_vanishing:formula_inapplicable");
  }
  return est;
}

double cv_gap(double alpha) {
  if (alpha < 0) throw InvalidInput("cv_gap: alpha must be >= 0");
  const double lead = 6.0 / (M_PI * M_PI) * std::exp(-1.0 - kEulerGamma);
  return lead * std::exp2(-alpha);
}

DimensionEstimate cover_dimension(const std::vector<cf::Cylinder>& cover, double tol) {
  if (cover.empty()) throw InvalidInput("cover_dimension: empty cover");
  if (tol <= 0) throw InvalidInput("cover_dimension: tol must be positive");

  std::vector<const cf::Cylinder*> sorted;
  sorted.reserve(cover.size());
  for (const auto& c : cover) sorted.push_back(&c);
  std::sort(sorted.begin(), sorted.end(),
            [](const cf::Cylinder* a, const cf::Cylinder* b) { return a->left < b->left; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->left < sorted[i - 1]->right)
      throw InvalidInput("cover_dimension: overlapping cylinders in cover");
  }

  DimensionEstimate est;
  est.method = "cover_root";
  if (cover.size() == 1) {
    est.value = 0.0;
    est.bracket_lo = 0.0;
    est.bracket_hi = tol;
    est.flags.push_back("single_cylinder");
    return est;
  }

  std::vector<double> lengths;
  lengths.reserve(cover.size());
  for (const auto& c : cover) lengths.push_back(c.length.get_d());
  auto g = [&](double s) {
    double sum = 0;
    for (double len : lengths) sum += std::pow(len, s);
    return sum - 1.0;
  };
  auto r = bisect_root(g, 0.0, 1.0, tol, "cover root");
  est.value = r.root;
  est.bracket_lo = r.lo;
  est.bracket_hi = r.hi;
  return est;
}

}  // namespace cflab::dim
