#ifndef CFLAB_DIMENSION_HPP
#define CFLAB_DIMENSION_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cflab/cf_core.hpp"
#include "cflab/numeric_util.hpp"

namespace cflab::dim {

enum class Method { cylinder_sum, collocation };

// A value on [1, +inf]; B = inf and b = inf are exact case flags, not floats.
struct ExtendedReal {
  double value = 1.0;
  bool infinite = false;
  static ExtendedReal inf() { return {0.0, true}; }
  static ExtendedReal finite(double v) { return {v, false}; }
};

struct PressureConfig {
  double geometric_base = 1.0;   // B >= 1
  int alphabet_max = 2;          // digits 1..M
  int depth = 12;                // cylinder depth n
  Method method = Method::cylinder_sum;
  int collocation_order = 32;    // >= 8
  std::uint64_t max_words = 20'000'000;  // enumeration budget per depth
  int threads = 1;
};

struct DepthRoot {
  int depth = 0;       // cylinder depth (or collocation order)
  double root = 0;
  double bracket_lo = 0;
  double bracket_hi = 0;
};

struct DimensionEstimate {
  double value = 0;
  std::string method;
  double bracket_lo = 0;
  double bracket_hi = 0;
  std::vector<DepthRoot> roots;     // per-depth roots / per-n ratio records
  std::vector<std::string> flags;   // diagnostics (hypothesis ratios, caps)
};

// Finite-depth pressure P_n(s) = (1/n) log sum_{|w|=n} q_n(w)^{-2s} - s log B
// (cylinder_sum), or log of the leading transfer-operator eigenvalue minus
// s log B (collocation). Strictly decreasing in s.
double pressure(double s, const PressureConfig& cfg);

// Dimension from the root of the depth-n covering sum
// sum_{|w|=n} (B^{-n} |I_n(w)|)^s = 1, bisected to tol, recorded at every
// depth up to cfg.depth; the reported value extrapolates the per-depth roots
// by Aitken on a depth-doubling subsequence. Collocation solves the spectral
// root directly. At B=1 the depth-n root is exactly the covering-sum root of
// cover_dimension on the full depth-n cylinder cover.
DimensionEstimate solve_root(const PressureConfig& cfg, double tol,
                             std::optional<std::pair<double, double>> bracket = {});

// Growth-to-dimension case split: 1 when B = 1, the pressure root s_B for
// 1 < B < inf, 1/(1+b) when B = inf.
DimensionEstimate ww_dimension(ExtendedReal B, std::optional<ExtendedReal> b,
                               const PressureConfig& cfg, double tol);

// A positive sequence given by its logarithm, with the caller's assertion
// about its tail behavior (finite windows cannot certify limits).
struct SequenceSpec {
  std::function<num::Real(long)> log_value;  // log s_n, n >= 1
  bool tends_to_infinity = false;
  std::string name;
};

// Dimension of {s_n <= a_n <= N s_n}: 1 / (2 + limsup log s_{n+1} / log(s_1..s_n)).
// Requires s_n >= 3 on the window and s_n -> inf asserted.
DimensionEstimate flww_dimension(const SequenceSpec& s, int depth);

// Same formula for {s_n <= a_n <= s_n t_n} under log(t_n - 1)/log s_n -> 0;
// the hypothesis ratio is reported, and the estimate is flagged inapplicable
// when it does not vanish.
DimensionEstimate lr_dimension(const SequenceSpec& s,
                               const std::function<double(long)>& t,
                               bool ratio_tends_to_zero, int depth);

// Leading term (6/pi^2) e^{-1-gamma} 2^{-alpha} of the dimension gap of
// bounded-average sets.
double cv_gap(double alpha);

// Root of sum |I|^s = 1 over a disjoint cylinder cover; 0 for a single
// cylinder.
DimensionEstimate cover_dimension(const std::vector<cf::Cylinder>& cover, double tol);

}  // namespace cflab::dim

#endif
