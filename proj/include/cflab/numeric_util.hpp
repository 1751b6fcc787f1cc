#ifndef CFLAB_NUMERIC_UTIL_HPP
#define CFLAB_NUMERIC_UTIL_HPP

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace cflab::num {

// Working float for growth-rate evaluation: 113-bit mantissa, so log-log of
// astronomically large values keeps well over the required 80 effective bits.
using Real = boost::multiprecision::cpp_bin_float_quad;

inline double to_double(const Real& x) { return static_cast<double>(x); }

// Aitken delta-squared step. Falls back to x2 when the second difference
// vanishes (sequence already converged at working precision).
template <typename T>
T aitken(const T& x0, const T& x1, const T& x2) {
  T denom = x2 - 2 * x1 + x0;
  if (denom == 0) return x2;
  T d = x2 - x1;
  return x2 - d * d / denom;
}

// Limit estimate for the tail of a sequence whose terms approach a finite
// limsup. If the last few terms are monotone, Aitken on the final three is
// used; otherwise the tail supremum is reported.
template <typename T>
struct TailEstimate {
  T value{};
  bool monotone_tail = false;
  T tail_sup{};
};

template <typename T>
TailEstimate<T> extrapolate_tail(const std::vector<T>& seq, std::size_t tail_len = 5) {
  TailEstimate<T> out;
  if (seq.empty()) return out;
  std::size_t n = seq.size();
  std::size_t start = n > tail_len ? n - tail_len : 0;
  out.tail_sup = seq[start];
  for (std::size_t i = start + 1; i < n; ++i)
    if (seq[i] > out.tail_sup) out.tail_sup = seq[i];
  bool inc = true, dec = true;
  for (std::size_t i = start + 1; i < n; ++i) {
    if (seq[i] < seq[i - 1]) inc = false;
    if (seq[i] > seq[i - 1]) dec = false;
  }
  out.monotone_tail = (inc || dec) && n >= 3;
  if (out.monotone_tail)
    out.value = aitken(seq[n - 3], seq[n - 2], seq[n - 1]);
  else
    out.value = out.tail_sup;
  return out;
}

// Adaptive Simpson quadrature, relative tolerance on each panel.
namespace detail {
inline double simpson_rec(const std::function<double(double)>& f, double a, double b,
                          double fa, double fm, double fb, double whole, double tol,
                          int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (b - a) / 12.0 * (fa + 4 * flm + fm);
  double right = (b - a) / 12.0 * (fm + 4 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol * (std::fabs(left + right) + 1e-300))
    return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol, depth - 1);
}
}  // namespace detail

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double rel_tol = 1e-12, int max_depth = 40) {
  if (a == b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
  return detail::simpson_rec(f, a, b, fa, fm, fb, whole, rel_tol, max_depth);
}

}  // namespace cflab::num

#endif
