#ifndef CFLAB_GROWTH_HPP
#define CFLAB_GROWTH_HPP

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "cflab/numeric_util.hpp"

namespace cflab::growth {

using num::Real;

enum class Family {
  linear,             // phi(n) = alpha * n
  n_log_n,            // phi(n) = n log n   (clamped to 1 at n = 1)
  anchored_exp,           // phi(n_k) = e^{n_k^beta}, linear fill between anchors n_k = k^N
  irregular,          // phi(n) = n*alpha + (l-1)^l on (l-1)^{l-1} <= n < l^l
  double_exp_sum,     // phi(n) = sum_{k<=n} c^{b^k}
  max_digit_integral, // phi(n) = 1 + integral_3^n x / loglog x dx
  table,              // explicit log-phi values
};

Family family_from_string(const std::string& name);
std::string family_name(Family f);

struct Params {
  double alpha = 0;
  double beta = 0;
  double b = 0;
  double c = 0;
  long N = 0;
  double scale = 1;                     // positive multiplier, default 1
  std::vector<double> log_values;      // table family
};

// Asserted true limits. Finite windows cannot certify limsup/liminf, so the
// classifier only fires certified rules when these are supplied (either by
// the user or derived from a closed-form family).
struct AsymptoticHints {
  std::optional<double> limsup_phi_over_n;          // may be +inf
  std::optional<double> liminf_log_phi_over_n;      // log B, may be +inf
  std::optional<double> liminf_loglog_phi_over_n;   // log b, used when B = inf
  std::optional<double> limsup_loglog_phi_over_log_n;
};

class GrowthSequence {
 public:
  static GrowthSequence make(Family f, Params p);

  Family family() const { return family_; }
  const Params& params() const { return params_; }

  // log phi(n); never materializes phi. Valid for all n >= 1.
  Real log_phi(long n) const;

  // phi(n) as an exact integer when the family/parameters make it one
  // (integral alpha/b/c/scale); nullopt otherwise or past the bit budget.
  std::optional<mpz_class> exact_phi(long n, std::size_t max_bits = 1u << 22) const;

  // phi(n) rounded half-up to an integer, exact when exact_phi applies,
  // otherwise computed at enough precision to round correctly. nullopt when
  // the value would exceed max_bits.
  std::optional<mpz_class> phi_rounded(long n, std::size_t max_bits = 1u << 22) const;

  // Closed-form limits of the family, used as classifier hints.
  AsymptoticHints derived_hints() const;

 private:
  GrowthSequence(Family f, Params p) : family_(f), params_(std::move(p)) {}
  void validate_monotone_sample() const;
  double integral_value(long n) const;
  Family family_;
  Params params_;
};

struct DecadeTrend {
  long n_lo = 0, n_hi = 0;
  double sup_phi_over_n = 0;   // +inf when phi/n overflows double
  double inf_log_phi_over_n = 0;
  double sup_loglog_phi_over_log_n = 0;
};

struct ExponentReport {
  long n_lo = 0, n_hi = 0;
  double sup_phi_over_n = 0;
  long arg_sup_phi_over_n = 0;
  double inf_log_phi_over_n = 0;
  long arg_inf_log_phi_over_n = 0;
  double sup_loglog_phi_over_log_n = 0;
  long arg_sup_loglog_phi_over_log_n = 0;
  std::vector<DecadeTrend> trend;
};

// Window extrema of phi/n, log phi / n, loglog phi / log n, with per-decade
// partial extrema. Entirely in log space. The loglog statistic skips n where
// log phi(n) <= 0.
ExponentReport growth_exponents(const GrowthSequence& seq, long n_lo, long n_hi);

enum class VerdictStatus {
  ruled_out_sublinear,
  ruled_out_superexponential,
  passes_necessary,
  upper_bounded,
};

std::string status_name(VerdictStatus s);

struct ClassifierVerdict {
  VerdictStatus status;
  std::string cited_rule;
  std::optional<double> dimension_upper_bound;  // s_B or 1/(1+b)
};

// Necessary-condition classifier for a full-dimensional digit-sum level set.
// Certified statuses need hints; without them the verdict is upper_bounded
// (window evidence only, never a certified rule). Never claims sufficiency.
ClassifierVerdict classify_necessary(const ExponentReport& report,
                                     const AsymptoticHints& hints);

}  // namespace cflab::growth

#endif
