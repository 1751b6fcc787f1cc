#ifndef CFLAB_VERIFY_HPP
#define CFLAB_VERIFY_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cflab/cf_core.hpp"
#include "cflab/constructions.hpp"

namespace cflab::verify {

// Two same-length words together with the set of positions where they
// differ (they agree exactly everywhere else).
struct PairInstance {
  cf::Word sigma;
  cf::Word tau;
  std::vector<std::size_t> omega;  // 1-based, ascending
  std::string id;
};

PairInstance make_pair_instance(cf::Word sigma, cf::Word tau, std::string id = {});

struct SideCheck {
  bool gate = false;    // one-sided hypothesis
  bool holds = false;   // one-sided conclusion
  double margin = 0;    // log-space slack
};

struct CheckReport {
  std::string instance;
  bool hypothesis_satisfied = false;
  bool conclusion_holds = false;
  std::string margin_kind;  // "exact_rational" or "log100"
  std::string margin;
  double margin_value = 0;
  bool vacuous = false;
  std::optional<std::string> counterexample;
  std::optional<SideCheck> side_lower;  // |I(sigma)| >= |I(tau)|^{1+eps}
  std::optional<SideCheck> side_upper;  // |I(sigma)| <= |I(tau)|^{1-eps}
  std::vector<std::string> notes;
};

// Convergent-denominator ratio bounds: strict product bounds on
// q_n(sigma)/q_n(tau) from the digits on the differing set. Exact.
CheckReport check_ratio_bounds(const PairInstance& inst);

// Interval-length comparison under the digit bound psi: when every differing
// digit + 1 is <= psi and 2^{(n-1)eps} >= 2 psi^{2t}, the two cylinder
// lengths agree up to the exponents 1 +- eps. Lengths exact, exponent
// comparison at 100-digit precision. The one-sided gates of the remark are
// evaluated as well.
CheckReport check_comparison(const PairInstance& inst, double epsilon, double psi);

// 1/(2 q_n^2) <= |I_n| < 1/q_n^2, strict on the left except n=1, a_1=1.
CheckReport check_interval_bounds(const cf::Word& w);

// |I_n(word)| >= |I_{n-p}(deleted)|^{1+eps} for a pinned word with p pinned
// positions. Exact lengths, log-space comparison.
CheckReport check_deletion_inequality(const cons::PinnedWord& pw, double epsilon);

struct SweepSummary {
  std::uint64_t instances = 0;
  std::uint64_t hypothesis_pass = 0;
  std::uint64_t conclusion_pass = 0;
  std::uint64_t counterexamples = 0;
  std::optional<CheckReport> first_counterexample;
};

using ReportSink = std::function<void(const CheckReport&)>;

// All same-length pairs with length <= max_len, digits <= max_digit.
SweepSummary sweep_ratio_bounds(std::size_t max_len, long max_digit, int threads = 1,
                                const ReportSink& sink = {});

// All words with length <= max_len, digits <= max_digit.
SweepSummary sweep_interval_bounds(std::size_t max_len, long max_digit, int threads = 1,
                                   const ReportSink& sink = {});

struct RandomComparisonParams {
  std::uint64_t seed = 1;
  int count = 1000;
  std::size_t n_max = 20;
  long digit_max = 8;
};

// Seeded random comparison instances with epsilon tuned per instance so the
// hypothesis gate passes; counts how often the conclusion (and each side of
// the remark variant) holds.
SweepSummary sweep_comparison_random(const RandomComparisonParams& params,
                                     const ReportSink& sink = {});

}  // namespace cflab::verify

#endif
