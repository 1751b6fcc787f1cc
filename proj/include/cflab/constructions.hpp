#ifndef CFLAB_CONSTRUCTIONS_HPP
#define CFLAB_CONSTRUCTIONS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cflab/cf_core.hpp"
#include "cflab/growth.hpp"

namespace cflab::cons {

enum class Kind { h_m, e_m_alpha, e_bc, tracking, perturbed };
enum class FreePolicy { all_ones, random_uniform, enumerate_all };

Kind kind_from_string(const std::string& name);
std::string kind_name(Kind k);

struct ConstructionSpec {
  Kind kind = Kind::h_m;
  long M = 1;            // free-digit alphabet bound
  double beta = 0.5;     // h_m
  long N = 2;            // h_m anchor exponent
  double alpha = 1.0;    // e_m_alpha
  double b = 2.0, c = 2.0;  // e_bc
  FreePolicy policy = FreePolicy::all_ones;
  std::uint64_t seed = 0;
  std::size_t max_digit_bits = 1u << 18;  // budget for one pinned digit
};

// A word with formula-forced positions. Free positions range over 1..M.
struct PinnedWord {
  cf::Word word;
  std::vector<std::pair<std::size_t, cf::BigInt>> pinned;  // 1-based index -> digit
  long alphabet_max = 1;
  // #{k >= 1 : anchor_k <= n} exactly as the counting function is defined
  // (it counts the first anchor even though that position is never pinned).
  long t_count = 0;
  long pinned_count = 0;  // anchors actually pinned (k >= 2)

  // 1-based positions not forced by the formula (each ranges over 1..alphabet_max)
  std::vector<std::size_t> free_indices() const;
};

// Length-n word with pinned formula digits (floored and clamped to >= 1) and
// free digits filled by the policy. Pinned values beyond the bit budget are
// refused naming the offending index.
PinnedWord generate(const ConstructionSpec& spec, std::size_t n);

// Enumerate every free-digit assignment of the construction (the
// enumerate_all policy); fn receives each completed word.
void for_each_pinned_word(const ConstructionSpec& spec, std::size_t n,
                          const std::function<void(const PinnedWord&)>& fn);

struct TrackResult {
  cf::Word word;
  bool capped = false;  // a cap truncated digits; the tracking guarantee is void
};

// Greedy digit sequence a_n = max(1, round(phi(n)) - s_{n-1}) whose running
// sums track phi.
TrackResult track_phi(const growth::GrowthSequence& seq, std::size_t n,
                      std::optional<cf::BigInt> cap = std::nullopt,
                      std::size_t max_digit_bits = 1u << 22);

// Increment digits at positions l^l (l >= 2) by l^{l+1} - (l-1)^l.
cf::Word perturb(const cf::Word& w);

// Remove the pinned positions (the deletion map); the result ranges over the
// free alphabet only.
cf::Word delete_pinned(const PinnedWord& pw);

}  // namespace cflab::cons

#endif
