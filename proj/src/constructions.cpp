#include "cflab/constructions.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "cflab/errors.hpp"

namespace cflab::cons {

namespace {

using MpfrFloat = boost::multiprecision::mpfr_float;
using cf::BigInt;

bool is_integral(double x) {
  return std::isfinite(x) && x == std::floor(x) && std::fabs(x) < 9.007199254740992e15;
}

mpz_class mpz_pow(const mpz_class& base, unsigned long e) {
  mpz_class out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
  return out;
}

// floor(e^x - e^y) for 0 <= y < x, at enough precision to pin every integer
// digit. Callers must have checked the bit budget.
BigInt floor_exp_diff(double x, double y) {
  double bits = x * 1.4426950408889634 + 8;
  unsigned digits10 = static_cast<unsigned>(std::max(40.0, bits * 0.30103 + 30.0));
  MpfrFloat::default_precision(digits10);
  MpfrFloat v = exp(MpfrFloat(x)) - exp(MpfrFloat(y));
  v = floor(v);
  BigInt out;
  mpfr_get_z(out.get_mpz_t(), v.backend().data(), MPFR_RNDZ);
  return out;
}

// floor(c^(b^idx)); exact integer power when b and c are integers.
BigInt floor_double_exp(double b, double c, long idx, std::size_t max_bits,
                        std::size_t word_index) {
  double bits = std::pow(b, static_cast<double>(idx)) * std::log2(c);
  if (!(bits <= static_cast<double>(max_bits)))
    throw GateRefusal("digit_budget",
                      "pinned digit at index " + std::to_string(word_index) +
                          " needs ~" + std::to_string(bits) + " bits, over budget " +
                          std::to_string(max_bits));
  if (is_integral(b) && is_integral(c)) {
    double e = std::pow(b, static_cast<double>(idx));
    return mpz_pow(mpz_class(static_cast<long>(c)), static_cast<unsigned long>(e));
  }
  unsigned digits10 = static_cast<unsigned>(std::max(40.0, bits * 0.30103 + 30.0));
  MpfrFloat::default_precision(digits10);
  MpfrFloat v = exp(pow(MpfrFloat(b), MpfrFloat(static_cast<double>(idx))) * log(MpfrFloat(c)));
  v = floor(v);
  BigInt out;
  mpfr_get_z(out.get_mpz_t(), v.backend().data(), MPFR_RNDZ);
  return out;
}

BigInt clamp_one(BigInt v) { return v < 1 ? BigInt(1) : v; }

struct Layout {
  std::vector<std::pair<std::size_t, BigInt>> pinned;  // ascending index
  long t_count = 0;
};

// Pinned positions and values for the formula kinds.
Layout layout_for(const ConstructionSpec& spec, std::size_t n) {
  Layout lay;
  switch (spec.kind) {
    case Kind::h_m: {
      // anchors n_k = k^N; position n_1 = 1 stays free, k >= 2 pinned to
      // floor(e^{n_k^beta} - e^{n_{k-1}^beta})
      for (long k = 1;; ++k) {
        double nk_d = std::pow(static_cast<double>(k), static_cast<double>(spec.N));
        if (nk_d > static_cast<double>(n) + 0.5) break;
        long nk = 1;
        for (long i = 0; i < spec.N; ++i) nk *= k;
        if (static_cast<std::size_t>(nk) > n) break;
        ++lay.t_count;
        if (k == 1) continue;
        long nk_prev = 1;
        for (long i = 0; i < spec.N; ++i) nk_prev *= (k - 1);
        double ex = std::pow(static_cast<double>(nk), spec.beta);
        double ey = std::pow(static_cast<double>(nk_prev), spec.beta);
        double bits = ex * 1.4426950408889634;
        if (!(bits <= static_cast<double>(spec.max_digit_bits)))
          throw GateRefusal("digit_budget",
                            "pinned digit at index " + std::to_string(nk) + " needs ~" +
                                std::to_string(bits) + " bits, over budget " +
                                std::to_string(spec.max_digit_bits));
        lay.pinned.emplace_back(static_cast<std::size_t>(nk),
                                clamp_one(floor_exp_diff(ex, ey)));
      }
      break;
    }
    case Kind::e_m_alpha: {
      // squares l^2 pinned to floor(4 alpha l log l) for l >= 2
      for (long l = 1; static_cast<std::size_t>(l) * l <= n; ++l) {
        ++lay.t_count;
        if (l == 1) continue;
        double v = std::floor(4.0 * spec.alpha * l * std::log(static_cast<double>(l)));
        lay.pinned.emplace_back(static_cast<std::size_t>(l) * l,
                                clamp_one(BigInt(static_cast<long>(v))));
      }
      break;
    }
    case Kind::e_bc: {
      // every index pinned to floor(c^{b^i})
      if (!(spec.b > 1) || !(spec.c > 1))
        throw InvalidInput("e_bc construction: b and c must be > 1");
      for (std::size_t i = 1; i <= n; ++i) {
        lay.pinned.emplace_back(
            i, clamp_one(floor_double_exp(spec.b, spec.c, static_cast<long>(i),
                                          spec.max_digit_bits, i)));
      }
      lay.t_count = static_cast<long>(n);
      break;
    }
    default:
      throw InvalidInput("generate: kind " + kind_name(spec.kind) +
                         " is not a pinned-word construction");
  }
  return lay;
}

void check_spec(const ConstructionSpec& spec) {
  if (spec.kind == Kind::h_m) {
    if (!(spec.beta >= 0 && spec.beta < 1))
      throw InvalidInput("h_m construction: beta must lie in [0,1)");
    if (spec.N < 1) throw InvalidInput("h_m construction: N must be >= 1");
  }
  if (spec.kind == Kind::e_m_alpha && !(spec.alpha > 0))
    throw InvalidInput("e_m_alpha construction: alpha must be > 0");
  if (spec.kind != Kind::e_bc && spec.M < 1)
    throw InvalidInput("construction: free-digit bound M must be >= 1");
}

}  // namespace

std::vector<std::size_t> PinnedWord::free_indices() const {
  std::vector<bool> is_pinned(word.size() + 1, false);
  for (const auto& [idx, _] : pinned) is_pinned[idx] = true;
  std::vector<std::size_t> out;
  out.reserve(word.size() - pinned.size());
  for (std::size_t i = 1; i <= word.size(); ++i)
    if (!is_pinned[i]) out.push_back(i);
  return out;
}

Kind kind_from_string(const std::string& name) {
  if (name == "h_m") return Kind::h_m;
  if (name == "e_m_alpha") return Kind::e_m_alpha;
  if (name == "e_bc") return Kind::e_bc;
  if (name == "tracking") return Kind::tracking;
  if (name == "perturbed") return Kind::perturbed;
  throw InvalidInput("unknown construction kind: " + name);
}

std::string kind_name(Kind k) {
  switch (k) {
    case Kind::h_m: return "h_m";
    case Kind::e_m_alpha: return "e_m_alpha";
    case Kind::e_bc: return "e_bc";
    case Kind::tracking: return "tracking";
    case Kind::perturbed: return "perturbed";
  }
  return "?";
}

PinnedWord generate(const ConstructionSpec& spec, std::size_t n) {
  check_spec(spec);
  if (spec.policy == FreePolicy::enumerate_all)
    throw InvalidInput("generate: the enumerate policy yields a family, use for_each_pinned_word");
  Layout lay = layout_for(spec, n);

  std::vector<BigInt> digits(n, BigInt(1));
  if (spec.policy == FreePolicy::random_uniform) {
    std::mt19937_64 rng(spec.seed);
    std::uniform_int_distribution<long> dist(1, spec.M);
    for (std::size_t i = 0; i < n; ++i) digits[i] = BigInt(dist(rng));
  }
  for (const auto& [idx, val] : lay.pinned) digits[idx - 1] = val;

  PinnedWord pw;
  pw.word = cf::Word(std::move(digits));
  pw.pinned = std::move(lay.pinned);
  pw.alphabet_max = spec.M;
  pw.t_count = lay.t_count;
  pw.pinned_count = static_cast<long>(pw.pinned.size());
  return pw;
}

void for_each_pinned_word(const ConstructionSpec& spec, std::size_t n,
                          const std::function<void(const PinnedWord&)>& fn) {
  check_spec(spec);
  Layout lay = layout_for(spec, n);
  std::vector<bool> is_pinned(n + 1, false);
  for (const auto& [idx, _] : lay.pinned) is_pinned[idx] = true;

  std::vector<BigInt> digits(n, BigInt(1));
  for (const auto& [idx, val] : lay.pinned) digits[idx - 1] = val;

  PinnedWord pw;
  pw.alphabet_max = spec.M;
  pw.t_count = lay.t_count;
  pw.pinned = lay.pinned;
  pw.pinned_count = static_cast<long>(lay.pinned.size());

  std::function<void(std::size_t)> rec = [&](std::size_t pos) {
    if (pos > n) {
      pw.word = cf::Word(digits);
      fn(pw);
      return;
    }
    if (is_pinned[pos]) {
      rec(pos + 1);
      return;
    }
    for (long a = 1; a <= spec.M; ++a) {
      digits[pos - 1] = BigInt(a);
      rec(pos + 1);
    }
    digits[pos - 1] = BigInt(1);
  };
  rec(1);
}

TrackResult track_phi(const growth::GrowthSequence& seq, std::size_t n,
                      std::optional<cf::BigInt> cap, std::size_t max_digit_bits) {
  // The digit floor a_n >= 1 makes s_n >= n; tracking is hopeless when phi
  // stays below that.
  {
    auto last = seq.phi_rounded(static_cast<long>(n), max_digit_bits);
    if (!last)
      throw GateRefusal("digit_budget", "track_phi: phi(" + std::to_string(n) +
                                            ") exceeds the bit budget");
    if (*last < static_cast<long>(n))
      throw GateRefusal("tracking_infeasible",
                        "track_phi: phi(n) < n at n = " + std::to_string(n) +
                            "; running sums are always >= n");
  }
  TrackResult out;
  std::vector<BigInt> digits;
  digits.reserve(n);
  BigInt running = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    auto target = seq.phi_rounded(static_cast<long>(i), max_digit_bits);
    if (!target)
      throw GateRefusal("digit_budget", "track_phi: phi(" + std::to_string(i) +
                                            ") exceeds the bit budget");
    BigInt a = *target - running;
    if (a < 1) a = 1;
    if (cap && a > *cap) {
      a = *cap;
      out.capped = true;
    }
    running += a;
    digits.push_back(std::move(a));
  }
  out.word = cf::Word(std::move(digits));
  return out;
}

cf::Word perturb(const cf::Word& w) {
  if (w.size() < 4)
    throw InvalidInput("perturb: word must have length >= 4 (first touched index is 4)");
  std::vector<BigInt> digits = w.digits();
  for (long l = 2;; ++l) {
    // index l^l
    double idx_d = std::pow(static_cast<double>(l), static_cast<double>(l));
    if (idx_d > static_cast<double>(digits.size()) + 0.5) break;
    std::size_t idx = 1;
    for (long i = 0; i < l; ++i) idx *= static_cast<std::size_t>(l);
    if (idx > digits.size()) break;
    BigInt inc = mpz_pow(mpz_class(l), static_cast<unsigned long>(l + 1)) -
                 mpz_pow(mpz_class(l - 1), static_cast<unsigned long>(l));
    digits[idx - 1] += inc;
  }
  return cf::Word(std::move(digits));
}

cf::Word delete_pinned(const PinnedWord& pw) {
  std::vector<bool> drop(pw.word.size() + 1, false);
  for (const auto& [idx, _] : pw.pinned) drop[idx] = true;
  std::vector<BigInt> digits;
  digits.reserve(pw.word.size());
  for (std::size_t i = 1; i <= pw.word.size(); ++i)
    if (!drop[i]) digits.push_back(pw.word.digit(i));
  return cf::Word(std::move(digits));
}

}  // namespace cflab::cons
