#include <doctest.h>

#include <cmath>

#include "cflab/cf_core.hpp"
#include "cflab/constructions.hpp"
#include "cflab/errors.hpp"
#include "cflab/growth.hpp"

using namespace cflab;
using cf::BigInt;
using cons::ConstructionSpec;
using cons::FreePolicy;
using cons::Kind;

namespace {

ConstructionSpec h_m_spec(long M = 3, double beta = 0.5, long N = 2) {
  ConstructionSpec s;
  s.kind = Kind::h_m;
  s.M = M;
  s.beta = beta;
  s.N = N;
  return s;
}

}  // namespace

TEST_CASE("generate h_m: pinned digits and free policy") {
  auto pw = cons::generate(h_m_spec(), 9);
  REQUIRE(pw.word.size() == 9);
  REQUIRE(pw.pinned.size() == 2);
  CHECK(pw.pinned[0].first == 4);
  CHECK(pw.pinned[0].second == 4);   // floor(e^2 - e) = 4
  CHECK(pw.pinned[1].first == 9);
  CHECK(pw.pinned[1].second == 12);  // floor(e^3 - e^2) = 12
  // all_ones fills free slots with 1
  for (std::size_t i = 1; i <= 9; ++i)
    if (i != 4 && i != 9) CHECK(pw.word.digit(i) == 1);
  // counting function: k=1,2,3 have k^2 <= 9, but only k >= 2 are pinned
  CHECK(pw.t_count == 3);
  CHECK(pw.pinned_count == 2);
  CHECK(pw.free_indices() == std::vector<std::size_t>{1, 2, 3, 5, 6, 7, 8});
}

TEST_CASE("generate h_m: seeded random policy is reproducible and in range") {
  auto spec = h_m_spec();
  spec.policy = FreePolicy::random_uniform;
  spec.seed = 42;
  auto a = cons::generate(spec, 9);
  auto b = cons::generate(spec, 9);
  CHECK(a.word == b.word);
  for (std::size_t i = 1; i <= 9; ++i) {
    if (i == 4 || i == 9) continue;
    CHECK(a.word.digit(i) >= 1);
    CHECK(a.word.digit(i) <= 3);
  }
  spec.seed = 43;
  CHECK(cons::generate(spec, 9).word != a.word);
}

TEST_CASE("generate e_m_alpha: square positions pinned") {
  ConstructionSpec s;
  s.kind = Kind::e_m_alpha;
  s.M = 2;
  s.alpha = 1.0;
  auto pw = cons::generate(s, 9);
  REQUIRE(pw.pinned.size() == 2);
  CHECK(pw.pinned[0].first == 4);
  CHECK(pw.pinned[0].second == 5);   // floor(8 log 2)
  CHECK(pw.pinned[1].first == 9);
  CHECK(pw.pinned[1].second == 13);  // floor(12 log 3)
  CHECK(pw.t_count == 3);
}

TEST_CASE("generate e_bc: every digit pinned to c^{b^n}") {
  ConstructionSpec s;
  s.kind = Kind::e_bc;
  s.b = 2;
  s.c = 2;
  auto pw = cons::generate(s, 3);
  REQUIRE(pw.word.size() == 3);
  CHECK(pw.word.digit(1) == 4);
  CHECK(pw.word.digit(2) == 16);
  CHECK(pw.word.digit(3) == 256);
  CHECK(pw.pinned_count == 3);
  // deletion removes everything
  CHECK(cons::delete_pinned(pw).empty());
}

TEST_CASE("generate: budget refusal names the offending index") {
  auto spec = h_m_spec(3, 0.9, 2);
  spec.max_digit_bits = 64;
  try {
    cons::generate(spec, 10000);
    FAIL("expected a budget refusal");
  } catch (const GateRefusal& g) {
    CHECK(g.gate == "digit_budget");
    CHECK(std::string(g.what()).find("index") != std::string::npos);
  }
}

TEST_CASE("pinned digits are always >= 1 after floor-and-clamp") {
  // beta small enough that floor(e^{n_k^beta} - e^{n_{k-1}^beta}) = 0 early on
  ConstructionSpec s;
  s.kind = Kind::e_m_alpha;
  s.M = 2;
  s.alpha = 0.01;  // floor(4*0.01*2*log 2) = 0 -> clamped to 1
  auto pw = cons::generate(s, 4);
  CHECK(pw.pinned[0].second == 1);
}

TEST_CASE("delete_pinned: removes exactly the pinned positions") {
  auto pw = cons::generate(h_m_spec(), 9);
  auto deleted = cons::delete_pinned(pw);
  REQUIRE(deleted.size() == 7);
  for (const auto& d : deleted.digits()) CHECK(d <= 3);

  // no pinned indices: word unchanged
  cons::PinnedWord plain;
  plain.word = cf::Word::of({2, 3, 1});
  CHECK(cons::delete_pinned(plain) == plain.word);
}

TEST_CASE("delete_pinned composed with generate stays in the free alphabet") {
  auto spec = h_m_spec();
  spec.policy = FreePolicy::random_uniform;
  spec.seed = 7;
  for (std::size_t n : {9, 16, 30}) {
    auto deleted = cons::delete_pinned(cons::generate(spec, n));
    for (const auto& d : deleted.digits()) {
      CHECK(d >= 1);
      CHECK(d <= 3);
    }
  }
}

TEST_CASE("enumerate policy goes through for_each_pinned_word") {
  auto spec = h_m_spec(2);
  spec.policy = FreePolicy::enumerate_all;
  CHECK_THROWS_AS(cons::generate(spec, 5), InvalidInput);
  std::size_t count = 0;
  cons::for_each_pinned_word(spec, 5, [&](const cons::PinnedWord& pw) {
    ++count;
    CHECK(pw.word.size() == 5);
    CHECK(pw.word.digit(4) == 4);  // pinned
  });
  CHECK(count == 16);  // 2^4 free assignments (position 4 pinned)
}

TEST_CASE("perturb: increments exactly at l^l positions") {
  std::vector<BigInt> digits(30, BigInt(2));
  auto w = cf::Word(digits);
  auto p = cons::perturb(w);
  REQUIRE(p.size() == 30);
  for (std::size_t i = 1; i <= 30; ++i) {
    if (i == 4)
      CHECK(p.digit(i) == 2 + 7);  // 2^3 - 1^2
    else if (i == 27)
      CHECK(p.digit(i) == 2 + 73);  // 3^4 - 2^3
    else
      CHECK(p.digit(i) == 2);
  }
  CHECK_THROWS_AS(cons::perturb(cf::Word::of({1, 1, 1})), InvalidInput);
}

TEST_CASE("perturb: cumulative digit-sum shift matches the irregular-family gap") {
  // after perturbing, s_n grows by sum_{l^l <= n, l >= 2} (l^{l+1} - (l-1)^l),
  // which telescopes to l^{l+1} - 1 at n = l^l; the irregular family's
  // phi(n) - alpha n equals l^{l+1} there, one more because perturb leaves
  // the l = 1 increment out.
  growth::Params gp;
  gp.alpha = 1;
  auto seq = growth::GrowthSequence::make(growth::Family::irregular, gp);
  std::vector<BigInt> digits(256, BigInt(1));
  auto base = cf::Word(digits);
  auto pert = cons::perturb(base);
  auto s_base = cf::digit_stats(base).running_sum;
  auto s_pert = cf::digit_stats(pert).running_sum;
  for (long l : {2L, 3L, 4L}) {
    std::size_t n = 1;
    for (long i = 0; i < l; ++i) n *= static_cast<std::size_t>(l);
    BigInt shift = s_pert[n - 1] - s_base[n - 1];
    BigInt gap = *seq.exact_phi(static_cast<long>(n)) - static_cast<long>(n);
    CHECK(shift + 1 == gap);
  }
}

TEST_CASE("track_phi: n log n tracking stays within 1%") {
  auto seq = growth::GrowthSequence::make(growth::Family::n_log_n, {});
  auto tr = cons::track_phi(seq, 2000);
  CHECK(!tr.capped);
  auto sums = cf::digit_stats(tr.word).running_sum;
  for (std::size_t n = 100; n <= 2000; n += 37) {
    double phi = n * std::log(static_cast<double>(n));
    double ratio = sums[n - 1].get_d() / phi;
    CHECK(std::fabs(ratio - 1.0) <= 0.01);
  }
}

TEST_CASE("track_phi: double-exponential sums reproduce the digits exactly") {
  growth::Params p;
  p.b = 2;
  p.c = 2;
  auto seq = growth::GrowthSequence::make(growth::Family::double_exp_sum, p);
  auto tr = cons::track_phi(seq, 12);
  for (std::size_t n = 2; n <= 12; ++n) {
    BigInt expect;
    mpz_ui_pow_ui(expect.get_mpz_t(), 2, 1ul << n);
    CHECK(tr.word.digit(n) == expect);
  }
}

TEST_CASE("track_phi: phi(n) = n forces all ones") {
  growth::Params p;
  p.alpha = 1;
  auto seq = growth::GrowthSequence::make(growth::Family::linear, p);
  auto tr = cons::track_phi(seq, 50);
  for (const auto& d : tr.word.digits()) CHECK(d == 1);
}

TEST_CASE("track_phi: refusal when phi stays below n") {
  growth::Params p;
  p.alpha = 0.25;
  auto seq = growth::GrowthSequence::make(growth::Family::linear, p);
  CHECK_THROWS_AS(cons::track_phi(seq, 50), GateRefusal);
}

TEST_CASE("track_phi: cap truncates and flags") {
  growth::Params p;
  p.b = 2;
  p.c = 2;
  auto seq = growth::GrowthSequence::make(growth::Family::double_exp_sum, p);
  auto tr = cons::track_phi(seq, 6, BigInt(100));
  CHECK(tr.capped);
  for (const auto& d : tr.word.digits()) CHECK(d <= 100);
}
