#ifndef CFLAB_CF_CORE_HPP
#define CFLAB_CF_CORE_HPP

#include <gmpxx.h>

#include <cstddef>
#include <vector>

namespace cflab::cf {

using BigInt = mpz_class;
using Rational = mpq_class;

// A finite block of partial quotients a_1..a_n, every digit >= 1. The empty
// word stands for the whole unit interval. Immutable after construction.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<BigInt> digits);
  static Word of(std::initializer_list<long> digits);

  const std::vector<BigInt>& digits() const { return digits_; }
  std::size_t size() const { return digits_.size(); }
  bool empty() const { return digits_.empty(); }
  // 1-based access matching the a_1..a_n convention.
  const BigInt& digit(std::size_t i) const { return digits_.at(i - 1); }

  Word appended(const BigInt& a) const;
  Word prefix(std::size_t len) const;

  bool operator==(const Word&) const = default;

 private:
  std::vector<BigInt> digits_;
};

// Numerator/denominator of a truncated expansion, built by the three-term
// recursion p_n = a_n p_{n-1} + p_{n-2}, q_n = a_n q_{n-1} + q_{n-2} with
// seeds p_{-1}=1, p_0=0, q_{-1}=0, q_0=1.
struct ConvergentPair {
  BigInt p;
  BigInt q;
};

// Rank-n basic interval of a word: exact endpoints in increasing order and
// the exact length 1/(q_n (q_n + q_{n-1})).
struct Cylinder {
  Word word;
  Rational left;
  Rational right;
  Rational length;
};

struct DigitStats {
  std::vector<BigInt> running_sum;  // s_1..s_n
  std::vector<BigInt> running_max;  // T_1..T_n
};

// Greedy expansion of a rational in (0,1), truncated at max_len or at exact
// termination. No normalization of a trailing 1: the digits are exactly the
// Gauss-map itinerary.
Word expand(const Rational& x, std::size_t max_len);

// All convergents (p_1,q_1)..(p_n,q_n) of a non-empty word.
std::vector<ConvergentPair> convergents(const Word& w);

// Exact value of the finite continued fraction [a_1,..,a_n].
Rational evaluate(const Word& w);

Cylinder cylinder(const Word& w);

// One Gauss-map step {1/x} for rational x in (0,1).
Rational gauss_step(const Rational& x);

DigitStats digit_stats(const Word& w);

}  // namespace cflab::cf

#endif
