#include "cflab/cf_core.hpp"

#include <utility>

#include "cflab/errors.hpp"

namespace cflab::cf {

Word::Word(std::vector<BigInt> digits) : digits_(std::move(digits)) {
  for (const auto& a : digits_)
    if (a < 1) throw InvalidInput("word digit < 1: " + a.get_str());
}

Word Word::of(std::initializer_list<long> digits) {
  std::vector<BigInt> v;
  v.reserve(digits.size());
  for (long d : digits) v.emplace_back(d);
  return Word(std::move(v));
}

Word Word::appended(const BigInt& a) const {
  std::vector<BigInt> v = digits_;
  v.push_back(a);
  return Word(std::move(v));
}

Word Word::prefix(std::size_t len) const {
  if (len > size()) throw InvalidInput("prefix longer than word");
  return Word(std::vector<BigInt>(digits_.begin(), digits_.begin() + len));
}

Word expand(const Rational& x, std::size_t max_len) {
  if (x <= 0 || x >= 1) throw InvalidInput("expand: x must lie in (0,1)");
  std::vector<BigInt> digits;
  Rational r = x;
  r.canonicalize();
  while (digits.size() < max_len && r != 0) {
    // 1/r = a + remainder with a = floor(num/den) of the reciprocal
    BigInt num = r.get_den(), den = r.get_num();  // reciprocal of r
    BigInt a, rem;
    mpz_fdiv_qr(a.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    digits.push_back(a);
    r = Rational(rem, den);
    r.canonicalize();
  }
  return Word(std::move(digits));
}

std::vector<ConvergentPair> convergents(const Word& w) {
  if (w.empty()) throw InvalidInput("convergents: empty word");
  std::vector<ConvergentPair> out;
  out.reserve(w.size());
  BigInt p_prev2 = 1, p_prev1 = 0;  // p_{-1}, p_0
  BigInt q_prev2 = 0, q_prev1 = 1;  // q_{-1}, q_0
  for (const auto& a : w.digits()) {
    BigInt p = a * p_prev1 + p_prev2;
    BigInt q = a * q_prev1 + q_prev2;
    out.push_back({p, q});
    p_prev2 = std::move(p_prev1);
    p_prev1 = std::move(p);
    q_prev2 = std::move(q_prev1);
    q_prev1 = std::move(q);
  }
  return out;
}

Rational evaluate(const Word& w) {
  if (w.empty()) throw InvalidInput("evaluate: empty word");
  Rational v = 0;
  for (auto it = w.digits().rbegin(); it != w.digits().rend(); ++it) {
    Rational t = *it + v;
    v = Rational(t.get_den(), t.get_num());
    v.canonicalize();
  }
  return v;
}

Cylinder cylinder(const Word& w) {
  if (w.empty()) throw InvalidInput("cylinder: empty word");
  auto conv = convergents(w);
  std::size_t n = conv.size();
  const BigInt& pn = conv[n - 1].p;
  const BigInt& qn = conv[n - 1].q;
  BigInt pm = n >= 2 ? conv[n - 2].p : BigInt(0);  // p_{n-1}, p_0 = 0
  BigInt qm = n >= 2 ? conv[n - 2].q : BigInt(1);  // q_{n-1}, q_0 = 1
  Rational e1(pn, qn);
  e1.canonicalize();
  Rational e2(pn + pm, qn + qm);
  e2.canonicalize();
  Cylinder c;
  c.word = w;
  if (e1 < e2) {
    c.left = e1;
    c.right = e2;
  } else {
    c.left = e2;
    c.right = e1;
  }
  c.length = Rational(BigInt(1), qn * (qn + qm));
  c.length.canonicalize();
  return c;
}

Rational gauss_step(const Rational& x) {
  if (x <= 0 || x >= 1) throw InvalidInput("gauss_step: x must lie in (0,1)");
  BigInt num = x.get_den(), den = x.get_num();  // 1/x
  BigInt rem;
  mpz_fdiv_r(rem.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  Rational out(rem, den);
  out.canonicalize();
  return out;
}

DigitStats digit_stats(const Word& w) {
  DigitStats st;
  st.running_sum.reserve(w.size());
  st.running_max.reserve(w.size());
  BigInt sum = 0, mx = 0;
  for (const auto& a : w.digits()) {
    sum += a;
    if (a > mx) mx = a;
    st.running_sum.push_back(sum);
    st.running_max.push_back(mx);
  }
  return st;
}

}  // namespace cflab::cf
