#include "cflab/verify.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "cflab/errors.hpp"

namespace cflab::verify {

namespace {

using cf::BigInt;
using cf::Rational;
using MpfrFloat = boost::multiprecision::mpfr_float;

constexpr unsigned kLogDigits = 100;

MpfrFloat log_rational(const Rational& q) {
  MpfrFloat::default_precision(kLogDigits);
  MpfrFloat v(q.get_mpq_t());
  return log(v);
}

MpfrFloat log_bigint(const BigInt& z) {
  MpfrFloat::default_precision(kLogDigits);
  MpfrFloat v(z.get_mpz_t());
  return log(v);
}

std::string word_str(const cf::Word& w, std::size_t max_digits = 12) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) os << ",";
    if (i >= max_digits) {
      os << "...x" << w.size();
      break;
    }
    const BigInt& d = w.digits()[i];
    if (mpz_sizeinbase(d.get_mpz_t(), 10) > 12)
      os << "~10^" << (mpz_sizeinbase(d.get_mpz_t(), 10) - 1);
    else
      os << d;
  }
  os << ")";
  return os.str();
}

Rational cylinder_length(const cf::Word& w) {
  if (w.empty()) return Rational(1);  // the whole unit interval
  return cf::cylinder(w).length;
}

BigInt last_q(const cf::Word& w) {
  auto conv = cf::convergents(w);
  return conv.back().q;
}

std::string mpfr_str(const MpfrFloat& v) { return v.str(20); }

}  // namespace

PairInstance make_pair_instance(cf::Word sigma, cf::Word tau, std::string id) {
  if (sigma.size() != tau.size())
    throw InvalidInput("pair instance: words must have equal length");
  PairInstance inst;
  inst.omega.reserve(sigma.size());
  for (std::size_t i = 1; i <= sigma.size(); ++i)
    if (sigma.digit(i) != tau.digit(i)) inst.omega.push_back(i);
  inst.sigma = std::move(sigma);
  inst.tau = std::move(tau);
  inst.id = std::move(id);
  return inst;
}

CheckReport check_ratio_bounds(const PairInstance& inst) {
  CheckReport rep;
  rep.instance = inst.id.empty()
                     ? "ratio_bounds sigma=" + word_str(inst.sigma) + " tau=" + word_str(inst.tau)
                     : inst.id;
  rep.margin_kind = "exact_rational";
  if (inst.sigma.empty()) throw InvalidInput("ratio bounds: empty words");

  if (inst.omega.empty()) {
    rep.vacuous = true;
    rep.hypothesis_satisfied = true;
    rep.conclusion_holds = true;
    rep.margin = "0";
    rep.margin_value = 0;
    rep.notes.push_back("identical words: bounds degenerate to equality");
    return rep;
  }

  BigInt lower_num = 1, lower_den = 1, upper_num = 1, upper_den = 1;
  for (std::size_t idx : inst.omega) {
    lower_num *= inst.sigma.digit(idx);
    lower_den *= inst.tau.digit(idx) + 1;
    upper_num *= inst.sigma.digit(idx) + 1;
    upper_den *= inst.tau.digit(idx);
  }
  Rational lower(lower_num, lower_den), upper(upper_num, upper_den);
  lower.canonicalize();
  upper.canonicalize();
  Rational ratio(last_q(inst.sigma), last_q(inst.tau));
  ratio.canonicalize();

  rep.hypothesis_satisfied = true;
  bool left = lower < ratio, right = ratio < upper;
  rep.conclusion_holds = left && right;
  Rational margin = left && right ? std::min(Rational(ratio - lower), Rational(upper - ratio))
                                  : Rational(0);
  rep.margin = margin.get_str();
  rep.margin_value = margin.get_d();
  if (!rep.conclusion_holds)
    rep.counterexample = rep.instance + " ratio=" + ratio.get_str() + " bounds=(" +
                         lower.get_str() + "," + upper.get_str() + ")";
  return rep;
}

CheckReport check_comparison(const PairInstance& inst, double epsilon, double psi) {
  if (!(epsilon > 0)) throw InvalidInput("comparison: epsilon must be > 0");
  CheckReport rep;
  rep.instance = inst.id.empty()
                     ? "comparison sigma=" + word_str(inst.sigma) + " tau=" + word_str(inst.tau)
                     : inst.id;
  rep.margin_kind = "log100";
  std::size_t n = inst.sigma.size();
  std::size_t t = inst.omega.size();

  MpfrFloat::default_precision(kLogDigits);
  const MpfrFloat log2 = log(MpfrFloat(2));

  // digit bound part of the hypothesis
  bool digits_ok = true;
  for (std::size_t idx : inst.omega) {
    if (inst.sigma.digit(idx) + 1 > psi || inst.tau.digit(idx) + 1 > psi) digits_ok = false;
  }
  // gate 2^{(n-1)eps} >= 2 psi^{2t}
  MpfrFloat lhs = MpfrFloat(static_cast<double>(n - 1)) * epsilon * log2;
  MpfrFloat rhs = log2 + 2.0 * static_cast<double>(t) * log(MpfrFloat(psi));
  rep.hypothesis_satisfied = digits_ok && lhs >= rhs;

  if (inst.omega.empty()) {
    rep.vacuous = true;
    rep.conclusion_holds = true;
    rep.margin = "0";
    rep.margin_value = 0;
    rep.notes.push_back("identical words: identical intervals");
    return rep;
  }

  MpfrFloat L_sigma = log_rational(cylinder_length(inst.sigma));
  MpfrFloat L_tau = log_rational(cylinder_length(inst.tau));
  MpfrFloat slack_lower = L_sigma - (1 + epsilon) * L_tau;   // >= 0 wanted
  MpfrFloat slack_upper = (1 - epsilon) * L_tau - L_sigma;   // >= 0 wanted
  MpfrFloat margin = std::min(slack_lower, slack_upper);
  rep.conclusion_holds = slack_lower >= 0 && slack_upper >= 0;
  rep.margin = mpfr_str(margin);
  rep.margin_value = static_cast<double>(margin);
  if (!rep.hypothesis_satisfied)
    rep.notes.push_back("hypothesis gate failed: conclusion not asserted, reported as computed");

  // one-sided gates: 2^{(n-1)eps} >= 2 (prod(x+1)/prod(y))^2 implies the
  // corresponding single inequality
  BigInt sig_plus = 1, sig = 1, tau_plus = 1, tau = 1;
  for (std::size_t idx : inst.omega) {
    sig_plus *= inst.sigma.digit(idx) + 1;
    sig *= inst.sigma.digit(idx);
    tau_plus *= inst.tau.digit(idx) + 1;
    tau *= inst.tau.digit(idx);
  }
  SideCheck lowside, upside;
  {
    MpfrFloat gate_rhs = log2 + 2 * (log_bigint(sig_plus) - log_bigint(tau));
    lowside.gate = lhs >= gate_rhs;
    lowside.holds = slack_lower >= 0;
    lowside.margin = static_cast<double>(slack_lower);
  }
  {
    MpfrFloat gate_rhs = log2 + 2 * (log_bigint(tau_plus) - log_bigint(sig));
    upside.gate = lhs >= gate_rhs;
    upside.holds = slack_upper >= 0;
    upside.margin = static_cast<double>(slack_upper);
  }
  rep.side_lower = lowside;
  rep.side_upper = upside;
  if (rep.hypothesis_satisfied && !rep.conclusion_holds)
    rep.counterexample = rep.instance;
  return rep;
}

CheckReport check_interval_bounds(const cf::Word& w) {
  if (w.empty()) throw InvalidInput("interval bounds: empty word");
  CheckReport rep;
  rep.instance = "interval_bounds " + word_str(w);
  rep.margin_kind = "exact_rational";
  rep.hypothesis_satisfied = true;

  auto conv = cf::convergents(w);
  const BigInt& qn = conv.back().q;
  Rational length = cylinder_length(w);
  Rational lower(BigInt(1), 2 * qn * qn), upper(BigInt(1), qn * qn);
  lower.canonicalize();
  upper.canonicalize();

  bool left_equal = length == lower;
  bool edge_case = w.size() == 1 && w.digit(1) == 1;
  bool ok;
  if (w.size() == 1)
    ok = (left_equal ? edge_case : lower < length) && length < upper;
  else
    ok = lower < length && length < upper;
  rep.conclusion_holds = ok;
  if (left_equal) rep.notes.push_back("left bound attained (n=1, a_1=1 edge case)");

  Rational margin = std::min(Rational(length - lower), Rational(upper - length));
  rep.margin = margin.get_str();
  rep.margin_value = margin.get_d();
  if (!ok) rep.counterexample = rep.instance;
  return rep;
}

CheckReport check_deletion_inequality(const cons::PinnedWord& pw, double epsilon) {
  if (epsilon < 0) throw InvalidInput("deletion inequality: epsilon must be >= 0");
  CheckReport rep;
  rep.margin_kind = "log100";
  rep.hypothesis_satisfied = true;
  cf::Word deleted = cons::delete_pinned(pw);
  rep.instance = "deletion n=" + std::to_string(pw.word.size()) + " pinned=" +
                 std::to_string(pw.pinned_count) + " word=" + word_str(pw.word);

  MpfrFloat L_full = log_rational(cylinder_length(pw.word));
  MpfrFloat L_del = deleted.empty() ? MpfrFloat(0) : log_rational(cylinder_length(deleted));
  MpfrFloat margin = L_full - (1 + epsilon) * L_del;  // >= 0 means the inequality holds
  rep.conclusion_holds = margin >= 0;
  rep.margin = mpfr_str(margin);
  rep.margin_value = static_cast<double>(margin);
  if (pw.pinned.empty())
    rep.notes.push_back("no pinned positions: deleted word equals the original");
  if (!rep.conclusion_holds) rep.counterexample = rep.instance;
  return rep;
}

namespace {

// Odometer over words of a fixed length with digits 1..max_digit.
bool next_word(std::vector<long>& digits, long max_digit) {
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] < max_digit) {
      ++digits[i];
      for (std::size_t j = 0; j < i; ++j) digits[j] = 1;
      return true;
    }
  }
  return false;
}

cf::Word to_word(const std::vector<long>& digits) {
  std::vector<BigInt> v(digits.begin(), digits.end());
  return cf::Word(std::move(v));
}

void accumulate(SweepSummary& sum, const CheckReport& rep, const ReportSink& sink) {
  ++sum.instances;
  if (rep.hypothesis_satisfied) ++sum.hypothesis_pass;
  if (rep.conclusion_holds) ++sum.conclusion_pass;
  bool bad = rep.hypothesis_satisfied && !rep.conclusion_holds && !rep.vacuous;
  if (bad) {
    ++sum.counterexamples;
    if (!sum.first_counterexample) sum.first_counterexample = rep;
  }
  if (sink) sink(rep);
}

void merge(SweepSummary& into, const SweepSummary& part) {
  into.instances += part.instances;
  into.hypothesis_pass += part.hypothesis_pass;
  into.conclusion_pass += part.conclusion_pass;
  into.counterexamples += part.counterexamples;
  if (!into.first_counterexample && part.first_counterexample)
    into.first_counterexample = part.first_counterexample;
}

}  // namespace

SweepSummary sweep_ratio_bounds(std::size_t max_len, long max_digit, int threads,
                                const ReportSink& sink) {
  if (max_len < 1 || max_digit < 1) throw InvalidInput("sweep: max_len and max_digit >= 1");
  SweepSummary sum;
  // shard by the first digit of sigma; reduce in digit order
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<SweepSummary> parts(max_digit);
    auto run_shard = [&](long first) {
      SweepSummary local;
      std::vector<long> sig(len, 1);
      sig[len - 1] = first;  // fix the most significant odometer digit
      do {
        std::vector<long> tau(len, 1);
        do {
          auto rep = check_ratio_bounds(make_pair_instance(to_word(sig), to_word(tau)));
          accumulate(local, rep, threads == 1 ? sink : ReportSink{});
        } while (next_word(tau, max_digit));
        // stop when the fixed digit would roll over
      } while (next_word(sig, max_digit) && sig[len - 1] == first);
      parts[first - 1] = std::move(local);
    };
    int nthreads = std::max(1, static_cast<int>(std::min<long>(threads, max_digit)));
    if (nthreads == 1) {
      for (long f = 1; f <= max_digit; ++f) run_shard(f);
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < nthreads; ++t)
        pool.emplace_back([&, t]() {
          for (long f = t + 1; f <= max_digit; f += nthreads) run_shard(f);
        });
      for (auto& th : pool) th.join();
    }
    for (const auto& p : parts) merge(sum, p);
  }
  return sum;
}

SweepSummary sweep_interval_bounds(std::size_t max_len, long max_digit, int threads,
                                   const ReportSink& sink) {
  (void)threads;  // cheap enough single-threaded; kept for interface symmetry
  if (max_len < 1 || max_digit < 1) throw InvalidInput("sweep: max_len and max_digit >= 1");
  SweepSummary sum;
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<long> w(len, 1);
    do {
      accumulate(sum, check_interval_bounds(to_word(w)), sink);
    } while (next_word(w, max_digit));
  }
  return sum;
}

SweepSummary sweep_comparison_random(const RandomComparisonParams& params,
                                     const ReportSink& sink) {
  if (params.count < 1 || params.n_max < 6 || params.digit_max < 2)
    throw InvalidInput("comparison sweep: need count >= 1, n_max >= 6, digit_max >= 2");
  SweepSummary sum;
  std::mt19937_64 rng(params.seed);
  std::uniform_int_distribution<std::size_t> n_dist(6, params.n_max);
  std::uniform_int_distribution<long> digit_dist(1, params.digit_max);
  double psi = static_cast<double>(params.digit_max + 1);

  for (int i = 0; i < params.count; ++i) {
    std::size_t n = n_dist(rng);
    std::uniform_int_distribution<std::size_t> t_dist(1, std::min<std::size_t>(3, n));
    std::size_t t = t_dist(rng);
    std::vector<std::size_t> all(n);
    for (std::size_t j = 0; j < n; ++j) all[j] = j + 1;
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<bool> in_omega(n + 1, false);
    for (std::size_t j = 0; j < t; ++j) in_omega[all[j]] = true;

    std::vector<BigInt> sig(n), tau(n);
    for (std::size_t j = 1; j <= n; ++j) {
      long a = digit_dist(rng);
      if (in_omega[j]) {
        long b = digit_dist(rng);
        while (b == a) b = digit_dist(rng);
        sig[j - 1] = a;
        tau[j - 1] = b;
      } else {
        sig[j - 1] = tau[j - 1] = a;
      }
    }
    // epsilon tuned so the gate passes: (n-1) eps >= log2(2 psi^{2t})
    double eps = 1.05 * (1.0 + 2.0 * t * std::log2(psi)) / static_cast<double>(n - 1);
    auto inst = make_pair_instance(cf::Word(std::move(sig)), cf::Word(std::move(tau)),
                                   "random_comparison seed=" + std::to_string(params.seed) +
                                       " i=" + std::to_string(i));
    auto rep = check_comparison(inst, eps, psi);
    // the per-side remark: a passing side gate must deliver its side
    bool side_violation =
        (rep.side_lower && rep.side_lower->gate && !rep.side_lower->holds) ||
        (rep.side_upper && rep.side_upper->gate && !rep.side_upper->holds);
    if (side_violation) {
      rep.conclusion_holds = false;
      rep.counterexample = rep.instance + " (side gate violated)";
    }
    accumulate(sum, rep, sink);
  }
  return sum;
}

}  // namespace cflab::verify
