#include "cflab/growth.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "cflab/dimension.hpp"
#include "cflab/errors.hpp"

namespace cflab::growth {

namespace {

using MpfrFloat = boost::multiprecision::mpfr_float;

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_integral(double x) {
  return std::isfinite(x) && x == std::floor(x) && std::fabs(x) < 9.007199254740992e15;
}

// Largest k >= 1 with k^N <= n (N >= 1, n >= 1).
long anchor_index(long n, long N) {
  if (N == 1) return n;
  long k = static_cast<long>(std::floor(std::pow(static_cast<double>(n), 1.0 / N)));
  auto pow_le = [&](long kk) {
    if (kk < 1) return true;
    __int128 p = 1;
    for (long i = 0; i < N; ++i) {
      p *= kk;
      if (p > n) return false;
    }
    return p <= n;
  };
  while (!pow_le(k)) --k;
  while (pow_le(k + 1)) ++k;
  return std::max(1L, k);
}

// Piece index l >= 2 with (l-1)^{l-1} <= n < l^l.
long irregular_piece(long n) {
  long l = 2;
  for (;;) {
    __int128 ll = 1;
    bool over = false;
    for (long i = 0; i < l; ++i) {
      ll *= l;
      if (ll > n) {
        over = true;
        break;
      }
    }
    if (over || ll > n) return l;
    ++l;
  }
}

Real pow_real(long base, double e) { return exp(Real(e) * log(Real(base))); }

mpz_class mpz_pow(const mpz_class& base, unsigned long e) {
  mpz_class out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
  return out;
}

}  // namespace

Family family_from_string(const std::string& name) {
  if (name == "linear") return Family::linear;
  if (name == "n_log_n") return Family::n_log_n;
  if (name == "anchored_exp") return Family::anchored_exp;
  if (name == "irregular") return Family::irregular;
  if (name == "double_exp_sum") return Family::double_exp_sum;
  if (name == "max_digit_integral") return Family::max_digit_integral;
  if (name == "table") return Family::table;
  throw InvalidInput("unknown growth family: " + name);
}

std::string family_name(Family f) {
  switch (f) {
    case Family::linear: return "linear";
    case Family::n_log_n: return "n_log_n";
    case Family::anchored_exp: return "anchored_exp";
    case Family::irregular: return "irregular";
    case Family::double_exp_sum: return "double_exp_sum";
    case Family::max_digit_integral: return "max_digit_integral";
    case Family::table: return "table";
  }
  return "?";
}

GrowthSequence GrowthSequence::make(Family f, Params p) {
  if (!(p.scale > 0)) throw InvalidInput("growth: scale must be > 0");
  switch (f) {
    case Family::linear:
      if (!(p.alpha > 0)) throw InvalidInput("linear family: alpha must be > 0");
      break;
    case Family::n_log_n:
      break;
    case Family::anchored_exp:
      if (!(p.beta >= 0 && p.beta < 1))
        throw InvalidInput("anchored_exp family: beta must lie in [0,1)");
      if (p.N < 1) throw InvalidInput("anchored_exp family: N must be an integer >= 1");
      break;
    case Family::irregular:
      if (!(p.alpha > 0)) throw InvalidInput("irregular family: alpha must be > 0");
      break;
    case Family::double_exp_sum:
      if (!(p.b > 1)) throw InvalidInput("double_exp_sum family: b must be > 1");
      if (!(p.c > 1)) throw InvalidInput("double_exp_sum family: c must be > 1");
      break;
    case Family::max_digit_integral:
      break;
    case Family::table:
      if (p.log_values.empty()) throw InvalidInput("table family: empty table");
      for (std::size_t i = 1; i < p.log_values.size(); ++i)
        if (p.log_values[i] < p.log_values[i - 1])
          throw InvalidInput("table family: non-monotone at n = " + std::to_string(i + 1));
      break;
  }
  GrowthSequence seq(f, std::move(p));
  seq.validate_monotone_sample();
  return seq;
}

// Sampled monotonicity check. The anchored_exp family can dip right at an anchor
// when the jump e^{n_k^beta} has not yet outrun the linear fill; such (beta, N)
// pairs are rejected rather than silently reordered, since the anchor values
// define the family.
void GrowthSequence::validate_monotone_sample() const {
  if (family_ == Family::anchored_exp) {
    for (long k = 2; k <= 64; ++k) {
      double nk_d = std::pow(static_cast<double>(k), static_cast<double>(params_.N));
      if (nk_d > 9e14) break;
      long nk = 1;
      for (long i = 0; i < params_.N; ++i) nk *= k;
      // phi(n_k) >= phi(n_k - 1): n_k^beta >= log(e^{n_{k-1}^beta} + gap)
      long nk_prev = nk;
      {
        long kk = k - 1;
        nk_prev = 1;
        for (long i = 0; i < params_.N; ++i) nk_prev *= kk;
      }
      long gap = nk - 1 - nk_prev;
      Real lhs = pow_real(nk, params_.beta);
      Real prev_exp = pow_real(nk_prev, params_.beta);
      Real rhs = prev_exp + log1p(Real(gap) * exp(-prev_exp));
      if (lhs < rhs)
        throw InvalidInput(
            "anchored_exp family: phi not non-decreasing at anchor n = " + std::to_string(nk) +
            " (increase N*beta)");
    }
    return;
  }
  if (family_ == Family::max_digit_integral || family_ == Family::n_log_n ||
      family_ == Family::linear || family_ == Family::irregular ||
      family_ == Family::double_exp_sum)
    return;  // structurally non-decreasing
  // table already validated in make()
}

Real GrowthSequence::log_phi(long n) const {
  if (n < 1) throw InvalidInput("log_phi: n must be >= 1");
  Real base;
  switch (family_) {
    case Family::linear:
      base = log(Real(params_.alpha)) + log(Real(n));
      break;
    case Family::n_log_n: {
      if (n == 1) {
        base = 0;  // phi(1) clamped to 1 to keep the sequence positive
      } else {
        base = log(Real(n)) + log(log(Real(n)));
      }
      break;
    }
    case Family::anchored_exp: {
      long k = anchor_index(n, params_.N);
      long nk = 1;
      for (long i = 0; i < params_.N; ++i) nk *= k;
      Real e = pow_real(nk, params_.beta);
      base = e + log1p(Real(n - nk) * exp(-e));
      break;
    }
    case Family::irregular: {
      long l = irregular_piece(n);
      mpz_class shift = mpz_pow(mpz_class(l - 1), static_cast<unsigned long>(l));
      Real sh(shift.get_d());
      base = log(Real(params_.alpha) * n + sh);
      break;
    }
    case Family::double_exp_sum: {
      Real logc = log(Real(params_.c));
      Real bn = exp(Real(n) * log(Real(params_.b)));
      Real lead_log = bn * logc;
      Real tail = 0;
      for (long k = n - 1; k >= 1; --k) {
        Real bk = exp(Real(k) * log(Real(params_.b)));
        Real t = exp((bk - bn) * logc);
        if (t == 0) break;  // further terms only smaller
        tail += t;
      }
      base = lead_log + log1p(tail);
      break;
    }
    case Family::max_digit_integral: {
      base = log(Real(integral_value(n)));
      break;
    }
    case Family::table: {
      if (static_cast<std::size_t>(n) > params_.log_values.size())
        throw InvalidInput("table family: n = " + std::to_string(n) + " beyond table length " +
                           std::to_string(params_.log_values.size()));
      base = Real(params_.log_values[n - 1]);
      break;
    }
    default:
      throw InvalidInput("log_phi: unhandled family");
  }
  if (params_.scale != 1) base += log(Real(params_.scale));
  return base;
}

double GrowthSequence::integral_value(long n) const {
  // phi(n) = 1 + integral_3^n x/loglog x dx; the integrand has an integrable
  // blow-up toward x = e, so the lower limit starts at 3.
  if (n <= 3) return 1.0;
  auto f = [](double x) { return x / std::log(std::log(x)); };
  return 1.0 + num::adaptive_simpson(f, 3.0, static_cast<double>(n), 1e-12);
}

std::optional<mpz_class> GrowthSequence::exact_phi(long n, std::size_t max_bits) const {
  if (n < 1) throw InvalidInput("exact_phi: n must be >= 1");
  if (!is_integral(params_.scale)) return std::nullopt;
  mpz_class scale(static_cast<long>(params_.scale));
  switch (family_) {
    case Family::linear: {
      if (!is_integral(params_.alpha)) return std::nullopt;
      return mpz_class(static_cast<long>(params_.alpha)) * n * scale;
    }
    case Family::irregular: {
      if (!is_integral(params_.alpha)) return std::nullopt;
      long l = irregular_piece(n);
      mpz_class v = mpz_class(static_cast<long>(params_.alpha)) * n +
                    mpz_pow(mpz_class(l - 1), static_cast<unsigned long>(l));
      return v * scale;
    }
    case Family::double_exp_sum: {
      if (!is_integral(params_.b) || !is_integral(params_.c)) return std::nullopt;
      long b = static_cast<long>(params_.b), c = static_cast<long>(params_.c);
      double bits = std::pow(static_cast<double>(b), static_cast<double>(n)) *
                    std::log2(static_cast<double>(c));
      if (bits > static_cast<double>(max_bits)) return std::nullopt;
      mpz_class sum = 0;
      double bk = static_cast<double>(b);
      for (long k = 1; k <= n; ++k) {
        sum += mpz_pow(mpz_class(c), static_cast<unsigned long>(bk));
        bk *= b;
      }
      return sum * scale;
    }
    default:
      return std::nullopt;
  }
}

std::optional<mpz_class> GrowthSequence::phi_rounded(long n, std::size_t max_bits) const {
  if (auto e = exact_phi(n, max_bits)) return e;
  double bits_est = num::to_double(log_phi(n)) * 1.4426950408889634;
  if (bits_est > static_cast<double>(max_bits)) return std::nullopt;
  unsigned digits10 = static_cast<unsigned>(std::max(40.0, bits_est * 0.30103 + 30.0));
  MpfrFloat::default_precision(digits10);
  MpfrFloat v;
  switch (family_) {
    case Family::linear:
      v = MpfrFloat(params_.alpha) * n;
      break;
    case Family::n_log_n:
      v = n == 1 ? MpfrFloat(1) : MpfrFloat(n) * log(MpfrFloat(n));
      break;
    case Family::anchored_exp: {
      long k = anchor_index(n, params_.N);
      long nk = 1;
      for (long i = 0; i < params_.N; ++i) nk *= k;
      v = exp(pow(MpfrFloat(nk), MpfrFloat(params_.beta))) + (n - nk);
      break;
    }
    case Family::irregular: {
      long l = irregular_piece(n);
      mpz_class shift = mpz_pow(mpz_class(l - 1), static_cast<unsigned long>(l));
      v = MpfrFloat(params_.alpha) * n + MpfrFloat(shift.get_str());
      break;
    }
    case Family::double_exp_sum: {
      MpfrFloat logc = log(MpfrFloat(params_.c));
      v = 0;
      for (long k = 1; k <= n; ++k)
        v += exp(pow(MpfrFloat(params_.b), MpfrFloat(k)) * logc);
      break;
    }
    case Family::max_digit_integral:
      v = MpfrFloat(integral_value(n));
      break;
    case Family::table:
      v = exp(MpfrFloat(num::to_double(log_phi(n)) ));
      break;
    default:
      return std::nullopt;
  }
  if (params_.scale != 1) v *= MpfrFloat(params_.scale);
  // round half-up
  v = floor(v + MpfrFloat(0.5));
  mpz_class out;
  mpfr_get_z(out.get_mpz_t(), v.backend().data(), MPFR_RNDZ);
  return out;
}

AsymptoticHints GrowthSequence::derived_hints() const {
  AsymptoticHints h;
  switch (family_) {
    case Family::linear:
      h.limsup_phi_over_n = params_.alpha * params_.scale;
      h.liminf_log_phi_over_n = 0;
      h.limsup_loglog_phi_over_log_n = 0;
      break;
    case Family::n_log_n:
    case Family::max_digit_integral:
      h.limsup_phi_over_n = kInf;
      h.liminf_log_phi_over_n = 0;
      h.limsup_loglog_phi_over_log_n = 0;
      break;
    case Family::anchored_exp:
      if (params_.beta > 0) {
        h.limsup_phi_over_n = kInf;
        h.liminf_log_phi_over_n = 0;
        h.limsup_loglog_phi_over_log_n = params_.beta;
      } else {
        // beta = 0 degenerates to a constant between anchors (N = 1 only)
        h.limsup_phi_over_n = 0;
        h.liminf_log_phi_over_n = 0;
        h.limsup_loglog_phi_over_log_n = 0;
      }
      break;
    case Family::irregular:
      h.limsup_phi_over_n = kInf;
      h.liminf_log_phi_over_n = 0;
      h.limsup_loglog_phi_over_log_n = 0;
      break;
    case Family::double_exp_sum:
      h.limsup_phi_over_n = kInf;
      h.liminf_log_phi_over_n = kInf;
      h.liminf_loglog_phi_over_n = std::log(params_.b);
      h.limsup_loglog_phi_over_log_n = kInf;
      break;
    case Family::table:
      break;  // no closed form; hints must come from the user
  }
  return h;
}

ExponentReport growth_exponents(const GrowthSequence& seq, long n_lo, long n_hi) {
  if (n_lo < 1 || n_lo >= n_hi)
    throw InvalidInput("growth_exponents: window must satisfy 1 <= n_lo < n_hi");
  if (n_hi - n_lo > 10'000'000)
    throw GateRefusal("window_budget", "growth_exponents: window wider than 10^7 points");

  ExponentReport rep;
  rep.n_lo = n_lo;
  rep.n_hi = n_hi;

  // The integral family is evaluated cumulatively: one quadrature up to the
  // window start, then unit-step Simpson panels.
  bool integral_family = seq.family() == Family::max_digit_integral;
  double integ = 0;
  auto integrand = [](double x) { return x / std::log(std::log(x)); };
  if (integral_family && n_lo > 3)
    integ = num::adaptive_simpson(integrand, 3.0, static_cast<double>(n_lo), 1e-12);

  Real sup_lpn;   // sup of log(phi/n)
  Real inf_lpn;   // inf of log phi / n
  Real sup_llpn;  // sup of loglog phi / log n
  bool first = true, first_ll = true;

  DecadeTrend cur;
  long cur_decade = -1;
  Real dec_sup_lpn, dec_inf_lpn, dec_sup_llpn;
  bool dec_first = true, dec_first_ll = true;
  auto flush_decade = [&]() {
    if (cur_decade < 0) return;
    cur.sup_phi_over_n = dec_first ? 0 : num::to_double(exp(dec_sup_lpn));
    cur.inf_log_phi_over_n = dec_first ? 0 : num::to_double(dec_inf_lpn);
    cur.sup_loglog_phi_over_log_n = dec_first_ll ? 0 : num::to_double(dec_sup_llpn);
    rep.trend.push_back(cur);
  };

  for (long n = n_lo; n <= n_hi; ++n) {
    Real lp;
    if (integral_family) {
      // integ holds the integral over [3, max(3, n)]
      if (n > 3 && n > n_lo) {
        double a = std::max(3.0, static_cast<double>(n - 1));
        double b = static_cast<double>(n);
        double m = 0.5 * (a + b);
        integ += (b - a) / 6.0 * (integrand(a) + 4 * integrand(m) + integrand(b));
      }
      lp = log(Real(1.0 + integ));
      if (seq.params().scale != 1) lp += log(Real(seq.params().scale));
    } else {
      lp = seq.log_phi(n);
    }

    long decade = 0;
    for (long t = n; t >= 10; t /= 10) ++decade;
    if (decade != cur_decade) {
      flush_decade();
      cur_decade = decade;
      cur = DecadeTrend{};
      cur.n_lo = n;
      dec_first = dec_first_ll = true;
    }
    cur.n_hi = n;

    Real logn = log(Real(n));
    Real lpn = lp - logn;          // log(phi/n)
    Real lpon = lp / n;            // log phi / n
    if (first || lpn > sup_lpn) {
      sup_lpn = lpn;
      rep.arg_sup_phi_over_n = n;
    }
    if (first || lpon < inf_lpn) {
      inf_lpn = lpon;
      rep.arg_inf_log_phi_over_n = n;
    }
    if (dec_first || lpn > dec_sup_lpn) dec_sup_lpn = lpn;
    if (dec_first || lpon < dec_inf_lpn) dec_inf_lpn = lpon;
    first = dec_first = false;

    if (n >= 2 && lp > 0) {
      Real ll = log(lp) / logn;
      if (first_ll || ll > sup_llpn) {
        sup_llpn = ll;
        rep.arg_sup_loglog_phi_over_log_n = n;
      }
      if (dec_first_ll || ll > dec_sup_llpn) dec_sup_llpn = ll;
      first_ll = dec_first_ll = false;
    }
  }
  flush_decade();

  rep.sup_phi_over_n = num::to_double(exp(sup_lpn));
  rep.inf_log_phi_over_n = num::to_double(inf_lpn);
  rep.sup_loglog_phi_over_log_n = first_ll ? 0 : num::to_double(sup_llpn);
  return rep;
}

std::string status_name(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::ruled_out_sublinear: return "ruled_out_sublinear";
    case VerdictStatus::ruled_out_superexponential: return "ruled_out_superexponential";
    case VerdictStatus::passes_necessary: return "passes_necessary";
    case VerdictStatus::upper_bounded: return "upper_bounded";
  }
  return "?";
}

ClassifierVerdict classify_necessary(const ExponentReport& report,
                                     const AsymptoticHints& hints) {
  // hint sanity
  if (hints.limsup_phi_over_n && *hints.limsup_phi_over_n < 0)
    throw InvalidInput("classify: limsup phi/n hint must be >= 0");
  if (hints.liminf_log_phi_over_n && *hints.liminf_log_phi_over_n < 0)
    throw InvalidInput("classify: liminf log phi / n hint must be >= 0");
  bool limsup_finite = hints.limsup_phi_over_n && std::isfinite(*hints.limsup_phi_over_n);
  bool liminf_log_pos = hints.liminf_log_phi_over_n && *hints.liminf_log_phi_over_n > 0;
  bool liminf_loglog_pos =
      hints.liminf_loglog_phi_over_n && *hints.liminf_loglog_phi_over_n > 0;
  if (limsup_finite && (liminf_log_pos || liminf_loglog_pos))
    throw InvalidInput(
        "classify: contradictory hints (bounded phi/n forces log phi / n -> 0)");
  if (liminf_loglog_pos && hints.liminf_log_phi_over_n &&
      std::isfinite(*hints.liminf_log_phi_over_n))
    throw InvalidInput(
        "classify: contradictory hints (loglog phi / n > 0 forces log phi / n -> inf)");

  ClassifierVerdict v;
  if (limsup_finite) {
    // Bounded average digit sums confine the set inside a proper-dimension
    // bounded-average set.
    v.status = VerdictStatus::ruled_out_sublinear;
    v.cited_rule = "sublinear_growth_bound";
    return v;
  }
  if (liminf_log_pos || liminf_loglog_pos) {
    v.status = VerdictStatus::ruled_out_superexponential;
    if (hints.liminf_log_phi_over_n && std::isinf(*hints.liminf_log_phi_over_n)) {
      double log_b = hints.liminf_loglog_phi_over_n.value_or(0.0);
      double b = std::max(1.0, std::exp(log_b));
      v.dimension_upper_bound = std::isinf(b) ? 0.0 : 1.0 / (1.0 + b);
      v.cited_rule = "superexponential_growth_bound_B_inf";
    } else if (liminf_loglog_pos) {
      double b = std::exp(*hints.liminf_loglog_phi_over_n);
      v.dimension_upper_bound = std::isinf(b) ? 0.0 : 1.0 / (1.0 + b);
      v.cited_rule = "superexponential_growth_bound_B_inf";
    } else {
      double B = std::exp(*hints.liminf_log_phi_over_n);
      dim::PressureConfig cfg;
      cfg.geometric_base = B;
      cfg.alphabet_max = 64;
      cfg.method = dim::Method::collocation;
      cfg.collocation_order = 32;
      v.dimension_upper_bound = dim::solve_root(cfg, 1e-10).value;
      v.cited_rule = "superexponential_growth_bound";
    }
    return v;
  }
  bool limsup_inf = hints.limsup_phi_over_n && std::isinf(*hints.limsup_phi_over_n);
  bool liminf_zero = hints.liminf_log_phi_over_n && *hints.liminf_log_phi_over_n == 0;
  if (limsup_inf && liminf_zero) {
    v.status = VerdictStatus::passes_necessary;
    v.cited_rule = "necessary_conditions_hold";
    return v;
  }

  // No certified limits: report what the window suggests without claiming a
  // rule fired. A robustly superexponential window still yields an
  // uncertified bound.
  v.status = VerdictStatus::upper_bounded;
  v.cited_rule = "window_evidence_only";
  bool window_superexp = report.inf_log_phi_over_n >= 0.05;
  for (const auto& d : report.trend)
    if (d.inf_log_phi_over_n < 0.05) window_superexp = false;
  if (window_superexp) {
    double B = std::exp(report.inf_log_phi_over_n);
    dim::PressureConfig cfg;
    cfg.geometric_base = B;
    cfg.alphabet_max = 64;
    cfg.method = dim::Method::collocation;
    cfg.collocation_order = 32;
    v.dimension_upper_bound = dim::solve_root(cfg, 1e-10).value;
    v.cited_rule = "window_evidence_only_uncertified_bound";
  }
  return v;
}

}  // namespace cflab::growth
