#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "cflab/cf_core.hpp"
#include "cflab/constructions.hpp"
#include "cflab/dimension.hpp"
#include "cflab/errors.hpp"
#include "cflab/growth.hpp"
#include "cflab/verify.hpp"

namespace py = pybind11;
using namespace cflab;

namespace {

// Arbitrary-precision integers cross the boundary as Python ints via their
// decimal form.
py::int_ to_py(const cf::BigInt& z) {
  return py::reinterpret_steal<py::int_>(PyLong_FromString(z.get_str().c_str(), nullptr, 10));
}

cf::BigInt from_py(const py::int_& v) {
  return cf::BigInt(py::str(v).cast<std::string>());
}

py::tuple to_py(const cf::Rational& q) {
  return py::make_tuple(to_py(cf::BigInt(q.get_num())), to_py(cf::BigInt(q.get_den())));
}

cf::Word word_from_list(const py::sequence& digits) {
  std::vector<cf::BigInt> ds;
  ds.reserve(py::len(digits));
  for (auto d : digits) ds.push_back(from_py(py::int_(d)));
  return cf::Word(std::move(ds));
}

py::list word_to_list(const cf::Word& w) {
  py::list out;
  for (const auto& d : w.digits()) out.append(to_py(d));
  return out;
}

cf::Rational rational_arg(const py::object& num, const py::object& den) {
  cf::Rational q(from_py(py::int_(num)), from_py(py::int_(den)));
  q.canonicalize();
  return q;
}

growth::GrowthSequence seq_from_dict(const py::dict& d) {
  growth::Params p;
  std::string name = d["family"].cast<std::string>();
  if (d.contains("alpha")) p.alpha = d["alpha"].cast<double>();
  if (d.contains("beta")) p.beta = d["beta"].cast<double>();
  if (d.contains("b")) p.b = d["b"].cast<double>();
  if (d.contains("c")) p.c = d["c"].cast<double>();
  if (d.contains("N")) p.N = d["N"].cast<long>();
  if (d.contains("scale")) p.scale = d["scale"].cast<double>();
  if (d.contains("log_values")) p.log_values = d["log_values"].cast<std::vector<double>>();
  return growth::GrowthSequence::make(growth::family_from_string(name), p);
}

py::dict estimate_to_dict(const dim::DimensionEstimate& e) {
  py::dict out;
  out["value"] = e.value;
  out["method"] = e.method;
  out["bracket"] = py::make_tuple(e.bracket_lo, e.bracket_hi);
  py::list roots;
  for (const auto& r : e.roots) roots.append(py::make_tuple(r.depth, r.root));
  out["roots"] = roots;
  out["flags"] = e.flags;
  return out;
}

py::dict report_to_dict(const verify::CheckReport& r) {
  py::dict out;
  out["instance"] = r.instance;
  out["hypothesis_satisfied"] = r.hypothesis_satisfied;
  out["conclusion_holds"] = r.conclusion_holds;
  out["margin"] = r.margin;
  out["margin_value"] = r.margin_value;
  out["vacuous"] = r.vacuous;
  out["notes"] = r.notes;
  return out;
}

dim::PressureConfig cfg_from_kwargs(double B, int M, int depth, const std::string& method,
                                    int order, int threads) {
  dim::PressureConfig cfg;
  cfg.geometric_base = B;
  cfg.alphabet_max = M;
  cfg.depth = depth;
  cfg.method = method == "collocation" ? dim::Method::collocation : dim::Method::cylinder_sum;
  cfg.collocation_order = order;
  cfg.threads = threads;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Continued-fraction level-set laboratory: exact CF algebra, growth "
            "classification, dimension estimators, constructions, verifiers.";

  py::register_exception<InvalidInput>(m, "InvalidInputError", PyExc_ValueError);
  py::register_exception<GateRefusal>(m, "GateRefusalError", PyExc_RuntimeError);

  // ---- exact continued-fraction algebra ----
  m.def(
      "expand",
      [](const py::object& num, const py::object& den, std::size_t max_len) {
        return word_to_list(cf::expand(rational_arg(num, den), max_len));
      },
      py::arg("num"), py::arg("den"), py::arg("max_len") = 64,
      "Greedy expansion digits of num/den in (0,1).");
  m.def(
      "convergents",
      [](const py::sequence& digits) {
        py::list out;
        for (const auto& pq : cf::convergents(word_from_list(digits)))
          out.append(py::make_tuple(to_py(pq.p), to_py(pq.q)));
        return out;
      },
      py::arg("digits"));
  m.def(
      "evaluate",
      [](const py::sequence& digits) { return to_py(cf::evaluate(word_from_list(digits))); },
      py::arg("digits"), "Exact value of [a_1..a_n] as a (num, den) pair.");
  m.def(
      "cylinder",
      [](const py::sequence& digits) {
        auto c = cf::cylinder(word_from_list(digits));
        py::dict out;
        out["left"] = to_py(c.left);
        out["right"] = to_py(c.right);
        out["length"] = to_py(c.length);
        return out;
      },
      py::arg("digits"));
  m.def(
      "gauss_step",
      [](const py::object& num, const py::object& den) {
        return to_py(cf::gauss_step(rational_arg(num, den)));
      },
      py::arg("num"), py::arg("den"));
  m.def(
      "digit_stats",
      [](const py::sequence& digits) {
        auto st = cf::digit_stats(word_from_list(digits));
        py::list sums, maxes;
        for (const auto& s : st.running_sum) sums.append(to_py(s));
        for (const auto& t : st.running_max) maxes.append(to_py(t));
        return py::make_tuple(sums, maxes);
      },
      py::arg("digits"));

  // ---- growth sequences ----
  py::class_<growth::GrowthSequence>(m, "GrowthSequence")
      .def_static("make", &seq_from_dict, py::arg("spec"))
      .def("log_phi",
           [](const growth::GrowthSequence& s, long n) { return num::to_double(s.log_phi(n)); })
      .def("exact_phi",
           [](const growth::GrowthSequence& s, long n) -> py::object {
             auto v = s.exact_phi(n);
             return v ? py::object(to_py(*v)) : py::none();
           })
      .def("phi_rounded", [](const growth::GrowthSequence& s, long n) -> py::object {
        auto v = s.phi_rounded(n);
        return v ? py::object(to_py(*v)) : py::none();
      });
  m.def(
      "growth_exponents",
      [](const growth::GrowthSequence& seq, long n_lo, long n_hi) {
        auto r = growth::growth_exponents(seq, n_lo, n_hi);
        py::dict out;
        out["sup_phi_over_n"] = r.sup_phi_over_n;
        out["inf_log_phi_over_n"] = r.inf_log_phi_over_n;
        out["sup_loglog_phi_over_log_n"] = r.sup_loglog_phi_over_log_n;
        return out;
      },
      py::arg("seq"), py::arg("n_lo"), py::arg("n_hi"));
  m.def(
      "classify",
      [](const py::dict& family_spec, long n_lo, long n_hi, const py::dict& hints) {
        auto seq = seq_from_dict(family_spec);
        auto report = growth::growth_exponents(seq, n_lo, n_hi);
        auto h = seq.derived_hints();
        auto grab = [&](const char* key, std::optional<double>& slot) {
          if (hints.contains(key)) slot = hints[key].cast<double>();
        };
        grab("limsup_phi_over_n", h.limsup_phi_over_n);
        grab("liminf_log_phi_over_n", h.liminf_log_phi_over_n);
        grab("liminf_loglog_phi_over_n", h.liminf_loglog_phi_over_n);
        grab("limsup_loglog_phi_over_log_n", h.limsup_loglog_phi_over_log_n);
        auto v = growth::classify_necessary(report, h);
        py::dict out;
        out["status"] = growth::status_name(v.status);
        out["cited_rule"] = v.cited_rule;
        if (v.dimension_upper_bound) out["dimension_upper_bound"] = *v.dimension_upper_bound;
        out["exponent_estimate"] = report.sup_loglog_phi_over_log_n;
        return out;
      },
      py::arg("family"), py::arg("n_lo") = 1, py::arg("n_hi") = 100000,
      py::arg("hints") = py::dict());

  // ---- dimension estimators ----
  m.def(
      "pressure",
      [](double s, double B, int M, int depth, const std::string& method, int order,
         int threads) { return dim::pressure(s, cfg_from_kwargs(B, M, depth, method, order, threads)); },
      py::arg("s"), py::arg("B") = 1.0, py::arg("M") = 2, py::arg("depth") = 12,
      py::arg("method") = "cylinder_sum", py::arg("collocation_order") = 32,
      py::arg("threads") = 1);
  m.def(
      "solve_root",
      [](double B, int M, int depth, const std::string& method, int order, double tol,
         int threads) {
        return estimate_to_dict(
            dim::solve_root(cfg_from_kwargs(B, M, depth, method, order, threads), tol));
      },
      py::arg("B") = 1.0, py::arg("M") = 2, py::arg("depth") = 12,
      py::arg("method") = "cylinder_sum", py::arg("collocation_order") = 32,
      py::arg("tol") = 1e-10, py::arg("threads") = 1);
  m.def(
      "ww_dimension",
      [](const py::object& B, const py::object& b, int M, int depth, const std::string& method,
         int order, double tol) {
        auto ext = [](const py::object& v) {
          if (py::isinstance<py::str>(v) && v.cast<std::string>() == "inf")
            return dim::ExtendedReal::inf();
          double d = v.cast<double>();
          return std::isinf(d) ? dim::ExtendedReal::inf() : dim::ExtendedReal::finite(d);
        };
        std::optional<dim::ExtendedReal> be;
        if (!b.is_none()) be = ext(b);
        return estimate_to_dict(dim::ww_dimension(ext(B), be,
                                                  cfg_from_kwargs(1.0, M, depth, method, order, 1),
                                                  tol));
      },
      py::arg("B"), py::arg("b") = py::none(), py::arg("M") = 64, py::arg("depth") = 12,
      py::arg("method") = "collocation", py::arg("collocation_order") = 32,
      py::arg("tol") = 1e-10);
  m.def(
      "flww_dimension",
      [](const std::function<double(long)>& log_s, bool tends_to_infinity, int depth) {
        dim::SequenceSpec spec;
        spec.log_value = [log_s](long n) { return num::Real(log_s(n)); };
        spec.tends_to_infinity = tends_to_infinity;
        return estimate_to_dict(dim::flww_dimension(spec, depth));
      },
      py::arg("log_s"), py::arg("tends_to_infinity") = true, py::arg("depth") = 20);
  m.def(
      "lr_dimension",
      [](const std::function<double(long)>& log_s, const std::function<double(long)>& t,
         bool ratio_tends_to_zero, int depth) {
        dim::SequenceSpec spec;
        spec.log_value = [log_s](long n) { return num::Real(log_s(n)); };
        spec.tends_to_infinity = true;
        return estimate_to_dict(dim::lr_dimension(spec, t, ratio_tends_to_zero, depth));
      },
      py::arg("log_s"), py::arg("t"), py::arg("ratio_tends_to_zero") = true,
      py::arg("depth") = 20);
  m.def("cv_gap", &dim::cv_gap, py::arg("alpha"));
  m.def(
      "cover_dimension",
      [](const py::sequence& words, double tol) {
        std::vector<cf::Cylinder> cover;
        for (auto w : words) cover.push_back(cf::cylinder(word_from_list(w.cast<py::sequence>())));
        return estimate_to_dict(dim::cover_dimension(cover, tol));
      },
      py::arg("words"), py::arg("tol") = 1e-12);

  // ---- constructions ----
  m.def(
      "generate",
      [](const py::dict& d, std::size_t n) {
        cons::ConstructionSpec spec;
        spec.kind = cons::kind_from_string(d["kind"].cast<std::string>());
        if (d.contains("M")) spec.M = d["M"].cast<long>();
        if (d.contains("beta")) spec.beta = d["beta"].cast<double>();
        if (d.contains("N")) spec.N = d["N"].cast<long>();
        if (d.contains("alpha")) spec.alpha = d["alpha"].cast<double>();
        if (d.contains("b")) spec.b = d["b"].cast<double>();
        if (d.contains("c")) spec.c = d["c"].cast<double>();
        if (d.contains("seed")) spec.seed = d["seed"].cast<std::uint64_t>();
        if (d.contains("policy")) {
          std::string p = d["policy"].cast<std::string>();
          spec.policy = p == "random_uniform" ? cons::FreePolicy::random_uniform
                                              : cons::FreePolicy::all_ones;
        }
        auto pw = cons::generate(spec, n);
        py::dict out;
        out["digits"] = word_to_list(pw.word);
        py::list pins;
        for (const auto& [idx, val] : pw.pinned) pins.append(py::make_tuple(idx, to_py(val)));
        out["pinned"] = pins;
        out["t_count"] = pw.t_count;
        out["pinned_count"] = pw.pinned_count;
        out["deleted"] = word_to_list(cons::delete_pinned(pw));
        return out;
      },
      py::arg("spec"), py::arg("n"));
  m.def(
      "track_phi",
      [](const growth::GrowthSequence& seq, std::size_t n) {
        auto tr = cons::track_phi(seq, n);
        return py::make_tuple(word_to_list(tr.word), tr.capped);
      },
      py::arg("seq"), py::arg("n"));
  m.def(
      "perturb",
      [](const py::sequence& digits) { return word_to_list(cons::perturb(word_from_list(digits))); },
      py::arg("digits"));

  // ---- verifiers ----
  m.def(
      "check_ratio_bounds",
      [](const py::sequence& sigma, const py::sequence& tau) {
        return report_to_dict(verify::check_ratio_bounds(
            verify::make_pair_instance(word_from_list(sigma), word_from_list(tau))));
      },
      py::arg("sigma"), py::arg("tau"));
  m.def(
      "check_comparison",
      [](const py::sequence& sigma, const py::sequence& tau, double eps, double psi) {
        return report_to_dict(verify::check_comparison(
            verify::make_pair_instance(word_from_list(sigma), word_from_list(tau)), eps, psi));
      },
      py::arg("sigma"), py::arg("tau"), py::arg("epsilon"), py::arg("psi"));
  m.def(
      "check_interval_bounds",
      [](const py::sequence& digits) {
        return report_to_dict(verify::check_interval_bounds(word_from_list(digits)));
      },
      py::arg("digits"));
  m.def(
      "check_deletion_inequality",
      [](const py::dict& d, std::size_t n, double epsilon) {
        cons::ConstructionSpec spec;
        spec.kind = cons::kind_from_string(d["kind"].cast<std::string>());
        if (d.contains("M")) spec.M = d["M"].cast<long>();
        if (d.contains("beta")) spec.beta = d["beta"].cast<double>();
        if (d.contains("N")) spec.N = d["N"].cast<long>();
        if (d.contains("alpha")) spec.alpha = d["alpha"].cast<double>();
        if (d.contains("b")) spec.b = d["b"].cast<double>();
        if (d.contains("c")) spec.c = d["c"].cast<double>();
        if (d.contains("seed")) spec.seed = d["seed"].cast<std::uint64_t>();
        if (d.contains("policy") && d["policy"].cast<std::string>() == "random_uniform")
          spec.policy = cons::FreePolicy::random_uniform;
        return report_to_dict(verify::check_deletion_inequality(cons::generate(spec, n), epsilon));
      },
      py::arg("spec"), py::arg("n"), py::arg("epsilon"),
      "Generate the pinned word and test the deletion-map length inequality.");
}
