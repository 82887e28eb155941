#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>
#include <sstream>

#include "qsearch/discrim.hpp"
#include "qsearch/grover.hpp"
#include "qsearch/qdb.hpp"
#include "qsearch/statevec.hpp"

namespace py = pybind11;
using namespace qsearch;

namespace {

StateVector state_from_eigen(const Eigen::VectorXcd& v, bool raw) {
  std::vector<cxd> amps(v.data(), v.data() + v.size());
  return raw ? StateVector::raw(std::move(amps)) : StateVector(std::move(amps));
}

Eigen::VectorXcd state_to_eigen(const StateVector& s) {
  return Eigen::VectorXcd(s.as_eigen());
}

}  // namespace

PYBIND11_MODULE(qsearch, m) {
  m.doc() = "Grover search over a programmable record database, with "
            "discrimination analysis for imprecise database-size guesses";

  py::class_<std::mt19937_64>(m, "Rng", "seeded random source (mt19937_64)")
      .def(py::init<std::uint64_t>(), py::arg("seed") = 0);

  py::class_<StateVector>(m, "StateVector")
      .def(py::init([](const Eigen::VectorXcd& amps) {
             return state_from_eigen(amps, false);
           }),
           py::arg("amps"), "checked constructor: the norm must be 1 within 1e-10")
      .def_static("raw",
                  [](const Eigen::VectorXcd& amps) { return state_from_eigen(amps, true); },
                  py::arg("amps"))
      .def_static("basis", &StateVector::basis, py::arg("dim"), py::arg("index"))
      .def_static("uniform", &StateVector::uniform, py::arg("dim"))
      .def_property_readonly("dim", &StateVector::dim)
      .def_property_readonly("amps", &state_to_eigen)
      .def("norm", &StateVector::norm)
      .def("is_normalized", &StateVector::is_normalized, py::arg("tol") = kNormTol)
      .def("normalized", &StateVector::normalized)
      .def("__len__", &StateVector::dim)
      .def("__getitem__",
           [](const StateVector& s, std::size_t i) {
             if (i >= s.dim()) throw py::index_error();
             return s[i];
           })
      .def("__repr__", [](const StateVector& s) {
        return "StateVector(dim=" + std::to_string(s.dim()) + ")";
      });

  py::class_<HermitianOperator>(m, "HermitianOperator")
      .def(py::init<Eigen::MatrixXcd, double>(), py::arg("entries"),
           py::arg("tol") = kHermTol)
      .def_static("identity", &HermitianOperator::identity, py::arg("dim"))
      .def_static("outer", &HermitianOperator::outer, py::arg("state"))
      .def_property_readonly("dim", &HermitianOperator::dim)
      .def_property_readonly("matrix",
                             [](const HermitianOperator& h) { return h.matrix(); });

  py::class_<Povm>(m, "Povm")
      .def(py::init<std::vector<HermitianOperator>>(), py::arg("effects"))
      .def(py::init<std::vector<HermitianOperator>, Eigen::MatrixXcd>(),
           py::arg("effects"), py::arg("support"))
      .def_property_readonly("effects", &Povm::effects)
      .def_property_readonly("support", [](const Povm& p) { return p.support(); })
      .def_property_readonly("dim", &Povm::dim)
      .def("completeness_deviation", &Povm::completeness_deviation)
      .def("min_effect_eigenvalue", &Povm::min_effect_eigenvalue)
      .def("validate", &Povm::validate, py::arg("psd_tol") = 1e-10,
           py::arg("sum_tol") = 1e-10);

  m.def("inner", &inner, py::arg("a"), py::arg("b"),
        "<a|b>, conjugate-linear in the first argument");
  m.def("apply",
        py::overload_cast<const HermitianOperator&, const StateVector&>(&apply),
        py::arg("op"), py::arg("state"));
  m.def("apply", py::overload_cast<const Eigen::MatrixXcd&, const StateVector&>(&apply),
        py::arg("op"), py::arg("state"));
  m.def("tensor", &tensor, py::arg("a"), py::arg("b"));
  m.def("inv_sqrt_on_support", &inv_sqrt_on_support, py::arg("op"),
        py::arg("rel_cutoff") = 1e-12);
  m.def("sample", &sample, py::arg("state"), py::arg("rng"),
        "sample a basis index with probability |amp|^2");

  // ---- grover ----
  auto gm = m.def_submodule("grover", "oracles, diffusion, and closed-form evolution");

  py::class_<grover::GroverParams>(gm, "GroverParams")
      .def_readonly("dim", &grover::GroverParams::dim)
      .def_readonly("marked_count", &grover::GroverParams::marked_count)
      .def_readonly("omega", &grover::GroverParams::omega)
      .def_readonly("m0", &grover::GroverParams::m0)
      .def("__repr__", [](const grover::GroverParams& p) {
        std::ostringstream out;
        out << "GroverParams(dim=" << p.dim << ", marked_count=" << p.marked_count
            << ", omega=" << p.omega << ", m0=" << p.m0 << ")";
        return out.str();
      });

  py::class_<grover::MarkedSet>(gm, "MarkedSet")
      .def(py::init<std::size_t, std::vector<std::size_t>>(), py::arg("dim"),
           py::arg("indices"))
      .def_property_readonly("dim", &grover::MarkedSet::dim)
      .def_property_readonly("indices", &grover::MarkedSet::indices)
      .def("count", &grover::MarkedSet::count)
      .def("contains", &grover::MarkedSet::contains, py::arg("index"));

  gm.def("params", &grover::params, py::arg("n"), py::arg("k"));
  gm.def("optimal_steps", &grover::optimal_steps, py::arg("params"));
  gm.def("oracle_apply", &grover::oracle_apply, py::arg("marked"), py::arg("state"));
  gm.def("standard_oracle_apply", &grover::standard_oracle_apply, py::arg("marked"),
         py::arg("joint"));
  gm.def("diffusion_apply", &grover::diffusion_apply, py::arg("state"));
  gm.def("grover_state", &grover::grover_state, py::arg("params"), py::arg("marked"),
         py::arg("steps"));
  gm.def("run", &grover::run, py::arg("params"), py::arg("marked"), py::arg("steps"));
  gm.def("success_prob", &grover::success_prob, py::arg("params"), py::arg("steps"));

  // ---- qdb ----
  auto qm = m.def_submodule("qdb", "programmable record database and searches");

  py::class_<qdb::FieldSpec>(qm, "FieldSpec")
      .def(py::init([](std::string name, std::size_t dim, std::vector<std::string> values) {
             return qdb::FieldSpec{std::move(name), dim, std::move(values)};
           }),
           py::arg("name"), py::arg("dim"), py::arg("values") = std::vector<std::string>{})
      .def_readonly("name", &qdb::FieldSpec::name)
      .def_readonly("dim", &qdb::FieldSpec::dim)
      .def_readonly("values", &qdb::FieldSpec::values);

  py::class_<qdb::Record>(qm, "Record")
      .def(py::init([](std::vector<std::size_t> values) {
             return qdb::Record{std::move(values)};
           }),
           py::arg("values"))
      .def_readonly("values", &qdb::Record::values)
      .def("__eq__",
           [](const qdb::Record& a, const qdb::Record& b) { return a == b; },
           py::is_operator())
      .def("__repr__", [](const qdb::Record& r) {
        std::ostringstream out;
        out << "Record([";
        for (std::size_t j = 0; j < r.values.size(); ++j) {
          out << (j ? ", " : "") << r.values[j];
        }
        out << "])";
        return out.str();
      });

  py::class_<qdb::Database>(qm, "Database")
      .def_static("build", &qdb::Database::build, py::arg("fields"),
                  py::arg("raw_records"))
      .def_static("from_indices", &qdb::Database::from_indices, py::arg("fields"),
                  py::arg("records"))
      .def_property_readonly("fields", &qdb::Database::fields)
      .def_property_readonly("records", &qdb::Database::records)
      .def_property_readonly("joint_dim", &qdb::Database::joint_dim)
      .def("joint_index", &qdb::Database::joint_index, py::arg("record"))
      .def("record_at", &qdb::Database::record_at, py::arg("joint_index"))
      .def("contains", &qdb::Database::contains, py::arg("record"))
      .def("field_position", &qdb::Database::field_position, py::arg("name"))
      .def("value_index", &qdb::Database::value_index, py::arg("field"),
           py::arg("value"))
      .def("value_name", &qdb::Database::value_name, py::arg("field"), py::arg("index"));

  py::class_<qdb::QueryTask>(qm, "QueryTask")
      .def_static(
          "make",
          [](const qdb::Database& db, std::map<std::size_t, std::size_t> known,
             std::optional<std::vector<std::size_t>> unknown) {
            return unknown ? qdb::QueryTask::make(db, std::move(known), *unknown)
                           : qdb::QueryTask::make(db, std::move(known));
          },
          py::arg("db"), py::arg("known"), py::arg("unknown") = std::nullopt)
      .def_readonly("known", &qdb::QueryTask::known)
      .def_readonly("unknown", &qdb::QueryTask::unknown);

  py::class_<qdb::SearchOutcome>(qm, "SearchOutcome")
      .def_readonly("candidate", &qdb::SearchOutcome::candidate)
      .def_readonly("verified", &qdb::SearchOutcome::verified)
      .def_readonly("oracle_calls", &qdb::SearchOutcome::oracle_calls)
      .def_readonly("steps_used", &qdb::SearchOutcome::steps_used);

  py::class_<qdb::ClassicalOutcome>(qm, "ClassicalOutcome")
      .def_readonly("match", &qdb::ClassicalOutcome::match)
      .def_readonly("calls", &qdb::ClassicalOutcome::calls);

  py::class_<qdb::SearchPlan>(qm, "SearchPlan")
      .def_readonly("unknown_dim", &qdb::SearchPlan::unknown_dim)
      .def_readonly("marked_count", &qdb::SearchPlan::marked_count)
      .def_readonly("omega", &qdb::SearchPlan::omega)
      .def_readonly("m0", &qdb::SearchPlan::m0)
      .def_readonly("steps", &qdb::SearchPlan::steps);

  qm.def("marked_set", &qdb::marked_set, py::arg("db"), py::arg("task"));
  qm.def("joint_oracle_apply", &qdb::joint_oracle_apply, py::arg("db"),
         py::arg("state"));
  qm.def("symmetry_deviation", &qdb::symmetry_deviation, py::arg("db"));
  qm.def("prepare_query", &qdb::prepare_query, py::arg("db"), py::arg("task"));
  qm.def("pqq_apply", &qdb::pqq_apply, py::arg("db"), py::arg("task"),
         py::arg("state"));
  qm.def("plan_search", &qdb::plan_search, py::arg("db"), py::arg("task"),
         py::arg("steps") = std::nullopt);
  qm.def("search", &qdb::search, py::arg("db"), py::arg("task"), py::arg("steps"),
         py::arg("rng"));
  qm.def("search_trials", &qdb::search_trials, py::arg("db"), py::arg("task"),
         py::arg("steps"), py::arg("seed"), py::arg("trials"));
  qm.def("classical_search", &qdb::classical_search, py::arg("db"), py::arg("task"),
         py::arg("rng"));
  qm.def("save_file", &qdb::save_file, py::arg("db"), py::arg("path"));
  qm.def("load_file", &qdb::load_file, py::arg("path"));
  qm.def(
      "read_delimited_text",
      [](const std::string& text,
         const std::vector<std::pair<std::string, std::size_t>>& field_dims,
         char delimiter) {
        std::istringstream in(text);
        return qdb::read_delimited(in, field_dims, delimiter);
      },
      py::arg("text"), py::arg("field_dims"), py::arg("delimiter") = ',');

  // ---- discrim ----
  auto dm = m.def_submodule("discrim",
                            "symmetric-state discrimination of Grover states");

  py::class_<discrim::UnambTerms>(dm, "UnambTerms")
      .def_readonly("cos_term", &discrim::UnambTerms::cos_term)
      .def_readonly("sin_term", &discrim::UnambTerms::sin_term);

  py::class_<discrim::MinErrNumeric>(dm, "MinErrNumeric")
      .def_readonly("p_success", &discrim::MinErrNumeric::p_success)
      .def_readonly("omega_deviation", &discrim::MinErrNumeric::omega_deviation)
      .def_readonly("sqrt_identity_deviation",
                    &discrim::MinErrNumeric::sqrt_identity_deviation)
      .def_readonly("povm", &discrim::MinErrNumeric::povm);

  py::class_<discrim::SweepRow>(dm, "SweepRow")
      .def_readonly("m", &discrim::SweepRow::m)
      .def_readonly("p_grover", &discrim::SweepRow::p_grover)
      .def_readonly("gamma0_bound", &discrim::SweepRow::gamma0_bound)
      .def_readonly("p_minerr", &discrim::SweepRow::p_minerr)
      .def_readonly("cos_term", &discrim::SweepRow::cos_term)
      .def_readonly("sin_term", &discrim::SweepRow::sin_term);

  dm.def("shift_apply", &discrim::shift_apply, py::arg("state"));
  dm.def("fourier_vector", &discrim::fourier_vector, py::arg("n"), py::arg("a"));
  dm.def("symmetric_state", &discrim::symmetric_state, py::arg("n"), py::arg("x"),
         py::arg("m"));
  dm.def("unamb_terms", &discrim::unamb_terms, py::arg("n"), py::arg("m"));
  dm.def("unamb_bound", &discrim::unamb_bound, py::arg("n"), py::arg("m"));
  dm.def("unamb_bound_numeric", &discrim::unamb_bound_numeric, py::arg("n"),
         py::arg("m"));
  dm.def("crossing_points", &discrim::crossing_points, py::arg("n"));
  dm.def("minerr_prob", &discrim::minerr_prob, py::arg("n"), py::arg("m"));
  dm.def("minerr_numeric", &discrim::minerr_numeric, py::arg("n"), py::arg("m"),
         py::arg("build_povm") = true);
  dm.def("sweep", &discrim::sweep, py::arg("n"), py::arg("m_values"),
         py::arg("bound_check_tol") = 1e-10, py::arg("minerr_check_tol") = 1e-8);
}
