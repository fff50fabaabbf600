#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "malps/harness.hpp"
#include "malps/pgm.hpp"
#include "malps/projection.hpp"
#include "malps/solver.hpp"
#include "malps/svd.hpp"

namespace py = pybind11;
using namespace malps;

namespace {

ProjectorMode projector_mode_from_string(const std::string& name) {
  if (name == "exact") return ProjectorMode::exact;
  if (name == "rand" || name == "randomized_power") return ProjectorMode::randomized_power;
  if (name == "css" || name == "column_subset") return ProjectorMode::column_subset;
  throw std::invalid_argument("unknown projector mode '" + name + "'");
}

std::string projector_mode_name(ProjectorMode mode) {
  switch (mode) {
    case ProjectorMode::exact: return "exact";
    case ProjectorMode::randomized_power: return "rand";
    case ProjectorMode::column_subset: return "css";
  }
  return "unknown";
}

MomentumPolicy::Kind momentum_kind_from_string(const std::string& name) {
  if (name == "adaptive") return MomentumPolicy::Kind::adaptive;
  if (name == "constant") return MomentumPolicy::Kind::constant;
  if (name == "nesterov" || name == "nesterov_q") return MomentumPolicy::Kind::nesterov_q;
  throw std::invalid_argument("unknown momentum kind '" + name + "'");
}

std::string momentum_kind_name(MomentumPolicy::Kind kind) {
  switch (kind) {
    case MomentumPolicy::Kind::adaptive: return "adaptive";
    case MomentumPolicy::Kind::constant: return "constant";
    case MomentumPolicy::Kind::nesterov_q: return "nesterov";
  }
  return "unknown";
}

OperatorKind operator_kind_from_string(const std::string& name) {
  if (name == "mask") return OperatorKind::mask;
  if (name == "structured") return OperatorKind::structured;
  if (name == "identity") return OperatorKind::identity;
  throw std::invalid_argument("unknown operator kind '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hard-thresholding solvers for affine rank minimization and "
            "matrix completion";

  py::register_exception<DivergenceError>(m, "DivergenceError");

  py::class_<LinearOperator>(m, "LinearOperator")
      .def_static("mask", &LinearOperator::mask, py::arg("m"), py::arg("n"),
                  py::arg("p"), py::arg("seed"))
      .def_static("mask_from_indices", &LinearOperator::mask_from_indices,
                  py::arg("m"), py::arg("n"), py::arg("indices"))
      .def_static("structured", &LinearOperator::structured, py::arg("m"),
                  py::arg("n"), py::arg("p"), py::arg("seed"))
      .def_static("identity", &LinearOperator::identity, py::arg("m"), py::arg("n"))
      .def("apply", &LinearOperator::apply, py::arg("x"))
      .def("adjoint", &LinearOperator::adjoint, py::arg("v"))
      .def("gradient", &LinearOperator::gradient, py::arg("y"), py::arg("x"))
      .def_property_readonly("kind",
                             [](const LinearOperator& op) { return to_string(op.kind()); })
      .def_property_readonly("shape",
                             [](const LinearOperator& op) {
                               return py::make_tuple(op.signal_rows(), op.signal_cols());
                             })
      .def_property_readonly("measurements", &LinearOperator::measurements)
      .def_property_readonly("sample_indices", &LinearOperator::sample_indices)
      .def("descriptor",
           [](const LinearOperator& op) { return op.descriptor().dump(); })
      .def_static("from_descriptor", [](const std::string& doc) {
        return LinearOperator::from_descriptor(nlohmann::json::parse(doc));
      });

  py::class_<SubspaceBasis>(m, "SubspaceBasis")
      .def(py::init(&SubspaceBasis::make), py::arg("left"), py::arg("right"))
      .def_readonly("left", &SubspaceBasis::left)
      .def_readonly("right", &SubspaceBasis::right)
      .def_readonly("strict_orthonormal", &SubspaceBasis::strict_orthonormal)
      .def_property_readonly("rank", &SubspaceBasis::rank);

  m.def("svd", [](const DenseMatrix& X) {
    SvdFactors f = svd(X);
    return py::make_tuple(f.U, f.sigma, f.V);
  }, py::arg("x"), "Thin SVD (U, sigma, V) with nonincreasing singular values");
  m.def("best_rank_k", &best_rank_k, py::arg("x"), py::arg("k"),
        "Best rank-k approximation; returns (basis, matrix)");
  m.def("project_subspace", &project_subspace, py::arg("basis"), py::arg("x"));
  m.def("project_complement", &project_complement, py::arg("basis"), py::arg("x"));
  m.def("ortho_union", &ortho_union, py::arg("a"), py::arg("b"));
  m.def("raw_union", &raw_union, py::arg("a"), py::arg("b"));

  py::class_<ProjectorSpec>(m, "ProjectorSpec")
      .def(py::init([](const std::string& mode, int k, int q, int oversample,
                       double epsilon, std::uint64_t seed) {
             ProjectorSpec spec;
             spec.mode = projector_mode_from_string(mode);
             spec.k = k;
             spec.q = q;
             spec.oversample = oversample;
             spec.epsilon = epsilon;
             spec.seed = seed;
             return spec;
           }),
           py::arg("mode") = "exact", py::arg("k") = 1, py::arg("q") = 2,
           py::arg("oversample") = 5, py::arg("epsilon") = 0.5, py::arg("seed") = 0)
      .def_property("mode",
                    [](const ProjectorSpec& s) { return projector_mode_name(s.mode); },
                    [](ProjectorSpec& s, const std::string& v) {
                      s.mode = projector_mode_from_string(v);
                    })
      .def_readwrite("k", &ProjectorSpec::k)
      .def_readwrite("q", &ProjectorSpec::q)
      .def_readwrite("oversample", &ProjectorSpec::oversample)
      .def_readwrite("epsilon", &ProjectorSpec::epsilon)
      .def_readwrite("seed", &ProjectorSpec::seed);

  m.def("project", &project, py::arg("spec"), py::arg("x"),
        "Rank-k approximation under the selected projector");
  m.def("measured_epsilon", &measured_epsilon, py::arg("spec"), py::arg("x"));

  py::class_<MomentumPolicy>(m, "MomentumPolicy")
      .def(py::init([](const std::string& kind, double tau, double q, double alpha0) {
             MomentumPolicy p;
             p.kind = momentum_kind_from_string(kind);
             p.tau = tau;
             p.q = q;
             p.alpha0 = alpha0;
             return p;
           }),
           py::arg("kind") = "adaptive", py::arg("tau") = 0.0, py::arg("q") = 1.0,
           py::arg("alpha0") = 0.5)
      .def_property("kind",
                    [](const MomentumPolicy& p) { return momentum_kind_name(p.kind); },
                    [](MomentumPolicy& p, const std::string& v) {
                      p.kind = momentum_kind_from_string(v);
                    })
      .def_readwrite("tau", &MomentumPolicy::tau)
      .def_readwrite("q", &MomentumPolicy::q)
      .def_readwrite("alpha0", &MomentumPolicy::alpha0);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init([](const std::string& algorithm, int k, int max_iters,
                       double tol, const std::string& projection_mode,
                       const ProjectorSpec& projector, const MomentumPolicy& momentum,
                       const std::string& union_mode, int cg_maxiter, double cg_tol,
                       double svp_mu, std::uint64_t seed) {
             SolverConfig cfg;
             cfg.algorithm = algorithm_from_string(algorithm);
             cfg.k = k;
             cfg.max_iters = max_iters;
             cfg.tol = tol;
             cfg.projection_mode = projection_mode == "left"
                                       ? ProjectionMode::left_inexact
                                       : ProjectionMode::exact_two_sided;
             cfg.projector = projector;
             cfg.momentum = momentum;
             cfg.union_mode =
                 union_mode == "ortho" ? UnionMode::ortho : UnionMode::raw;
             cfg.cg_maxiter = cg_maxiter;
             cfg.cg_tol = cg_tol;
             cfg.svp_mu = svp_mu;
             cfg.seed = seed;
             return cfg;
           }),
           py::arg("algorithm") = "alps2", py::arg("k") = 1,
           py::arg("max_iters") = 500, py::arg("tol") = 5e-5,
           py::arg("projection_mode") = "exact",
           py::arg("projector") = ProjectorSpec{},
           py::arg("momentum") = MomentumPolicy{}, py::arg("union_mode") = "raw",
           py::arg("cg_maxiter") = 500, py::arg("cg_tol") = 1e-10,
           py::arg("svp_mu") = 1.0, py::arg("seed") = 0)
      .def_property("algorithm",
                    [](const SolverConfig& c) { return to_string(c.algorithm); },
                    [](SolverConfig& c, const std::string& v) {
                      c.algorithm = algorithm_from_string(v);
                    })
      .def_readwrite("k", &SolverConfig::k)
      .def_readwrite("max_iters", &SolverConfig::max_iters)
      .def_readwrite("tol", &SolverConfig::tol)
      .def_readwrite("projector", &SolverConfig::projector)
      .def_readwrite("momentum", &SolverConfig::momentum)
      .def_readwrite("cg_maxiter", &SolverConfig::cg_maxiter)
      .def_readwrite("cg_tol", &SolverConfig::cg_tol)
      .def_readwrite("svp_mu", &SolverConfig::svp_mu)
      .def_readwrite("seed", &SolverConfig::seed);

  py::class_<IterationRecord>(m, "IterationRecord")
      .def_readonly("iter", &IterationRecord::iter)
      .def_readonly("rel_change", &IterationRecord::rel_change)
      .def_readonly("f_value", &IterationRecord::f_value)
      .def_readonly("err_vs_truth", &IterationRecord::err_vs_truth)
      .def_readonly("elapsed_ms", &IterationRecord::elapsed_ms);

  py::class_<TrialRecord>(m, "TrialRecord")
      .def_readonly("iterations", &TrialRecord::iterations)
      .def_readonly("final_error", &TrialRecord::final_error)
      .def_readonly("wall_seconds", &TrialRecord::wall_seconds)
      .def_readonly("diverged", &TrialRecord::diverged)
      .def_readonly("trace", &TrialRecord::trace);

  py::class_<RunReport>(m, "RunReport")
      .def_readonly("algorithm", &RunReport::algorithm)
      .def_readonly("m", &RunReport::m)
      .def_readonly("n", &RunReport::n)
      .def_readonly("k", &RunReport::k)
      .def_readonly("noise_energy", &RunReport::noise_energy)
      .def_readonly("sampling_ratio", &RunReport::sampling_ratio)
      .def_readonly("freedom_ratio", &RunReport::freedom_ratio)
      .def_readonly("trials", &RunReport::trials)
      .def_property_readonly("median_iterations", &RunReport::median_iterations)
      .def_property_readonly("median_error", &RunReport::median_error)
      .def_property_readonly("median_seconds", &RunReport::median_seconds)
      .def("to_json", [](const RunReport& r) { return r.to_json().dump(); })
      .def("to_csv", &RunReport::to_csv)
      .def("signature", &RunReport::signature);

  m.def("step_size_mu",
        [](const LinearOperator& A, const SubspaceBasis& S, const DenseMatrix& g)
            -> py::object {
          const auto mu = step_size_mu(A, S, g);
          if (!mu) return py::none();
          return py::float_(*mu);
        },
        py::arg("operator"), py::arg("basis"), py::arg("grad"));

  m.def("solve",
        [](const LinearOperator& A, const Vector& y, const SolverConfig& cfg,
           py::object x_true) {
          if (x_true.is_none()) {
            auto [estimate, report] = solve(A, y, cfg);
            return py::make_tuple(estimate, report);
          }
          const DenseMatrix truth = x_true.cast<DenseMatrix>();
          auto [estimate, report] = solve(A, y, cfg, &truth);
          return py::make_tuple(estimate, report);
        },
        py::arg("operator"), py::arg("y"), py::arg("config"),
        py::arg("x_true") = py::none(),
        "Run the configured solver; returns (estimate, report)");

  m.def("rip_probe", &rip_probe, py::arg("operator"), py::arg("k"),
        py::arg("trials"), py::arg("seed"),
        "Monte-Carlo lower bound (lower, upper) on the isometry deviation");

  py::class_<ProblemSpec>(m, "ProblemSpec")
      .def(py::init([](Index m, Index n, int k, double sr, double noise,
                       const std::string& operator_kind, int trials,
                       std::uint64_t seed) {
             ProblemSpec spec;
             spec.m = m;
             spec.n = n;
             spec.k_true = k;
             spec.sampling_ratio = sr;
             spec.noise_energy = noise;
             spec.operator_kind = operator_kind_from_string(operator_kind);
             spec.trials = trials;
             spec.seed = seed;
             return spec;
           }),
           py::arg("m"), py::arg("n"), py::arg("k"), py::arg("sr") = 0.3,
           py::arg("noise") = 0.0, py::arg("operator_kind") = "mask",
           py::arg("trials") = 10, py::arg("seed") = 0)
      .def_readwrite("m", &ProblemSpec::m)
      .def_readwrite("n", &ProblemSpec::n)
      .def_readwrite("k", &ProblemSpec::k_true)
      .def_readwrite("sampling_ratio", &ProblemSpec::sampling_ratio)
      .def_readwrite("noise_energy", &ProblemSpec::noise_energy)
      .def_readwrite("trials", &ProblemSpec::trials)
      .def_readwrite("seed", &ProblemSpec::seed)
      .def_property_readonly("measurement_count", &ProblemSpec::measurement_count)
      .def_property_readonly("freedom_ratio", &ProblemSpec::freedom_ratio);

  m.def("generate_problem",
        [](const ProblemSpec& spec) {
          Problem p = generate_problem(spec);
          return py::make_tuple(p.x_true, p.op, p.obs.y);
        },
        py::arg("spec"), "Returns (x_true, operator, y)");

  m.def("run_monte_carlo", &run_monte_carlo, py::arg("spec"), py::arg("configs"),
        py::arg("threads") = 0,
        py::call_guard<py::gil_scoped_release>());

  m.def("toy_example", [](const std::string& algorithm) {
    return run_toy_example(algorithm_from_string(algorithm));
  }, py::arg("algorithm") = "alps2");
  m.def("toy_example_truth", &toy_example_truth);

  m.def("denoise_image",
        [](const std::string& path, int k, double fraction, const SolverConfig& cfg,
           std::uint64_t seed, bool rank_reference) {
          auto result = denoise_image(path, k, fraction, cfg, seed, rank_reference);
          return py::make_tuple(result.estimate, result.snr_db, result.report);
        },
        py::arg("path"), py::arg("k"), py::arg("fraction"), py::arg("config"),
        py::arg("seed") = 0, py::arg("rank_reference") = false,
        "Returns (estimate, snr_db, report)");

  m.def("read_pgm", &read_pgm, py::arg("path"));
  m.def("write_pgm", &write_pgm, py::arg("path"), py::arg("image"));

  m.def("emit_table",
        [](const std::vector<RunReport>& reports, const std::string& format) {
          return emit_table(reports, format == "csv" ? TableFormat::csv
                                                     : TableFormat::text);
        },
        py::arg("reports"), py::arg("format") = "text");

  m.attr("__version__") = "0.1.0";
}
