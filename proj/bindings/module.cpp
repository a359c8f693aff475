#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ddibp/decay.hpp"
#include "ddibp/distance.hpp"
#include "ddibp/likelihood.hpp"
#include "ddibp/mcmc.hpp"
#include "ddibp/prior.hpp"
#include "ddibp/proximity.hpp"
#include "ddibp/theory.hpp"
#include "ddibp/verify.hpp"

namespace py = pybind11;
using namespace ddibp;

namespace {

DecayFunction decay_from_args(const std::string& kind, double beta, double nu) {
  return DecayFunction::from_spec(kind, beta, nu);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "distance dependent Indian buffet process core";

  py::class_<Rng>(m, "Rng")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def_static("derive", &Rng::derive, py::arg("seed"), py::arg("stream"))
      .def("uniform", &Rng::uniform)
      .def("normal", &Rng::normal)
      .def("poisson", &Rng::poisson, py::arg("mean"))
      .def("gamma", &Rng::gamma, py::arg("shape"), py::arg("rate"))
      .def("beta", &Rng::beta, py::arg("a"), py::arg("b"));

  py::class_<DistanceMatrix>(m, "DistanceMatrix")
      .def(py::init<Eigen::MatrixXd>(), py::arg("d"))
      .def_static("sequential", &DistanceMatrix::sequential, py::arg("n"))
      .def_static("absolute_difference", &DistanceMatrix::absolute_difference, py::arg("t"))
      .def_static("sequential_absolute_difference",
                  &DistanceMatrix::sequential_absolute_difference, py::arg("t"))
      .def_property_readonly("n", &DistanceMatrix::n)
      .def_property_readonly("matrix", &DistanceMatrix::matrix)
      .def("is_sequential", &DistanceMatrix::is_sequential);

  py::class_<DecayFunction>(m, "DecayFunction")
      .def(py::init(&decay_from_args), py::arg("kind"), py::arg("beta") = 1.0,
           py::arg("nu") = 1.0)
      .def_static("constant", &DecayFunction::constant)
      .def_static("exponential", &DecayFunction::exponential, py::arg("beta"))
      .def_static("logistic", &DecayFunction::logistic, py::arg("beta"), py::arg("nu"))
      .def_static("window", &DecayFunction::window, py::arg("nu"))
      .def("__call__", &DecayFunction::operator(), py::arg("d"))
      .def_property_readonly("kind", &DecayFunction::kind_name);

  py::class_<ProximityMatrix>(m, "ProximityMatrix")
      .def_property_readonly("matrix", &ProximityMatrix::matrix)
      .def_property_readonly("normalizers", &ProximityMatrix::normalizers)
      .def_property_readonly("n", &ProximityMatrix::n);

  m.def("build_proximity", &build_proximity, py::arg("distances"), py::arg("decay"));

  py::class_<PriorState>(m, "PriorState")
      .def_property_readonly("n", &PriorState::n)
      .def_property_readonly("k", &PriorState::k)
      .def_property_readonly("owner", &PriorState::owner)
      .def_property_readonly("lambdas", &PriorState::lambdas)
      .def_property_readonly("connections", &PriorState::connections);

  py::class_<FeatureMatrix>(m, "FeatureMatrix")
      .def_static("from_z", &FeatureMatrix::from_z, py::arg("z"))
      .def_readonly("z", &FeatureMatrix::z)
      .def_readonly("active_columns", &FeatureMatrix::active_columns)
      .def_property_readonly("n", &FeatureMatrix::n)
      .def_property_readonly("k", &FeatureMatrix::k);

  m.def("sample_prior", &sample_prior, py::arg("proximity"), py::arg("alpha"), py::arg("rng"));
  m.def("compute_feature_matrix", &compute_feature_matrix, py::arg("state"));
  m.def("log_prior", &log_prior, py::arg("state"), py::arg("proximity"), py::arg("alpha"));

  py::class_<NoiseParams>(m, "NoiseParams")
      .def(py::init([](double sx, double sw) { return NoiseParams{sx, sw}; }),
           py::arg("sigma_x") = 1.0, py::arg("sigma_w") = 1.0)
      .def_readwrite("sigma_x", &NoiseParams::sigma_x)
      .def_readwrite("sigma_w", &NoiseParams::sigma_w);

  py::class_<DataMatrix>(m, "DataMatrix")
      .def_static("observed", &DataMatrix::observed, py::arg("x"))
      .def_readonly("x", &DataMatrix::x)
      .def_property_readonly("n", &DataMatrix::n)
      .def_property_readonly("m", &DataMatrix::m);

  m.def(
      "collapsed_loglik",
      [](const Eigen::MatrixXd& x, const FeatureMatrix& z, const NoiseParams& np) {
        return collapsed_loglik(DataMatrix::observed(x), z, np);
      },
      py::arg("x"), py::arg("z"), py::arg("noise"));

  py::class_<SharingStats>(m, "SharingStats")
      .def_readonly("r", &SharingStats::r)
      .def_readonly("r_pair", &SharingStats::r_pair)
      .def_readonly("fraction", &SharingStats::fraction);

  m.def("sharing_stats", &sharing_stats, py::arg("z"));

  py::class_<ReachProbs>(m, "ReachProbs")
      .def_readonly("p_single", &ReachProbs::p_single)
      .def_readonly("p_pair", &ReachProbs::p_pair);

  m.def("reach_probs_exact", &reach_probs_exact, py::arg("proximity"));
  m.def("reach_probs_mc", &reach_probs_mc, py::arg("proximity"), py::arg("draws"),
        py::arg("seed"), py::arg("threads") = 0);
  m.def(
      "ddibp_sharing_rates",
      [](const ProximityMatrix& a, double alpha, const ReachProbs& probs) {
        const SharingRates rates = ddibp_sharing_rates(a, alpha, probs);
        return py::make_tuple(rates.rate_single, rates.rate_pair);
      },
      py::arg("proximity"), py::arg("alpha"), py::arg("probs"));
  m.def("ddibp_limit_fractions", &ddibp_limit_fractions, py::arg("proximity"), py::arg("probs"));
  m.def(
      "dhbp_limit_fractions",
      [](double c0, double c1) {
        const DhbpLimits l = dhbp_limit_fractions(c0, c1);
        return py::make_tuple(l.same_group, l.diff_group);
      },
      py::arg("c0"), py::arg("c1"));

  py::class_<DhbpParams>(m, "DhbpParams")
      .def(py::init([](double gamma, double c0, double c1, int k_trunc) {
             return DhbpParams{gamma, c0, c1, k_trunc};
           }),
           py::arg("gamma"), py::arg("c0") = 1.0, py::arg("c1") = 1.0,
           py::arg("k_trunc") = 2000)
      .def_readwrite("gamma", &DhbpParams::gamma)
      .def_readwrite("c0", &DhbpParams::c0)
      .def_readwrite("c1", &DhbpParams::c1)
      .def_readwrite("k_trunc", &DhbpParams::k_trunc);

  m.def(
      "sample_dhbp",
      [](const DhbpParams& params, const ProximityMatrix& a, Rng& rng) {
        DhbpDraw draw = sample_dhbp(params, a, rng);
        return py::make_tuple(draw.z, draw.groups);
      },
      py::arg("params"), py::arg("proximity"), py::arg("rng"));
  m.def("ibp_baseline_sample", &ibp_baseline_sample, py::arg("alpha"), py::arg("n"),
        py::arg("rng"));

  py::class_<McmcConfig>(m, "McmcConfig")
      .def(py::init<>())
      .def_readwrite("iterations", &McmcConfig::iterations)
      .def_readwrite("burn_in", &McmcConfig::burn_in)
      .def_readwrite("alpha_shape", &McmcConfig::alpha_shape)
      .def_readwrite("alpha_rate", &McmcConfig::alpha_rate)
      .def_readwrite("noise_proposal_scale", &McmcConfig::noise_proposal_scale)
      .def_readwrite("seed", &McmcConfig::seed)
      .def_readwrite("update_alpha", &McmcConfig::update_alpha)
      .def_readwrite("update_noise", &McmcConfig::update_noise)
      .def_readwrite("update_missing", &McmcConfig::update_missing)
      .def_readwrite("fixed_alpha", &McmcConfig::fixed_alpha)
      .def_readwrite("init_sigma_x", &McmcConfig::init_sigma_x)
      .def_readwrite("init_sigma_w", &McmcConfig::init_sigma_w)
      .def_readwrite("record_z", &McmcConfig::record_z);

  py::class_<SampleRecord>(m, "SampleRecord")
      .def_readonly("iteration", &SampleRecord::iteration)
      .def_readonly("k", &SampleRecord::k)
      .def_readonly("alpha", &SampleRecord::alpha)
      .def_readonly("sigma_x", &SampleRecord::sigma_x)
      .def_readonly("sigma_w", &SampleRecord::sigma_w)
      .def_readonly("log_joint", &SampleRecord::log_joint);

  m.def(
      "run_chain",
      [](const Eigen::MatrixXd& x, const DistanceMatrix& d, const DecayFunction& f,
         const McmcConfig& config, py::object missing) {
        DataMatrix data = DataMatrix::observed(x);
        if (!missing.is_none()) {
          const auto mask = missing.cast<Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>>();
          data = DataMatrix::with_mask(x, mask);
        }
        const RunResult result = run_chain(data, d, f, config);
        py::list records;
        for (const auto& r : result.records) records.append(r);
        return py::make_tuple(records, result.map_z, result.map_state.data.x,
                              result.map_state.alpha);
      },
      py::arg("x"), py::arg("distances"), py::arg("decay"), py::arg("config"),
      py::arg("missing") = py::none());
}
