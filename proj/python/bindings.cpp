#include "spillover/bekk.hpp"
#include "spillover/dcc.hpp"
#include "spillover/diagnostics.hpp"
#include "spillover/garch.hpp"
#include "spillover/market_data.hpp"
#include "spillover/optimizer.hpp"
#include "spillover/simulate.hpp"
#include "spillover/stationarity.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace spillover;

namespace {

std::vector<std::string> iso_dates(const std::vector<Date>& dates) {
    std::vector<std::string> out;
    out.reserve(dates.size());
    for (const auto& d : dates) out.push_back(format_date(d));
    return out;
}

py::dict bekk_params_dict(const BekkParams& p) {
    py::dict d;
    const auto values = p.to_array();
    for (std::size_t i = 0; i < values.size(); ++i) d[BekkParams::names()[i]] = values[i];
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Volatility spillover estimators: unit-root tests, GARCH, BEKK and DCC.";

    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

    py::class_<MleSettings>(m, "MleSettings")
        .def(py::init<>())
        .def(py::init([](double tolerance, int max_iterations, int restarts, std::uint64_t seed) {
                 return MleSettings{tolerance, max_iterations, restarts, seed};
             }),
             py::kw_only(), py::arg("tolerance") = 1e-7, py::arg("max_iterations") = 2000, py::arg("restarts") = 5,
             py::arg("seed") = 20210630)
        .def_readwrite("tolerance", &MleSettings::tolerance)
        .def_readwrite("max_iterations", &MleSettings::max_iterations)
        .def_readwrite("restarts", &MleSettings::restarts)
        .def_readwrite("seed", &MleSettings::seed);

    py::class_<TestReport>(m, "TestReport")
        .def_readonly("test_name", &TestReport::test_name)
        .def_readonly("statistic", &TestReport::statistic)
        .def_readonly("lags_used", &TestReport::lags_used)
        .def_readonly("p_value", &TestReport::p_value)
        .def_readonly("reject_null", &TestReport::reject_null)
        .def_readonly("decision", &TestReport::decision)
        .def_property_readonly("critical_values",
                               [](const TestReport& r) {
                                   return py::dict(py::arg("1%") = r.critical_values.pct1,
                                                   py::arg("5%") = r.critical_values.pct5,
                                                   py::arg("10%") = r.critical_values.pct10);
                               })
        .def("__repr__", [](const TestReport& r) {
            return "<TestReport " + r.test_name + " stat=" + std::to_string(r.statistic) + " " + r.decision + ">";
        });

    py::class_<ReturnMatrix>(m, "ReturnMatrix")
        .def_property_readonly("dates", [](const ReturnMatrix& r) { return iso_dates(r.dates); })
        .def_readonly("markets", &ReturnMatrix::markets)
        .def_readonly("values", &ReturnMatrix::values);

    py::class_<PricePanel>(m, "PricePanel")
        .def_property_readonly("dates", [](const PricePanel& p) { return iso_dates(p.dates); })
        .def_readonly("markets", &PricePanel::markets)
        .def_readonly("prices", &PricePanel::prices)
        .def("log_returns", [](const PricePanel& p) { return log_returns(p); });

    m.def("load_prices", &load_prices, py::arg("files"),
          "Reads one close-price CSV per (market, path) pair and aligns them on common dates.");
    m.def("log_returns", &log_returns, py::arg("panel"));

    m.def("adf_test", &adf_test, py::arg("series"), py::arg("lags") = py::none());
    m.def("pp_test", &pp_test, py::arg("series"), py::arg("bandwidth") = py::none());
    m.def("kpss_test", &kpss_test, py::arg("series"), py::arg("bandwidth") = py::none());

    py::class_<GarchParams>(m, "GarchParams")
        .def(py::init([](double mu, double omega, double alpha, double beta) { return GarchParams{mu, omega, alpha, beta}; }),
             py::arg("mu"), py::arg("omega"), py::arg("alpha"), py::arg("beta"))
        .def_readwrite("mu", &GarchParams::mu)
        .def_readwrite("omega", &GarchParams::omega)
        .def_readwrite("alpha", &GarchParams::alpha)
        .def_readwrite("beta", &GarchParams::beta)
        .def("unconditional_variance", &GarchParams::unconditional_variance);

    py::class_<GarchFit>(m, "GarchFit")
        .def_readonly("params", &GarchFit::params)
        .def_property_readonly("std_errors",
                               [](const GarchFit& f) {
                                   return py::dict(py::arg("omega") = f.std_errors.omega,
                                                   py::arg("alpha") = f.std_errors.alpha,
                                                   py::arg("beta") = f.std_errors.beta);
                               })
        .def_readonly("sigma2", &GarchFit::sigma2_path)
        .def_readonly("std_residuals", &GarchFit::std_residuals)
        .def_readonly("loglik", &GarchFit::loglik)
        .def_readonly("converged", &GarchFit::converged);

    m.def("garch_loglik", &garch_loglik, py::arg("params"), py::arg("returns"));
    m.def("fit_garch", &fit_garch, py::arg("returns"), py::arg("settings") = MleSettings{});

    py::class_<BekkFit>(m, "BekkFit")
        .def_property_readonly("params", [](const BekkFit& f) { return bekk_params_dict(f.params); })
        .def_property_readonly("std_errors", [](const BekkFit& f) { return bekk_params_dict(f.std_errors); })
        .def_property_readonly("C", [](const BekkFit& f) { return Eigen::Matrix2d(f.params.C); })
        .def_property_readonly("A", [](const BekkFit& f) { return Eigen::Matrix2d(f.params.A); })
        .def_property_readonly("G", [](const BekkFit& f) { return Eigen::Matrix2d(f.params.G); })
        .def_readonly("stars", &BekkFit::stars)
        .def_readonly("loglik", &BekkFit::loglik)
        .def_readonly("converged", &BekkFit::converged);

    m.def("fit_bekk", py::overload_cast<const Eigen::MatrixXd&, const MleSettings&>(&fit_bekk), py::arg("returns"),
          py::arg("settings") = MleSettings{}, "Columns are (foreign, home).");
    m.def(
        "bekk_spillover",
        [](const BekkFit& fit, const std::string& market_i, const std::string& market_j) {
            const SpilloverSummary s = spillover_summary(fit, market_i, market_j);
            return py::dict(py::arg("g21") = s.g21, py::arg("se_g21") = s.se_g21, py::arg("g12") = s.g12,
                            py::arg("se_g12") = s.se_g12,
                            py::arg("direction") = to_string(s.direction, s.market_i, s.market_j),
                            py::arg("magnitude_pct_i_to_j") = s.magnitude_pct_i_to_j,
                            py::arg("magnitude_pct_j_to_i") = s.magnitude_pct_j_to_i);
        },
        py::arg("fit"), py::arg("market_i"), py::arg("market_j"));

    py::class_<DccFit>(m, "DccFit")
        .def_property_readonly("alpha", [](const DccFit& f) { return f.params.alpha; })
        .def_property_readonly("beta", [](const DccFit& f) { return f.params.beta; })
        .def_property_readonly("nu", [](const DccFit& f) { return f.params.nu; })
        .def_property_readonly("se_alpha", [](const DccFit& f) { return f.std_errors.alpha; })
        .def_property_readonly("se_beta", [](const DccFit& f) { return f.std_errors.beta; })
        .def_property_readonly("se_nu", [](const DccFit& f) { return f.std_errors.nu; })
        .def_property_readonly("Qbar", [](const DccFit& f) { return f.params.Qbar; })
        .def_readonly("stage1", &DccFit::stage1)
        .def_readonly("std_residuals", &DccFit::std_residuals)
        .def_readonly("loglik", &DccFit::loglik_stage2)
        .def_readonly("converged", &DccFit::converged)
        .def_readonly("markets", &DccFit::markets)
        .def("correlation", [](const DccFit& f, std::size_t i, std::size_t j) { return extract_pair(f, i, j).rho; },
             py::arg("i"), py::arg("j"));

    m.def(
        "fit_dcc",
        [](const Eigen::MatrixXd& returns, const std::string& distribution, const MleSettings& settings,
           const std::vector<std::string>& names) {
            return fit_dcc(returns, parse_distribution(distribution), settings, names);
        },
        py::arg("returns"), py::arg("distribution") = "gaussian", py::arg("settings") = MleSettings{},
        py::arg("names") = std::vector<std::string>{});
    m.def("dcc_loglik", &dcc_loglik, py::arg("alpha"), py::arg("beta"), py::arg("std_residuals"));
    m.def("tdcc_loglik", &tdcc_loglik, py::arg("alpha"), py::arg("beta"), py::arg("nu"), py::arg("std_residuals"));

    py::class_<DccComparison>(m, "DccComparison")
        .def_readonly("pair", &DccComparison::pair)
        .def_readonly("mean_pre", &DccComparison::mean_pre)
        .def_readonly("mean_during", &DccComparison::mean_during)
        .def_readonly("mean_diff", &DccComparison::mean_diff)
        .def_readonly("t_stat", &DccComparison::t_stat)
        .def_readonly("significant_5pct", &DccComparison::significant_5pct);

    m.def("dcc_compare", &dcc_compare, py::arg("rho_pre"), py::arg("rho_during"), py::arg("pair") = std::string{});
    m.def("hosking_test", &hosking_test, py::arg("residuals"), py::arg("lags") = 10);
    m.def("li_mcleod_test", &li_mcleod_test, py::arg("residuals"), py::arg("lags") = 10);

    m.def(
        "simulate",
        [](const std::string& model, const std::string& params, std::size_t T, std::size_t K, std::uint64_t seed,
           std::size_t burn_in, const std::vector<std::string>& names) {
            SimSpec spec;
            spec.model = parse_sim_model(model);
            spec.params = parse_sim_params(spec.model, params, K);
            spec.T = T;
            spec.K = K;
            spec.seed = seed;
            spec.burn_in = burn_in;
            spec.names = names;
            return simulate(spec);
        },
        py::arg("model"), py::arg("params") = std::string{}, py::arg("T") = 1000, py::arg("K") = 1,
        py::arg("seed") = 1, py::arg("burn_in") = 500, py::arg("names") = std::vector<std::string>{});
}
