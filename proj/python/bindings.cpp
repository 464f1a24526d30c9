#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pcs/distributions.hpp"
#include "pcs/jc.hpp"
#include "pcs/lambda.hpp"
#include "pcs/run.hpp"

namespace py = pybind11;
using namespace pcs;

namespace {

py::dict report_dict(const CumulantReport& r)
{
    py::dict d;
    d["flux"] = r.flux;
    d["noise"] = r.noise;
    d["snr"] = r.snr;
    d["method"] = to_string(r.method);
    d["h"] = r.h;
    d["flux_error"] = r.flux_error;
    d["noise_error"] = r.noise_error;
    d["flagged"] = r.flagged;
    d["note"] = r.note;
    return d;
}

py::dict distribution_dict(const PhotonDistribution& d)
{
    py::dict out;
    std::vector<py::ssize_t> shape;
    for (int s : d.size) shape.push_back(s);
    py::array_t<double> p(shape);
    std::copy(d.p.begin(), d.p.end(), p.mutable_data());
    out["p"] = p;
    out["n_min"] = d.n_min;
    out["time"] = d.time;
    out["grid"] = d.grid;
    out["clipped_mass"] = d.clipped_mass;
    out["outside_mass"] = d.outside_mass;
    std::vector<double> mean, var;
    for (int k = 0; k < d.modes; ++k) {
        mean.push_back(d.mean(k));
        var.push_back(d.variance(k));
    }
    out["mean"] = mean;
    out["variance"] = var;
    return out;
}

} // namespace

PYBIND11_MODULE(_pcs, m)
{
    m.doc() = "Photon-counting statistics of driven open quantum systems";

    py::register_exception<Error>(m, "PcsError", PyExc_RuntimeError);

    py::enum_<Method>(m, "Method")
        .value("SpectralFD", Method::SpectralFD)
        .value("CharPoly", Method::CharPoly)
        .value("AnalyticOracle", Method::AnalyticOracle)
        .value("PerturbationTheory", Method::PerturbationTheory)
        .value("PeriodicNumeric", Method::PeriodicNumeric);

    py::enum_<JcNoiseMode>(m, "JcNoiseMode")
        .value("WeakGamma", JcNoiseMode::WeakGamma)
        .value("Exact", JcNoiseMode::Exact)
        .value("Reconstructed", JcNoiseMode::Reconstructed);

    py::class_<JcParams>(m, "JcParams")
        .def(py::init<>())
        .def(py::init([](double eps_delta, double omega1, double omega2, double phi1, double phi2, double gamma) {
                 JcParams p;
                 p.eps_delta = eps_delta;
                 p.omega1 = omega1;
                 p.omega2 = omega2;
                 p.phi1 = phi1;
                 p.phi2 = phi2;
                 p.gamma = gamma;
                 p.validate();
                 return p;
             }),
             py::arg("eps_delta") = 0.0, py::arg("omega1") = 1.0, py::arg("omega2") = 1.0, py::arg("phi1") = 0.0,
             py::arg("phi2") = 0.0, py::arg("gamma") = 0.0)
        .def_readwrite("eps_delta", &JcParams::eps_delta)
        .def_readwrite("omega1", &JcParams::omega1)
        .def_readwrite("omega2", &JcParams::omega2)
        .def_readwrite("phi1", &JcParams::phi1)
        .def_readwrite("phi2", &JcParams::phi2)
        .def_readwrite("gamma", &JcParams::gamma)
        .def("validate", &JcParams::validate);

    py::class_<LambdaParams>(m, "LambdaParams")
        .def(py::init<>())
        .def_readwrite("eps_a", &LambdaParams::eps_a)
        .def_readwrite("eps_b", &LambdaParams::eps_b)
        .def_readwrite("eps_c", &LambdaParams::eps_c)
        .def_readwrite("omega_p", &LambdaParams::omega_p)
        .def_readwrite("omega_1", &LambdaParams::omega_1)
        .def_readwrite("omega_d", &LambdaParams::omega_d)
        .def_readwrite("r", &LambdaParams::r)
        .def_readwrite("omega_s", &LambdaParams::omega_s)
        .def_readwrite("omega_p0", &LambdaParams::omega_p0)
        .def_readwrite("omega_p1", &LambdaParams::omega_p1)
        .def_readwrite("gamma", &LambdaParams::gamma)
        .def_readwrite("phi1", &LambdaParams::phi1)
        .def_readwrite("phi2", &LambdaParams::phi2)
        .def("set_detuning", &LambdaParams::set_detuning)
        .def("validate", &LambdaParams::validate);

    m.def(
        "jc_cumulants",
        [](const JcParams& p, Method method) {
            const auto r = jc_point(p, method, Numerics{});
            return py::make_tuple(report_dict(r.mode1), report_dict(r.mode2));
        },
        py::arg("params"), py::arg("method") = Method::SpectralFD);
    m.def("jc_flux_oracle", &jc_flux_oracle, py::arg("params"));
    m.def("jc_noise_oracle", &jc_noise_oracle, py::arg("params"), py::arg("mode") = JcNoiseMode::Reconstructed);
    m.def("jc_quasienergies", &jc_quasienergies, py::arg("params"), py::arg("chi1") = 0.0, py::arg("chi2") = 0.0);
    m.def(
        "jc_closed_statistics",
        [](const JcParams& p, std::array<double, 2> w, int mode, double t) {
            const auto s = jc_closed_statistics(p, w, mode, t);
            return py::make_tuple(s.mean, s.variance);
        },
        py::arg("params"), py::arg("weights"), py::arg("mode"), py::arg("t"));
    m.def("closed_mgf", &closed_mgf, py::arg("params"), py::arg("weights"), py::arg("chi"), py::arg("t"));
    m.def(
        "lambda_cumulants",
        [](const LambdaParams& p, int mode, Method method) { return report_dict(lambda_cumulants(p, mode, method)); },
        py::arg("params"), py::arg("mode"), py::arg("method") = Method::PerturbationTheory);
    m.def("lambda_lambda0_pt2", &lambda_lambda0_pt2, py::arg("params"), py::arg("chi1"), py::arg("chi2"));
    m.def("bessel_j", &bessel_j, py::arg("n"), py::arg("x"));
    m.def("bessel_j_zero", &bessel_j_zero, py::arg("n"), py::arg("k"));
    m.def(
        "jc_distribution",
        [](const JcParams& p, double t, std::vector<int> modes, std::vector<double> mean, std::vector<double> variance,
           int grid) {
            Mat g = Mat::Zero(2, 2);
            g(1, 1) = 1.0;
            ReconstructOptions opt;
            opt.grid = grid;
            const auto d = reconstruct(jc_model(p), vectorize(g, Basis::Pauli), InitialLaw::gaussian(mean, variance), t, modes, opt);
            return distribution_dict(d);
        },
        py::arg("params"), py::arg("t"), py::arg("modes") = std::vector<int>{0},
        py::arg("mean") = std::vector<double>{500.0, 500.0}, py::arg("variance") = std::vector<double>{100.0, 100.0},
        py::arg("grid") = 256, "Distribution at time t starting from the atomic ground state and a Gaussian photon law.");
    m.def(
        "run_config",
        [](const std::string& text, const std::string& out_dir, int threads) {
            RunOptions opt;
            opt.out_dir = out_dir;
            if (threads > 0) opt.threads = threads;
            RunResult total;
            for (const auto& s : parse_scenarios(text)) total.merge(run(s, opt, Task::Scan));
            return py::make_tuple(total.exit_code(), total.files);
        },
        py::arg("config"), py::arg("out_dir") = ".", py::arg("threads") = 0,
        "Run every scenario of a JSON document; returns (exit code, written files).");
}
