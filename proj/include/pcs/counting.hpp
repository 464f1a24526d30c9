#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pcs/dressed.hpp"

namespace pcs {

Vec evolve_generalized(const DressedLiouvillian& model, const CountingFields& fields, const Vec& rho0,
                       double t, int steps_per_period = 512);

struct MgfValue {
    cplx value;
    double time = 0.0;
    cplx left;   // tr rho_L(xi, chi) / 2
    cplx right;  // conj(tr rho_L(xi, -chi)) / 2
};

MgfValue dynamical_mgf(const DressedLiouvillian& model, const CountingFields& fields, const Vec& rho0,
                       double t, int steps_per_period = 512);

struct InitialLaw {
    enum class Kind { Poisson, Gaussian };
    Kind kind = Kind::Poisson;
    std::vector<double> amplitude;  // coherent amplitude alpha_k (Poisson)
    std::vector<double> mean;       // Gaussian mean photon number
    std::vector<double> variance;   // Gaussian variance

    static InitialLaw poisson(std::vector<double> alpha);
    static InitialLaw gaussian(std::vector<double> mean, std::vector<double> variance);
    int modes() const;
};

cplx initial_mgf(const InitialLaw& law, const std::vector<double>& chi);
cplx initial_mgf(const std::vector<double>& alpha, const std::vector<double>& chi);

// Stationary state at zero fields; for periodic models the state at t = 0 of the periodic steady state.
Vec model_stationary_state(const DressedLiouvillian& model, int steps_per_period = 512);

struct Lambda0Options {
    int steps_per_period = 512;
    double stationarity_tol = 1e-10;
};

// Precise lambda0 near zero fields. Static models use a fixed point of the Schur complement
// around the zero-field projector; periodic models use log(mu0)/tau of the monodromy.
class Lambda0Local {
public:
    explicit Lambda0Local(const DressedLiouvillian& model, const Lambda0Options& opt = {});
    cplx operator()(const CountingFields& fields) const;
    double gap() const { return gap_; }
    const Vec& right() const { return r0_; }
    const RowVec& left() const { return l0_; }

private:
    DressedLiouvillian model_;
    Lambda0Options opt_;
    Mat l0mat_;
    RowVec l0_;
    Vec r0_;
    double gap_ = 0.0;
};

// lambda0 of L0 + dL from the zero-field left/right stationary vectors of L0.
cplx feshbach_lambda0(const Mat& l0mat, const Mat& dl, const RowVec& l, const Vec& r);

struct TrackOptions {
    double step_fraction = 0.25;
    double collision_fraction = 1e-3;
    int steps_per_period = 512;
    int max_steps = 100000;
};

// Continuation from zero fields to the fields reduced to (-pi, pi].
cplx track_lambda0(const DressedLiouvillian& model, const CountingFields& fields, const TrackOptions& opt = {});

struct CumulantOptions {
    double h = 1e-3;
    double gap_fraction = 0.02;
    double tolerance = 1e-6;
    int steps_per_period = 512;
};

struct CumulantReport {
    int mode = -1;
    std::string channel;
    double flux = 0.0;
    double noise = 0.0;
    double snr = 0.0;
    Method method = Method::SpectralFD;
    double h = 0.0;
    double flux_error = 0.0;
    double noise_error = 0.0;
    bool flagged = false;
    std::string note;
};

CountingFields drive_direction(const DressedLiouvillian& model, int mode);
CountingFields bath_direction(const DressedLiouvillian& model, int channel);
CountingFields total_drive_direction(const DressedLiouvillian& model);
CountingFields total_bath_direction(const DressedLiouvillian& model);

struct StencilResult {
    cplx d1;
    cplx d2;
    double d1_error = 0.0;
    double d2_error = 0.0;
};

// Fourth-order central differences at h and h/2 combined by one Richardson step.
StencilResult richardson_derivatives(const std::function<cplx(double)>& f, double h);

// Flux Re[i f'] and noise Re[-f''] from a scalar function of the field strength s.
CumulantReport cumulants_from_function(const std::function<cplx(double)>& f, double h, double tolerance,
                                       Method method);

double derivative_norm(const DressedLiouvillian& model, const CountingFields& dir);
double default_step(const DressedLiouvillian& model, const CountingFields& dir, double gap,
                    const CumulantOptions& opt);

CumulantReport cumulants_spectral(const DressedLiouvillian& model, const CountingFields& dir,
                                  const CumulantOptions& opt = {});
// order 1 -> flux, order 2 -> noise; orders >= 3 are refused.
double cumulant_rate(const DressedLiouvillian& model, const CountingFields& dir, int order,
                     const CumulantOptions& opt = {});

struct ConservationReport {
    std::vector<double> mode_flux;
    double drive_flux = 0.0;
    double bath_flux = 0.0;
    double drive_noise = 0.0;
    double bath_noise = 0.0;
    double flux_violation = 0.0;
    double noise_violation = 0.0;
    double mode_sum_violation = 0.0;
    bool passed = false;
};

ConservationReport conservation_check(const DressedLiouvillian& model, double flux_tol = 1e-8,
                                      double noise_tol = 1e-6, const CumulantOptions& opt = {});

double semiclassical_flux(const DressedLiouvillian& model, int mode, int steps_per_period = 512);

struct ValidityWindow {
    double t = 0.0;
    bool infeasible = false;
    std::string note;
};

ValidityWindow validity_window(double g, double gamma, double nbar, double sigma, double eps);

} // namespace pcs
