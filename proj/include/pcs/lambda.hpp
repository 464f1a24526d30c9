#pragma once

#include <string>
#include <vector>

#include "pcs/counting.hpp"

namespace pcs {

double bessel_j(int n, double x);
// k-th positive zero of J_n (k >= 1).
double bessel_j_zero(int n, int k);

struct LambdaParams {
    double eps_a = 0.0;
    double eps_b = 0.0;
    double eps_c = 0.0;
    double omega_p = 0.0;
    double omega_1 = 0.0;
    double omega_d = 40.0;
    int r = 0;
    double omega_s = 0.02;
    double omega_p0 = 1.0;
    double omega_p1 = 80.0;
    double gamma = 0.2;
    double phi1 = pi / 2;
    double phi2 = 0.0;

    void validate() const;
    double eps_b_delta() const { return eps_b + omega_p - omega_1; }
    double eps_c_delta() const { return eps_c - omega_1; }
    double omega_2() const { return omega_1 + r * omega_d; }
    double bessel_arg() const { return omega_p1 / (2.0 * omega_d); }
    bool resonant_pump(double tol = 1e-12) const;
    bool rwa_ok() const;
    std::string rwa_advisory() const;
    // Detuning omega_Delta = eps_c - omega_1 realized by moving omega_1.
    void set_detuning(double w) { omega_1 = eps_c - w; }
};

enum class LambdaFrame { RwaEffective, RotatingFramePeriodic };

// Element basis over (a, b, c); two drive modes, one bath channel attached to both decays.
DressedLiouvillian lambda_model(const LambdaParams& p, LambdaFrame frame, bool override_rwa = false);

struct EffectiveCouplings {
    cplx omega_b_chi;
    cplx omega_c_chi;
    double theta = 0.0;
    double eps_tilde_a = 0.0;
    double eps_tilde_b = 0.0;
    double eps_tilde_c = 0.0;
};

EffectiveCouplings effective_couplings(const LambdaParams& p, double chi1, double chi2);
cplx lambda_lambda0_pt2(const LambdaParams& p, double chi1, double chi2);

enum class LambdaSweep { Detuning, Amplitude };

struct LambdaScanRow {
    double value = 0.0;
    CumulantReport mode1;
    CumulantReport mode2;
    std::string error;
};

std::vector<LambdaScanRow> lambda_flux_scan(const LambdaParams& p, LambdaSweep sweep, const std::vector<double>& grid,
                                            Method method, const CumulantOptions& opt = {}, int threads = 1);

CumulantReport lambda_cumulants(const LambdaParams& p, int mode, Method method, const CumulantOptions& opt = {});

} // namespace pcs
