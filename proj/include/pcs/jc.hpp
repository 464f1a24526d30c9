#pragma once

#include <array>
#include <utility>

#include "pcs/charpoly.hpp"
#include "pcs/dressed.hpp"

namespace pcs {

struct JcParams {
    double eps_delta = 0.0;
    double omega1 = 1.0;
    double omega2 = 1.0;
    double phi1 = 0.0;
    double phi2 = 0.0;
    double gamma = 0.0;

    void validate() const;
    double phi() const { return phi2 - phi1; }
};

// Two drive modes (chi_1, chi_2) and one bath channel (xi), Pauli basis (rho0, rhox, rhoy, rhoz).
DressedLiouvillian jc_model(const JcParams& p);
Mat jc_liouvillian(const JcParams& p, double chi1, double chi2, double xi);
Mat jc_hamiltonian(const JcParams& p, double chi1 = 0.0, double chi2 = 0.0);

struct JcCoeffs {
    cplx c_minus, c_plus, s_minus, s_plus;
    cplx gamma_minus, gamma_plus;
};

JcCoeffs jc_coeffs(const JcParams& p, double chi1, double chi2, double xi);

// Quartic in z for chi_1 = chi_2 = chi.
CharPolyCoeffs jc_charpoly_analytic(const JcParams& p, double chi, double xi);

double jc_flux_oracle(const JcParams& p);

enum class JcNoiseMode { WeakGamma, Exact, Reconstructed };

double jc_noise_oracle(const JcParams& p, JcNoiseMode mode);
// Exact closed-form noise expression; complex in general.
cplx jc_noise_exact_form(const JcParams& p);

struct Bloch {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

Bloch jc_stationary_bloch(const JcParams& p);
Bloch bloch_from_vector(const Vec& v);

// (E_1, E_2) with E_1 <= E_2.
std::pair<double, double> jc_quasienergies(const JcParams& p, double chi1, double chi2);
// d E_mu / d chi_k at zero fields.
std::pair<double, double> jc_quasienergy_derivatives(const JcParams& p, int mode);
// Pauli vector of the projector on Floquet state mu (0 lower, 1 upper) at zero fields.
Vec jc_floquet_state(const JcParams& p, int mu);

struct ClosedStats {
    double mean = 0.0;
    double variance = 0.0;
};

ClosedStats jc_closed_statistics(const JcParams& p, const std::array<double, 2>& weights, int mode, double t);
cplx closed_mgf(const JcParams& p, const std::array<double, 2>& weights, const std::vector<double>& chi, double t);

// Per-unit-time variance of the interval-switching picture, with Dt = 1/gamma.
double jc_floquet_switching_noise(const JcParams& p);

} // namespace pcs
