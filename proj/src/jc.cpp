#include "pcs/jc.hpp"

#include <cmath>
#include <sstream>

namespace pcs {

void JcParams::validate() const
{
    std::ostringstream os;
    if (!std::isfinite(eps_delta) || !std::isfinite(omega1) || !std::isfinite(omega2) || !std::isfinite(phi1) ||
        !std::isfinite(phi2) || !std::isfinite(gamma))
        os << " all parameters must be finite;";
    if (omega1 < 0) os << " omega1 must be >= 0;";
    if (omega2 < 0) os << " omega2 must be >= 0;";
    if (gamma < 0) os << " gamma must be >= 0;";
    if (!os.str().empty()) throw Error(ErrorKind::InvalidArgument, "JcParams:" + os.str());
}

namespace {

struct Drive {
    cplx ox, oy;
};

// Omega_x(chi) and Omega_y(chi); the zero-field values are real.
Drive drive(const JcParams& p, double chi1, double chi2)
{
    return {p.omega1 * std::cos(p.phi1 - chi1) + p.omega2 * std::cos(p.phi2 - chi2),
            p.omega1 * std::sin(p.phi1 - chi1) + p.omega2 * std::sin(p.phi2 - chi2)};
}

Mat literal(double eps, double g, cplx ox, cplx oy, cplx oxc, cplx oyc, cplx gm, cplx gp)
{
    const cplx i(0, 1);
    const cplx cm = ox - oxc, cp = ox + oxc, sm = oy - oyc, sp = oy + oyc;
    Mat a(4, 4);
    a << gm, i * cm, i * sm, gm,
         i * cm, -2.0 * g, -eps, sp,
         i * sm, eps, -2.0 * g, -cp,
         -gp, -sp, cp, -gp;
    return a;
}

Mat pauli_x()
{
    Mat s(2, 2);
    s << 0, 1, 1, 0;
    return s;
}

Mat pauli_y()
{
    Mat s(2, 2);
    s << 0, cplx(0, -1), cplx(0, 1), 0;
    return s;
}

Mat pauli_z()
{
    Mat s(2, 2);
    s << 1, 0, 0, -1;
    return s;
}

double drive_weight(const JcParams& p, double chi1, double chi2)
{
    return p.omega1 * p.omega1 + p.omega2 * p.omega2 +
           2.0 * p.omega1 * p.omega2 * std::cos((p.phi2 - chi2) - (p.phi1 - chi1));
}

} // namespace

JcCoeffs jc_coeffs(const JcParams& p, double chi1, double chi2, double xi)
{
    const Drive d0 = drive(p, 0, 0), d = drive(p, chi1, chi2);
    const cplx e = std::exp(cplx(0, -xi));
    return {d0.ox - d.ox, d0.ox + d.ox, d0.oy - d.oy, d0.oy + d.oy, 2.0 * p.gamma * (e - 1.0), 2.0 * p.gamma * (e + 1.0)};
}

Mat jc_liouvillian(const JcParams& p, double chi1, double chi2, double xi)
{
    p.validate();
    const Drive d0 = drive(p, 0, 0), d = drive(p, chi1, chi2);
    const auto c = jc_coeffs(p, chi1, chi2, xi);
    return literal(p.eps_delta, p.gamma, d0.ox, d0.oy, d.ox, d.oy, c.gamma_minus, c.gamma_plus);
}

Mat jc_hamiltonian(const JcParams& p, double chi1, double chi2)
{
    const Drive d = drive(p, chi1, chi2);
    return 0.5 * p.eps_delta * pauli_z() + d.ox * pauli_x() + d.oy * pauli_y();
}

DressedLiouvillian jc_model(const JcParams& p)
{
    p.validate();
    DressedLiouvillian model(4, Basis::Pauli, 2, 1, "jaynes-cummings");
    const Drive d0 = drive(p, 0, 0);
    const double eps = p.eps_delta, g = p.gamma;
    const Mat fixed = literal(eps, g, d0.ox, d0.oy, 0, 0, 0, 0);
    auto lin = [&](cplx oxc, cplx oyc, cplx gm, cplx gp) {
        return Mat(literal(eps, g, d0.ox, d0.oy, oxc, oyc, gm, gp) - fixed);
    };
    model.add({fixed, {}, {}, {}, 0});
    model.add({lin(0, 0, -2.0 * g, 2.0 * g), {}, {}, {}, 0});
    model.add({lin(0, 0, 2.0 * g, 2.0 * g), {0, 0}, {1}, {}, 0});
    const double om[2] = {p.omega1, p.omega2};
    const double ph[2] = {p.phi1, p.phi2};
    for (int k = 0; k < 2; ++k) {
        if (om[k] == 0.0) continue;
        const cplx ep = std::exp(cplx(0, ph[k]));
        std::vector<int> plus(2, 0), minus(2, 0);
        plus[static_cast<std::size_t>(k)] = 1;
        minus[static_cast<std::size_t>(k)] = -1;
        model.add({lin(0.5 * om[k] * ep, om[k] * ep / cplx(0, 2), 0, 0), plus, {0}, {}, 1});
        model.add({lin(0.5 * om[k] * std::conj(ep), -om[k] * std::conj(ep) / cplx(0, 2), 0, 0), minus, {0}, {}, 1});
    }
    std::vector<std::function<Mat(double)>> obs;
    for (int k = 0; k < 2; ++k) {
        const Mat o = om[k] * std::sin(ph[k]) * pauli_x() - om[k] * std::cos(ph[k]) * pauli_y();
        obs.emplace_back([o](double) { return o; });
    }
    model.set_flux_observables(std::move(obs));
    return model;
}

CharPolyCoeffs jc_charpoly_analytic(const JcParams& p, double chi, double xi)
{
    const double w = drive_weight(p, 0, 0);
    const double g = p.gamma, e2 = p.eps_delta * p.eps_delta;
    const cplx eu = std::exp(cplx(0, -(xi - chi)));
    CharPolyCoeffs c;
    c.a = {16.0 * w * g * g * (1.0 - eu), g * (-8.0 * w * eu + 16.0 * w + 16.0 * g * g + 4.0 * e2),
           cplx(4.0 * w + 20.0 * g * g + e2), cplx(8.0 * g), cplx(1.0)};
    return c;
}

double jc_flux_oracle(const JcParams& p)
{
    const double o1 = p.omega1, o2 = p.omega2, e = p.eps_delta, g = p.gamma, ph = p.phi();
    const double num = o1 * (2.0 * e * o2 * std::sin(ph) - 4.0 * g * o1 - 4.0 * g * o2 * std::cos(ph));
    const double den = e * e + 4.0 * g * g + 2.0 * o1 * o1 + 4.0 * o1 * o2 * std::cos(ph) + 2.0 * o2 * o2;
    if (den == 0.0) return 0.0;
    return num / den;
}

cplx jc_noise_exact_form(const JcParams& p)
{
    const double e = p.eps_delta, o1 = p.omega1, o2 = p.omega2, g = p.gamma;
    const double s = std::sin(p.phi()), c = std::cos(p.phi());
    const cplx i(0, 1);
    const double b = e * e + g * g + 2 * o1 * o1 + o1 * o2 * c + 2 * o2 * o2;
    const double cc = 4 * e * e + 16 * g * g + 8 * o1 * o1 + 16 * o1 * o2 * c + 8 * o2 * o2;
    const cplx num = i / 64.0 * g * o1 * o1 * (i * o1 - o2 * s + i * o2 * c) * (8 * e * o2 * s + 10 * g * o1 + 16 * g * o2 * c) * b * cc +
                     1.0 / 8.0 * o1 * o1 * std::pow(0.5 * e * o2 * s + g * o1 + g * o2 * c, 2) *
                         (e * e + 20 * g * g + 4 * o1 * o1 + 8 * o1 * o2 * c + 4 * o2 * o2) * cc -
                     1.0 / 64.0 * o1 * (8.0 * i * e * g * o2 * c + 16 * g * g * o1 - 16.0 * i * g * g * o2 * s + 8 * o1 * o2 * o2 * s * s) * b * b * b;
    const double den = g / 64.0 * b * b * b * cc;
    return num / den;
}

double jc_noise_oracle(const JcParams& p, JcNoiseMode mode)
{
    p.validate();
    const double o1 = p.omega1, o2 = p.omega2, e = p.eps_delta, g = p.gamma, ph = p.phi();
    const double cph = std::cos(ph), sph = std::sin(ph);
    switch (mode) {
    case JcNoiseMode::WeakGamma: {
        if (g == 0.0) throw Error(ErrorKind::InvalidArgument, "weak-gamma noise diverges at gamma = 0");
        const double w = o1 * o1 + 2 * o1 * o2 * cph + o2 * o2;
        const double d = e * e + 2 * o1 * o1 + 4 * o1 * o2 * cph + 2 * o2 * o2;
        return 8 * o1 * o1 * o2 * o2 * w * w * sph * sph / (g * d * d * d);
    }
    case JcNoiseMode::Exact:
        return jc_noise_exact_form(p).real();
    case JcNoiseMode::Reconstructed: {
        // Implicit differentiation of the quartic along chi_1 with phi_1 = 0, phi_2 = phi.
        const cplx i(0, 1);
        const cplx a0p = 8.0 * i * o1 * g * (-2 * o1 * g - 2 * o2 * cph * g + o2 * e * sph);
        const cplx a0pp = 8.0 * i * o1 * (-i * o1 * o2 * o2 * sph * sph - 2.0 * i * o1 * g * g + o2 * cph * e * g + 2 * o2 * g * g * sph);
        const double a1 = 4 * g * (2 * o1 * o1 + 4 * o1 * o2 * cph + 2 * o2 * o2 + e * e + 4 * g * g);
        const cplx a1p = -8.0 * i * o1 * g * (o1 + o2 * cph - i * o2 * sph);
        const double a2 = 4 * o1 * o1 + 8 * o1 * o2 * cph + 4 * o2 * o2 + e * e + 20 * g * g;
        if (a1 == 0.0) throw Error(ErrorKind::NearDegenerate, "a1 = 0: stationary root is degenerate");
        const cplx lp = -a0p / a1;
        const cplx lpp = -(a0pp + 2.0 * a1p * lp + 2.0 * a2 * lp * lp) / a1;
        return (-lpp).real();
    }
    }
    return 0.0;
}

Bloch jc_stationary_bloch(const JcParams& p)
{
    const Drive d0 = drive(p, 0, 0);
    const double ox = d0.ox.real(), oy = d0.oy.real(), e = p.eps_delta, g = p.gamma;
    const double dd = e * e + 4 * g * g;
    const double w = ox * ox + oy * oy;
    if (dd + 2 * w == 0.0) throw Error(ErrorKind::DegenerateStationary, "no unique stationary state");
    if (dd == 0.0) return {0.0, 0.0, 0.0};
    Bloch b;
    b.z = -dd / (dd + 2 * w);
    b.x = 2 * (2 * g * oy + e * ox) * b.z / dd;
    b.y = -2 * (2 * g * ox - e * oy) * b.z / dd;
    return b;
}

Bloch bloch_from_vector(const Vec& v)
{
    const cplx n = v(0);
    return {(v(1) / n).real(), (v(2) / n).real(), (v(3) / n).real()};
}

std::pair<double, double> jc_quasienergies(const JcParams& p, double chi1, double chi2)
{
    const double r = std::sqrt(p.eps_delta * p.eps_delta + 4.0 * std::max(drive_weight(p, chi1, chi2), 0.0));
    return {-0.5 * r, 0.5 * r};
}

std::pair<double, double> jc_quasienergy_derivatives(const JcParams& p, int mode)
{
    if (mode < 0 || mode > 1) throw Error(ErrorKind::InvalidArgument, "mode must be 0 or 1");
    const double delta = p.phi2 - p.phi1;
    const double dw = (mode == 0 ? -2.0 : 2.0) * p.omega1 * p.omega2 * std::sin(delta);
    const double r = std::sqrt(p.eps_delta * p.eps_delta + 4.0 * drive_weight(p, 0, 0));
    if (r == 0.0) return {0.0, 0.0};
    return {-dw / r, dw / r};
}

Vec jc_floquet_state(const JcParams& p, int mu)
{
    if (mu < 0 || mu > 1) throw Error(ErrorKind::InvalidArgument, "Floquet index must be 0 or 1");
    Eigen::SelfAdjointEigenSolver<Mat> es(jc_hamiltonian(p));
    const Vec psi = es.eigenvectors().col(mu);
    return vectorize(psi * psi.adjoint(), Basis::Pauli);
}

namespace {

void check_weights(const std::array<double, 2>& w)
{
    if (w[0] < 0 || w[1] < 0 || std::abs(w[0] + w[1] - 1.0) > 1e-12)
        throw Error(ErrorKind::InvalidArgument, "Floquet weights must be nonnegative and sum to 1");
}

} // namespace

ClosedStats jc_closed_statistics(const JcParams& p, const std::array<double, 2>& weights, int mode, double t)
{
    check_weights(weights);
    const auto d = jc_quasienergy_derivatives(p, mode);
    const double m1 = d.first * t, m2 = d.second * t;
    ClosedStats s;
    s.mean = weights[0] * m1 + weights[1] * m2;
    s.variance = weights[0] * m1 * m1 + weights[1] * m2 * m2 - s.mean * s.mean;
    if (weights[0] == 0.0 || weights[1] == 0.0) s.variance = 0.0;
    return s;
}

cplx closed_mgf(const JcParams& p, const std::array<double, 2>& weights, const std::vector<double>& chi, double t)
{
    check_weights(weights);
    if (chi.size() != 2) throw Error(ErrorKind::DimensionMismatch, "closed_mgf expects two counting fields");
    const auto e0 = jc_quasienergies(p, 0, 0);
    const auto ep = jc_quasienergies(p, chi[0], chi[1]);
    const auto em = jc_quasienergies(p, -chi[0], -chi[1]);
    const double z[2] = {e0.first, e0.second}, a[2] = {ep.first, ep.second}, b[2] = {em.first, em.second};
    cplx m = 0.0;
    for (int mu = 0; mu < 2; ++mu) {
        const cplx left = std::exp(cplx(0, (z[mu] - a[mu]) * t));
        const cplx right = std::conj(std::exp(cplx(0, (z[mu] - b[mu]) * t)));
        m += 0.5 * weights[static_cast<std::size_t>(mu)] * (left + right);
    }
    return m;
}

double jc_floquet_switching_noise(const JcParams& p)
{
    if (p.eps_delta != 0.0) throw Error(ErrorKind::InvalidArgument, "switching heuristic requires eps_delta = 0");
    if (!(p.gamma > 0)) throw Error(ErrorKind::InvalidArgument, "switching heuristic requires gamma > 0");
    const double o1 = p.omega1, o2 = p.omega2, ph = p.phi();
    const double den = o1 * o1 + o2 * o2 + 2 * o1 * o2 * std::cos(ph);
    if (den == 0.0) return 0.0;
    const double dt = 1.0 / p.gamma;
    const double var = 0.5 * o1 * o1 * o2 * o2 * std::sin(ph) / den * dt * dt;
    return var / dt;
}

} // namespace pcs
