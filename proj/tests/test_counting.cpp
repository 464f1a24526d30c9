#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pcs/charpoly.hpp"
#include "pcs/counting.hpp"
#include "pcs/jc.hpp"

using namespace pcs;

namespace {

JcParams jc(double eps, double o1, double o2, double phi, double gamma)
{
    JcParams p;
    p.eps_delta = eps;
    p.omega1 = o1;
    p.omega2 = o2;
    p.phi2 = phi;
    p.gamma = gamma;
    return p;
}

Vec excited()
{
    Vec v(4);
    v << 1, 0, 0, 1;
    return v;
}

CountingFields fields(double c1, double c2, double xi) { return CountingFields{{c1, c2}, {xi}}; }

} // namespace

TEST(Evolve, ZeroFieldsPhysical)
{
    auto m = jc_model(jc(0.3, 1.0, 0.7, 0.4, 0.05));
    Vec v = evolve_generalized(m, CountingFields::zeros(2, 1), excited(), 7.3);
    Mat rho = devectorize(v, Basis::Pauli);
    EXPECT_LT((rho - rho.adjoint()).norm(), 1e-12);
    EXPECT_NEAR(std::abs(rho.trace() - 1.0), 0.0, 1e-12);
}

TEST(Evolve, BathFieldOnlyNormalized)
{
    auto m = jc_model(jc(0.3, 1.0, 0.7, 0.4, 0.05));
    Vec v = evolve_generalized(m, CountingFields::zeros(2, 1), excited(), 4.0);
    EXPECT_NEAR(std::abs((m.trace() * v)(0) - 1.0), 0.0, 1e-12);
    Vec w = evolve_generalized(m, fields(0, 0, 0.8), excited(), 4.0);
    EXPECT_LT(std::abs((m.trace() * w)(0)), 1.0);
}

TEST(Evolve, SingleFloquetBranchDoesNotDephase)
{
    auto p = jc(0.0, 1.0, 1.0, pi / 2, 0.0);
    auto m = jc_model(p);
    Vec rho0 = jc_floquet_state(p, 0);
    const double chi = 0.4;
    Eigen::SelfAdjointEigenSolver<Mat> h0(jc_hamiltonian(p)), hc(jc_hamiltonian(p, chi, 0.0));
    Vec psi = h0.eigenvectors().col(0);
    double e0 = h0.eigenvalues()(0);
    double overlap = std::norm(hc.eigenvectors().col(0).dot(psi));
    for (double t : {1.0, 10.0, 37.5, 400.0}) {
        cplx expect = 0.0;
        for (int nu = 0; nu < 2; ++nu)
            expect += std::norm(hc.eigenvectors().col(nu).dot(psi)) * std::exp(cplx(0, -(hc.eigenvalues()(nu) - e0) * t));
        Vec v = evolve_generalized(m, fields(chi, 0.0, 0.0), rho0, t);
        cplx tr = (m.trace() * v)(0);
        EXPECT_LT(std::abs(tr - expect), 1e-8);
        EXPECT_GE(std::abs(tr), 2 * overlap - 1 - 1e-8);
    }
    for (double t : {1.0, 37.5}) {
        Vec v = evolve_generalized(m, fields(1e-3, 0.0, 0.0), rho0, t);
        EXPECT_NEAR(std::abs((m.trace() * v)(0)), 1.0, 1e-6);
    }
}

TEST(Mgf, ZeroFieldsIsOne)
{
    auto m = jc_model(jc(0.1, 1.0, 1.0, 0.3, 0.01));
    for (double t : {0.0, 1.0, 50.0}) EXPECT_NEAR(std::abs(dynamical_mgf(m, CountingFields::zeros(2, 1), excited(), t).value - 1.0), 0.0, 1e-12);
}

TEST(Mgf, ConjugationSymmetry)
{
    auto m = jc_model(jc(0.1, 1.0, 0.8, 0.9, 0.05));
    auto a = dynamical_mgf(m, fields(0.3, -0.2, 0), excited(), 6.0).value;
    auto b = dynamical_mgf(m, fields(-0.3, 0.2, 0), excited(), 6.0).value;
    EXPECT_LT(std::abs(a - std::conj(b)), 1e-12);
}

TEST(Mgf, TwoPiPeriodicity)
{
    auto m = jc_model(jc(0.1, 1.0, 0.8, 0.9, 0.05));
    auto a = dynamical_mgf(m, fields(0.3, -0.2, 0.1), excited(), 6.0).value;
    auto b = dynamical_mgf(m, fields(0.3 + 2 * pi, -0.2, 0.1 - 2 * pi), excited(), 6.0).value;
    EXPECT_LT(std::abs(a - b), 1e-10);
}

TEST(Mgf, LongTimeAsymptotics)
{
    auto p = jc(0.2, 1.0, 0.9, pi / 3, 0.1);
    auto m = jc_model(p);
    double t = 50.0 / p.gamma;
    auto branch = [&](const CountingFields& f) {
        auto sd = spectral_decompose(m.at(f));
        cplx l0 = track_lambda0(m, f);
        Eigen::Index k = 0;
        for (Eigen::Index i = 1; i < sd.eigenvalues.size(); ++i)
            if (std::abs(sd.eigenvalues(i) - l0) < std::abs(sd.eigenvalues(k) - l0)) k = i;
        cplx c = (m.trace() * sd.right.col(k))(0) * (sd.left.row(k) * excited())(0);
        return c * std::exp(sd.eigenvalues(k) * t);
    };
    for (double chi : {0.01, 0.03}) {
        auto f = fields(chi, 0, 0), g = fields(-chi, 0, 0);
        cplx asym = 0.5 * branch(f) + 0.5 * std::conj(branch(g));
        cplx num = dynamical_mgf(m, f, excited(), t).value;
        EXPECT_LT(std::abs(num - asym) / std::abs(asym), 1e-4);
    }
}

TEST(InitialMgf, Examples)
{
    EXPECT_EQ(initial_mgf(std::vector<double>{10.0}, {0.0}), cplx(1.0));
    cplx v = initial_mgf(std::vector<double>{10.0}, {pi});
    EXPECT_NEAR(std::abs(v - std::exp(-200.0)) / std::exp(-200.0), 0.0, 1e-10);
    EXPECT_EQ(initial_mgf(InitialLaw::gaussian({1000}, {100}), {0.0}), cplx(1.0));
    cplx g = initial_mgf(InitialLaw::gaussian({1000}, {100}), {0.01});
    EXPECT_LT(std::abs(g - std::exp(cplx(-0.5 * 100 * 1e-4, -10.0))), 1e-14);
}

TEST(Track, ZeroFields)
{
    auto m = jc_model(jc(0.1, 1.0, 1.0, 0.0, 0.001));
    EXPECT_LT(std::abs(track_lambda0(m, CountingFields::zeros(2, 1))), 1e-10);
}

TEST(Track, FieldDifferenceIdentity)
{
    auto m = jc_model(jc(0.1, 1.0, 1.0, pi / 4, 0.1));
    cplx a = track_lambda0(m, fields(0.1, 0.1, 0.3));
    cplx b = track_lambda0(m, fields(0.0, 0.0, 0.2));
    EXPECT_LT(std::abs(a - b), 1e-10);
}

TEST(Track, FirstOrderRoot)
{
    auto m = jc_model(jc(0.3, 1.0, 0.5, pi / 3, 0.2));
    std::vector<double> hs{1e-2, 5e-3, 2.5e-3}, err;
    for (double h : hs) {
        auto f = fields(h, 0, 0);
        auto c = char_poly(m.at(f));
        err.push_back(std::abs(track_lambda0(m, f) - (-c[0] / c[1])));
    }
    EXPECT_NEAR(oracle::loglog_slope(hs, err), 2.0, 0.1);
}

TEST(Track, TwoPiPeriodicity)
{
    auto m = jc_model(jc(0.3, 1.0, 0.5, pi / 3, 0.2));
    cplx a = track_lambda0(m, fields(0.7, 0, 0));
    cplx b = track_lambda0(m, fields(0.7 + 2 * pi, 0, 0));
    EXPECT_LT(std::abs(a - b), 1e-10);
    Lambda0Local local(m);
    EXPECT_LT(std::abs(local(fields(0.05, 0, 0)) - local(fields(0.05 + 2 * pi, 0, 0))), 1e-10);
}

TEST(Cumulants, DecoupledMode)
{
    auto m = jc_model(jc(0.3, 1.0, 0.0, 0.0, 0.1));
    auto r = cumulants_spectral(m, drive_direction(m, 1));
    EXPECT_EQ(r.flux, 0.0);
    EXPECT_EQ(r.noise, 0.0);
}

TEST(Cumulants, JosephsonFluxLimit)
{
    auto m = jc_model(jc(1.0, 1.0, 1.0, pi / 2, 1e-4));
    EXPECT_NEAR(cumulants_spectral(m, drive_direction(m, 0)).flux, 0.4, 1e-3);
}

TEST(Cumulants, WeakGammaNoise)
{
    double g = 1e-3;
    auto m = jc_model(jc(0.0, 1.0, 1.0, pi / 2, g));
    double s = cumulants_spectral(m, drive_direction(m, 0)).noise;
    EXPECT_NEAR(s * 2 * g, 1.0, 0.01);
}

TEST(Cumulants, AgreesWithDrazinOracle)
{
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        auto p = jc(4 * u(rng) - 2, 0.2 + u(rng), 3 * u(rng), 2 * pi * u(rng), std::pow(10.0, -3 * u(rng)));
        auto m = jc_model(p);
        for (int k = 0; k < 2; ++k) {
            auto dir = drive_direction(m, k);
            auto r = cumulants_spectral(m, dir);
            auto o = oracle::drazin_rates(m, dir);
            EXPECT_LT(oracle::rel(r.flux, o.flux), 1e-7) << trial;
            EXPECT_LT(oracle::rel(r.noise, o.noise), 1e-6) << trial;
            EXPECT_GE(r.noise, -1e-10);
        }
        auto b = oracle::drazin_rates(m, bath_direction(m, 0));
        EXPECT_LT(oracle::rel(cumulants_spectral(m, bath_direction(m, 0)).noise, b.noise), 1e-6);
    }
}

TEST(Cumulants, HigherOrderRefused)
{
    auto m = jc_model(jc(0.3, 1.0, 1.0, 0.0, 0.1));
    try {
        cumulant_rate(m, drive_direction(m, 0), 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Refused);
    }
    EXPECT_DOUBLE_EQ(cumulant_rate(m, drive_direction(m, 0), 1), cumulants_spectral(m, drive_direction(m, 0)).flux);
}

TEST(Conservation, JcFig2Parameters)
{
    for (double phi : {0.0, pi / 4, pi / 2}) {
        auto m = jc_model(jc(0.1, 1.0, 1.0, phi, 0.001));
        auto c = conservation_check(m);
        EXPECT_LE(c.flux_violation, 1e-8);
        EXPECT_LE(c.noise_violation, 1e-6);
        EXPECT_TRUE(c.passed);
    }
}

TEST(Conservation, NoDrive)
{
    auto m = jc_model(jc(0.1, 0.0, 0.0, 0.0, 0.1));
    auto c = conservation_check(m);
    EXPECT_EQ(c.drive_flux, 0.0);
    EXPECT_NEAR(c.bath_flux, 0.0, 1e-14);
}

TEST(Semiclassical, Examples)
{
    auto m0 = jc_model(jc(0.1, 0.0, 1.0, 0.3, 0.1));
    EXPECT_NEAR(semiclassical_flux(m0, 0), 0.0, 1e-15);
    auto md = jc_model(jc(0.1, 0.0, 0.0, 0.3, 0.1));
    EXPECT_NEAR(semiclassical_flux(md, 1), 0.0, 1e-15);
    auto m = jc_model(jc(-0.4, 1.0, 1.3, 1.1, 0.02));
    for (int k = 0; k < 2; ++k)
        EXPECT_LT(oracle::rel(semiclassical_flux(m, k), cumulants_spectral(m, drive_direction(m, k)).flux), 1e-6);
}

TEST(ValidityWindow, Examples)
{
    auto w = validity_window(1.0, 0.001, 1e4, 100.0, 0.01);
    EXPECT_DOUBLE_EQ(w.t, 100.0);
    EXPECT_FALSE(w.infeasible);
    auto bad = validity_window(1.0, 0.001, 1e4, 1000.0, 0.01);
    EXPECT_TRUE(bad.infeasible);
    EXPECT_EQ(bad.t, 0.0);
    auto drive = validity_window(2.0, 0.0, 1e4, 100.0, 0.01);
    EXPECT_DOUBLE_EQ(drive.t, 50.0);
}
