#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pcs/lambda.hpp"
#include "pcs/perturbation.hpp"

using namespace pcs;

namespace {

LambdaParams lambda_small_signal(int r)
{
    LambdaParams p;
    p.r = r;
    p.omega_s = 1e-3 * p.omega_p0;
    p.set_detuning(0.7);
    return p;
}

SubspacePartition ground_partition()
{
    SubspacePartition part;
    part.stationary = {0};
    for (int i = 1; i < 9; ++i) part.transient.push_back(i);
    return part;
}

// Two-level atom: detuned coherent drive (order 1) and decay counted by xi.
DressedLiouvillian two_level(double omega, double delta, double kappa)
{
    DressedLiouvillian m(4, Basis::Element, 0, 1, "two-level");
    Mat e = Mat::Zero(2, 2), x = Mat::Zero(2, 2), low = Mat::Zero(2, 2);
    e(1, 1) = delta;
    x(0, 1) = x(1, 0) = omega;
    low(0, 1) = std::sqrt(kappa);
    m.add({commutator_generator(e), {}, {0}, {}, 0});
    m.add({jump_part(low), {}, {1}, {}, 0});
    m.add({nojump_part(low), {}, {0}, {}, 0});
    m.add({commutator_generator(x), {}, {0}, {}, 1});
    return m;
}

} // namespace

TEST(Split, SumsToFullLiouvillian)
{
    auto m = lambda_model(lambda_small_signal(1), LambdaFrame::RwaEffective, true);
    CountingFields f{{0.3, -0.4}, {0.2}};
    auto s = split_by_order(m, f);
    EXPECT_LT((s.l0 + s.l1 - m.at(f)).norm(), 1e-12);
    CountingFields z = CountingFields::zeros(2, 1);
    Vec r = stationary_state(split_by_order(m, z).l0, m.trace());
    EXPECT_NEAR(std::abs(r(0) - 1.0), 0.0, 1e-12);
    double rest = 0;
    for (int i : {4, 8}) rest += std::abs(r(i));
    EXPECT_LT(rest, 1e-12);
}

TEST(Nhpt, HermitianRayleighSchroedinger)
{
    Mat l0 = Mat::Zero(3, 3);
    l0(0, 0) = 1.0;
    l0(1, 1) = 2.0;
    l0(2, 2) = 4.0;
    Mat v(3, 3);
    v << 0.3, 0.5, 0.2, 0.5, -0.1, 0.4, 0.2, 0.4, 0.6;
    const double g = 1e-2;
    PerturbationSplit s{l0, g * v};
    double e1 = 1.0 + g * 0.3;
    double e2 = e1 + g * g * (0.25 / (1.0 - 2.0) + 0.04 / (1.0 - 4.0));
    EXPECT_LT(std::abs(nhpt_eigenvalue_near(s, 1.0, 1) - e1), 1e-14);
    EXPECT_LT(std::abs(nhpt_eigenvalue_near(s, 1.0, 2) - e2), 1e-14);
    EXPECT_LT(std::abs(nhpt_eigenvalue_near(s, 1.0, 2) - oracle::exact_eigenvalue_near(l0 + g * v, 1.0)), 1e-5);
}

TEST(Nhpt, ThirdOrderErrorScaling)
{
    std::mt19937 rng(41);
    std::normal_distribution<double> n(0.0, 1.0);
    Mat l0 = Mat::Zero(4, 4), l1(4, 4);
    for (int k = 0; k < 4; ++k) l0(k, k) = cplx(-k - 0.5 * n(rng), n(rng));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) l1(i, j) = cplx(n(rng), n(rng));
    const double norm = spectral_norm(l0);
    std::vector<double> gs, errs;
    for (double g : {1e-4, 3e-4, 1e-3, 3e-3, 1e-2}) {
        PerturbationSplit s{l0, g * l1};
        cplx approx = nhpt_eigenvalue(s, 1, 2);
        cplx exact = oracle::exact_eigenvalue_near(l0 + g * l1, approx);
        double err = std::abs(approx - exact);
        if (g == 1e-3) EXPECT_LE(err, 10 * g * g * g * norm);
        gs.push_back(g);
        errs.push_back(err);
    }
    EXPECT_NEAR(oracle::loglog_slope(gs, errs), 3.0, 0.1);
}

TEST(Nhpt, NearDegenerateTargetRefused)
{
    Mat l0 = Mat::Zero(2, 2);
    l0(0, 0) = -1.0;
    l0(1, 1) = -1.0 - 1e-12;
    try {
        nhpt_eigenvalue({l0, Mat::Identity(2, 2) * 0.1}, 0, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NearDegenerate);
    }
}

TEST(Nhpt, LambdaSystemReproducesClosedForm)
{
    for (int r : {0, 1, 2}) {
        auto p = lambda_small_signal(r);
        auto m = lambda_model(p, LambdaFrame::RwaEffective, true);
        for (double c : {-2.0, -0.5, 0.4, 1.3}) {
            CountingFields f{{c, 0.6 * c}, {0.0}};
            cplx pt = lambda_lambda0_pt2(p, c, 0.6 * c);
            cplx nh = nhpt_eigenvalue_near(split_by_order(m, f), 0.0, 2);
            EXPECT_LT(std::abs(pt - nh), 1e-10 * p.omega_p0) << r << " " << c;
        }
    }
}

TEST(Adiabatic, BlockDiagonalUnchanged)
{
    Mat l = Mat::Zero(3, 3);
    l(0, 0) = -0.5;
    l(1, 1) = -1.0;
    l(2, 2) = -2.0;
    l(1, 2) = 0.3;
    SubspacePartition part{{0}, {1, 2}};
    EXPECT_LT(std::abs(adiabatic_eliminate(l, part)(0, 0) - cplx(-0.5)), 1e-15);
}

TEST(Adiabatic, SingularTransientBlock)
{
    Mat l = Mat::Zero(2, 2);
    l(0, 1) = 1.0;
    try {
        adiabatic_eliminate(l, SubspacePartition{{0}, {1}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularBlock);
    }
}

TEST(Adiabatic, PartitionValidation)
{
    EXPECT_THROW(SubspacePartition({{0, 1}, {1}}).validate(2), Error);
    EXPECT_THROW(SubspacePartition({{0}, {}}).validate(2), Error);
}

TEST(Adiabatic, LambdaSystemMatchesPt2)
{
    for (int r : {0, 1, 2}) {
        auto p = lambda_small_signal(r);
        auto m = lambda_model(p, LambdaFrame::RwaEffective, true);
        for (int k = 0; k < 10; ++k) {
            double c1 = -pi + 2 * pi * (k + 0.5) / 10, c2 = 0.3 * c1 - 0.2;
            CountingFields f{{c1, c2}, {0.0}};
            cplx ae = adiabatic_eliminate(tagged_orders(m, f), ground_partition(), 2)(0, 0);
            cplx pt = lambda_lambda0_pt2(p, c1, c2);
            EXPECT_LT(std::abs(ae - pt), 1e-10 * p.omega_p0) << r << " " << k;
        }
        EXPECT_EQ(lambda_lambda0_pt2(p, 0.0, 0.0), cplx(0.0));
    }
}

TEST(Adiabatic, TwoLevelEffectiveRate)
{
    const double delta = 0.8, kappa = 0.5, xi = 0.7;
    std::vector<double> omegas, errs;
    for (double omega : {1e-2, 2e-2, 4e-2}) {
        auto m = two_level(omega, delta, kappa);
        CountingFields f{{}, {xi}};
        SubspacePartition part{{0}, {1, 2, 3}};
        cplx ae = adiabatic_eliminate(tagged_orders(m, f), part, 2)(0, 0);
        double rate = 2 * omega * omega * kappa / (kappa * kappa + delta * delta);
        EXPECT_LT(std::abs(ae - rate * (std::exp(cplx(0, -xi)) - 1.0)), 1e-12);
        cplx exact = oracle::exact_eigenvalue_near(m.at(f), 0.0);
        omegas.push_back(omega);
        errs.push_back(std::abs(ae - exact));
    }
    EXPECT_NEAR(oracle::loglog_slope(omegas, errs), 4.0, 0.1);
}
