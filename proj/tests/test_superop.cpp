#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pcs/jc.hpp"
#include "pcs/lambda.hpp"
#include "pcs/superop.hpp"

using namespace pcs;

namespace {

Mat random_hermitian(int d, std::mt19937& rng)
{
    std::normal_distribution<double> g(0.0, 1.0);
    Mat h(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) h(i, j) = cplx(g(rng), g(rng));
    return (h + h.adjoint()) / 2.0;
}

JcParams fig2_point()
{
    JcParams p;
    p.eps_delta = 0.1;
    p.omega1 = 1.0;
    p.omega2 = 1.0;
    p.gamma = 0.001;
    return p;
}

} // namespace

TEST(Vectorize, PauliHalfIdentity)
{
    Vec v = vectorize(Mat::Identity(2, 2) / 2.0, Basis::Pauli);
    EXPECT_NEAR(std::abs(v(0) - 1.0), 0.0, 1e-15);
    for (int k = 1; k < 4; ++k) EXPECT_NEAR(std::abs(v(k)), 0.0, 1e-15);
}

TEST(Vectorize, ZeroMatrix)
{
    EXPECT_EQ(vectorize(Mat::Zero(3, 3), Basis::Element).norm(), 0.0);
    EXPECT_EQ(vectorize(Mat::Zero(2, 2), Basis::Pauli).norm(), 0.0);
}

TEST(Vectorize, RoundTrip)
{
    std::mt19937 rng(7);
    Mat h = random_hermitian(3, rng);
    EXPECT_LT((devectorize(vectorize(h, Basis::Element), Basis::Element) - h).norm(), 1e-15);
    Mat h2 = random_hermitian(2, rng);
    EXPECT_LT((devectorize(vectorize(h2, Basis::Pauli), Basis::Pauli) - h2).norm(), 1e-14);
}

TEST(Vectorize, Functionals)
{
    std::mt19937 rng(8);
    Mat rho = random_hermitian(3, rng);
    Mat op = random_hermitian(3, rng);
    EXPECT_LT(std::abs((trace_functional(3, Basis::Element) * vectorize(rho, Basis::Element))(0) - rho.trace()), 1e-13);
    EXPECT_LT(std::abs((observable_functional(op, Basis::Element) * vectorize(rho, Basis::Element))(0) -
                       (op * rho).trace()),
              1e-12);
}

TEST(Spectral, DiagonalMatrix)
{
    Mat a = Mat::Zero(4, 4);
    for (int k = 0; k < 4; ++k) a(k, k) = -k;
    auto sd = spectral_decompose(a);
    for (int k = 0; k < 4; ++k) {
        EXPECT_NEAR(std::abs(sd.eigenvalues(k) - cplx(-k)), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(sd.right(k, k)), 1.0, 1e-14);
    }
}

TEST(Spectral, JordanBlockIsDefective)
{
    Mat a = Mat::Zero(2, 2);
    a(0, 1) = 1.0;
    try {
        spectral_decompose(a);
        FAIL() << "expected a defective-matrix error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Defective);
    }
}

TEST(Spectral, JcZeroFieldsSingleStationaryEigenvalue)
{
    Mat l = jc_liouvillian(fig2_point(), 0, 0, 0);
    auto sd = spectral_decompose(l);
    EXPECT_LT(std::abs(sd.eigenvalues(0)), 1e-10);
    for (int k = 1; k < 4; ++k) EXPECT_LT(sd.eigenvalues(k).real(), 0.0);
}

TEST(Spectral, RandomLiouvillians)
{
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        int d = 2 + trial % 2;
        Mat l = oracle::random_liouvillian(d, rng);
        auto sd = spectral_decompose(l);
        Mat bi = sd.left * sd.right;
        EXPECT_LT((bi - Mat::Identity(l.rows(), l.cols())).cwiseAbs().maxCoeff(), 1e-10);
        Mat rec = sd.right * sd.eigenvalues.asDiagonal() * sd.left;
        EXPECT_LT((rec - l).norm() / l.norm(), 1e-8);
        RowVec tr = trace_functional(d, Basis::Element);
        EXPECT_LT((tr * l).cwiseAbs().maxCoeff(), 1e-12 * l.cwiseAbs().maxCoeff());
        EXPECT_LT(std::abs(sd.eigenvalues(0)), 1e-10 * sd.norm);
        for (Eigen::Index k = 1; k < l.rows(); ++k) EXPECT_LT(sd.eigenvalues(k).real(), 0.0);
    }
}

TEST(Stationary, ResonantWeakDecayIsMixed)
{
    JcParams p;
    p.phi2 = pi / 2;
    p.gamma = 1e-6;
    Vec v = stationary_state(jc_liouvillian(p, 0, 0, 0), trace_functional(2, Basis::Pauli));
    auto b = bloch_from_vector(v);
    EXPECT_LT(std::hypot(b.x, b.y, b.z), 1e-5);
}

TEST(Stationary, PureDecayGroundState)
{
    JcParams p;
    p.omega1 = 0;
    p.omega2 = 0;
    p.gamma = 0.3;
    p.eps_delta = 0.4;
    Vec v = stationary_state(jc_liouvillian(p, 0, 0, 0), trace_functional(2, Basis::Pauli));
    EXPECT_NEAR(v(3).real(), -1.0, 1e-12);
}

TEST(Stationary, ResidualBound)
{
    Mat l = jc_liouvillian(fig2_point(), 0, 0, 0);
    Vec v = stationary_state(l, trace_functional(2, Basis::Pauli));
    EXPECT_LE((l * v).norm(), 1e-10 * spectral_norm(l));
    auto b = bloch_from_vector(v), c = jc_stationary_bloch(fig2_point());
    EXPECT_NEAR(b.x, c.x, 1e-8);
    EXPECT_NEAR(b.y, c.y, 1e-8);
    EXPECT_NEAR(b.z, c.z, 1e-8);
}

TEST(Propagate, ZeroTime)
{
    Mat l = jc_liouvillian(fig2_point(), 0, 0, 0);
    Vec rho = vectorize(Mat::Identity(2, 2) / 2.0, Basis::Pauli);
    EXPECT_EQ((propagate(l, rho, 0.0).state - rho).norm(), 0.0);
}

TEST(Propagate, PureDecay)
{
    JcParams p;
    p.omega1 = 0;
    p.omega2 = 0;
    p.gamma = 0.05;
    Mat l = jc_liouvillian(p, 0, 0, 0);
    Vec up(4);
    up << 1, 0, 0, 1;
    for (double t : {0.5, 1.0 / (4 * p.gamma), 20.0}) {
        Vec v = propagate(l, up, t).state;
        EXPECT_NEAR(v(3).real(), -1.0 + 2.0 * std::exp(-4 * p.gamma * t), 1e-12);
    }
}

TEST(Propagate, SemigroupAndPathEquivalence)
{
    std::mt19937 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        Mat l = oracle::random_liouvillian(3, rng);
        Vec rho = vectorize(Mat::Identity(3, 3) / 3.0, Basis::Element);
        Vec a = propagate(l, rho, 1.7).state;
        Vec b = propagate(l, propagate(l, rho, 0.6).state, 1.1).state;
        EXPECT_LT((a - b).norm(), 1e-9);
        Vec s = propagate(l, rho, 1.7, PropagateMethod::Series).state;
        EXPECT_LT((a - s).norm(), 1e-8);
    }
}

TEST(Propagate, TraceConservedOnModels)
{
    Mat l = jc_liouvillian(fig2_point(), 0, 0, 0);
    RowVec tr = trace_functional(2, Basis::Pauli);
    Vec rho(4);
    rho << 1, 0, 0, 1;
    for (double t : {1.0, 100.0, 1e3, 1e5}) {
        EXPECT_NEAR(std::abs((tr * propagate(l, rho, t).state)(0) - 1.0), 0.0, 1e-10);
        Vec s = propagate(l, rho, t, PropagateMethod::Series).state;
        if (t <= 1e3) EXPECT_LT((s - propagate(l, rho, t).state).norm(), 1e-8);
    }
    LambdaParams lp;
    auto lm = lambda_model(lp, LambdaFrame::RwaEffective, true);
    Mat ll = lm.base();
    Vec r0 = vectorize(Mat::Identity(3, 3) / 3.0, Basis::Element);
    for (double t : {1.0, 50.0, 5e3})
        EXPECT_NEAR(std::abs((lm.trace() * propagate(ll, r0, t).state)(0) - 1.0), 0.0, 1e-10);
}

TEST(Monodromy, ConstantGenerator)
{
    Mat l = jc_liouvillian(fig2_point(), 0, 0, 0);
    double tau = 0.7;
    auto m = one_period_propagator([&](double) { return l; }, tau);
    EXPECT_LT((m.u - propagator(l, tau)).norm(), 1e-10);
    auto eg = effective_liouvillian(m.u, tau);
    EXPECT_LT((eg.generator - l).norm(), 1e-8);
}

TEST(Monodromy, ZeroGenerator)
{
    auto m = one_period_propagator([](double) { return Mat(Mat::Zero(4, 4)); }, 1.0);
    EXPECT_EQ((m.u - Mat::Identity(4, 4)).norm(), 0.0);
}

TEST(Monodromy, LambdaPeriodicStepDoubling)
{
    LambdaParams p;
    p.set_detuning(0.5);
    auto model = lambda_model(p, LambdaFrame::RotatingFramePeriodic);
    CountingFields f{{0.2, -0.1}, {0.0}};
    Lambda0Options a, b;
    a.steps_per_period = 512;
    b.steps_per_period = 1024;
    cplx l1 = Lambda0Local(model, a)(f);
    cplx l2 = Lambda0Local(model, b)(f);
    EXPECT_LT(std::abs(l1 - l2) / std::abs(l2), 1e-8);
}
