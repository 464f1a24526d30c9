#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "pcs/distributions.hpp"
#include "pcs/jc.hpp"

using namespace pcs;

namespace {

JcParams fig3b()
{
    JcParams p;
    p.eps_delta = 0.1;
    p.omega1 = 1.0;
    p.omega2 = 1.0;
    p.gamma = 0.1;
    return p;
}

Vec ground()
{
    Mat g = Mat::Zero(2, 2);
    g(1, 1) = 1.0;
    return vectorize(g, Basis::Pauli);
}

InitialLaw gaussian500()
{
    return InitialLaw::gaussian({500.0, 500.0}, {100.0, 100.0});
}

ReconstructOptions grid(int n, int threads = 1)
{
    ReconstructOptions o;
    o.grid = n;
    o.threads = threads;
    return o;
}

double poisson_pmf(double mean, int n)
{
    return std::exp(n * std::log(mean) - mean - std::lgamma(n + 1.0));
}

} // namespace

TEST(Reconstruct, NormalizationAndMoments)
{
    auto m = jc_model(fig3b());
    const auto law = gaussian500();
    for (double t : {0.0, 10.0, 30.0}) {
        auto d = reconstruct(m, ground(), law, t, {0}, grid(256));
        EXPECT_NEAR(d.total(), 1.0, 1e-6);
        MgfFn mgf = [&](const std::vector<double>& chi) {
            auto f = CountingFields::zeros(2, 1);
            f.chi[0] = chi[0];
            return dynamical_mgf(m, f, ground(), t).value * initial_mgf(law, f.chi);
        };
        auto mom = mgf_moments(mgf, 1, 0);
        EXPECT_LT(oracle::rel(d.mean(0), mom.mean), 1e-3) << t;
        EXPECT_LT(oracle::rel(d.variance(0), mom.variance), 1e-3) << t;
        EXPECT_LT(d.clipped_mass, 1e-6);
    }
}

TEST(Reconstruct, ZeroCouplingReproducesPoisson)
{
    JcParams p = fig3b();
    p.omega1 = 0.0;
    p.omega2 = 0.0;
    auto m = jc_model(p);
    const auto law = InitialLaw::poisson({10.0, 10.0});
    for (double t : {0.0, 7.0, 40.0}) {
        auto d = reconstruct(m, ground(), law, t, {1}, grid(256));
        double worst = 0.0;
        for (int n = d.n_min[0]; n < d.n_min[0] + d.size[0]; ++n) {
            const double want = n < 0 ? 0.0 : poisson_pmf(100.0, n);
            worst = std::max(worst, std::abs(d.at(n) - want));
        }
        EXPECT_LT(worst, 1e-10) << t;
    }
}

TEST(Reconstruct, DoublingGridChangesNothing)
{
    auto m = jc_model(fig3b());
    auto a = reconstruct(m, ground(), gaussian500(), 20.0, {0}, grid(256));
    auto b = reconstruct(m, ground(), gaussian500(), 20.0, {0}, grid(512));
    double worst = 0.0;
    for (int n = b.n_min[0]; n < b.n_min[0] + b.size[0]; ++n) worst = std::max(worst, std::abs(a.at(n) - b.at(n)));
    EXPECT_LT(worst, 1e-8);
}

TEST(Reconstruct, WindowOverflowSuggestsGrid)
{
    auto m = jc_model(fig3b());
    const auto law = InitialLaw::gaussian({500.0, 500.0}, {1e4, 1e4});
    try {
        reconstruct(m, ground(), law, 1.0, {0}, grid(128));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::WindowOverflow);
        const std::string msg = e.what();
        const auto at = msg.find("grid >= ");
        ASSERT_NE(at, std::string::npos) << msg;
        const int suggested = std::stoi(msg.substr(at + 8));
        EXPECT_GE(suggested, 2048);
        auto d = reconstruct(m, ground(), law, 1.0, {0}, grid(suggested));
        EXPECT_NEAR(d.total(), 1.0, 1e-6);
    }
}

TEST(Reconstruct, InvalidArguments)
{
    auto m = jc_model(fig3b());
    EXPECT_THROW(reconstruct(m, ground(), gaussian500(), 1.0, {0}, grid(200)), Error);
    EXPECT_THROW(reconstruct(m, ground(), gaussian500(), 1.0, {0}, grid(64)), Error);
    EXPECT_THROW(reconstruct(m, ground(), gaussian500(), 1.0, {0, 0}, grid(128)), Error);
    EXPECT_THROW(reconstruct(m, ground(), gaussian500(), 1.0, {2}, grid(128)), Error);
    EXPECT_THROW(reconstruct(m, ground(), InitialLaw::poisson({10.0}), 1.0, {0}, grid(128)), Error);
}

TEST(Reconstruct, ThreadsDoNotChangeResult)
{
    auto m = jc_model(fig3b());
    auto a = reconstruct(m, ground(), gaussian500(), 15.0, {0, 1}, grid(128, 1));
    auto b = reconstruct(m, ground(), gaussian500(), 15.0, {0, 1}, grid(128, 3));
    EXPECT_EQ(a.p, b.p);
}

TEST(Reconstruct, JointMarginalsMatchSingleMode)
{
    auto m = jc_model(fig3b());
    auto joint = reconstruct(m, ground(), gaussian500(), 10.0, {0, 1}, grid(128));
    EXPECT_NEAR(joint.total(), 1.0, 1e-6);
    for (int k : {0, 1}) {
        auto single = reconstruct(m, ground(), gaussian500(), 10.0, {k}, grid(128));
        EXPECT_LT(oracle::rel(joint.mean(k), single.mean(0)), 1e-9);
        EXPECT_LT(oracle::rel(joint.variance(k), single.variance(0)), 1e-7);
    }
    double asym = 0.0;
    for (int i = 450; i < 550; ++i)
        for (int j = 450; j < 550; ++j) asym = std::max(asym, std::abs(joint.at(i, j) - joint.at(j, i)));
    EXPECT_LT(asym, 1e-10);
}

TEST(Reconstruct, Fig3bTranslatesPreservingShape)
{
    auto m = jc_model(fig3b());
    double last = 500.0;
    for (double t : {10.0, 30.0, 50.0}) {
        auto d = reconstruct(m, ground(), gaussian500(), t, {0}, grid(256));
        EXPECT_LT(d.mean(0), last) << t;
        EXPECT_LE(std::abs(d.variance(0) / 100.0 - 1.0), 0.05) << t;
        last = d.mean(0);
    }
}

TEST(ClosedDistribution, BalancedSuperpositionIsBimodal)
{
    JcParams p;
    p.omega1 = p.omega2 = 1.0;
    p.phi2 = pi / 2;
    const std::array<double, 2> w{0.5, 0.5};
    const auto law = InitialLaw::gaussian({500.0}, {100.0});
    for (double t : {10.0, 30.0, 100.0}) {
        MgfFn mgf = [&](const std::vector<double>& chi) { return closed_mgf(p, w, {chi[0], 0.0}, t) * initial_mgf(law, chi); };
        auto d = reconstruct(mgf, 1, grid(2048));
        EXPECT_NEAR(d.total(), 1.0, 1e-6);
        EXPECT_NEAR(d.mean(0), 500.0, 1e-6 * t * t);
        EXPECT_LT(std::abs((d.variance(0) - 100.0) / (t * t / 2) - 1.0), 0.01) << t;
        if (t >= 30.0) {
            const int off = static_cast<int>(std::lround(t / std::sqrt(2.0)));
            EXPECT_GT(d.at(500 + off), 3 * d.at(500)) << t;
            EXPECT_GT(d.at(500 - off), 3 * d.at(500)) << t;
        }
    }
}

TEST(ClosedDistribution, SingleFloquetStateShiftsWithoutBroadening)
{
    JcParams p;
    p.omega1 = p.omega2 = 1.0;
    p.phi2 = pi / 2;
    const auto law = InitialLaw::gaussian({500.0}, {100.0});
    const double t = 40.0;
    MgfFn mgf = [&](const std::vector<double>& chi) { return closed_mgf(p, {1.0, 0.0}, {chi[0], 0.0}, t) * initial_mgf(law, chi); };
    auto d = reconstruct(mgf, 1, grid(512));
    auto st = jc_closed_statistics(p, {1.0, 0.0}, 0, t);
    EXPECT_NEAR(d.mean(0) - 500.0, st.mean, 1e-3 * t);
    EXPECT_NEAR(d.variance(0), 100.0, 1.0);
}
