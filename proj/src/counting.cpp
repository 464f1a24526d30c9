#include "pcs/counting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pcs {

namespace {

Mat matrix_power(Mat u, long long n)
{
    Mat out = Mat::Identity(u.rows(), u.cols());
    while (n > 0) {
        if (n & 1) out = out * u;
        n >>= 1;
        if (n) u = u * u;
    }
    return out;
}

CountingFields negate_chi(const CountingFields& f)
{
    CountingFields g = f;
    for (auto& c : g.chi) c = -c;
    return g;
}

int nearest_to(const Vec& w, cplx target)
{
    int best = 0;
    for (Eigen::Index k = 1; k < w.size(); ++k)
        if (std::abs(w(k) - target) < std::abs(w(best) - target)) best = static_cast<int>(k);
    return best;
}

// Distance from the eigenvalue at `skip` to the nearest other eigenvalue.
double separation(const Vec& w, int skip)
{
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < w.size(); ++k)
        if (k != skip) gap = std::min(gap, std::abs(w(k) - w(skip)));
    return gap;
}

Vec monodromy_eigenvalues_as_rates(const Mat& u, double tau)
{
    Eigen::ComplexEigenSolver<Mat> es(u, false);
    Vec w(es.eigenvalues().size());
    for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = std::log(es.eigenvalues()(k)) / tau;
    return w;
}

// RK4 for U_chi - U_0 over one period, advanced jointly with U_0 so that the difference keeps its relative precision.
Mat monodromy_increment(const DressedLiouvillian& model, const CountingFields& f, int steps)
{
    const double dt = model.period() / steps;
    const Eigen::Index n = model.dim();
    Mat u = Mat::Identity(n, n), d = Mat::Zero(n, n);
    Mat a0 = model.base(0.0), b0 = model.at(f, 0.0), c0 = model.increment(f, 0.0);
    for (int s = 0; s < steps; ++s) {
        const double t = s * dt;
        const Mat am = model.base(t + 0.5 * dt), bm = model.at(f, t + 0.5 * dt), cm = model.increment(f, t + 0.5 * dt);
        const Mat a1 = model.base(t + dt), b1 = model.at(f, t + dt), c1 = model.increment(f, t + dt);
        const Mat k1 = a0 * u, j1 = b0 * d + c0 * u;
        const Mat u2 = u + 0.5 * dt * k1, d2 = d + 0.5 * dt * j1;
        const Mat k2 = am * u2, j2 = bm * d2 + cm * u2;
        const Mat u3 = u + 0.5 * dt * k2, d3 = d + 0.5 * dt * j2;
        const Mat k3 = am * u3, j3 = bm * d3 + cm * u3;
        const Mat u4 = u + dt * k3, d4 = d + dt * j3;
        const Mat k4 = a1 * u4, j4 = b1 * d4 + c1 * u4;
        u += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        d += (dt / 6.0) * (j1 + 2.0 * j2 + 2.0 * j3 + j4);
        a0 = a1;
        b0 = b1;
        c0 = c1;
    }
    return d;
}

cplx log1p_complex(cplx z)
{
    const double re = 0.5 * std::log1p(2.0 * z.real() + std::norm(z));
    return {re, std::atan2(z.imag(), 1.0 + z.real())};
}

} // namespace

Vec evolve_generalized(const DressedLiouvillian& model, const CountingFields& fields, const Vec& rho0, double t,
                       int steps_per_period)
{
    if (t < 0) throw Error(ErrorKind::InvalidArgument, "time must be nonnegative");
    if (rho0.size() != model.dim()) throw Error(ErrorKind::DimensionMismatch, "initial state has wrong size");
    if (!model.periodic()) return propagate(model.at(fields), rho0, t).state;
    const double tau = model.period();
    const auto gen = model.generator(fields);
    const long long n = static_cast<long long>(std::floor(t / tau + 1e-12));
    const double rest = t - static_cast<double>(n) * tau;
    Vec state = rho0;
    if (n > 0) state = matrix_power(rk4_propagator(gen, 0.0, tau, steps_per_period), n) * state;
    if (rest > 1e-14 * tau) {
        const int steps = std::max(1, static_cast<int>(std::ceil(steps_per_period * rest / tau)));
        state = rk4_propagator(gen, 0.0, rest, steps) * state;
    }
    return state;
}

MgfValue dynamical_mgf(const DressedLiouvillian& model, const CountingFields& fields, const Vec& rho0, double t,
                       int steps_per_period)
{
    const RowVec tr = model.trace();
    MgfValue m;
    m.time = t;
    m.left = 0.5 * cplx(tr * evolve_generalized(model, fields, rho0, t, steps_per_period));
    m.right = 0.5 * std::conj(cplx(tr * evolve_generalized(model, negate_chi(fields), rho0, t, steps_per_period)));
    m.value = m.left + m.right;
    return m;
}

InitialLaw InitialLaw::poisson(std::vector<double> alpha)
{
    InitialLaw law;
    law.kind = Kind::Poisson;
    law.amplitude = std::move(alpha);
    return law;
}

InitialLaw InitialLaw::gaussian(std::vector<double> mean, std::vector<double> variance)
{
    if (mean.size() != variance.size()) throw Error(ErrorKind::DimensionMismatch, "Gaussian law: mean/variance sizes differ");
    InitialLaw law;
    law.kind = Kind::Gaussian;
    law.mean = std::move(mean);
    law.variance = std::move(variance);
    return law;
}

int InitialLaw::modes() const
{
    return static_cast<int>(kind == Kind::Poisson ? amplitude.size() : mean.size());
}

cplx initial_mgf(const InitialLaw& law, const std::vector<double>& chi)
{
    if (static_cast<int>(chi.size()) != law.modes())
        throw Error(ErrorKind::DimensionMismatch, "initial law and counting fields differ in size");
    cplx expo = 0.0;
    for (std::size_t k = 0; k < chi.size(); ++k) {
        if (law.kind == InitialLaw::Kind::Poisson) {
            const double a = law.amplitude[k];
            if (a < 0) throw Error(ErrorKind::InvalidArgument, "coherent amplitude must be nonnegative");
            expo += a * a * (std::exp(cplx(0, -chi[k])) - 1.0);
        } else {
            if (law.variance[k] < 0) throw Error(ErrorKind::InvalidArgument, "variance must be nonnegative");
            expo += cplx(-0.5 * law.variance[k] * chi[k] * chi[k], -law.mean[k] * chi[k]);
        }
    }
    return std::exp(expo);
}

cplx initial_mgf(const std::vector<double>& alpha, const std::vector<double>& chi)
{
    return initial_mgf(InitialLaw::poisson(alpha), chi);
}

Vec model_stationary_state(const DressedLiouvillian& model, int steps_per_period)
{
    const RowVec tr = model.trace();
    if (!model.periodic()) return stationary_state(model.base(0.0), tr);
    const auto zero = CountingFields::zeros(model.modes(), model.baths());
    PeriodOptions popt;
    popt.steps = steps_per_period;
    popt.check = false;
    const Mat u = one_period_propagator(model.generator(zero), model.period(), popt).u;
    return stationary_state(u - Mat::Identity(u.rows(), u.cols()), tr);
}

cplx feshbach_lambda0(const Mat& l0mat, const Mat& dl, const RowVec& l, const Vec& r)
{
    const Eigen::Index n = l0mat.rows();
    const cplx a = l * dl * r;
    const Mat p = r * l;
    const Mat q = Mat::Identity(n, n) - p;
    const Mat qlq = q * (l0mat + dl) * q;
    const Vec b = q * dl * r;
    const RowVec ldl = l * dl;
    cplx lam = a;
    double change = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 60; ++it) {
        const Mat m = lam * Mat::Identity(n, n) - qlq + p;
        const Vec x = m.partialPivLu().solve(b);
        const cplx next = a + cplx(ldl * x);
        change = std::abs(next - lam);
        lam = next;
        if (change <= 1e-16 * std::abs(next)) return lam;
    }
    if (change > 1e-12 * std::max(std::abs(lam), 1e-300)) {
        std::ostringstream os;
        os << "Schur-complement iteration for lambda0 did not converge (last change " << change << ")";
        throw Error(ErrorKind::NotConverged, os.str());
    }
    return lam;
}

Lambda0Local::Lambda0Local(const DressedLiouvillian& model, const Lambda0Options& opt) : model_(model), opt_(opt)
{
    const auto zero = CountingFields::zeros(model.modes(), model.baths());
    if (!model.periodic()) {
        l0mat_ = model.base(0.0);
        StationaryOptions sopt;
        sopt.stationarity_tol = opt.stationarity_tol;
        r0_ = stationary_state(l0mat_, model.trace(), sopt);
        l0_ = model.trace();
        Eigen::ComplexEigenSolver<Mat> es(l0mat_, false);
        const int k0 = nearest_to(es.eigenvalues(), 0.0);
        gap_ = separation(es.eigenvalues(), k0);
    } else {
        PeriodOptions popt;
        popt.steps = opt.steps_per_period;
        popt.check = false;
        const Mat u = one_period_propagator(model.generator(zero), model.period(), popt).u;
        const Vec w = monodromy_eigenvalues_as_rates(u, model.period());
        const int k0 = nearest_to(w, 0.0);
        gap_ = separation(w, k0);
        l0mat_ = u - Mat::Identity(u.rows(), u.cols());
        l0_ = model.trace();
        r0_ = stationary_state(l0mat_, l0_);
    }
    const double norm = spectral_norm(model.periodic() ? model.base(0.0) : l0mat_);
    if (gap_ < 1e-9 * std::max(norm, 1e-300))
        throw Error(ErrorKind::NearDegenerate,
                    "lambda0 is degenerate at zero fields; use the characteristic-polynomial route");
}

cplx Lambda0Local::operator()(const CountingFields& fields) const
{
    if (!model_.periodic()) {
        if (fields.is_zero()) return 0.0;
        return feshbach_lambda0(l0mat_, model_.increment(fields), l0_, r0_);
    }
    if (fields.is_zero()) return 0.0;
    const Mat d = monodromy_increment(model_, fields, opt_.steps_per_period);
    return log1p_complex(feshbach_lambda0(l0mat_, d, l0_, r0_)) / model_.period();
}

cplx track_lambda0(const DressedLiouvillian& model, const CountingFields& raw, const TrackOptions& opt)
{
    model.check_fields(raw);
    const CountingFields fields = raw.wrapped();
    const auto zero = CountingFields::zeros(model.modes(), model.baths());
    auto spectrum = [&](const CountingFields& f) -> Vec {
        if (!model.periodic()) {
            Eigen::ComplexEigenSolver<Mat> es(model.at(f), false);
            return es.eigenvalues();
        }
        return monodromy_eigenvalues_as_rates(
            rk4_propagator(model.generator(f), 0.0, model.period(), opt.steps_per_period), model.period());
    };
    Vec w = spectrum(zero);
    int k = nearest_to(w, 0.0);
    cplx lam = w(k);
    const double gap = separation(w, k);
    if (fields.is_zero()) return lam;

    double dnorm = 0.0;
    for (const auto& term : model.terms()) {
        double th = 0.0;
        for (int j = 0; j < model.modes(); ++j) th += std::abs(term.q[static_cast<std::size_t>(j)] * fields.chi[static_cast<std::size_t>(j)]);
        for (int j = 0; j < model.baths(); ++j) th += std::abs(term.m[static_cast<std::size_t>(j)] * fields.xi[static_cast<std::size_t>(j)]);
        double c = 1.0;
        if (term.coeff) {
            for (int s = 0; s < 8; ++s) c = std::max(c, std::abs(term.coeff(model.period() * s / 8.0)));
        }
        dnorm += th * c * spectral_norm(term.op);
    }
    const double step_bound = opt.step_fraction * gap;
    int steps = std::max(1, static_cast<int>(std::ceil(dnorm / std::max(step_bound, 1e-300))));
    if (steps > opt.max_steps)
        throw Error(ErrorKind::BranchCollision, "continuation would need " + std::to_string(steps) +
                                                    " steps; use the characteristic-polynomial route");
    for (int s = 1; s <= steps; ++s) {
        w = spectrum(fields.scaled(static_cast<double>(s) / steps));
        k = nearest_to(w, lam);
        double second = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < w.size(); ++j)
            if (j != k) second = std::min(second, std::abs(w(j) - lam));
        if (second < opt.collision_fraction * gap) {
            std::ostringstream os;
            os << "two eigenvalues within " << opt.collision_fraction << " x gap of the tracked branch at step " << s;
            throw Error(ErrorKind::BranchCollision, os.str());
        }
        lam = w(k);
    }
    return lam;
}

CountingFields drive_direction(const DressedLiouvillian& model, int mode)
{
    if (mode < 0 || mode >= model.modes()) throw Error(ErrorKind::InvalidArgument, "mode index out of range");
    auto f = CountingFields::zeros(model.modes(), model.baths());
    f.chi[static_cast<std::size_t>(mode)] = 1.0;
    return f;
}

CountingFields bath_direction(const DressedLiouvillian& model, int channel)
{
    if (channel < 0 || channel >= model.baths()) throw Error(ErrorKind::InvalidArgument, "bath index out of range");
    auto f = CountingFields::zeros(model.modes(), model.baths());
    f.xi[static_cast<std::size_t>(channel)] = 1.0;
    return f;
}

CountingFields total_drive_direction(const DressedLiouvillian& model)
{
    auto f = CountingFields::zeros(model.modes(), model.baths());
    std::fill(f.chi.begin(), f.chi.end(), 1.0);
    return f;
}

CountingFields total_bath_direction(const DressedLiouvillian& model)
{
    auto f = CountingFields::zeros(model.modes(), model.baths());
    std::fill(f.xi.begin(), f.xi.end(), 1.0);
    return f;
}

StencilResult richardson_derivatives(const std::function<cplx(double)>& f, double h)
{
    const cplx f0 = f(0.0);
    const cplx p1 = f(0.5 * h), m1 = f(-0.5 * h);
    const cplx p2 = f(h), m2 = f(-h);
    const cplx p4 = f(2.0 * h), m4 = f(-2.0 * h);
    auto d1 = [](cplx fp2, cplx fp1, cplx fm1, cplx fm2, double s) {
        return (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * s);
    };
    auto d2 = [](cplx fp2, cplx fp1, cplx f0v, cplx fm1, cplx fm2, double s) {
        return (-fp2 + 16.0 * fp1 - 30.0 * f0v + 16.0 * fm1 - fm2) / (12.0 * s * s);
    };
    const cplx a1 = d1(p4, p2, m2, m4, h), b1 = d1(p2, p1, m1, m2, 0.5 * h);
    const cplx a2 = d2(p4, p2, f0, m2, m4, h), b2 = d2(p2, p1, f0, m1, m2, 0.5 * h);
    StencilResult r;
    r.d1 = (16.0 * b1 - a1) / 15.0;
    r.d2 = (16.0 * b2 - a2) / 15.0;
    r.d1_error = std::abs(r.d1 - b1);
    r.d2_error = std::abs(r.d2 - b2);
    return r;
}

CumulantReport cumulants_from_function(const std::function<cplx(double)>& f, double h, double tolerance, Method method)
{
    const auto s = richardson_derivatives(f, h);
    CumulantReport rep;
    rep.method = method;
    rep.h = h;
    rep.flux = (cplx(0, 1) * s.d1).real();
    rep.noise = (-s.d2).real();
    rep.snr = rep.noise > 0 ? rep.flux / std::sqrt(rep.noise) : 0.0;
    rep.flux_error = s.d1_error / std::max(std::abs(rep.flux), 1e-12);
    rep.noise_error = s.d2_error / std::max(std::abs(rep.noise), 1e-12);
    if (rep.flux_error > tolerance || rep.noise_error > tolerance) {
        rep.flagged = true;
        std::ostringstream os;
        os << "stencil disagreement flux " << rep.flux_error << " noise " << rep.noise_error;
        rep.note = os.str();
    }
    return rep;
}

double derivative_norm(const DressedLiouvillian& model, const CountingFields& dir)
{
    if (!model.periodic()) return spectral_norm(model.derivative(dir, 1));
    double n = 0.0;
    for (int s = 0; s < 16; ++s) n = std::max(n, spectral_norm(model.derivative(dir, 1, model.period() * s / 16.0)));
    return n;
}

double default_step(const DressedLiouvillian& model, const CountingFields& dir, double gap, const CumulantOptions& opt)
{
    const double dn = derivative_norm(model, dir);
    if (dn <= 0.0) return opt.h;
    return std::min(opt.h, opt.gap_fraction * gap / dn);
}

CumulantReport cumulants_spectral(const DressedLiouvillian& model, const CountingFields& dir, const CumulantOptions& opt)
{
    model.check_fields(dir);
    Lambda0Options lopt;
    lopt.steps_per_period = opt.steps_per_period;
    const Lambda0Local lam(model, lopt);
    const double h = default_step(model, dir, lam.gap(), opt);
    auto f = [&](double s) { return lam(dir.scaled(s)); };
    return cumulants_from_function(f, h, opt.tolerance, model.periodic() ? Method::PeriodicNumeric : Method::SpectralFD);
}

double cumulant_rate(const DressedLiouvillian& model, const CountingFields& dir, int order, const CumulantOptions& opt)
{
    if (order >= 3)
        throw Error(ErrorKind::Refused,
                    "cumulants of order >= 3 are not linear in time for the two-branch generating function; "
                    "the spectral route only provides orders 1 and 2");
    if (order < 1) throw Error(ErrorKind::InvalidArgument, "cumulant order must be 1 or 2");
    const auto rep = cumulants_spectral(model, dir, opt);
    return order == 1 ? rep.flux : rep.noise;
}

ConservationReport conservation_check(const DressedLiouvillian& model, double flux_tol, double noise_tol,
                                      const CumulantOptions& opt)
{
    if (model.baths() < 1 || model.modes() < 1)
        throw Error(ErrorKind::InvalidArgument, "conservation check needs drive and bath counting fields");
    ConservationReport rep;
    const auto d = cumulants_spectral(model, total_drive_direction(model), opt);
    const auto b = cumulants_spectral(model, total_bath_direction(model), opt);
    rep.drive_flux = d.flux;
    rep.bath_flux = b.flux;
    rep.drive_noise = d.noise;
    rep.bath_noise = b.noise;
    rep.flux_violation = std::abs(d.flux + b.flux);
    rep.noise_violation = std::abs(d.noise - b.noise);
    double sum = 0.0;
    for (int k = 0; k < model.modes(); ++k) {
        const auto r = cumulants_spectral(model, drive_direction(model, k), opt);
        rep.mode_flux.push_back(r.flux);
        sum += r.flux;
    }
    rep.mode_sum_violation = std::abs(sum + b.flux);
    rep.passed = rep.flux_violation <= flux_tol && rep.noise_violation <= noise_tol && rep.mode_sum_violation <= flux_tol;
    return rep;
}

double semiclassical_flux(const DressedLiouvillian& model, int mode, int steps_per_period)
{
    if (!model.has_flux_observable(mode)) throw Error(ErrorKind::InvalidArgument, "no flux observable for this mode");
    Vec rho = model_stationary_state(model, steps_per_period);
    if (!model.periodic()) return cplx(model.flux_functional(mode) * rho).real();
    const auto zero = CountingFields::zeros(model.modes(), model.baths());
    const auto gen = model.generator(zero);
    const double dt = model.period() / steps_per_period;
    double acc = 0.0;
    for (int s = 0; s < steps_per_period; ++s) {
        const double t = s * dt;
        acc += cplx(model.flux_functional(mode, t) * rho).real();
        rho = rk4_propagator(gen, t, t + dt, 1) * rho;
    }
    return acc / steps_per_period;
}

ValidityWindow validity_window(double g, double gamma, double nbar, double sigma, double eps)
{
    if (!(nbar > 0) || !(sigma > 0)) throw Error(ErrorKind::InvalidArgument, "validity window needs nbar > 0 and sigma > 0");
    ValidityWindow w;
    if (sigma / nbar > eps) {
        w.t = 0.0;
        w.infeasible = true;
        w.note = "sigma/nbar exceeds the tolerance at t = 0";
        return w;
    }
    double t = std::numeric_limits<double>::infinity();
    if (g > 0) t = std::min({t, eps * sigma * sigma / g, eps * nbar / g});
    if (gamma > 0) t = std::min(t, eps * nbar / gamma);
    w.t = t;
    w.note = "heuristic bound";
    return w;
}

} // namespace pcs
