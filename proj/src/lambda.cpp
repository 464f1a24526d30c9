#include "pcs/lambda.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "pcs/charpoly.hpp"

namespace pcs {

double bessel_j(int n, double x)
{
    if (n < 0) throw Error(ErrorKind::InvalidArgument, "Bessel order must be >= 0");
    if (!std::isfinite(x) || std::abs(x) > 50.0) throw Error(ErrorKind::Range, "Bessel argument outside |x| <= 50");
    const double v = std::cyl_bessel_j(static_cast<double>(n), std::abs(x));
    return (x < 0 && n % 2 == 1) ? -v : v;
}

double bessel_j_zero(int n, int k)
{
    if (n < 0 || k < 1) throw Error(ErrorKind::InvalidArgument, "bessel_j_zero needs n >= 0 and k >= 1");
    // McMahon estimate refined by Newton with J_n' = J_{n-1} - (n/x) J_n.
    const double beta = (k + 0.5 * n - 0.25) * pi;
    const double mu = 4.0 * n * n;
    double x = beta - (mu - 1.0) / (8.0 * beta);
    if (n > 0 && k == 1) x = n + 1.8557571 * std::cbrt(static_cast<double>(n)) + 1.033150 / std::cbrt(static_cast<double>(n));
    for (int it = 0; it < 100; ++it) {
        const double j = std::cyl_bessel_j(static_cast<double>(n), x);
        const double jm = n == 0 ? -std::cyl_bessel_j(1.0, x) : std::cyl_bessel_j(static_cast<double>(n - 1), x) - n / x * j;
        const double dx = j / jm;
        x -= dx;
        if (std::abs(dx) < 1e-15 * x) break;
    }
    return x;
}

void LambdaParams::validate() const
{
    std::ostringstream os;
    const double all[] = {eps_a, eps_b, eps_c, omega_p, omega_1, omega_d, omega_s, omega_p0, omega_p1, gamma, phi1, phi2};
    for (double v : all)
        if (!std::isfinite(v)) {
            os << " all parameters must be finite;";
            break;
        }
    if (gamma < 0) os << " gamma must be >= 0;";
    if (omega_s < 0) os << " omega_s must be >= 0;";
    if (!(omega_d > 0)) os << " omega_d must be > 0;";
    if (r < 0) os << " r must be >= 0;";
    if (!os.str().empty()) throw Error(ErrorKind::InvalidArgument, "LambdaParams:" + os.str());
}

bool LambdaParams::resonant_pump(double tol) const
{
    return std::abs(eps_c - eps_b - omega_p) <= tol * std::max(1.0, std::abs(omega_p));
}

bool LambdaParams::rwa_ok() const
{
    const double scale = std::max({std::abs(eps_a), std::abs(eps_b_delta()), std::abs(eps_c_delta()), std::abs(omega_p0), gamma});
    return omega_s <= 0.1 * std::max(scale, 1e-300) && gamma <= 0.1 * omega_d;
}

std::string LambdaParams::rwa_advisory() const
{
    if (rwa_ok()) return {};
    std::ostringstream os;
    os << "RWA regime not satisfied (omega_s = " << omega_s << ", gamma = " << gamma << ", omega_d = " << omega_d << ")";
    return os.str();
}

namespace {

Mat ket_bra(int i, int j)
{
    Mat m = Mat::Zero(3, 3);
    m(i, j) = 1.0;
    return m;
}

constexpr int A = 0, B = 1, C = 2;

void add_dissipators(DressedLiouvillian& m, double gamma)
{
    for (int e : {B, C}) {
        const Mat l = ket_bra(A, e);
        m.add({gamma * jump_part(l), {}, {1}, {}, 0});
        m.add({gamma * nojump_part(l), {}, {}, {}, 0});
    }
}

// -i V_chi rho + i rho V_0 for a transition amplitude w |to><a| + h.c. in mode k, with fields entering as phi_k + chi_k.
void add_signal(DressedLiouvillian& m, int mode, int to, cplx w, std::function<cplx(double)> f_up)
{
    const cplx i(0, 1);
    const Mat up = ket_bra(to, A), down = ket_bra(A, to);
    std::vector<int> minus(2, 0), plus(2, 0);
    minus[static_cast<std::size_t>(mode)] = -1;
    plus[static_cast<std::size_t>(mode)] = 1;
    std::function<cplx(double)> f_down;
    if (f_up) f_down = [f_up](double t) { return std::conj(f_up(t)); };
    m.add({Mat(-i * w * left_mul(up)), minus, {}, f_up, 1});
    m.add({Mat(-i * std::conj(w) * left_mul(down)), plus, {}, f_down, 1});
    m.add({Mat(i * w * right_mul(up)), {}, {}, f_up, 1});
    m.add({Mat(i * std::conj(w) * right_mul(down)), {}, {}, f_down, 1});
}

struct RwaCoupling {
    cplx kappa_b1, kappa_b2, kappa_c1, kappa_c2;  // without counting phases
};

RwaCoupling rwa_coupling(const LambdaParams& p)
{
    const double x = p.bessel_arg();
    const double j0 = bessel_j(0, x), jr = bessel_j(p.r, x);
    const cplx e1 = std::exp(cplx(0, p.phi1)), e2 = std::exp(cplx(0, p.phi2));
    RwaCoupling k{0.0, 0.0, p.omega_s * j0 * e1, 0.0};
    if (p.r % 2 == 0)
        k.kappa_c2 = p.omega_s * jr * e2;
    else
        k.kappa_b2 = p.omega_s * jr * e2;
    return k;
}

} // namespace

DressedLiouvillian lambda_model(const LambdaParams& p, LambdaFrame frame, bool override_rwa)
{
    p.validate();
    const cplx i(0, 1);
    if (frame == LambdaFrame::RwaEffective) {
        if (!override_rwa && !p.rwa_ok()) throw Error(ErrorKind::Refused, p.rwa_advisory() + "; pass the override to proceed");
        DressedLiouvillian m(9, Basis::Element, 2, 1, "lambda-rwa");
        const double eb = p.eps_b_delta(), ec = p.eps_c_delta();
        const double mean = 0.5 * (eb + ec), split = bessel_j(0, 2.0 * p.bessel_arg()) * 0.5 * (eb - ec);
        Mat h = p.eps_a * ket_bra(A, A) + (mean + split) * ket_bra(B, B) + (mean - split) * ket_bra(C, C) +
                p.omega_p0 * (ket_bra(B, C) + ket_bra(C, B));
        m.add({commutator_generator(h), {}, {}, {}, 0});
        add_dissipators(m, p.gamma);
        const auto k = rwa_coupling(p);
        if (p.omega_s > 0) {
            add_signal(m, 0, C, k.kappa_c1, {});
            if (p.r % 2 == 0)
                add_signal(m, 1, C, k.kappa_c2, {});
            else
                add_signal(m, 1, B, k.kappa_b2, {});
        }
        std::vector<std::function<Mat(double)>> obs;
        const Mat o1 = i * k.kappa_c1 * ket_bra(C, A) - i * std::conj(k.kappa_c1) * ket_bra(A, C);
        const int to2 = p.r % 2 == 0 ? C : B;
        const cplx w2 = p.r % 2 == 0 ? k.kappa_c2 : k.kappa_b2;
        const Mat o2 = i * w2 * ket_bra(to2, A) - i * std::conj(w2) * ket_bra(A, to2);
        obs.emplace_back([o1](double) { return o1; });
        obs.emplace_back([o2](double) { return o2; });
        m.set_flux_observables(std::move(obs));
        return m;
    }

    DressedLiouvillian m(9, Basis::Element, 2, 1, "lambda-periodic");
    const double wd = p.omega_d;
    m.set_period(2.0 * pi / wd);
    const Mat h0 = p.eps_a * ket_bra(A, A) + p.eps_b_delta() * ket_bra(B, B) + p.eps_c_delta() * ket_bra(C, C) +
                   p.omega_p0 * (ket_bra(B, C) + ket_bra(C, B));
    m.add({commutator_generator(h0), {}, {}, {}, 0});
    const double half = 0.5 * p.omega_p1;
    if (half != 0.0)
        m.add({commutator_generator(ket_bra(B, C) + ket_bra(C, B)), {}, {}, [half, wd](double t) { return cplx(half * std::cos(wd * t)); }, 0});
    add_dissipators(m, p.gamma);
    const cplx w1 = p.omega_s * std::exp(cplx(0, p.phi1)), w2 = p.omega_s * std::exp(cplx(0, p.phi2));
    const double rw = p.r * wd;
    std::function<cplx(double)> f2;
    if (p.r != 0) f2 = [rw](double t) { return std::exp(cplx(0, -rw * t)); };
    if (p.omega_s > 0) {
        add_signal(m, 0, C, w1, {});
        add_signal(m, 1, C, w2, f2);
    }
    std::vector<std::function<Mat(double)>> obs;
    obs.emplace_back([w1](double) {
        const cplx i(0, 1);
        return Mat(i * w1 * ket_bra(C, A) - i * std::conj(w1) * ket_bra(A, C));
    });
    obs.emplace_back([w2, rw](double t) {
        const cplx i(0, 1);
        const cplx w = w2 * std::exp(cplx(0, -rw * t));
        return Mat(i * w * ket_bra(C, A) - i * std::conj(w) * ket_bra(A, C));
    });
    m.set_flux_observables(std::move(obs));
    return m;
}

EffectiveCouplings effective_couplings(const LambdaParams& p, double chi1, double chi2)
{
    p.validate();
    const auto k = rwa_coupling(p);
    const cplx e1 = std::exp(cplx(0, chi1)), e2 = std::exp(cplx(0, chi2));
    const cplx kb = k.kappa_b1 * e1 + k.kappa_b2 * e2;
    const cplx kc = k.kappa_c1 * e1 + k.kappa_c2 * e2;
    const double eb = p.eps_b_delta(), ec = p.eps_c_delta();
    const double mean = 0.5 * (eb + ec), split = bessel_j(0, 2.0 * p.bessel_arg()) * 0.5 * (eb - ec);
    EffectiveCouplings out;
    out.theta = std::atan2(p.omega_p0, split);
    const double rad = std::hypot(split, p.omega_p0);
    const double cs = std::cos(0.5 * out.theta), sn = std::sin(0.5 * out.theta);
    // upper dressed state cos|b> + sin|c>, lower sin|b> - cos|c>
    out.omega_c_chi = cs * kb + sn * kc;
    out.omega_b_chi = sn * kb - cs * kc;
    out.eps_tilde_a = p.eps_a;
    out.eps_tilde_b = mean - rad;
    out.eps_tilde_c = mean + rad;
    return out;
}

cplx lambda_lambda0_pt2(const LambdaParams& p, double chi1, double chi2)
{
    if (!p.resonant_pump())
        throw Error(ErrorKind::Refused, "closed-form lambda0 needs eps_c - eps_b = omega_p; use the numeric route");
    const auto z = effective_couplings(p, 0, 0);
    const auto c = effective_couplings(p, chi1, chi2);
    const double g = p.gamma;
    const cplx i(0, 1);
    cplx lam = 0.0;
    const cplx w0[2] = {z.omega_b_chi, z.omega_c_chi};
    const cplx wc[2] = {c.omega_b_chi, c.omega_c_chi};
    const double det[2] = {z.eps_tilde_b - z.eps_tilde_a, z.eps_tilde_c - z.eps_tilde_a};
    for (int a = 0; a < 2; ++a) {
        lam += wc[a] * (std::conj(w0[a]) - std::conj(wc[a])) / (g + i * det[a]);
        lam += std::conj(w0[a]) * (wc[a] - w0[a]) / (g - i * det[a]);
    }
    return lam;
}

CumulantReport lambda_cumulants(const LambdaParams& p, int mode, Method method, const CumulantOptions& opt)
{
    if (mode < 0 || mode > 1) throw Error(ErrorKind::InvalidArgument, "lambda system has modes 0 and 1");
    CumulantReport rep;
    switch (method) {
    case Method::PeriodicNumeric: {
        const auto m = lambda_model(p, LambdaFrame::RotatingFramePeriodic);
        rep = cumulants_spectral(m, drive_direction(m, mode), opt);
        break;
    }
    case Method::SpectralFD: {
        const auto m = lambda_model(p, LambdaFrame::RwaEffective, true);
        rep = cumulants_spectral(m, drive_direction(m, mode), opt);
        break;
    }
    case Method::CharPoly: {
        const auto m = lambda_model(p, LambdaFrame::RwaEffective, true);
        CharPolyOptions co;
        co.h = opt.h;
        co.branch_fraction = opt.gap_fraction;
        co.tolerance = opt.tolerance;
        rep = cumulants_charpoly(m, drive_direction(m, mode), co);
        break;
    }
    case Method::PerturbationTheory:
    case Method::AnalyticOracle: {
        auto f = [&](double s) { return mode == 0 ? lambda_lambda0_pt2(p, s, 0) : lambda_lambda0_pt2(p, 0, s); };
        rep = cumulants_from_function(f, opt.h, opt.tolerance, method);
        rep.h = opt.h;
        break;
    }
    }
    rep.mode = mode;
    rep.channel = mode == 0 ? "drive1" : "drive2";
    return rep;
}

std::vector<LambdaScanRow> lambda_flux_scan(const LambdaParams& p, LambdaSweep sweep, const std::vector<double>& grid,
                                            Method method, const CumulantOptions& opt, int threads)
{
    std::vector<LambdaScanRow> rows(grid.size());
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (std::size_t k = next++; k < grid.size(); k = next++) {
            LambdaScanRow& row = rows[k];
            row.value = grid[k];
            try {
                if (!std::isfinite(grid[k])) throw Error(ErrorKind::InvalidArgument, "non-finite grid value");
                LambdaParams q = p;
                if (sweep == LambdaSweep::Detuning)
                    q.set_detuning(grid[k]);
                else
                    q.omega_p1 = grid[k];
                if (q.omega_s == 0.0) {
                    row.mode1.mode = 0;
                    row.mode2.mode = 1;
                    row.mode1.method = row.mode2.method = method;
                    continue;
                }
                row.mode1 = lambda_cumulants(q, 0, method, opt);
                row.mode2 = lambda_cumulants(q, 1, method, opt);
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };
    const int n = std::max(1, std::min<int>(threads, static_cast<int>(grid.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return rows;
}

} // namespace pcs
