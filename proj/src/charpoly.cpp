#include "pcs/charpoly.hpp"

#include <limits>

#include <cmath>
#include <sstream>

namespace pcs {

namespace {

using quad = __float128;
using qcplx = std::complex<quad>;

struct QMat {
    int n;
    std::vector<qcplx> v;
    explicit QMat(int n_) : n(n_), v(static_cast<std::size_t>(n_) * n_, qcplx(quad(0), quad(0))) {}
    qcplx& operator()(int i, int j) { return v[static_cast<std::size_t>(i) * n + j]; }
    const qcplx& operator()(int i, int j) const { return v[static_cast<std::size_t>(i) * n + j]; }
};

qcplx to_q(cplx z, double scale)
{
    return qcplx(quad(z.real()) / quad(scale), quad(z.imag()) / quad(scale));
}

cplx to_d(const qcplx& z)
{
    return cplx(static_cast<double>(z.real()), static_cast<double>(z.imag()));
}

QMat mul(const QMat& a, const QMat& b)
{
    QMat c(a.n);
    for (int i = 0; i < a.n; ++i)
        for (int k = 0; k < a.n; ++k) {
            const qcplx aik = a(i, k);
            if (aik.real() == 0 && aik.imag() == 0) continue;
            for (int j = 0; j < a.n; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

// Power sums p_k = tr(A^k) from the powers A^1..A^m, m = ceil(n/2), then Newton's identities.
CharPolyCoeffs newton_coefficients(const QMat& a, double scale)
{
    const int n = a.n;
    const int m = (n + 1) / 2;
    std::vector<QMat> pw{a};
    for (int k = 2; k <= m; ++k) pw.push_back(mul(pw.back(), a));
    auto trace_product = [n](const QMat& x, const QMat& y) {
        qcplx tr(0, 0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) tr += x(i, j) * y(j, i);
        return tr;
    };
    std::vector<qcplx> p(static_cast<std::size_t>(n) + 1, qcplx(0, 0));
    for (int k = 1; k <= n; ++k) {
        if (k <= m) {
            for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(k)] += pw[static_cast<std::size_t>(k - 1)](i, i);
        } else {
            p[static_cast<std::size_t>(k)] = trace_product(pw[static_cast<std::size_t>(m - 1)], pw[static_cast<std::size_t>(k - m - 1)]);
        }
    }
    // e_k elementary symmetric functions of the eigenvalues; char poly coefficient a_{n-k} = (-1)^k e_k.
    std::vector<qcplx> e(static_cast<std::size_t>(n) + 1, qcplx(0, 0));
    e[0] = qcplx(1, 0);
    for (int k = 1; k <= n; ++k) {
        qcplx acc(0, 0);
        for (int i = 1; i <= k; ++i) {
            const qcplx term = e[static_cast<std::size_t>(k - i)] * p[static_cast<std::size_t>(i)];
            acc += (i % 2 == 1) ? term : -term;
        }
        e[static_cast<std::size_t>(k)] = acc / quad(k);
    }
    CharPolyCoeffs out;
    out.a.resize(static_cast<std::size_t>(n) + 1);
    quad s = 1;
    for (int k = 0; k <= n; ++k) {
        const qcplx c = (k % 2 == 0 ? e[static_cast<std::size_t>(k)] : -e[static_cast<std::size_t>(k)]) * s;
        out.a[static_cast<std::size_t>(n - k)] = to_d(c);
        s *= quad(scale);
    }
    return out;
}

double power_of_two_scale(double norm)
{
    if (!(norm > 0) || !std::isfinite(norm)) return 1.0;
    return std::ldexp(1.0, static_cast<int>(std::lround(std::log2(norm))));
}

} // namespace

cplx CharPolyCoeffs::eval(cplx z) const
{
    cplx acc = 0.0;
    for (int j = degree(); j >= 0; --j) acc = acc * z + a[static_cast<std::size_t>(j)];
    return acc;
}

CharPolyCoeffs char_poly(const Mat& a)
{
    return char_poly(a, Mat::Zero(a.rows(), a.cols()));
}

CharPolyCoeffs char_poly(const Mat& base, const Mat& increment)
{
    if (base.rows() != base.cols() || increment.rows() != base.rows() || increment.cols() != base.cols())
        throw Error(ErrorKind::DimensionMismatch, "char_poly: matrices must be square and of equal size");
    const int n = static_cast<int>(base.rows());
    if (n > 64) throw Error(ErrorKind::InvalidArgument, "char_poly supports D <= 64");
    if (!base.allFinite() || !increment.allFinite()) throw Error(ErrorKind::InvalidArgument, "non-finite entries");
    const double scale = power_of_two_scale((base + increment).cwiseAbs().rowwise().sum().maxCoeff());
    QMat q(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) q(i, j) = to_q(base(i, j), scale) + to_q(increment(i, j), scale);
    return newton_coefficients(q, scale);
}

cplx truncated_root1(const CharPolyCoeffs& c)
{
    return -c[0] / c[1];
}

cplx truncated_root2(const CharPolyCoeffs& c, cplx reference_sqrt)
{
    const cplx a0 = c[0], a1 = c[1], a2 = c[2];
    cplx sq = std::sqrt(a1 * a1 - 4.0 * a0 * a2);
    if (std::abs(sq - reference_sqrt) > std::abs(-sq - reference_sqrt)) sq = -sq;
    return -2.0 * a0 / (a1 + sq);
}

namespace {

void require_nondegenerate(const CharPolyCoeffs& c0, const CharPolyOptions& opt)
{
    if (c0.degree() < 2) throw Error(ErrorKind::InvalidArgument, "characteristic polynomial of degree < 2");
    double scale = 0.0;
    for (int j = 1; j <= c0.degree(); ++j) scale = std::max(scale, std::abs(c0[j]));
    if (!(std::abs(c0[1]) > opt.degenerate_tol) || std::abs(c0[1]) <= 1e-26 * scale) {
        throw Error(ErrorKind::NearDegenerate,
                    "a1 vanishes: the stationary root is degenerate; use the perturbation module");
    }
}

} // namespace

double first_cumulant_rate(const CoeffFn& coeffs, const CharPolyOptions& opt)
{
    const auto c0 = coeffs(0.0);
    require_nondegenerate(c0, opt);
    const auto s = richardson_derivatives([&](double x) { return coeffs(x)[0]; }, opt.h);
    return -(cplx(0, 1) * s.d1 / c0[1]).real();
}

namespace {

double branch_step(const StencilResult& s, const CharPolyCoeffs& c0, const CharPolyOptions& opt)
{
    // Distance to the nearest branch point of the quadratic truncation, from the linear and quadratic parts of a0.
    const double a1sq = std::abs(c0[1] * c0[1]);
    const double lin = std::abs(4.0 * c0[2] * s.d1);
    const double quad = std::abs(2.0 * c0[2] * s.d2);
    double chi_b = std::numeric_limits<double>::infinity();
    if (lin > 0.0) chi_b = std::min(chi_b, a1sq / lin);
    if (quad > 0.0) chi_b = std::min(chi_b, std::sqrt(a1sq / quad));
    if (!std::isfinite(chi_b)) return opt.h;
    return std::min(opt.h, opt.branch_fraction * chi_b);
}

StencilResult root2_derivatives(const CoeffFn& coeffs, const CharPolyCoeffs& c0, double h, const CharPolyOptions& opt)
{
    auto f = [&](double x) {
        const auto c = coeffs(x);
        const cplx disc = c[1] * c[1] - 4.0 * c[0] * c[2];
        if (std::abs(disc) < opt.ambiguity_tol * std::abs(c[1] * c[1])) {
            std::ostringstream os;
            os << "|a1^2 - 4 a0 a2| = " << std::abs(disc) << " is too small to pin the square-root branch";
            throw Error(ErrorKind::BranchAmbiguity, os.str());
        }
        return truncated_root2(c, c0[1]);
    };
    return richardson_derivatives(f, h);
}

StencilResult refined_root2_derivatives(const CoeffFn& coeffs, const CharPolyCoeffs& c0, double& h,
                                        const CharPolyOptions& opt)
{
    auto best = root2_derivatives(coeffs, c0, h, opt);
    auto rel = [](const StencilResult& r) { return r.d2_error / std::max(std::abs(r.d2.real()), 1e-300); };
    for (int k = 0; k < opt.refinements && rel(best) > opt.tolerance; ++k) {
        const double trial_h = h / 4.0;
        const auto trial = root2_derivatives(coeffs, c0, trial_h, opt);
        if (!(rel(trial) < rel(best))) break;
        best = trial;
        h = trial_h;
    }
    return best;
}

CoeffFn memoized(const CoeffFn& coeffs, std::vector<std::pair<double, CharPolyCoeffs>>& cache)
{
    return [&coeffs, &cache](double x) {
        for (const auto& [at, c] : cache)
            if (at == x) return c;
        cache.emplace_back(x, coeffs(x));
        return cache.back().second;
    };
}

} // namespace

double second_cumulant_rate(const CoeffFn& raw, const CharPolyOptions& opt)
{
    std::vector<std::pair<double, CharPolyCoeffs>> cache;
    const CoeffFn coeffs = memoized(raw, cache);
    const auto c0 = coeffs(0.0);
    require_nondegenerate(c0, opt);
    const auto a0d = richardson_derivatives([&](double x) { return coeffs(x)[0]; }, opt.h);
    double h = branch_step(a0d, c0, opt);
    return (-refined_root2_derivatives(coeffs, c0, h, opt).d2).real();
}

CoeffFn model_coeff_fn(const DressedLiouvillian& model, const CountingFields& dir)
{
    if (model.periodic()) throw Error(ErrorKind::Refused, "charpoly route needs a time-independent Liouvillian");
    model.check_fields(dir);
    const Mat base = model.base(0.0);
    return [model, dir, base](double s) { return char_poly(base, model.increment(dir.scaled(s))); };
}

CumulantReport cumulants_charpoly(const DressedLiouvillian& model, const CountingFields& dir, const CharPolyOptions& opt)
{
    const auto raw = model_coeff_fn(model, dir);
    std::vector<std::pair<double, CharPolyCoeffs>> cache;
    const CoeffFn coeffs = memoized(raw, cache);
    const auto c0 = coeffs(0.0);
    require_nondegenerate(c0, opt);
    CumulantReport rep;
    rep.method = Method::CharPoly;
    const auto a0d = richardson_derivatives([&](double x) { return coeffs(x)[0]; }, opt.h);
    rep.flux = -(cplx(0, 1) * a0d.d1 / c0[1]).real();
    rep.flux_error = std::abs(a0d.d1_error / c0[1]) / std::max(std::abs(rep.flux), 1e-12);
    double h = branch_step(a0d, c0, opt);
    const auto r2 = refined_root2_derivatives(coeffs, c0, h, opt);
    rep.noise = (-r2.d2).real();
    rep.noise_error = r2.d2_error / std::max(std::abs(rep.noise), 1e-12);
    rep.h = h;
    rep.snr = rep.noise > 0 ? rep.flux / std::sqrt(rep.noise) : 0.0;
    if (rep.flux_error > opt.tolerance || rep.noise_error > opt.tolerance) {
        rep.flagged = true;
        std::ostringstream os;
        os << "stencil disagreement flux " << rep.flux_error << " noise " << rep.noise_error;
        rep.note = os.str();
    }
    return rep;
}

} // namespace pcs
