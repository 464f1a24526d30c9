#include "pcs/superop.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace pcs {

namespace {

Mat pauli(int k)
{
    Mat s(2, 2);
    const cplx i(0, 1);
    switch (k) {
    case 0: s << 1, 0, 0, 1; break;
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, -i, i, 0; break;
    default: s << 1, 0, 0, -1; break;
    }
    return s;
}

int matter_dim_of(Eigen::Index n)
{
    int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    if (static_cast<Eigen::Index>(d) * d != n) throw Error(ErrorKind::DimensionMismatch, "vector length is not a square");
    return d;
}

} // namespace

Vec vectorize(const Mat& rho, Basis basis)
{
    if (rho.rows() != rho.cols()) throw Error(ErrorKind::DimensionMismatch, "density matrix must be square");
    const Eigen::Index d = rho.rows();
    if (basis == Basis::Pauli) {
        if (d != 2) throw Error(ErrorKind::DimensionMismatch, "Pauli basis requires d = 2");
        Vec v(4);
        for (int k = 0; k < 4; ++k) v(k) = (rho * pauli(k)).trace();
        return v;
    }
    Vec v(d * d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i) v(i + d * j) = rho(i, j);
    return v;
}

Mat devectorize(const Vec& v, Basis basis)
{
    if (basis == Basis::Pauli) {
        if (v.size() != 4) throw Error(ErrorKind::DimensionMismatch, "Pauli vector must have 4 entries");
        Mat rho = Mat::Zero(2, 2);
        for (int k = 0; k < 4; ++k) rho += 0.5 * v(k) * pauli(k);
        return rho;
    }
    const int d = matter_dim_of(v.size());
    Mat rho(d, d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) rho(i, j) = v(i + d * j);
    return rho;
}

RowVec trace_functional(int dim, Basis basis)
{
    if (basis == Basis::Pauli) {
        RowVec f = RowVec::Zero(4);
        f(0) = 1.0;
        return f;
    }
    RowVec f = RowVec::Zero(dim * dim);
    for (int i = 0; i < dim; ++i) f(i + dim * i) = 1.0;
    return f;
}

RowVec observable_functional(const Mat& op, Basis basis)
{
    const Eigen::Index d = op.rows();
    if (basis == Basis::Pauli) {
        if (d != 2) throw Error(ErrorKind::DimensionMismatch, "Pauli basis requires d = 2");
        RowVec f(4);
        for (int k = 0; k < 4; ++k) f(k) = 0.5 * (op * pauli(k)).trace();
        return f;
    }
    RowVec f(d * d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i) f(i + d * j) = op(j, i);
    return f;
}

Mat left_mul(const Mat& a)
{
    return Eigen::kroneckerProduct(Mat::Identity(a.rows(), a.cols()), a);
}

Mat right_mul(const Mat& b)
{
    return Eigen::kroneckerProduct(b.transpose(), Mat::Identity(b.rows(), b.cols()));
}

Mat sandwich(const Mat& a, const Mat& b)
{
    return Eigen::kroneckerProduct(b.transpose(), a);
}

Mat commutator_generator(const Mat& h)
{
    const cplx i(0, 1);
    return -i * left_mul(h) + i * right_mul(h);
}

Mat jump_part(const Mat& l)
{
    return 2.0 * sandwich(l, l.adjoint());
}

Mat nojump_part(const Mat& l)
{
    const Mat ll = l.adjoint() * l;
    return -left_mul(ll) - right_mul(ll);
}

double spectral_norm(const Mat& a)
{
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(a);
    return svd.singularValues()(0);
}

namespace {

std::vector<int> sorted_order(const Vec& w)
{
    std::vector<int> idx(static_cast<std::size_t>(w.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (w(a).real() != w(b).real()) return w(a).real() > w(b).real();
        return w(a).imag() > w(b).imag();
    });
    return idx;
}

} // namespace

SpectralDecomposition spectral_decompose(const Mat& a, const DecomposeOptions& opt)
{
    if (a.rows() != a.cols()) throw Error(ErrorKind::DimensionMismatch, "matrix must be square");
    if (!a.allFinite()) throw Error(ErrorKind::InvalidArgument, "matrix has non-finite entries");
    const Eigen::Index n = a.rows();
    Eigen::ComplexEigenSolver<Mat> es(a, true);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::NotConverged, "eigensolver failed");

    const auto order = sorted_order(es.eigenvalues());
    SpectralDecomposition sd;
    sd.eigenvalues.resize(n);
    sd.right.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const int src = order[static_cast<std::size_t>(k)];
        sd.eigenvalues(k) = es.eigenvalues()(src);
        Vec v = es.eigenvectors().col(src);
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        const cplx ph = std::abs(v(imax)) > 0 ? std::conj(v(imax)) / std::abs(v(imax)) : cplx(1.0);
        v *= ph;
        v /= v.norm();
        sd.right.col(k) = v;
    }
    Eigen::JacobiSVD<Mat> svd(sd.right);
    const auto& s = svd.singularValues();
    sd.condition = s(n - 1) > 0 ? s(0) / s(n - 1) : std::numeric_limits<double>::infinity();
    if (!(sd.condition <= opt.max_condition)) {
        std::ostringstream os;
        os << "eigenvector matrix condition number " << sd.condition << " exceeds " << opt.max_condition;
        throw Error(ErrorKind::Defective, os.str());
    }
    sd.left = sd.right.partialPivLu().inverse();
    for (Eigen::Index k = 0; k < n; ++k) {
        const cplx overlap = sd.left.row(k) * sd.right.col(k);
        sd.left.row(k) /= overlap;
    }
    sd.norm = spectral_norm(a);
    const double tol = opt.degeneracy_tol * std::max(sd.norm, 1e-300);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (std::abs(sd.eigenvalues(i) - sd.eigenvalues(j)) < tol)
                sd.near_degenerate.emplace_back(static_cast<int>(i), static_cast<int>(j));
    return sd;
}

Vec stationary_state(const Mat& a, const RowVec& trace, const StationaryOptions& opt)
{
    if (a.rows() != a.cols() || trace.size() != a.cols())
        throw Error(ErrorKind::DimensionMismatch, "stationary_state: size mismatch");
    const double norm = spectral_norm(a);
    Eigen::ComplexEigenSolver<Mat> es(a, false);
    const double tol = opt.stationarity_tol * std::max(norm, 1e-300);
    std::vector<cplx> small;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
        if (std::abs(es.eigenvalues()(k)) < tol) small.push_back(es.eigenvalues()(k));
    if (small.size() > 1) {
        std::ostringstream os;
        os << "eigenvalues below tolerance " << tol << ":";
        for (auto& w : small) os << " " << w;
        throw Error(ErrorKind::DegenerateStationary, os.str());
    }
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
    Vec v = svd.matrixV().col(a.cols() - 1);
    const cplx tr = trace * v;
    if (std::abs(tr) < 1e-14) throw Error(ErrorKind::InvalidArgument, "null vector has vanishing trace");
    v /= tr;
    const double res = (a * v).norm() / std::max(v.norm(), 1e-300);
    if (res > 1e-10 * std::max(norm, 1e-300) && small.empty()) {
        std::ostringstream os;
        os << "no stationary eigenvalue: residual " << res;
        throw Error(ErrorKind::InvalidArgument, os.str());
    }
    return v;
}

Mat propagator(const Mat& a, double t, PropagateMethod method)
{
    if (t < 0) throw Error(ErrorKind::InvalidArgument, "propagation time must be nonnegative");
    if (t == 0) return Mat::Identity(a.rows(), a.cols());
    if (method != PropagateMethod::Series) {
        try {
            DecomposeOptions dopt;
            if (method == PropagateMethod::Auto) dopt.max_condition = 1e8;
            const auto sd = spectral_decompose(a, dopt);
            Vec e(sd.eigenvalues.size());
            for (Eigen::Index k = 0; k < e.size(); ++k) e(k) = std::exp(sd.eigenvalues(k) * t);
            return sd.right * e.asDiagonal() * sd.left;
        } catch (const Error& err) {
            if (method == PropagateMethod::Spectral || err.kind() != ErrorKind::Defective) throw;
        }
    }
    const Mat at = a * t;
    return at.exp();
}

Propagation propagate(const Mat& a, const Vec& rho0, double t, PropagateMethod method)
{
    if (rho0.size() != a.cols()) throw Error(ErrorKind::DimensionMismatch, "propagate: state size mismatch");
    Propagation out;
    if (t == 0) {
        out.state = rho0;
        return out;
    }
    if (method != PropagateMethod::Series) {
        try {
            DecomposeOptions dopt;
            if (method == PropagateMethod::Auto) dopt.max_condition = 1e8;
            const auto sd = spectral_decompose(a, dopt);
            Vec c = sd.left * rho0;
            for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::exp(sd.eigenvalues(k) * t);
            out.state = sd.right * c;
            return out;
        } catch (const Error& err) {
            if (method == PropagateMethod::Spectral || err.kind() != ErrorKind::Defective) throw;
            out.series_fallback = true;
        }
    }
    const Mat at = a * t;
    out.state = at.exp() * rho0;
    return out;
}

Mat rk4_propagator(const TimeGenerator& gen, double t0, double t1, int steps)
{
    if (steps < 1) throw Error(ErrorKind::InvalidArgument, "steps must be positive");
    const double dt = (t1 - t0) / steps;
    Mat l0 = gen(t0);
    Mat u = Mat::Identity(l0.rows(), l0.cols());
    for (int s = 0; s < steps; ++s) {
        const double t = t0 + s * dt;
        const Mat lm = gen(t + 0.5 * dt);
        const Mat l1 = gen(t + dt);
        const Mat k1 = l0 * u;
        const Mat k2 = lm * (u + 0.5 * dt * k1);
        const Mat k3 = lm * (u + 0.5 * dt * k2);
        const Mat k4 = l1 * (u + dt * k3);
        u += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        l0 = l1;
    }
    return u;
}

Monodromy one_period_propagator(const TimeGenerator& gen, double period, const PeriodOptions& opt)
{
    if (opt.steps < 64) throw Error(ErrorKind::InvalidArgument, "one_period_propagator requires steps >= 64");
    if (!(period > 0)) throw Error(ErrorKind::InvalidArgument, "period must be positive");
    Monodromy m;
    if (!opt.check) {
        m.u = rk4_propagator(gen, 0.0, period, opt.steps);
        return m;
    }
    m.u_coarse = rk4_propagator(gen, 0.0, period, opt.steps);
    m.u = rk4_propagator(gen, 0.0, period, 2 * opt.steps);
    m.relative_change = (m.u - m.u_coarse).norm() / std::max(m.u.norm(), 1e-300);
    if (m.relative_change > opt.tolerance) {
        std::ostringstream os;
        os << "monodromy changed by " << m.relative_change << " under step doubling (" << opt.steps << " -> "
           << 2 * opt.steps << " steps); |U_coarse| = " << m.u_coarse.norm() << ", |U_fine| = " << m.u.norm();
        throw Error(ErrorKind::NotConverged, os.str());
    }
    return m;
}

EffectiveGenerator effective_liouvillian(const Mat& u, double period)
{
    const auto sd = spectral_decompose(u);
    EffectiveGenerator eg;
    eg.eigenvalues.resize(sd.eigenvalues.size());
    for (Eigen::Index k = 0; k < sd.eigenvalues.size(); ++k) {
        const cplx mu = sd.eigenvalues(k);
        if (std::abs(mu) == 0.0) throw Error(ErrorKind::InvalidArgument, "monodromy has a zero eigenvalue");
        eg.eigenvalues(k) = std::log(mu) / period;
        if (pi - std::abs(std::arg(mu)) < 1e-6) eg.near_branch_cut.push_back(static_cast<int>(k));
    }
    eg.generator = sd.right * eg.eigenvalues.asDiagonal() * sd.left;
    return eg;
}

} // namespace pcs
