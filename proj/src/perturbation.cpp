#include "pcs/perturbation.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

namespace pcs {

PerturbationSplit split_by_order(const DressedLiouvillian& model, const CountingFields& f, double t)
{
    PerturbationSplit s;
    s.l0 = model.tagged(0, f, t);
    s.l1 = Mat::Zero(model.dim(), model.dim());
    for (int n = 1; n <= model.max_order(); ++n) s.l1 += model.tagged(n, f, t);
    return s;
}

namespace {

cplx nhpt_from(const SpectralDecomposition& sd, const PerturbationSplit& split, int target, int order)
{
    if (order < 1 || order > 2) throw Error(ErrorKind::InvalidArgument, "perturbation order must be 1 or 2");
    const Eigen::Index n = sd.eigenvalues.size();
    if (target < 0 || target >= n) throw Error(ErrorKind::InvalidArgument, "target index out of range");
    const cplx lam0 = sd.eigenvalues(target);
    const double tol = 1e-9 * std::max(sd.norm, 1e-300);
    for (Eigen::Index k = 0; k < n; ++k) {
        if (k == target) continue;
        if (std::abs(sd.eigenvalues(k) - lam0) < tol) {
            std::ostringstream os;
            os << "target eigenvalue " << lam0 << " is within " << tol << " of eigenvalue " << sd.eigenvalues(k);
            throw Error(ErrorKind::NearDegenerate, os.str());
        }
    }
    const Vec l1r = split.l1 * sd.right.col(target);
    const RowVec ll1 = sd.left.row(target) * split.l1;
    cplx lam = lam0 + cplx(sd.left.row(target) * l1r);
    if (order == 2) {
        for (Eigen::Index k = 0; k < n; ++k) {
            if (k == target) continue;
            const cplx num = cplx(sd.left.row(k) * l1r) * cplx(ll1 * sd.right.col(k));
            lam += num / (lam0 - sd.eigenvalues(k));
        }
    }
    return lam;
}

} // namespace

cplx nhpt_eigenvalue(const PerturbationSplit& split, int target, int order)
{
    if (split.l0.rows() != split.l1.rows() || split.l0.cols() != split.l1.cols())
        throw Error(ErrorKind::DimensionMismatch, "L0 and L1 differ in size");
    return nhpt_from(spectral_decompose(split.l0), split, target, order);
}

cplx nhpt_eigenvalue_near(const PerturbationSplit& split, cplx near, int order)
{
    const auto sd = spectral_decompose(split.l0);
    int best = 0;
    for (Eigen::Index k = 1; k < sd.eigenvalues.size(); ++k)
        if (std::abs(sd.eigenvalues(k) - near) < std::abs(sd.eigenvalues(best) - near)) best = static_cast<int>(k);
    return nhpt_from(sd, split, best, order);
}

void SubspacePartition::validate(int dim) const
{
    std::set<int> seen;
    for (int i : stationary) {
        if (i < 0 || i >= dim || !seen.insert(i).second) throw Error(ErrorKind::InvalidArgument, "bad stationary index");
    }
    for (int i : transient) {
        if (i < 0 || i >= dim || !seen.insert(i).second) throw Error(ErrorKind::InvalidArgument, "bad transient index");
    }
    if (static_cast<int>(seen.size()) != dim) throw Error(ErrorKind::InvalidArgument, "partition does not cover the basis");
}

namespace {

Mat block(const Mat& m, const std::vector<int>& rows, const std::vector<int>& cols)
{
    Mat out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(rows[i], cols[j]);
    return out;
}

Mat checked_inverse(const Mat& t)
{
    Eigen::JacobiSVD<Mat> svd(t);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (!(smin > 1e-13 * s(0))) {
        std::ostringstream os;
        os << "smallest singular value of the transient block is " << smin;
        throw Error(ErrorKind::SingularBlock, os.str());
    }
    return t.partialPivLu().inverse();
}

} // namespace

Mat adiabatic_eliminate(const Mat& l, const SubspacePartition& part)
{
    part.validate(static_cast<int>(l.rows()));
    const Mat lss = block(l, part.stationary, part.stationary);
    if (part.transient.empty()) return lss;
    const Mat lst = block(l, part.stationary, part.transient);
    const Mat lts = block(l, part.transient, part.stationary);
    const Mat ltt = block(l, part.transient, part.transient);
    return lss - lst * checked_inverse(ltt) * lts;
}

Mat adiabatic_eliminate(const std::vector<Mat>& orders, const SubspacePartition& part, int max_order)
{
    if (orders.empty()) throw Error(ErrorKind::InvalidArgument, "no tagged terms");
    const int dim = static_cast<int>(orders[0].rows());
    part.validate(dim);
    const int kmax = std::max(max_order, 0);
    auto at = [&](int n) -> const Mat* { return n < static_cast<int>(orders.size()) ? &orders[static_cast<std::size_t>(n)] : nullptr; };
    const auto ns = static_cast<Eigen::Index>(part.stationary.size());
    const auto nt = static_cast<Eigen::Index>(part.transient.size());
    Mat out = Mat::Zero(ns, ns);
    for (int n = 0; n <= kmax; ++n)
        if (auto m = at(n)) out += block(*m, part.stationary, part.stationary);
    if (nt == 0) return out;

    std::vector<Mat> s_t, t_s, t_t;
    for (int n = 0; n <= kmax; ++n) {
        if (auto m = at(n)) {
            s_t.push_back(block(*m, part.stationary, part.transient));
            t_s.push_back(block(*m, part.transient, part.stationary));
            t_t.push_back(block(*m, part.transient, part.transient));
        } else {
            s_t.push_back(Mat::Zero(ns, nt));
            t_s.push_back(Mat::Zero(nt, ns));
            t_t.push_back(Mat::Zero(nt, nt));
        }
    }
    std::vector<Mat> x;
    x.push_back(checked_inverse(t_t[0]));
    for (int n = 1; n <= kmax; ++n) {
        Mat acc = Mat::Zero(nt, nt);
        for (int k = 1; k <= n; ++k) acc += t_t[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(n - k)];
        x.push_back(-x[0] * acc);
    }
    for (int a = 0; a <= kmax; ++a)
        for (int b = 0; a + b <= kmax; ++b)
            for (int c = 0; a + b + c <= kmax; ++c)
                out -= s_t[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(b)] * t_s[static_cast<std::size_t>(c)];
    return out;
}

std::vector<Mat> tagged_orders(const DressedLiouvillian& model, const CountingFields& f, double t)
{
    std::vector<Mat> out;
    for (int n = 0; n <= model.max_order(); ++n) out.push_back(model.tagged(n, f, t));
    return out;
}

} // namespace pcs
