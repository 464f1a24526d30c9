#include "pcs/dressed.hpp"

#include <cmath>

namespace pcs {

DressedLiouvillian::DressedLiouvillian(int dim, Basis basis, int modes, int baths, std::string name)
    : dim_(dim), basis_(basis), modes_(modes), baths_(baths), name_(std::move(name))
{
    if (basis == Basis::Pauli) {
        if (dim != 4) throw Error(ErrorKind::DimensionMismatch, "Pauli basis requires D = 4");
        matter_dim_ = 2;
    } else {
        matter_dim_ = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dim))));
        if (matter_dim_ * matter_dim_ != dim) throw Error(ErrorKind::DimensionMismatch, "D must be a square");
    }
    if (modes < 0 || baths < 0) throw Error(ErrorKind::InvalidArgument, "negative number of counting fields");
}

void DressedLiouvillian::add(ChargedTerm term)
{
    if (term.op.rows() != dim_ || term.op.cols() != dim_)
        throw Error(ErrorKind::DimensionMismatch, "term has wrong dimension");
    if (!term.op.allFinite()) throw Error(ErrorKind::InvalidArgument, "term has non-finite entries");
    if (term.q.empty()) term.q.assign(static_cast<std::size_t>(modes_), 0);
    if (term.m.empty()) term.m.assign(static_cast<std::size_t>(baths_), 0);
    if (static_cast<int>(term.q.size()) != modes_ || static_cast<int>(term.m.size()) != baths_)
        throw Error(ErrorKind::DimensionMismatch, "term charges do not match the number of counting fields");
    terms_.push_back(std::move(term));
}

int DressedLiouvillian::max_order() const
{
    int o = 0;
    for (const auto& t : terms_) o = std::max(o, t.order);
    return o;
}

void DressedLiouvillian::check_fields(const CountingFields& f) const
{
    if (static_cast<int>(f.chi.size()) != modes_ || static_cast<int>(f.xi.size()) != baths_)
        throw Error(ErrorKind::DimensionMismatch, "counting fields do not match model '" + name_ + "'");
    if (!f.finite()) throw Error(ErrorKind::InvalidArgument, "counting fields must be finite");
}

double DressedLiouvillian::phase(const ChargedTerm& term, const CountingFields& f) const
{
    double th = 0.0;
    for (int k = 0; k < modes_; ++k) th += term.q[static_cast<std::size_t>(k)] * f.chi[static_cast<std::size_t>(k)];
    for (int k = 0; k < baths_; ++k) th += term.m[static_cast<std::size_t>(k)] * f.xi[static_cast<std::size_t>(k)];
    return th;
}

cplx DressedLiouvillian::coefficient(const ChargedTerm& term, double t) const
{
    return term.coeff ? term.coeff(t) : cplx(1.0);
}

Mat DressedLiouvillian::at(const CountingFields& f, double t) const
{
    check_fields(f);
    Mat out = Mat::Zero(dim_, dim_);
    for (const auto& term : terms_) {
        const double th = phase(term, f);
        out += (coefficient(term, t) * std::exp(cplx(0, -th))) * term.op;
    }
    return out;
}

Mat DressedLiouvillian::base(double t) const
{
    Mat out = Mat::Zero(dim_, dim_);
    for (const auto& term : terms_) out += coefficient(term, t) * term.op;
    return out;
}

Mat DressedLiouvillian::increment(const CountingFields& f, double t) const
{
    check_fields(f);
    Mat out = Mat::Zero(dim_, dim_);
    for (const auto& term : terms_) {
        const double th = phase(term, f);
        if (th == 0.0) continue;
        const cplx d = cplx(0, -2.0 * std::sin(0.5 * th)) * std::exp(cplx(0, -0.5 * th));
        out += (coefficient(term, t) * d) * term.op;
    }
    return out;
}

Mat DressedLiouvillian::derivative(const CountingFields& dir, int n, double t) const
{
    check_fields(dir);
    if (n < 1 || n > 2) throw Error(ErrorKind::InvalidArgument, "derivative order must be 1 or 2");
    Mat out = Mat::Zero(dim_, dim_);
    for (const auto& term : terms_) {
        const double th = phase(term, dir);
        if (th == 0.0) continue;
        const cplx d = n == 1 ? cplx(0, -th) : cplx(-th * th, 0);
        out += (coefficient(term, t) * d) * term.op;
    }
    return out;
}

Mat DressedLiouvillian::tagged(int order, const CountingFields& f, double t) const
{
    check_fields(f);
    Mat out = Mat::Zero(dim_, dim_);
    for (const auto& term : terms_) {
        if (term.order != order) continue;
        out += (coefficient(term, t) * std::exp(cplx(0, -phase(term, f)))) * term.op;
    }
    return out;
}

TimeGenerator DressedLiouvillian::generator(const CountingFields& f) const
{
    check_fields(f);
    return [this, f](double t) { return at(f, t); };
}

bool DressedLiouvillian::has_flux_observable(int mode) const
{
    return mode >= 0 && mode < static_cast<int>(flux_obs_.size()) && static_cast<bool>(flux_obs_[static_cast<std::size_t>(mode)]);
}

RowVec DressedLiouvillian::flux_functional(int mode, double t) const
{
    if (!has_flux_observable(mode)) throw Error(ErrorKind::InvalidArgument, "model has no flux observable for this mode");
    return observable_functional(flux_obs_[static_cast<std::size_t>(mode)](t), basis_);
}

} // namespace pcs
