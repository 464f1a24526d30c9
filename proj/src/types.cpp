#include "pcs/types.hpp"

#include <cmath>

namespace pcs {

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::Defective: return "defective matrix";
    case ErrorKind::DegenerateStationary: return "degenerate stationary subspace";
    case ErrorKind::NearDegenerate: return "near degeneracy";
    case ErrorKind::BranchCollision: return "branch collision";
    case ErrorKind::BranchAmbiguity: return "branch ambiguity";
    case ErrorKind::NotConverged: return "not converged";
    case ErrorKind::SingularBlock: return "singular transient block";
    case ErrorKind::Refused: return "refused";
    case ErrorKind::Range: return "range";
    case ErrorKind::WindowOverflow: return "window overflow";
    case ErrorKind::Config: return "config";
    }
    return "error";
}

CountingFields CountingFields::scaled(double s) const
{
    CountingFields out = *this;
    for (auto& c : out.chi) c *= s;
    for (auto& x : out.xi) x *= s;
    return out;
}

CountingFields CountingFields::wrapped() const
{
    auto wrap = [](double x) {
        double y = std::remainder(x, 2.0 * pi);
        return y <= -pi ? y + 2.0 * pi : y;
    };
    CountingFields out = *this;
    for (auto& c : out.chi) c = wrap(c);
    for (auto& x : out.xi) x = wrap(x);
    return out;
}

CountingFields CountingFields::operator+(const CountingFields& o) const
{
    if (o.chi.size() != chi.size() || o.xi.size() != xi.size())
        throw Error(ErrorKind::DimensionMismatch, "counting field sizes differ");
    CountingFields out = *this;
    for (std::size_t i = 0; i < chi.size(); ++i) out.chi[i] += o.chi[i];
    for (std::size_t i = 0; i < xi.size(); ++i) out.xi[i] += o.xi[i];
    return out;
}

bool CountingFields::is_zero() const
{
    for (double c : chi)
        if (c != 0.0) return false;
    for (double x : xi)
        if (x != 0.0) return false;
    return true;
}

bool CountingFields::finite() const
{
    for (double c : chi)
        if (!std::isfinite(c)) return false;
    for (double x : xi)
        if (!std::isfinite(x)) return false;
    return true;
}

const char* to_string(Method m)
{
    switch (m) {
    case Method::SpectralFD: return "SpectralFD";
    case Method::CharPoly: return "CharPoly";
    case Method::AnalyticOracle: return "AnalyticOracle";
    case Method::PerturbationTheory: return "PerturbationTheory";
    case Method::PeriodicNumeric: return "PeriodicNumeric";
    }
    return "?";
}

Method method_from_string(const std::string& s)
{
    for (Method m : {Method::SpectralFD, Method::CharPoly, Method::AnalyticOracle, Method::PerturbationTheory,
                     Method::PeriodicNumeric})
        if (s == to_string(m)) return m;
    throw Error(ErrorKind::Config, "unknown method '" + s +
                                       "' (expected SpectralFD, CharPoly, AnalyticOracle, PerturbationTheory, "
                                       "PeriodicNumeric)");
}

} // namespace pcs
