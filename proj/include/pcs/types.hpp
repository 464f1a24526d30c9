#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pcs {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RowVec = Eigen::RowVectorXcd;

inline constexpr double pi = 3.14159265358979323846;

enum class ErrorKind {
    InvalidArgument,
    DimensionMismatch,
    Defective,
    DegenerateStationary,
    NearDegenerate,
    BranchCollision,
    BranchAmbiguity,
    NotConverged,
    SingularBlock,
    Refused,
    Range,
    WindowOverflow,
    Config,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

// Counting fields: chi per coherent drive mode, xi per monitored bath channel.
struct CountingFields {
    std::vector<double> chi;
    std::vector<double> xi;

    static CountingFields zeros(int modes, int baths)
    {
        return {std::vector<double>(modes, 0.0), std::vector<double>(baths, 0.0)};
    }
    CountingFields scaled(double s) const;
    // Every component reduced to (-pi, pi].
    CountingFields wrapped() const;
    CountingFields operator+(const CountingFields& o) const;
    bool is_zero() const;
    bool finite() const;
};

enum class Method { SpectralFD, CharPoly, AnalyticOracle, PerturbationTheory, PeriodicNumeric };

const char* to_string(Method m);
Method method_from_string(const std::string& s);

} // namespace pcs
