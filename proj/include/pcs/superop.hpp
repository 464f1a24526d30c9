#pragma once

#include <functional>
#include <vector>

#include "pcs/types.hpp"

namespace pcs {

enum class Basis { Element, Pauli };

// Element basis stacks columns: index i + d*j holds rho(i, j).
// Pauli basis holds (tr rho, tr rho sx, tr rho sy, tr rho sz).
Vec vectorize(const Mat& rho, Basis basis);
Mat devectorize(const Vec& v, Basis basis);

// Row functional f with f * vectorize(rho) == tr(rho).
RowVec trace_functional(int dim, Basis basis);
// Row functional f with f * vectorize(rho) == tr(O rho).
RowVec observable_functional(const Mat& op, Basis basis);

// Superoperators in the element basis.
Mat left_mul(const Mat& a);   // rho -> a rho
Mat right_mul(const Mat& b);  // rho -> rho b
Mat sandwich(const Mat& a, const Mat& b);  // rho -> a rho b
Mat commutator_generator(const Mat& h);    // rho -> -i[h, rho]
// rho -> 2 L rho L^+ - {L^+ L, rho}, split into jump and no-jump parts.
Mat jump_part(const Mat& l);
Mat nojump_part(const Mat& l);

double spectral_norm(const Mat& a);

struct SpectralDecomposition {
    Vec eigenvalues;
    Mat right;  // columns
    Mat left;   // rows, left.row(mu) * right.col(nu) = delta
    double condition = 1.0;
    double norm = 0.0;
    std::vector<std::pair<int, int>> near_degenerate;
};

struct DecomposeOptions {
    double max_condition = 1e12;
    double degeneracy_tol = 1e-9;  // relative to spectral norm
};

// Eigenpairs sorted by descending real part, ties broken by imaginary part.
SpectralDecomposition spectral_decompose(const Mat& a, const DecomposeOptions& opt = {});

struct StationaryOptions {
    double stationarity_tol = 1e-10;  // relative to spectral norm
};

// Right null vector normalized so that trace * rho = 1.
Vec stationary_state(const Mat& a, const RowVec& trace, const StationaryOptions& opt = {});

enum class PropagateMethod { Auto, Spectral, Series };

struct Propagation {
    Vec state;
    bool series_fallback = false;
};

Propagation propagate(const Mat& a, const Vec& rho0, double t,
                      PropagateMethod method = PropagateMethod::Auto);
Mat propagator(const Mat& a, double t, PropagateMethod method = PropagateMethod::Auto);

using TimeGenerator = std::function<Mat(double)>;

struct Monodromy {
    Mat u;
    Mat u_coarse;
    double relative_change = 0.0;
};

struct PeriodOptions {
    int steps = 512;
    double tolerance = 1e-8;
    bool check = true;
};

// dU/dt = L(t) U, U(0) = 1, classical RK4 with `steps` and 2*steps; the finer one is returned.
Monodromy one_period_propagator(const TimeGenerator& gen, double period, const PeriodOptions& opt = {});
// Single pass without the step-doubling estimate.
Mat rk4_propagator(const TimeGenerator& gen, double t0, double t1, int steps);

struct EffectiveGenerator {
    Mat generator;
    Vec eigenvalues;
    std::vector<int> near_branch_cut;
};

EffectiveGenerator effective_liouvillian(const Mat& u, double period);

} // namespace pcs
