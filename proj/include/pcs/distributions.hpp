#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pcs/counting.hpp"

namespace pcs {

struct PhotonDistribution {
    int modes = 1;
    std::vector<int> n_min;
    std::vector<int> size;
    std::vector<double> p;  // row-major over modes
    int grid = 0;
    double time = 0.0;
    double clipped_mass = 0.0;
    double outside_mass = 0.0;
    std::string model;

    double at(int n1, int n2 = 0) const;
    double total() const;
    double mean(int mode) const;
    double variance(int mode) const;
};

using MgfFn = std::function<cplx(const std::vector<double>&)>;

struct ReconstructOptions {
    int grid = 256;
    double clip = 1e-9;
    double sigmas = 6.0;
    int threads = 1;  // workers sampling the MGF grid
};

struct MomentEstimate {
    double mean = 0.0;
    double variance = 0.0;
};

// Mean and variance from log M by finite differences along one mode.
MomentEstimate mgf_moments(const MgfFn& mgf, int modes, int mode, double h = 1e-3);

PhotonDistribution reconstruct(const MgfFn& mgf, int modes, const ReconstructOptions& opt = {});

PhotonDistribution reconstruct(const DressedLiouvillian& model, const Vec& rho0, const InitialLaw& law, double t,
                               const std::vector<int>& modes, const ReconstructOptions& opt = {});

} // namespace pcs
