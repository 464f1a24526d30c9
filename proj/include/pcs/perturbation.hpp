#pragma once

#include <vector>

#include "pcs/dressed.hpp"

namespace pcs {

struct PerturbationSplit {
    Mat l0;
    Mat l1;
};

PerturbationSplit split_by_order(const DressedLiouvillian& model, const CountingFields& f, double t = 0.0);

// Eigenvalue of L0 + L1 to first or second order around eigenvalue `target` of L0
// (index in the descending-real-part ordering).
cplx nhpt_eigenvalue(const PerturbationSplit& split, int target, int order);
// Same, selecting the L0 eigenvalue nearest to `near`.
cplx nhpt_eigenvalue_near(const PerturbationSplit& split, cplx near, int order);

struct SubspacePartition {
    std::vector<int> stationary;
    std::vector<int> transient;
    void validate(int dim) const;
};

// L_ss - L_st L_tt^{-1} L_ts without truncation.
Mat adiabatic_eliminate(const Mat& l, const SubspacePartition& part);
// Scale-tagged version: orders[n] multiplies g^n. Terms beyond g^max_order are dropped.
Mat adiabatic_eliminate(const std::vector<Mat>& orders, const SubspacePartition& part, int max_order);

std::vector<Mat> tagged_orders(const DressedLiouvillian& model, const CountingFields& f, double t = 0.0);

} // namespace pcs
