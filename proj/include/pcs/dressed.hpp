#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pcs/superop.hpp"

namespace pcs {

// One term of L(xi, chi; t) = sum_j f_j(t) exp(-i(q_j . chi + m_j . xi)) L_j.
// q counts photons added to each drive mode, m photons emitted into each bath channel.
struct ChargedTerm {
    Mat op;
    std::vector<int> q;
    std::vector<int> m;
    std::function<cplx(double)> coeff;  // empty means 1
    int order = 0;                      // perturbative scale tag
};

class DressedLiouvillian {
public:
    DressedLiouvillian(int dim, Basis basis, int modes, int baths, std::string name = {});

    void add(ChargedTerm term);
    void set_period(double period) { period_ = period; }
    void set_flux_observables(std::vector<std::function<Mat(double)>> obs) { flux_obs_ = std::move(obs); }

    int dim() const { return dim_; }
    int matter_dim() const { return matter_dim_; }
    Basis basis() const { return basis_; }
    int modes() const { return modes_; }
    int baths() const { return baths_; }
    bool periodic() const { return period_ > 0.0; }
    double period() const { return period_; }
    const std::string& name() const { return name_; }
    const std::vector<ChargedTerm>& terms() const { return terms_; }
    RowVec trace() const { return trace_functional(matter_dim_, basis_); }
    int max_order() const;

    Mat at(const CountingFields& f, double t = 0.0) const;
    Mat base(double t = 0.0) const;
    // at(f, t) - base(t), accurate for small fields.
    Mat increment(const CountingFields& f, double t = 0.0) const;
    // Exact first and second derivatives along a field direction.
    Mat derivative(const CountingFields& dir, int n, double t = 0.0) const;
    // Sum of terms carrying a given scale tag.
    Mat tagged(int order, const CountingFields& f, double t = 0.0) const;
    TimeGenerator generator(const CountingFields& f) const;

    bool has_flux_observable(int mode) const;
    // Functional giving <O_k> with O_k = dH_chi/dchi_k at zero fields.
    RowVec flux_functional(int mode, double t = 0.0) const;

    void check_fields(const CountingFields& f) const;

private:
    double phase(const ChargedTerm& term, const CountingFields& f) const;
    cplx coefficient(const ChargedTerm& term, double t) const;

    int dim_;
    int matter_dim_;
    Basis basis_;
    int modes_;
    int baths_;
    std::string name_;
    double period_ = 0.0;
    std::vector<ChargedTerm> terms_;
    std::vector<std::function<Mat(double)>> flux_obs_;
};

} // namespace pcs
