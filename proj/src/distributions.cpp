#include "pcs/distributions.hpp"

#include <fftw3.h>

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace pcs {

double PhotonDistribution::at(int n1, int n2) const
{
    const int i = n1 - n_min[0];
    if (i < 0 || i >= size[0]) return 0.0;
    if (modes == 1) return p[static_cast<std::size_t>(i)];
    const int j = n2 - n_min[1];
    if (j < 0 || j >= size[1]) return 0.0;
    return p[static_cast<std::size_t>(i) * static_cast<std::size_t>(size[1]) + static_cast<std::size_t>(j)];
}

double PhotonDistribution::total() const
{
    double s = 0.0;
    for (double v : p) s += v;
    return s;
}

namespace {

std::vector<double> marginal(const PhotonDistribution& d, int mode)
{
    if (mode < 0 || mode >= d.modes) throw Error(ErrorKind::InvalidArgument, "mode outside the distribution");
    std::vector<double> m(static_cast<std::size_t>(d.size[static_cast<std::size_t>(mode)]), 0.0);
    if (d.modes == 1) return d.p;
    for (int i = 0; i < d.size[0]; ++i)
        for (int j = 0; j < d.size[1]; ++j)
            m[static_cast<std::size_t>(mode == 0 ? i : j)] +=
                d.p[static_cast<std::size_t>(i) * static_cast<std::size_t>(d.size[1]) + static_cast<std::size_t>(j)];
    return m;
}

bool power_of_two(int n)
{
    return n > 0 && (n & (n - 1)) == 0;
}

int next_power_of_two(double x)
{
    int n = 1;
    while (n < x && n < (1 << 30)) n <<= 1;
    return n;
}

} // namespace

double PhotonDistribution::mean(int mode) const
{
    const auto m = marginal(*this, mode);
    double s = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) s += m[k] * (n_min[static_cast<std::size_t>(mode)] + static_cast<double>(k));
    return s;
}

double PhotonDistribution::variance(int mode) const
{
    const auto m = marginal(*this, mode);
    const double mu = mean(mode);
    double s = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) {
        const double x = n_min[static_cast<std::size_t>(mode)] + static_cast<double>(k) - mu;
        s += m[k] * x * x;
    }
    return s;
}

MomentEstimate mgf_moments(const MgfFn& mgf, int modes, int mode, double h)
{
    if (mode < 0 || mode >= modes) throw Error(ErrorKind::InvalidArgument, "mode outside the MGF");
    auto k = [&](double s) {
        std::vector<double> chi(static_cast<std::size_t>(modes), 0.0);
        chi[static_cast<std::size_t>(mode)] = s;
        return std::log(mgf(chi));
    };
    const auto d = richardson_derivatives(k, h);
    return {(cplx(0, 1) * d.d1).real(), (-d.d2).real()};
}

PhotonDistribution reconstruct(const MgfFn& mgf, int modes, const ReconstructOptions& opt)
{
    if (modes < 1 || modes > 2) throw Error(ErrorKind::InvalidArgument, "reconstruction supports one or two modes");
    if (!power_of_two(opt.grid) || opt.grid < 128)
        throw Error(ErrorKind::InvalidArgument, "grid size must be a power of two >= 128");
    const int n = opt.grid;
    PhotonDistribution out;
    out.modes = modes;
    out.grid = n;
    std::vector<double> mean(static_cast<std::size_t>(modes)), sd(static_cast<std::size_t>(modes));
    for (int k = 0; k < modes; ++k) {
        const auto m = mgf_moments(mgf, modes, k);
        mean[static_cast<std::size_t>(k)] = m.mean;
        sd[static_cast<std::size_t>(k)] = std::sqrt(std::max(m.variance, 0.0));
        const double width = 2.0 * std::ceil(opt.sigmas * sd[static_cast<std::size_t>(k)]) + 1.0;
        if (width > n) {
            std::ostringstream os;
            os << "estimated support " << width << " exceeds the grid " << n << " in mode " << k << "; use grid >= "
               << next_power_of_two(2.0 * width);
            throw Error(ErrorKind::WindowOverflow, os.str());
        }
        out.n_min.push_back(static_cast<int>(std::lround(m.mean)) - n / 2);
        out.size.push_back(n);
    }

    const std::size_t total = modes == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    fftw_complex* buf = fftw_alloc_complex(total);
    auto field = [n](int j) { return 2.0 * pi * (j < n / 2 ? j : j - n) / n; };
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    auto sample = [&]() {
        for (std::size_t idx = next++; idx < total; idx = next++) {
            try {
                std::vector<double> chi;
                if (modes == 1)
                    chi = {field(static_cast<int>(idx))};
                else
                    chi = {field(static_cast<int>(idx / static_cast<std::size_t>(n))), field(static_cast<int>(idx % static_cast<std::size_t>(n)))};
                const cplx v = mgf(chi);
                buf[idx][0] = v.real();
                buf[idx][1] = v.imag();
            } catch (...) {
                std::lock_guard<std::mutex> g(failure_lock);
                if (!failure) failure = std::current_exception();
                next = total;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < opt.threads; ++t) pool.emplace_back(sample);
    sample();
    for (auto& t : pool) t.join();
    if (failure) {
        fftw_free(buf);
        std::rethrow_exception(failure);
    }
    fftw_plan plan = modes == 1 ? fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE)
                                : fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    auto wrap = [n](int v) { return ((v % n) + n) % n; };
    out.p.assign(total, 0.0);
    const double norm = 1.0 / static_cast<double>(total);
    double neg = 0.0;
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t src;
        if (modes == 1) {
            src = static_cast<std::size_t>(wrap(out.n_min[0] + static_cast<int>(idx)));
        } else {
            const int i = out.n_min[0] + static_cast<int>(idx / static_cast<std::size_t>(n));
            const int j = out.n_min[1] + static_cast<int>(idx % static_cast<std::size_t>(n));
            src = static_cast<std::size_t>(wrap(i)) * static_cast<std::size_t>(n) + static_cast<std::size_t>(wrap(j));
        }
        double v = buf[src][0] * norm;
        if (v < 0.0) {
            neg += -v;
            v = 0.0;
        }
        out.p[idx] = v;
    }
    fftw_free(buf);
    out.clipped_mass = neg;
    const double s = out.total();
    if (!(s > 0.0)) throw Error(ErrorKind::InvalidArgument, "reconstructed distribution has no positive mass");
    for (double& v : out.p) v /= s;

    double inside = 0.0;
    for (std::size_t idx = 0; idx < total; ++idx) {
        bool in = true;
        for (int k = 0; k < modes; ++k) {
            const int off = modes == 1 ? static_cast<int>(idx)
                                       : static_cast<int>(k == 0 ? idx / static_cast<std::size_t>(n) : idx % static_cast<std::size_t>(n));
            const double x = out.n_min[static_cast<std::size_t>(k)] + off - mean[static_cast<std::size_t>(k)];
            if (std::abs(x) > opt.sigmas * sd[static_cast<std::size_t>(k)] + 1.0) in = false;
        }
        if (in) inside += out.p[idx];
    }
    out.outside_mass = std::max(0.0, 1.0 - inside);
    return out;
}

PhotonDistribution reconstruct(const DressedLiouvillian& model, const Vec& rho0, const InitialLaw& law, double t,
                               const std::vector<int>& modes, const ReconstructOptions& opt)
{
    if (modes.empty() || modes.size() > 2) throw Error(ErrorKind::InvalidArgument, "select one or two modes");
    if (law.modes() != model.modes()) throw Error(ErrorKind::DimensionMismatch, "initial law must cover every drive mode");
    for (int k : modes)
        if (k < 0 || k >= model.modes()) throw Error(ErrorKind::InvalidArgument, "mode index outside the model");
    if (modes.size() == 2 && modes[0] == modes[1]) throw Error(ErrorKind::InvalidArgument, "modes must differ");
    MgfFn mgf = [&](const std::vector<double>& chi) {
        auto f = CountingFields::zeros(model.modes(), model.baths());
        for (std::size_t k = 0; k < modes.size(); ++k) f.chi[static_cast<std::size_t>(modes[k])] = chi[k];
        return dynamical_mgf(model, f, rho0, t).value * initial_mgf(law, f.chi);
    };
    auto d = reconstruct(mgf, static_cast<int>(modes.size()), opt);
    d.time = t;
    d.model = model.name();
    return d;
}

} // namespace pcs
