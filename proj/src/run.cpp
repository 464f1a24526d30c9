#include "pcs/run.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "pcs/charpoly.hpp"
#include "pcs/distributions.hpp"

namespace pcs {

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

void RunResult::merge(const RunResult& o)
{
    points += o.points;
    failures += o.failures;
    files.insert(files.end(), o.files.begin(), o.files.end());
    lines.insert(lines.end(), o.lines.begin(), o.lines.end());
}

namespace {

class Table {
public:
    explicit Table(std::vector<std::string> header) : width_(header.size()) { row(header); }

    void row(const std::vector<std::string>& cells)
    {
        if (cells.size() != width_) throw Error(ErrorKind::InvalidArgument, "CSV row width mismatch");
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k) text_ += ',';
            text_ += csv_field(cells[k]);
        }
        text_ += '\n';
    }

    void write(const std::string& path) const
    {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
        f << text_;
    }

private:
    std::size_t width_;
    std::string text_;
};

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn)
{
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (std::size_t k = next++; k < n; k = next++) fn(k);
    };
    const int t = std::max(1, std::min<int>(threads, static_cast<int>(n)));
    std::vector<std::thread> pool;
    for (int i = 1; i < t; ++i) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
}

std::string fmt_time(double t)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", t);
    return buf;
}

std::string file_name(const RunOptions& opt, const std::string& stem, const std::vector<std::string>& parts,
                      const std::string& ext = ".csv")
{
    std::string name = stem;
    for (const auto& p : parts)
        if (!p.empty()) name += "_" + p;
    return (std::filesystem::path(opt.out_dir) / (name + ext)).string();
}

Scenario with_variant(const Scenario& s, const Variant* v)
{
    Scenario out = s;
    std::vector<std::string> errors;
    if (v) apply_params(out, v->params, "variant " + v->name, errors);
    if (!errors.empty()) throw ConfigError(errors);
    return out;
}

CharPolyOptions charpoly_options(const Numerics& n)
{
    CharPolyOptions c;
    c.h = n.h;
    c.branch_fraction = n.gap_fraction;
    c.tolerance = n.tolerance;
    return c;
}

JcParams swapped(const JcParams& p)
{
    JcParams q = p;
    std::swap(q.omega1, q.omega2);
    std::swap(q.phi1, q.phi2);
    return q;
}

CumulantReport oracle_report(const JcParams& p, int mode)
{
    const JcParams q = mode == 0 ? p : swapped(p);
    CumulantReport r;
    r.mode = mode;
    r.channel = mode == 0 ? "drive1" : "drive2";
    r.method = Method::AnalyticOracle;
    r.flux = jc_flux_oracle(q);
    r.noise = jc_noise_oracle(q, JcNoiseMode::Reconstructed);
    r.snr = r.noise > 0 ? r.flux / std::sqrt(r.noise) : 0.0;
    return r;
}

double stencil_error(const CumulantReport& r)
{
    return std::max(r.flux_error, r.noise_error);
}

void log_line(const RunOptions& opt, const std::string& s)
{
    if (opt.log) *opt.log << s << '\n';
}

} // namespace

CumulantOptions cumulant_options(const Numerics& n)
{
    CumulantOptions c;
    c.h = n.h;
    c.gap_fraction = n.gap_fraction;
    c.tolerance = n.tolerance;
    c.steps_per_period = n.steps;
    return c;
}

DressedLiouvillian build_model(const Scenario& s, Method method)
{
    if (s.model == ModelKind::JaynesCummings) return jc_model(s.jc);
    if (method == Method::PeriodicNumeric) return lambda_model(s.lambda, LambdaFrame::RotatingFramePeriodic);
    return lambda_model(s.lambda, LambdaFrame::RwaEffective, true);
}

JcPoint jc_point(const JcParams& p, Method method, const Numerics& n)
{
    JcPoint out;
    if (method == Method::AnalyticOracle) {
        out.mode1 = oracle_report(p, 0);
        out.mode2 = oracle_report(p, 1);
        out.bloch = jc_stationary_bloch(p);
        return out;
    }
    if (method != Method::SpectralFD && method != Method::CharPoly)
        throw Error(ErrorKind::Refused, std::string("method ") + to_string(method) + " is not available for the JC model");
    const auto m = jc_model(p);
    CumulantReport r[2];
    for (int k = 0; k < 2; ++k) {
        r[k] = method == Method::SpectralFD ? cumulants_spectral(m, drive_direction(m, k), cumulant_options(n))
                                            : cumulants_charpoly(m, drive_direction(m, k), charpoly_options(n));
        r[k].mode = k;
        r[k].channel = k == 0 ? "drive1" : "drive2";
    }
    out.mode1 = r[0];
    out.mode2 = r[1];
    out.bloch = bloch_from_vector(model_stationary_state(m));
    return out;
}

namespace {

struct PointResult {
    CumulantReport m1, m2;
    Bloch bloch;
    std::string error;
};

PointResult compute_point(const Scenario& s, Method method)
{
    PointResult r;
    try {
        if (s.model == ModelKind::JaynesCummings) {
            const auto pt = jc_point(s.jc, method, s.numerics);
            r.m1 = pt.mode1;
            r.m2 = pt.mode2;
            r.bloch = pt.bloch;
        } else {
            const auto opt = cumulant_options(s.numerics);
            if (s.lambda.omega_s == 0.0) {
                r.m1.method = r.m2.method = method;
            } else {
                r.m1 = lambda_cumulants(s.lambda, 0, method, opt);
                r.m2 = lambda_cumulants(s.lambda, 1, method, opt);
            }
        }
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    return r;
}

void append_block(std::vector<std::string>& row, const PointResult& r, bool jc)
{
    if (!r.error.empty()) {
        for (int k = 0; k < (jc ? 9 : 6); ++k) row.push_back("nan");
        row.push_back(to_string(r.m1.method));
        row.push_back("nan");
        return;
    }
    for (double v : {r.m1.flux, r.m2.flux, r.m1.noise, r.m2.noise, r.m1.snr, r.m2.snr}) row.push_back(format_double(v));
    if (jc)
        for (double v : {r.bloch.x, r.bloch.y, r.bloch.z}) row.push_back(format_double(v));
    row.push_back(to_string(r.m1.method));
    row.push_back(format_double(std::max(stencil_error(r.m1), stencil_error(r.m2))));
}

std::vector<std::string> block_header(bool jc, const std::string& suffix)
{
    std::vector<std::string> h{"I_1", "I_2", "sigma2_1", "sigma2_2", "snr_1", "snr_2"};
    if (jc) h.insert(h.end(), {"rho_x", "rho_y", "rho_z"});
    h.insert(h.end(), {"method", "stencil_error"});
    for (auto& x : h) x += suffix;
    return h;
}

RunResult run_scan(const Scenario& base, const RunOptions& opt, const std::string& stem, const std::string& vname)
{
    RunResult res;
    if (base.sweeps.empty()) throw ConfigError({"scan: at least one sweep is required"});
    const bool jc = base.model == ModelKind::JaynesCummings;
    const int threads = opt.threads.value_or(base.threads);
    for (const auto& sw : base.sweeps) {
        Scenario s = base;
        std::vector<std::string> errors;
        apply_params(s, sw.params, "sweep " + sw.name, errors);
        if (!errors.empty()) throw ConfigError(errors);
        const auto grid = sw.grid();
        std::vector<PointResult> prim(grid.size()), comp(grid.size());
        parallel_for(grid.size(), threads, [&](std::size_t k) {
            Scenario q = s;
            set_param(q, sw.variable, grid[k]);
            const auto v = validate_model(q, "point");
            if (!v.empty()) {
                prim[k].error = v.front();
                comp[k].error = v.front();
                return;
            }
            prim[k] = compute_point(q, s.method);
            if (s.compare_method) comp[k] = compute_point(q, *s.compare_method);
        });
        std::vector<std::string> header{sw.variable};
        for (auto& h : block_header(jc, "")) header.push_back(h);
        if (s.compare_method)
            for (auto& h : block_header(jc, "_cmp")) header.push_back(h);
        header.push_back("error");
        Table t(header);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            std::vector<std::string> row{format_double(grid[k])};
            prim[k].m1.method = prim[k].m2.method = s.method;
            append_block(row, prim[k], jc);
            std::string err = prim[k].error;
            if (s.compare_method) {
                comp[k].m1.method = comp[k].m2.method = *s.compare_method;
                append_block(row, comp[k], jc);
                if (!comp[k].error.empty()) err += (err.empty() ? "" : "; ") + std::string("cmp: ") + comp[k].error;
            }
            row.push_back(err);
            t.row(row);
            ++res.points;
            if (!err.empty()) ++res.failures;
        }
        const auto path = file_name(opt, stem, {vname, sw.name});
        t.write(path);
        res.files.push_back(path);
        log_line(opt, "wrote " + path);
    }
    return res;
}

RunResult run_cumulants(const Scenario& s, const RunOptions& opt, const std::string& stem, const std::string& vname)
{
    RunResult res;
    Table t({"channel", "mode", "flux", "noise", "snr", "method", "h", "flux_error", "noise_error", "flagged", "note", "error"});
    auto emit = [&](const std::string& channel, int mode, const std::function<CumulantReport()>& fn) {
        ++res.points;
        try {
            const auto r = fn();
            t.row({channel, std::to_string(mode), format_double(r.flux), format_double(r.noise), format_double(r.snr),
                   to_string(r.method), format_double(r.h), format_double(r.flux_error), format_double(r.noise_error),
                   r.flagged ? "1" : "0", r.note, ""});
        } catch (const std::exception& e) {
            ++res.failures;
            t.row({channel, std::to_string(mode), "nan", "nan", "nan", to_string(s.method), "nan", "nan", "nan", "1", "", e.what()});
        }
    };
    const auto copt = cumulant_options(s.numerics);
    if (s.model == ModelKind::JaynesCummings) {
        for (int k = 0; k < 2; ++k)
            emit(k == 0 ? "drive1" : "drive2", k, [&]() {
                const auto pt = jc_point(s.jc, s.method, s.numerics);
                return k == 0 ? pt.mode1 : pt.mode2;
            });
    } else {
        for (int k = 0; k < 2; ++k)
            emit(k == 0 ? "drive1" : "drive2", k, [&]() { return lambda_cumulants(s.lambda, k, s.method, copt); });
    }
    emit("bath", 0, [&]() {
        const Method m = s.method == Method::PeriodicNumeric ? Method::PeriodicNumeric : Method::SpectralFD;
        const auto model = build_model(s, m);
        auto r = cumulants_spectral(model, bath_direction(model, 0), copt);
        r.channel = "bath";
        r.mode = 0;
        return r;
    });
    const auto path = file_name(opt, stem, {vname});
    t.write(path);
    res.files.push_back(path);
    log_line(opt, "wrote " + path);
    return res;
}

Vec initial_state(const Scenario& s, const DressedLiouvillian& model, int steps)
{
    const auto& st = s.distribution.state;
    if (st == "stationary") return model_stationary_state(model, steps);
    if (s.model == ModelKind::JaynesCummings) {
        if (st == "ground") {
            Mat g = Mat::Zero(2, 2);
            g(1, 1) = 1.0;
            return vectorize(g, Basis::Pauli);
        }
        return jc_floquet_state(s.jc, st == "floquet_lower" ? 0 : 1);
    }
    if (st == "ground") {
        Mat g = Mat::Zero(3, 3);
        g(0, 0) = 1.0;
        return vectorize(g, Basis::Element);
    }
    throw Error(ErrorKind::Refused, "Floquet initial states are available for the JC model only");
}

InitialLaw initial_law(const DistributionSpec& d)
{
    return d.initial == "poisson" ? InitialLaw::poisson(d.amplitude) : InitialLaw::gaussian(d.mean, d.variance);
}

void write_distribution(const PhotonDistribution& d, const std::string& path, double min_p)
{
    if (d.modes == 1) {
        Table t({"n", "p"});
        for (int i = 0; i < d.size[0]; ++i) {
            const double v = d.p[static_cast<std::size_t>(i)];
            if (v >= min_p) t.row({std::to_string(d.n_min[0] + i), format_double(v)});
        }
        t.write(path);
    } else {
        Table t({"n1", "n2", "p"});
        for (int i = 0; i < d.size[0]; ++i)
            for (int j = 0; j < d.size[1]; ++j) {
                const double v = d.p[static_cast<std::size_t>(i) * static_cast<std::size_t>(d.size[1]) + static_cast<std::size_t>(j)];
                if (v >= min_p) t.row({std::to_string(d.n_min[0] + i), std::to_string(d.n_min[1] + j), format_double(v)});
            }
        t.write(path);
    }
}

void write_meta(const PhotonDistribution& d, const std::string& path)
{
    nlohmann::ordered_json j;
    j["model"] = d.model;
    j["time"] = format_double(d.time);
    j["grid"] = d.grid;
    j["modes"] = d.modes;
    j["n_min"] = d.n_min;
    j["size"] = d.size;
    j["clipped_mass"] = format_double(d.clipped_mass);
    j["outside_mass"] = format_double(d.outside_mass);
    for (int k = 0; k < d.modes; ++k) {
        j["mean"].push_back(format_double(d.mean(k)));
        j["variance"].push_back(format_double(d.variance(k)));
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
    f << j.dump(2) << '\n';
}

RunResult run_distribution(const Scenario& s, const RunOptions& opt, const std::string& stem, const std::string& vname)
{
    RunResult res;
    const auto& ds = s.distribution;
    if (ds.times.empty()) throw ConfigError({"distribution.times: at least one time is required"});
    const auto model = build_model(s, s.method);
    const Vec rho0 = initial_state(s, model, s.numerics.steps);
    ReconstructOptions ro;
    ro.grid = s.numerics.grid;
    ro.clip = s.numerics.clip;
    ro.sigmas = s.numerics.sigmas;
    ro.threads = opt.threads.value_or(s.threads);
    Table summary({"time", "mode", "mean", "variance", "total", "clipped_mass", "outside_mass", "error"});
    for (double t : ds.times) {
        ++res.points;
        try {
            const auto d = reconstruct(model, rho0, initial_law(ds), t, ds.modes, ro);
            const auto path = file_name(opt, stem, {vname, "t" + fmt_time(t)});
            write_distribution(d, path, ds.min_probability);
            write_meta(d, file_name(opt, stem, {vname, "t" + fmt_time(t)}, ".json"));
            res.files.push_back(path);
            log_line(opt, "wrote " + path);
            for (int k = 0; k < d.modes; ++k)
                summary.row({format_double(t), std::to_string(ds.modes[static_cast<std::size_t>(k)]), format_double(d.mean(k)),
                             format_double(d.variance(k)), format_double(d.total()), format_double(d.clipped_mass),
                             format_double(d.outside_mass), ""});
        } catch (const std::exception& e) {
            ++res.failures;
            summary.row({format_double(t), "", "nan", "nan", "nan", "nan", "nan", e.what()});
        }
    }
    const auto path = file_name(opt, stem, {vname, "summary"});
    summary.write(path);
    res.files.push_back(path);
    return res;
}

RunResult run_closed(const Scenario& s, const RunOptions& opt, const std::string& stem, const std::string& vname)
{
    RunResult res;
    if (s.model != ModelKind::JaynesCummings) throw ConfigError({"closed: requires model jc"});
    const auto& c = s.closed;
    if (c.times.empty()) throw ConfigError({"closed.times: at least one time is required"});
    Table t({"time", "mean", "variance", "fft_mean", "fft_variance", "fft_total", "error"});
    ReconstructOptions ro;
    ro.grid = s.numerics.grid;
    ro.clip = s.numerics.clip;
    ro.sigmas = s.numerics.sigmas;
    for (double time : c.times) {
        ++res.points;
        try {
            const auto st = jc_closed_statistics(s.jc, c.weights, c.mode, time);
            std::vector<std::string> row{format_double(time), format_double(st.mean), format_double(st.variance)};
            if (c.fft) {
                const InitialLaw law = InitialLaw::gaussian({c.mean}, {c.variance});
                MgfFn m = [&](const std::vector<double>& chi) {
                    std::vector<double> both(2, 0.0);
                    both[static_cast<std::size_t>(c.mode)] = chi[0];
                    return closed_mgf(s.jc, c.weights, both, time) * initial_mgf(law, chi);
                };
                const auto d = reconstruct(m, 1, ro);
                row.insert(row.end(), {format_double(d.mean(0) - c.mean), format_double(d.variance(0) - c.variance),
                                       format_double(d.total())});
            } else {
                row.insert(row.end(), {"nan", "nan", "nan"});
            }
            row.push_back("");
            t.row(row);
        } catch (const std::exception& e) {
            ++res.failures;
            t.row({format_double(time), "nan", "nan", "nan", "nan", "nan", e.what()});
        }
    }
    const auto path = file_name(opt, stem, {vname});
    t.write(path);
    res.files.push_back(path);
    log_line(opt, "wrote " + path);
    return res;
}

RunResult run_conserve(const Scenario& s, const RunOptions& opt, const std::string& stem, const std::string& vname)
{
    RunResult res;
    ++res.points;
    Table t({"quantity", "value", "tolerance", "pass"});
    std::string line;
    try {
        const auto model = build_model(s, s.method);
        const auto r = conservation_check(model, s.numerics.flux_tol, s.numerics.noise_tol, cumulant_options(s.numerics));
        auto pf = [](bool b) { return std::string(b ? "1" : "0"); };
        t.row({"drive_flux", format_double(r.drive_flux), "", ""});
        t.row({"bath_flux", format_double(r.bath_flux), "", ""});
        t.row({"drive_noise", format_double(r.drive_noise), "", ""});
        t.row({"bath_noise", format_double(r.bath_noise), "", ""});
        t.row({"flux_violation", format_double(r.flux_violation), format_double(s.numerics.flux_tol),
               pf(r.flux_violation <= s.numerics.flux_tol)});
        t.row({"noise_violation", format_double(r.noise_violation), format_double(s.numerics.noise_tol),
               pf(r.noise_violation <= s.numerics.noise_tol)});
        t.row({"mode_sum_violation", format_double(r.mode_sum_violation), format_double(s.numerics.flux_tol),
               pf(r.mode_sum_violation <= s.numerics.flux_tol)});
        std::ostringstream os;
        os << (r.passed ? "PASS" : "FAIL") << " conserve" << (vname.empty() ? "" : "[" + vname + "]")
           << " max_flux_violation=" << format_double(std::max(r.flux_violation, r.mode_sum_violation))
           << " noise_violation=" << format_double(r.noise_violation);
        line = os.str();
        if (!r.passed) ++res.failures;
    } catch (const std::exception& e) {
        ++res.failures;
        line = std::string("FAIL conserve") + (vname.empty() ? "" : "[" + vname + "]") + " error=" + e.what();
    }
    res.lines.push_back(line);
    log_line(opt, line);
    const auto path = file_name(opt, stem, {vname});
    t.write(path);
    res.files.push_back(path);
    return res;
}

} // namespace

RunResult run(const Scenario& scenario, const RunOptions& opt, Task fallback)
{
    Scenario s = scenario;
    if (opt.method) s.method = *opt.method;
    const Task task = s.task.value_or(fallback);
    const std::string stem = s.output.empty() ? to_string(task) : s.output;
    std::filesystem::create_directories(opt.out_dir);
    RunResult res;
    std::vector<const Variant*> variants;
    for (const auto& v : s.variants) variants.push_back(&v);
    if (variants.empty()) variants.push_back(nullptr);
    for (const Variant* v : variants) {
        const Scenario sv = with_variant(s, v);
        const std::string vname = v ? v->name : "";
        switch (task) {
        case Task::Scan: res.merge(run_scan(sv, opt, stem, vname)); break;
        case Task::Cumulants: res.merge(run_cumulants(sv, opt, stem, vname)); break;
        case Task::Distribution: res.merge(run_distribution(sv, opt, stem, vname)); break;
        case Task::ClosedSystem: res.merge(run_closed(sv, opt, stem, vname)); break;
        case Task::ConservationCheck: res.merge(run_conserve(sv, opt, stem, vname)); break;
        }
    }
    return res;
}

} // namespace pcs
