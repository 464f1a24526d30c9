#include "pcs/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace pcs {

using nlohmann::json;

std::string to_string(ModelKind m)
{
    return m == ModelKind::JaynesCummings ? "jc" : "lambda";
}

std::string to_string(Task t)
{
    switch (t) {
    case Task::Cumulants: return "cumulants";
    case Task::Scan: return "scan";
    case Task::Distribution: return "distribution";
    case Task::ClosedSystem: return "closed";
    case Task::ConservationCheck: return "conserve";
    }
    return "?";
}

std::optional<Task> task_from_string(const std::string& s)
{
    for (Task t : {Task::Cumulants, Task::Scan, Task::Distribution, Task::ClosedSystem, Task::ConservationCheck})
        if (to_string(t) == s) return t;
    return std::nullopt;
}

namespace {

std::string join(const std::vector<std::string>& v)
{
    std::string s;
    for (const auto& x : v) s += "\n  " + x;
    return s;
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error(ErrorKind::Config, "invalid scenario:" + join(violations)), violations_(std::move(violations))
{
}

std::vector<double> SweepSpec::grid() const
{
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) {
        const double f = points == 1 ? 0.0 : static_cast<double>(k) / (points - 1);
        g[static_cast<std::size_t>(k)] = log ? std::exp(std::log(start) + f * (std::log(stop) - std::log(start)))
                                             : start + f * (stop - start);
    }
    g.front() = start;
    if (points > 1) g.back() = stop;
    return g;
}

bool set_param(Scenario& s, const std::string& name, double v)
{
    if (s.model == ModelKind::JaynesCummings) {
        JcParams& p = s.jc;
        if (name == "eps_delta") p.eps_delta = v;
        else if (name == "omega1") p.omega1 = v;
        else if (name == "omega2") p.omega2 = v;
        else if (name == "phi1") p.phi1 = v;
        else if (name == "phi2") p.phi2 = v;
        else if (name == "phi") p.phi2 = p.phi1 + v;
        else if (name == "gamma") p.gamma = v;
        else return false;
        return true;
    }
    LambdaParams& p = s.lambda;
    if (name == "eps_a") p.eps_a = v;
    else if (name == "eps_b") p.eps_b = v;
    else if (name == "eps_c") p.eps_c = v;
    else if (name == "omega_p") p.omega_p = v;
    else if (name == "omega_1") p.omega_1 = v;
    else if (name == "omega_d") p.omega_d = v;
    else if (name == "omega_s") p.omega_s = v;
    else if (name == "omega_p0") p.omega_p0 = v;
    else if (name == "omega_p1") p.omega_p1 = v;
    else if (name == "gamma") p.gamma = v;
    else if (name == "phi1") p.phi1 = v;
    else if (name == "phi2") p.phi2 = v;
    else if (name == "detuning") p.set_detuning(v);
    else if (name == "r") {
        if (v != std::floor(v)) return false;
        p.r = static_cast<int>(v);
    } else return false;
    return true;
}

void apply_params(Scenario& s, const json& params, const std::string& path, std::vector<std::string>& errors)
{
    if (!params.is_object()) {
        errors.push_back(path + ": expected an object of parameter values");
        return;
    }
    // detuning depends on eps_c, so it is applied last
    std::vector<std::pair<std::string, const json*>> items;
    for (auto it = params.begin(); it != params.end(); ++it) items.emplace_back(it.key(), &it.value());
    std::stable_partition(items.begin(), items.end(), [](const auto& kv) { return kv.first != "detuning"; });
    for (const auto& [key, val] : items) {
        const std::string where = path + "." + key;
        if (!val->is_number()) {
            errors.push_back(where + ": expected a number");
            continue;
        }
        if (key == "r" && !val->is_number_integer()) {
            errors.push_back(where + ": expected an integer");
            continue;
        }
        if (!set_param(s, key, val->get<double>())) errors.push_back(where + ": unknown parameter for model " + to_string(s.model));
    }
}

std::vector<std::string> validate_model(const Scenario& s, const std::string& path)
{
    std::vector<std::string> e;
    auto need = [&](bool ok, const std::string& field, const std::string& what) {
        if (!ok) e.push_back(path + "." + field + ": " + what);
    };
    if (s.model == ModelKind::JaynesCummings) {
        const auto& p = s.jc;
        for (auto [n, v] : {std::pair{"eps_delta", p.eps_delta}, {"omega1", p.omega1}, {"omega2", p.omega2}, {"phi1", p.phi1},
                            {"phi2", p.phi2}, {"gamma", p.gamma}})
            need(std::isfinite(v), n, "must be finite");
        need(p.omega1 >= 0, "omega1", "must be >= 0");
        need(p.omega2 >= 0, "omega2", "must be >= 0");
        need(p.gamma >= 0, "gamma", "must be >= 0");
    } else {
        const auto& p = s.lambda;
        need(p.gamma >= 0, "gamma", "must be >= 0");
        need(p.omega_s >= 0, "omega_s", "must be >= 0");
        need(p.omega_d > 0, "omega_d", "must be > 0");
        need(p.r >= 0, "r", "must be a nonnegative integer");
        for (auto [n, v] : {std::pair{"eps_a", p.eps_a}, {"eps_b", p.eps_b}, {"eps_c", p.eps_c}, {"omega_p", p.omega_p},
                            {"omega_1", p.omega_1}, {"omega_p0", p.omega_p0}, {"omega_p1", p.omega_p1}, {"phi1", p.phi1},
                            {"phi2", p.phi2}})
            need(std::isfinite(v), n, "must be finite");
    }
    return e;
}

namespace {

class Reader {
public:
    Reader(const json& obj, std::string path, std::vector<std::string>& errors)
        : obj_(obj), path_(std::move(path)), errors_(errors)
    {
        if (!obj_.is_object()) errors_.push_back(path_ + ": expected an object");
    }

    bool ok() const { return obj_.is_object(); }
    bool has(const std::string& key) const { return ok() && obj_.contains(key); }
    std::string at(const std::string& key) const { return path_ + "." + key; }
    const json& raw(const std::string& key) const { return obj_.at(key); }

    void allow(std::initializer_list<const char*> keys)
    {
        if (!ok()) return;
        std::set<std::string> allowed(keys.begin(), keys.end());
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!allowed.count(it.key())) errors_.push_back(at(it.key()) + ": unknown key");
    }

    void number(const std::string& key, double& out, double lo = -HUGE_VAL, double hi = HUGE_VAL, bool open_lo = false)
    {
        if (!has(key)) return;
        const json& v = obj_.at(key);
        if (!v.is_number()) {
            errors_.push_back(at(key) + ": expected a number");
            return;
        }
        const double x = v.get<double>();
        if (!std::isfinite(x) || x < lo || x > hi || (open_lo && x == lo)) {
            std::ostringstream os;
            os << at(key) << ": value " << x << " outside " << (open_lo ? "(" : "[") << lo << ", " << hi << "]";
            errors_.push_back(os.str());
            return;
        }
        out = x;
    }

    void integer(const std::string& key, int& out, int lo, int hi)
    {
        if (!has(key)) return;
        const json& v = obj_.at(key);
        if (!v.is_number_integer()) {
            errors_.push_back(at(key) + ": expected an integer");
            return;
        }
        const long long x = v.get<long long>();
        if (x < lo || x > hi) {
            errors_.push_back(at(key) + ": value " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]");
            return;
        }
        out = static_cast<int>(x);
    }

    void boolean(const std::string& key, bool& out)
    {
        if (!has(key)) return;
        if (!obj_.at(key).is_boolean()) {
            errors_.push_back(at(key) + ": expected true or false");
            return;
        }
        out = obj_.at(key).get<bool>();
    }

    void string(const std::string& key, std::string& out, std::initializer_list<const char*> choices = {})
    {
        if (!has(key)) return;
        const json& v = obj_.at(key);
        if (!v.is_string()) {
            errors_.push_back(at(key) + ": expected a string");
            return;
        }
        const std::string s = v.get<std::string>();
        if (choices.size() > 0) {
            bool found = false;
            std::string list;
            for (const char* c : choices) {
                found = found || s == c;
                list += std::string(list.empty() ? "" : ", ") + c;
            }
            if (!found) {
                errors_.push_back(at(key) + ": '" + s + "' is not one of " + list);
                return;
            }
        }
        out = s;
    }

    void numbers(const std::string& key, std::vector<double>& out, double lo = -HUGE_VAL)
    {
        if (!has(key)) return;
        const json& v = obj_.at(key);
        if (!v.is_array()) {
            errors_.push_back(at(key) + ": expected an array of numbers");
            return;
        }
        std::vector<double> r;
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (!v[k].is_number() || !std::isfinite(v[k].get<double>()) || v[k].get<double>() < lo) {
                std::ostringstream os;
                os << at(key) << "[" << k << "]: expected a finite number >= " << lo;
                errors_.push_back(os.str());
                return;
            }
            r.push_back(v[k].get<double>());
        }
        out = r;
    }

    void integers(const std::string& key, std::vector<int>& out, int lo, int hi)
    {
        if (!has(key)) return;
        const json& v = obj_.at(key);
        if (!v.is_array()) {
            errors_.push_back(at(key) + ": expected an array of integers");
            return;
        }
        std::vector<int> r;
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (!v[k].is_number_integer() || v[k].get<long long>() < lo || v[k].get<long long>() > hi) {
                errors_.push_back(at(key) + "[" + std::to_string(k) + "]: expected an integer in [" + std::to_string(lo) +
                                  ", " + std::to_string(hi) + "]");
                return;
            }
            r.push_back(v[k].get<int>());
        }
        out = r;
    }

private:
    const json& obj_;
    std::string path_;
    std::vector<std::string>& errors_;
};

void parse_method(const json& v, const std::string& where, std::optional<Method>& out, std::vector<std::string>& errors)
{
    if (!v.is_string()) {
        errors.push_back(where + ": expected a method name");
        return;
    }
    try {
        out = method_from_string(v.get<std::string>());
    } catch (const Error&) {
        errors.push_back(where + ": unknown method '" + v.get<std::string>() +
                         "' (SpectralFD, CharPoly, AnalyticOracle, PerturbationTheory, PeriodicNumeric)");
    }
}

Scenario parse_one(const json& doc, const std::string& path, std::vector<std::string>& errors)
{
    Scenario s;
    Reader r(doc, path, errors);
    if (!r.ok()) return s;
    r.allow({"model", "params", "method", "compare_method", "task", "variants", "sweeps", "distribution", "closed",
             "numerics", "output", "threads"});

    if (!r.has("model")) {
        errors.push_back(path + ".model: required (jc or lambda)");
    } else {
        std::string m;
        r.string("model", m, {"jc", "lambda"});
        if (m == "lambda") s.model = ModelKind::Lambda;
    }
    if (r.has("params")) apply_params(s, r.raw("params"), r.at("params"), errors);
    for (const auto& e : validate_model(s, path + ".params")) errors.push_back(e);

    if (r.has("method")) {
        std::optional<Method> m;
        parse_method(r.raw("method"), r.at("method"), m, errors);
        if (m) s.method = *m;
    }
    if (r.has("compare_method")) parse_method(r.raw("compare_method"), r.at("compare_method"), s.compare_method, errors);
    if (r.has("task")) {
        std::string t;
        r.string("task", t, {"cumulants", "scan", "distribution", "closed", "conserve"});
        s.task = task_from_string(t);
    }
    r.string("output", s.output);
    r.integer("threads", s.threads, 1, 256);

    if (r.has("numerics")) {
        Reader n(r.raw("numerics"), r.at("numerics"), errors);
        n.allow({"h", "gap_fraction", "tolerance", "steps", "grid", "clip", "sigmas", "flux_tol", "noise_tol"});
        n.number("h", s.numerics.h, 0.0, 1.0, true);
        n.number("gap_fraction", s.numerics.gap_fraction, 0.0, 1.0, true);
        n.number("tolerance", s.numerics.tolerance, 0.0, 1.0, true);
        n.integer("steps", s.numerics.steps, 64, 1 << 20);
        n.integer("grid", s.numerics.grid, 128, 1 << 14);
        if ((s.numerics.grid & (s.numerics.grid - 1)) != 0) errors.push_back(n.at("grid") + ": must be a power of two");
        n.number("clip", s.numerics.clip, 0.0, 1.0);
        n.number("sigmas", s.numerics.sigmas, 0.0, 100.0, true);
        n.number("flux_tol", s.numerics.flux_tol, 0.0, 1.0, true);
        n.number("noise_tol", s.numerics.noise_tol, 0.0, 1.0, true);
    }

    if (r.has("variants")) {
        const json& v = r.raw("variants");
        if (!v.is_array()) {
            errors.push_back(r.at("variants") + ": expected an array");
        } else {
            for (std::size_t k = 0; k < v.size(); ++k) {
                const std::string where = r.at("variants") + "[" + std::to_string(k) + "]";
                Reader vr(v[k], where, errors);
                vr.allow({"name", "params"});
                Variant var;
                var.name = "v" + std::to_string(k);
                vr.string("name", var.name);
                if (vr.has("params")) {
                    var.params = vr.raw("params");
                    Scenario probe = s;
                    apply_params(probe, var.params, vr.at("params"), errors);
                    for (const auto& e : validate_model(probe, vr.at("params"))) errors.push_back(e);
                }
                s.variants.push_back(var);
            }
        }
    }

    if (r.has("sweeps")) {
        const json& v = r.raw("sweeps");
        if (!v.is_array()) {
            errors.push_back(r.at("sweeps") + ": expected an array");
        } else {
            for (std::size_t k = 0; k < v.size(); ++k) {
                const std::string where = r.at("sweeps") + "[" + std::to_string(k) + "]";
                Reader sr(v[k], where, errors);
                sr.allow({"name", "variable", "start", "stop", "points", "log", "params"});
                SweepSpec sw;
                sw.name = "s" + std::to_string(k);
                sr.string("name", sw.name);
                if (!sr.has("variable")) errors.push_back(where + ".variable: required");
                sr.string("variable", sw.variable);
                Scenario probe = s;
                if (!sw.variable.empty() && !set_param(probe, sw.variable, 0.0))
                    errors.push_back(where + ".variable: unknown parameter '" + sw.variable + "' for model " + to_string(s.model));
                for (const char* key : {"start", "stop"})
                    if (!sr.has(key)) errors.push_back(where + "." + key + ": required");
                sr.number("start", sw.start);
                sr.number("stop", sw.stop);
                sr.integer("points", sw.points, 1, 1000000);
                sr.boolean("log", sw.log);
                if (sw.log && (sw.start <= 0 || sw.stop <= 0)) errors.push_back(where + ": log sweeps need positive bounds");
                if (sr.has("params")) {
                    sw.params = sr.raw("params");
                    probe = s;
                    apply_params(probe, sw.params, sr.at("params"), errors);
                }
                s.sweeps.push_back(sw);
            }
        }
    }

    if (r.has("distribution")) {
        Reader d(r.raw("distribution"), r.at("distribution"), errors);
        d.allow({"times", "modes", "initial", "mean", "variance", "amplitude", "state", "min_probability"});
        auto& ds = s.distribution;
        d.numbers("times", ds.times, 0.0);
        d.integers("modes", ds.modes, 0, 1);
        if (ds.modes.empty() || ds.modes.size() > 2 || (ds.modes.size() == 2 && ds.modes[0] == ds.modes[1]))
            errors.push_back(d.at("modes") + ": one mode or two distinct modes");
        d.string("initial", ds.initial, {"gaussian", "poisson"});
        d.numbers("mean", ds.mean);
        d.numbers("variance", ds.variance, 0.0);
        d.numbers("amplitude", ds.amplitude, 0.0);
        d.string("state", ds.state, {"stationary", "ground", "floquet_lower", "floquet_upper"});
        d.number("min_probability", ds.min_probability, 0.0, 1.0);
        if (ds.mean.size() != 2 || ds.variance.size() != 2 || ds.amplitude.size() != 2)
            errors.push_back(d.at("mean") + ": mean, variance and amplitude need one entry per drive mode (2)");
    }

    if (r.has("closed")) {
        Reader c(r.raw("closed"), r.at("closed"), errors);
        c.allow({"weights", "times", "mode", "fft", "mean", "variance"});
        std::vector<double> w{s.closed.weights[0], s.closed.weights[1]};
        c.numbers("weights", w, 0.0);
        if (w.size() != 2 || std::abs(w[0] + w[1] - 1.0) > 1e-12)
            errors.push_back(c.at("weights") + ": two nonnegative weights summing to 1");
        else
            s.closed.weights = {w[0], w[1]};
        c.numbers("times", s.closed.times, 0.0);
        c.integer("mode", s.closed.mode, 0, 1);
        c.boolean("fft", s.closed.fft);
        c.number("mean", s.closed.mean);
        c.number("variance", s.closed.variance, 0.0);
        if (s.model != ModelKind::JaynesCummings) errors.push_back(r.at("closed") + ": closed-system statistics need model jc");
    }
    return s;
}

} // namespace

std::vector<Scenario> parse_scenarios(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("document: ") + e.what()});
    }
    std::vector<std::string> errors;
    std::vector<Scenario> out;
    if (doc.is_object() && doc.contains("scenarios")) {
        if (doc.size() != 1) errors.push_back("document: 'scenarios' must be the only top-level key");
        const json& list = doc.at("scenarios");
        if (!list.is_array() || list.empty()) {
            errors.push_back("scenarios: expected a nonempty array");
        } else {
            for (std::size_t k = 0; k < list.size(); ++k)
                out.push_back(parse_one(list[k], "scenarios[" + std::to_string(k) + "]", errors));
        }
    } else {
        out.push_back(parse_one(doc, "scenario", errors));
    }
    if (!errors.empty()) throw ConfigError(errors);
    return out;
}

Scenario parse_scenario(const std::string& text)
{
    auto all = parse_scenarios(text);
    if (all.size() != 1) throw ConfigError({"document: expected a single scenario"});
    return all.front();
}

} // namespace pcs
