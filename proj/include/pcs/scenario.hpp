#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcs/jc.hpp"
#include "pcs/lambda.hpp"

namespace pcs {

enum class ModelKind { JaynesCummings, Lambda };
enum class Task { Cumulants, Scan, Distribution, ClosedSystem, ConservationCheck };

std::string to_string(ModelKind m);
std::string to_string(Task t);
std::optional<Task> task_from_string(const std::string& s);

struct Numerics {
    double h = 1e-3;
    double gap_fraction = 0.02;
    double tolerance = 1e-6;
    int steps = 512;
    int grid = 256;
    double clip = 1e-9;
    double sigmas = 6.0;
    double flux_tol = 1e-8;
    double noise_tol = 1e-6;
};

struct SweepSpec {
    std::string name;
    std::string variable;
    double start = 0.0;
    double stop = 0.0;
    int points = 1;
    bool log = false;
    nlohmann::json params = nlohmann::json::object();

    std::vector<double> grid() const;
};

struct Variant {
    std::string name;
    nlohmann::json params = nlohmann::json::object();
};

struct DistributionSpec {
    std::vector<double> times;
    std::vector<int> modes{0};
    std::string initial = "gaussian";  // gaussian | poisson
    std::vector<double> mean{500.0, 500.0};
    std::vector<double> variance{100.0, 100.0};
    std::vector<double> amplitude{10.0, 10.0};
    std::string state = "stationary";  // stationary | ground | floquet_lower | floquet_upper
    double min_probability = 0.0;
};

struct ClosedSpec {
    std::array<double, 2> weights{0.5, 0.5};
    std::vector<double> times;
    int mode = 0;
    bool fft = true;
    double variance = 100.0;
    double mean = 500.0;
};

struct Scenario {
    ModelKind model = ModelKind::JaynesCummings;
    JcParams jc;
    LambdaParams lambda;
    Method method = Method::SpectralFD;
    std::optional<Method> compare_method;
    std::optional<Task> task;
    std::vector<Variant> variants;
    std::vector<SweepSpec> sweeps;
    DistributionSpec distribution;
    ClosedSpec closed;
    Numerics numerics;
    std::string output;
    int threads = 1;
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

// A document holds one scenario object or {"scenarios": [...]}. All violations are collected before throwing.
std::vector<Scenario> parse_scenarios(const std::string& text);
Scenario parse_scenario(const std::string& text);

// Apply a parameter object to a scenario's model parameters; unknown names are reported into `errors`.
void apply_params(Scenario& s, const nlohmann::json& params, const std::string& path, std::vector<std::string>& errors);
// Set one named parameter; returns false for unknown names.
bool set_param(Scenario& s, const std::string& name, double value);
std::vector<std::string> validate_model(const Scenario& s, const std::string& path);

} // namespace pcs
