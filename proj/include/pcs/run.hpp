#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pcs/scenario.hpp"

namespace pcs {

std::string format_double(double v);
std::string csv_field(const std::string& s);

struct RunOptions {
    std::string out_dir = ".";
    std::optional<int> threads;
    std::optional<Method> method;
    std::ostream* log = nullptr;
};

struct RunResult {
    int points = 0;
    int failures = 0;
    std::vector<std::string> files;
    std::vector<std::string> lines;  // PASS/FAIL summaries

    // 0 all points succeeded, 1 some failed
    int exit_code() const { return failures > 0 ? 1 : 0; }
    void merge(const RunResult& o);
};

// Executes the scenario's task (or `fallback` when the scenario does not name one) and writes CSV files.
RunResult run(const Scenario& s, const RunOptions& opt, Task fallback = Task::Cumulants);

// Model assembly used by the runner, exposed for tests and bindings.
DressedLiouvillian build_model(const Scenario& s, Method method);
CumulantOptions cumulant_options(const Numerics& n);

struct JcPoint {
    CumulantReport mode1;
    CumulantReport mode2;
    Bloch bloch;
};

JcPoint jc_point(const JcParams& p, Method method, const Numerics& n);

} // namespace pcs
