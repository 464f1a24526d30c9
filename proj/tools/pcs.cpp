#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pcs/run.hpp"

#ifndef PCS_CONFIG_DIR
#define PCS_CONFIG_DIR "configs"
#endif

namespace {

struct Args {
    std::string config;
    std::string out = ".";
    int threads = 0;
    std::string method;
};

int execute(const std::string& command, const Args& a, std::optional<pcs::Task> task)
{
    std::string path = a.config;
    if (path.empty()) {
        if (task) {
            std::cerr << command << ": --config is required\n";
            return 2;
        }
        path = std::string(PCS_CONFIG_DIR) + "/" + command + ".json";
    }
    std::ifstream in(path);
    if (!in) {
        std::cerr << "cannot read config " << path << '\n';
        return 2;
    }
    std::stringstream buf;
    buf << in.rdbuf();

    std::vector<pcs::Scenario> scenarios;
    pcs::RunOptions opt;
    try {
        scenarios = pcs::parse_scenarios(buf.str());
        if (!a.method.empty()) opt.method = pcs::method_from_string(a.method);
    } catch (const pcs::Error& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }
    if (task)
        for (const auto& s : scenarios)
            if (s.task && *s.task != *task) {
                std::cerr << "config task '" << pcs::to_string(*s.task) << "' does not match command '" << command << "'\n";
                return 2;
            }
    opt.out_dir = a.out;
    if (a.threads > 0) opt.threads = a.threads;
    opt.log = &std::cerr;

    pcs::RunResult total;
    try {
        for (const auto& s : scenarios) total.merge(pcs::run(s, opt, task.value_or(pcs::Task::Scan)));
    } catch (const pcs::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    for (const auto& l : total.lines) std::cout << l << '\n';
    if (total.failures > 0)
        std::cerr << total.failures << " of " << total.points << " points failed; see the error columns\n";
    return total.exit_code();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Photon-counting statistics of driven open quantum systems"};
    app.require_subcommand(1);
    Args args;
    int code = 0;

    const std::vector<std::pair<std::string, std::optional<pcs::Task>>> commands{
        {"cumulants", pcs::Task::Cumulants},
        {"scan", pcs::Task::Scan},
        {"distribution", pcs::Task::Distribution},
        {"closed", pcs::Task::ClosedSystem},
        {"conserve", pcs::Task::ConservationCheck},
        {"fig2", std::nullopt},
        {"fig3", std::nullopt},
        {"fig4", std::nullopt},
        {"fig5", std::nullopt},
    };
    for (const auto& [name, task] : commands) {
        auto* sub = app.add_subcommand(name, task ? "Run a " + name + " scenario" : "Run the bundled " + name + ".json configuration");
        sub->add_option("--config", args.config, "Scenario file (JSON)");
        sub->add_option("--out", args.out, "Output directory");
        sub->add_option("--threads", args.threads, "Worker threads for scans")->check(CLI::Range(1, 256));
        sub->add_option("--method", args.method, "SpectralFD, CharPoly, AnalyticOracle, PerturbationTheory or PeriodicNumeric");
        sub->callback([&, name = name, task = task]() { code = execute(name, args, task); });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int r = app.exit(e);
        return r == 0 ? 0 : 2;
    }
    return code;
}
