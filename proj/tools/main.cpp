#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "predprey/experiment.hpp"

namespace {

using namespace predprey;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitAssert = 4;

struct CliOptions {
    std::string config_path;
    std::string out_dir = "out";
    int jobs = 1;
    bool seedless = false;
    bool with_assert = false;
};

int execute_one(const ExperimentConfig& cfg, const std::string& out_dir, ExecMode mode,
                bool with_assert, std::ostream& log) {
    ExecResult res = execute_config(cfg, out_dir, mode);
    for (const auto& f : res.files) log << "wrote " << out_dir << "/" << f << "\n";
    if (!res.failed_expectations.empty()) {
        for (const auto& msg : res.failed_expectations)
            log << "expectation failed: " << msg << "\n";
        if (with_assert) return kExitAssert;
    } else if (with_assert && !cfg.expectations.empty()) {
        log << "all " << cfg.expectations.size() << " expectations hold\n";
    }
    return kExitOk;
}

int run_mode(const CliOptions& opt, ExecMode mode) {
    ExperimentConfig cfg = load_config_file(opt.config_path);
    if (mode == ExecMode::check) {
        auto rep = validate_params(cfg.params);
        std::cout << rep.summary() << "\n";
        return rep.pass ? kExitOk : kExitConfig;
    }
    return execute_one(cfg, opt.out_dir, mode, opt.with_assert, std::cout);
}

struct SweepRow {
    std::size_t index = 0;
    std::string label;
    int status = kExitOk;
    std::string message;
};

int run_sweep(const CliOptions& opt) {
    std::ifstream in(opt.config_path);
    if (!in) throw config_error("cannot open config file: " + opt.config_path);
    ordered_json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(std::string("config parse error: ") + e.what());
    }
    auto it = doc.find("sweep");
    if (it == doc.end() || !it->is_array())
        throw config_error("/sweep: sweep mode needs a top-level array of configs");

    std::vector<ExperimentConfig> configs;
    for (std::size_t i = 0; i < it->size(); ++i) {
        try {
            configs.push_back(parse_config((*it)[i]));
        } catch (const config_error& e) {
            throw config_error("/sweep/" + std::to_string(i) + ": " + e.what());
        }
    }

    std::vector<SweepRow> rows(configs.size());
    auto worker = [&](std::size_t i) {
        SweepRow row;
        row.index = i;
        row.label = configs[i].label.empty() ? "run_" + std::to_string(i)
                                             : configs[i].label;
        const std::string sub_out = opt.out_dir + "/run_" + std::to_string(i);
        std::ostringstream sink;
        try {
            row.status =
                execute_one(configs[i], sub_out, ExecMode::simulate, opt.with_assert, sink);
        } catch (const config_error& e) {
            row.status = kExitConfig;
            row.message = e.what();
        } catch (const std::exception& e) {
            row.status = kExitNumerical;
            row.message = e.what();
        }
        return row;
    };

    const int jobs = std::max(1, opt.jobs);
    std::size_t next = 0;
    while (next < configs.size()) {
        std::vector<std::future<SweepRow>> batch;
        for (int j = 0; j < jobs && next < configs.size(); ++j, ++next)
            batch.push_back(std::async(std::launch::async, worker, next));
        for (auto& f : batch) {
            SweepRow row = f.get();
            rows[row.index] = row;
        }
    }

    // single collector writes the summary after all runs complete
    std::filesystem::create_directories(opt.out_dir);
    std::ofstream csv(opt.out_dir + "/sweep.csv", std::ios::binary);
    csv << "index,label,status,message\n";
    int exit_code = kExitOk;
    for (const auto& row : rows) {
        std::string msg = row.message;
        for (auto& ch : msg)
            if (ch == ',' || ch == '\n') ch = ';';
        csv << row.index << "," << row.label << "," << row.status << "," << msg << "\n";
        std::cout << "run_" << row.index << " (" << row.label << "): "
                  << (row.status == kExitOk ? "ok" : "failed") << "\n";
        exit_code = std::max(exit_code, row.status);
    }
    std::cout << "wrote " << opt.out_dir << "/sweep.csv\n";
    return exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for the two-predator/one-prey "
                 "reaction-diffusion system"};
    app.require_subcommand(1);

    CliOptions opt;
    app.add_option("--config", opt.config_path, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--out", opt.out_dir, "output directory (default: out)");
    app.add_option("--jobs", opt.jobs, "concurrent runs in sweep mode");
    app.add_flag("--seedless", opt.seedless,
                 "assert there is no randomness in any code path");
    app.add_flag("--assert", opt.with_assert,
                 "enforce the config's expected-value blocks (exit 4 on mismatch)");

    auto* c_check = app.add_subcommand("check", "validate parameters only");
    auto* c_speeds = app.add_subcommand("speeds", "linear speeds and pulling check");
    auto* c_sim = app.add_subcommand("simulate", "full Cauchy-problem experiment");
    auto* c_sweep = app.add_subcommand("sweep", "run a list of configs");
    auto* c_eigen = app.add_subcommand("eigen", "Dirichlet eigenvalue problems");
    auto* c_pull = app.add_subcommand("pulling", "nonlocal-pulling diagnostics");
    auto* c_lyap = app.add_subcommand("lyapunov", "simulate, recording energies only");
    for (auto* sc : {c_check, c_speeds, c_sim, c_sweep, c_eigen, c_pull, c_lyap})
        sc->fallthrough();

    CLI11_PARSE(app, argc, argv);

    if (opt.seedless)
        std::cout << "seedless: no random number generator exists in any code path; "
                     "outputs are a pure function of the config\n";

    try {
        if (c_check->parsed()) return run_mode(opt, ExecMode::check);
        if (c_speeds->parsed()) return run_mode(opt, ExecMode::speeds);
        if (c_sim->parsed()) return run_mode(opt, ExecMode::simulate);
        if (c_sweep->parsed()) return run_sweep(opt);
        if (c_eigen->parsed()) return run_mode(opt, ExecMode::eigen);
        if (c_pull->parsed()) return run_mode(opt, ExecMode::pulling);
        if (c_lyap->parsed()) return run_mode(opt, ExecMode::lyapunov);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
