// rbm-trace: config-driven runner for the dimension experiments.
//
//   rbm-trace run --preset NAME [--paths M] [--T t] [--dt h] [--s idx]
//                 [--seed S] [--out DIR] [--config FILE] ...
//   rbm-trace list
//   rbm-trace calibrate
//
// Exit codes: 0 pass, 1 tolerance failure, 2 error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rbmtrace/harness/experiment.hpp"

namespace harness = rbmtrace::harness;

namespace {

int cmd_list() {
    std::cout << "preset                    predicted  tolerance        citation\n";
    for (const auto& p : harness::preset_catalog()) {
        std::ostringstream name;
        name << p.name;
        std::cout << name.str() << std::string(name.str().size() < 26 ? 26 - name.str().size() : 1, ' ');
        std::ostringstream pred;
        pred.precision(4);
        pred << std::fixed << p.predicted;
        std::cout << pred.str() << "     ";
        if (p.exploratory) {
            std::cout << "exploratory      ";
        } else {
            std::ostringstream tol;
            tol.precision(2);
            tol << std::fixed << "+" << p.tol_above << "/-" << p.tol_below;
            std::cout << tol.str() << std::string(tol.str().size() < 17 ? 17 - tol.str().size() : 1, ' ');
        }
        std::cout << p.citation << '\n';
    }
    return 0;
}

int cmd_calibrate() {
    bool all_pass = true;
    for (const auto& f : harness::run_calibration()) {
        std::cout << (f.pass ? "[PASS] " : "[FAIL] ") << f.name << ": got " << f.got
                  << ", target " << f.target << " +/- " << f.tol << '\n';
        all_pass = all_pass && f.pass;
    }
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo dimension experiments for reflecting Brownian motion"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run one experiment preset");
    std::string preset, config_file, out_dir, domain_kind;
    int paths = -1, threads = -1, k_min_flag = -1000, k_max_flag = -1000, level = -1;
    double T = -1, dt = -1, s = -1, eps_factor = -1;
    std::uint64_t seed = 0;
    bool seed_set = false;
    run->add_option("--preset", preset, "Preset name (see `rbm-trace list`)");
    run->add_option("--config", config_file, "JSON config file (flags override it)");
    run->add_option("--paths,-M", paths, "Number of independent paths");
    run->add_option("--T", T, "Time horizon");
    run->add_option("--dt", dt, "Time step");
    run->add_option("--s", s, "Subordinator index in (0,1)");
    run->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t v) { seed = v; seed_set = true; }, "Master seed");
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--threads", threads, "Worker threads (0 = hardware)");
    run->add_option("--eps-factor", eps_factor, "Boundary tolerance multiplier on sqrt(dt)");
    run->add_option("--kmin", k_min_flag, "Coarsest dyadic scale index override");
    run->add_option("--kmax", k_max_flag, "Finest dyadic scale index override");
    run->add_option("--level", level, "Snowflake prefractal level");
    run->add_option("--domain", domain_kind, "Domain kind override (subordinated presets)");
    double side = -1;
    run->add_option("--side", side, "Square side length");

    auto* list = app.add_subcommand("list", "Print the preset catalog with citations");
    auto* calibrate =
        app.add_subcommand("calibrate", "Run the estimator calibration fixture gate");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) return cmd_list();
        if (calibrate->parsed()) return cmd_calibrate();

        harness::ExperimentConfig cfg;
        if (!config_file.empty()) {
            std::ifstream in(config_file);
            if (!in) {
                std::cerr << "error: cannot read config file '" << config_file << "'\n";
                return 2;
            }
            std::stringstream ss;
            ss << in.rdbuf();
            cfg = harness::config_from_json_string(ss.str());
        } else if (!preset.empty()) {
            cfg = harness::default_config(preset);
        } else {
            std::cerr << "error: provide --preset or --config\n";
            return 2;
        }
        if (!preset.empty() && cfg.preset != preset) cfg = harness::default_config(preset);
        if (paths > 0) cfg.paths = paths;
        if (T > 0) cfg.T = T;
        if (dt > 0) cfg.dt = dt;
        if (s > 0) cfg.s = s;
        if (eps_factor > 0) cfg.eps_factor = eps_factor;
        if (seed_set) cfg.master_seed = seed;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (threads >= 0) cfg.threads = threads;
        if (k_min_flag != -1000) cfg.k_min = k_min_flag;
        if (k_max_flag != -1000) cfg.k_max = k_max_flag;
        if (level >= 0) cfg.domain.level = level;
        if (!domain_kind.empty()) cfg.domain.kind = domain_kind;
        if (side > 0) cfg.domain.side = side;

        const auto report = harness::run_experiment(cfg);
        harness::emit_outputs(report, cfg.out_dir);

        std::cout << (report.pass ? "[PASS] " : "[FAIL] ") << cfg.preset << ": mean "
                  << report.mean << " +/- " << report.se << " (sd " << report.sd
                  << ", n=" << report.n_ok << "), predicted " << report.preset.predicted;
        if (report.preset.exploratory) std::cout << " [exploratory]";
        std::cout << "\nreport: " << cfg.out_dir << "/report.json\n";
        return report.pass ? 0 : 1;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 2;
    }
}
