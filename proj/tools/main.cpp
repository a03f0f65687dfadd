#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "insar/commands.hpp"
#include "insar/error.hpp"
#include "insar/experiment.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfigFailure = 2, kNumericalFailure = 3 };

struct Options {
    std::optional<fs::path> config;
    std::optional<fs::path> out;
    std::optional<fs::path> master;
    std::optional<fs::path> slave;
    std::vector<fs::path> inputs;
    int threads = 0;
    std::optional<std::uint64_t> seed;
};

insar::Experiment load(const Options& opt) {
    insar::ExperimentConfig config =
        opt.config ? insar::load_config(*opt.config) : insar::parse_config(insar::default_config_text());
    if (opt.seed) config.override_seed(*opt.seed);
    if (opt.out) config.output_directory = *opt.out;
    return insar::resolve(config);
}

insar::commands::EchoPaths echo_paths(const Options& opt, const fs::path& out) {
    auto paths = insar::commands::default_echo_paths(out);
    if (opt.master) paths.master = *opt.master;
    if (opt.slave) paths.slave = *opt.slave;
    return paths;
}

void print_row(const insar::commands::MetricsRow& row) {
    std::printf("%s: rmse %.4f rad, coherence %.4f, residues %zu\n", row.method.c_str(),
                row.metrics.rmse_rad, row.metrics.mean_coherence, row.metrics.residue_count);
}

int run(const std::string& command, const Options& opt) {
    const insar::Experiment e = load(opt);
    const fs::path out = e.config.output_directory;
    if (command == "simulate") {
        insar::commands::simulate(e, out);
        std::printf("wrote simulation to %s\n", out.string().c_str());
    } else if (command == "bp") {
        print_row(insar::commands::bp(e, echo_paths(opt, out), out));
    } else if (command == "reconstruct") {
        print_row(insar::commands::reconstruct(e, echo_paths(opt, out), out, std::cerr));
    } else if (command == "evaluate") {
        std::vector<fs::path> inputs = opt.inputs;
        if (inputs.empty()) inputs.push_back(out);
        insar::commands::evaluate(e, inputs, out, std::cout);
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse-regularization InSAR imaging from raw echoes"};
    app.require_subcommand(1);

    Options opt;
    std::string config, out, master, slave;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config, "Experiment config file (defaults when omitted)")
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out, "Output directory (overrides [output] directory)");
        sub->add_option("--threads", opt.threads, "Worker threads (0 = all cores)")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--seed", seed, "Base seed overriding scene, sampling and noise seeds");
    };
    auto add_echoes = [&](CLI::App* sub) {
        sub->add_option("--master", master, "Master echo grid (default: <out>/echo_master.cf64)");
        sub->add_option("--slave", slave, "Slave echo grid (default: <out>/echo_slave.cf64)");
    };

    auto* sim = app.add_subcommand("simulate", "Simulate the scene and both raw echoes");
    add_common(sim);
    auto* bp = app.add_subcommand("bp", "Back-projection images and baseline interferogram");
    add_common(bp);
    add_echoes(bp);
    auto* rec = app.add_subcommand("reconstruct", "Sparse reconstruction of the interferogram");
    add_common(rec);
    add_echoes(rec);
    auto* eval = app.add_subcommand("evaluate", "Compare interferograms against the ideal phase");
    add_common(eval);
    std::vector<std::string> inputs;
    eval->add_option("inputs", inputs, "Interferogram files or run directories");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? kOk : kConfigFailure;
    }

    if (!config.empty()) opt.config = config;
    if (!out.empty()) opt.out = out;
    if (!master.empty()) opt.master = master;
    if (!slave.empty()) opt.slave = slave;
    for (const auto& in : inputs) opt.inputs.emplace_back(in);
    for (auto* sub : {sim, bp, rec, eval}) {
        if (sub->count("--seed") > 0) opt.seed = seed;
    }
#ifdef _OPENMP
    if (opt.threads > 0) omp_set_num_threads(opt.threads);
#endif

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, opt);
    } catch (const insar::ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kConfigFailure;
    } catch (const insar::NumericalError& err) {
        std::cerr << "numerical failure: " << err.what() << "\n";
        return kNumericalFailure;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kFailure;
    }
}
