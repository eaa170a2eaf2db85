// Command-line driver for the AP-PIC / bi-fidelity experiments.
//
// Exit codes: 0 success, 1 solver failure, 2 configuration or usage error,
// 3 input or I/O error.

#include "appic/config.hpp"
#include "appic/error.hpp"
#include "appic/experiments.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct GlobalFlags
{
    std::string config;
    std::vector<std::string> overrides;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
};

appic::ExperimentSpec resolve(const GlobalFlags& flags)
{
    appic::ExperimentSpec spec;
    if (!flags.config.empty())
        spec.apply(appic::read_config_file(flags.config));
    for (const auto& item : flags.overrides) {
        const auto [key, value] = appic::parse_override(item);
        spec.set(key, value);
    }
    // Dedicated flags win over config keys.
    if (!flags.out_dir.empty())
        spec.out_dir = flags.out_dir;
    if (flags.seed)
        spec.sim.base_seed = *flags.seed;
    if (flags.threads)
        spec.threads = *flags.threads;
    spec.finalize();
    return spec;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Asymptotic-preserving PIC solver and bi-fidelity UQ experiments"};
    app.require_subcommand(1);

    GlobalFlags flags;
    app.add_option("--config", flags.config, "config file of key = value lines")->check(CLI::ExistingFile);
    app.add_option("--set", flags.overrides, "override one config key (key=value), repeatable")
        ->allow_extra_args(false)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    app.add_option("--out-dir", flags.out_dir, "directory receiving the CSV outputs");
    app.add_option("--seed", flags.seed, "base seed of the particle runs");
    app.add_option("--threads", flags.threads, "worker threads")->check(CLI::PositiveNumber);

    struct Command
    {
        const char* name;
        const char* help;
        void (*body)(const appic::ExperimentSpec&, std::ostream&);
    };
    const Command commands[] = {
        {"simulate", "ensemble run writing fields.csv and quasineutrality.csv",
         [](const appic::ExperimentSpec& s, std::ostream& o) { appic::cmd_simulate(s, o); }},
        {"converge", "error against a fine reference over nx_list",
         [](const appic::ExperimentSpec& s, std::ostream& o) { appic::cmd_converge(s, o); }},
        {"limit-compare", "relative errors against the quasineutral solver over epsilon_list",
         [](const appic::ExperimentSpec& s, std::ostream& o) { appic::cmd_limit_compare(s, o); }},
        {"scheme-compare", "Newton against penalty field solve with shared seeds",
         [](const appic::ExperimentSpec& s, std::ostream& o) { appic::cmd_scheme_compare(s, o); }},
        {"bifidelity", "greedy bi-fidelity surrogate and validation errors over r_list",
         [](const appic::ExperimentSpec& s, std::ostream& o) { appic::cmd_bifidelity(s, o); }},
        {"kl-info", "eigenvalues of the truncated random density field",
         [](const appic::ExperimentSpec& s, std::ostream& o) { appic::cmd_kl_info(s, o); }},
    };
    for (const auto& c : commands)
        app.add_subcommand(c.name, c.help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const appic::ExperimentSpec spec = resolve(flags);
        for (const auto& c : commands)
            if (app.got_subcommand(c.name))
                c.body(spec, std::cout);
        return 0;
    } catch (const appic::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const appic::SolverError& e) {
        std::cerr << "solver failure: " << e.what() << " (residual " << e.residual() << ")\n";
        return 1;
    } catch (const appic::InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
