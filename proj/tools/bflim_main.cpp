#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "bflim/common.hpp"
#include "bflim/config.hpp"
#include "bflim/runner.hpp"

namespace {

struct Args {
    std::string config_path;
    std::string suite;
    std::string out_dir;
    int threads = 0;
};

void add_common(CLI::App* cmd, Args& args) {
    cmd->add_option("--config", args.config_path,
                    "path to a JSON experiment config");
    cmd->add_option("--suite", args.suite, "built-in suite name");
    cmd->add_option("--out", args.out_dir,
                    "output root directory (overrides the config)");
    cmd->add_option("--threads", args.threads, "worker threads (0 = all cores)");
}

bflim::ExperimentConfig resolve(const Args& args) {
    if (args.config_path.empty() == args.suite.empty()) {
        throw bflim::ConfigError("provide exactly one of --config or --suite");
    }
    if (!args.suite.empty()) {
        return bflim::builtin_suite(args.suite);
    }
    return bflim::load_config(args.config_path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AR(1) Bayes factor limit-law simulation harness"};
    app.require_subcommand(1);
    Args args;

    CLI::App* simulate =
        app.add_subcommand("simulate", "write simulated series files");
    CLI::App* trajectory = app.add_subcommand(
        "trajectory", "per-seed (1/n) log B_n trajectories and limit fit");
    CLI::App* kl = app.add_subcommand(
        "kl", "closed-form vs Monte Carlo divergence-rate table");
    CLI::App* marginal = app.add_subcommand(
        "marginal", "converged log-marginals at the final checkpoint");
    CLI::App* check = app.add_subcommand(
        "check", "empirical diagnostics for the limit-law assumptions");
    for (CLI::App* cmd : {simulate, trajectory, kl, marginal, check}) {
        add_common(cmd, args);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const bflim::ExperimentConfig cfg = resolve(args);
        const bflim::RunOptions opts{args.out_dir, args.threads};
        if (simulate->parsed()) return bflim::cmd_simulate(cfg, opts);
        if (trajectory->parsed()) return bflim::cmd_trajectory(cfg, opts);
        if (kl->parsed()) return bflim::cmd_kl(cfg, opts);
        if (marginal->parsed()) return bflim::cmd_marginal(cfg, opts);
        if (check->parsed()) return bflim::cmd_check_assumptions(cfg, opts);
        std::fprintf(stderr, "no subcommand selected\n");
        return 2;
    } catch (const bflim::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const bflim::NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
