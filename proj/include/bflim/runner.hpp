#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bflim/config.hpp"
#include "bflim/domain.hpp"
#include "bflim/model.hpp"
#include "bflim/process.hpp"

namespace bflim {

struct RunOptions {
    // Overrides config.outputs.directory when non-empty.
    std::string out_dir;
    // 0 means all hardware threads.
    int threads = 0;
};

// Execution metadata persisted as run.json inside the run directory. The
// numeric artifacts of a run are append-only: a rerun with the same id must
// reproduce them byte for byte, and the record of the first run stands.
struct RunRecord {
    std::string run_id;
    std::string started;
    std::string finished;
    std::string status;
    std::vector<std::string> artifacts;
};

// One line of the KL comparison table. Models without a closed-form rate
// leave closed_form unset; the Monte Carlo columns are always filled.
struct KlTableRow {
    ParamPoint theta;
    bool has_closed_form = false;
    double closed_form = 0.0;
    double mc_value = 0.0;
    double mc_se = 0.0;
    double gap_in_se = 0.0;
};

std::vector<KlTableRow> kl_probe_rows(const ModelSpec& model,
                                      const TrueProcess& process,
                                      const std::vector<ParamPoint>& thetas,
                                      std::size_t n, std::size_t replications,
                                      std::uint64_t seed);

// Commands behind the CLI subcommands. Each validates the config before
// touching the filesystem, writes its artifacts into
// <outputs.directory>/<suite>-<run_id>/, and returns the process exit code:
// 0 when every configured pass condition holds, 1 otherwise. Configuration
// problems throw ConfigError and numerical failures throw NumericError; the
// CLI maps those to exit codes 2 and 1.
int cmd_simulate(const ExperimentConfig& cfg, const RunOptions& opts);
int cmd_trajectory(const ExperimentConfig& cfg, const RunOptions& opts);
int cmd_kl(const ExperimentConfig& cfg, const RunOptions& opts);
int cmd_marginal(const ExperimentConfig& cfg, const RunOptions& opts);
int cmd_check_assumptions(const ExperimentConfig& cfg, const RunOptions& opts);

}  // namespace bflim
