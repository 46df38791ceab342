#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bflim/model.hpp"
#include "bflim/process.hpp"
#include "bflim/quadrature.hpp"

namespace bflim {

// Release tag folded into run ids so artifacts from different code versions
// never collide in an output directory.
inline constexpr const char* kVersionTag = "0.1.0";

struct ModelConfig {
    std::string name;
    std::vector<Interval> rho_intervals;
    SigmaSpec sigma = SigmaSpec::fixed_at(1.0);
    PriorSpec prior;
};

struct QuadratureConfig {
    QuadRule rule = QuadRule::gauss_legendre;
    double tol = 1e-4;
    std::size_t max_resolution = std::size_t{1} << 20;
};

struct OutputConfig {
    std::string directory = "out";
    std::vector<std::string> formats = {"jsonl", "csv"};
};

struct KlConfig {
    std::size_t n = 10000;
    std::size_t replications = 50;
    std::uint64_t seed = 90210;
    std::vector<double> rho_probes = {-0.8, -0.4, 0.0, 0.4, 0.8};
    std::vector<double> sigma_probes = {0.5, 0.75, 1.0, 1.5, 2.0};
};

struct A2Config {
    double rho1 = 0.0;
    std::vector<std::size_t> n_list = {100, 1000, 10000};
    std::size_t replications = 20000;
};

struct A3Config {
    std::vector<std::size_t> n_list = {1000, 10000, 100000};
    std::size_t grid_resolution = 2048;
    double sup_threshold = 0.05;
};

struct A4Config {
    double threshold = 1e6;
    std::size_t grid_resolution = 256;
};

struct A5Config {
    double alpha = 1.0;
    double beta = 0.35;
    std::vector<std::size_t> t_list = {1, 2, 3, 4, 5};
};

struct AssumptionsConfig {
    std::uint64_t seed = 777;
    A2Config a2;
    A3Config a3;
    A4Config a4;
    A5Config a5;
};

// One experiment: a true process, candidate models, and everything needed to
// rerun it bit-for-bit. Serializes to a single JSON document; parse and
// serialize round-trip exactly.
struct ExperimentConfig {
    std::string suite_name = "custom";
    TrueProcess process;
    std::vector<ModelConfig> models;
    std::vector<std::size_t> checkpoints = {100,   316,   1000, 3162,
                                            10000, 31623, 100000};
    std::vector<std::uint64_t> seeds;
    double tolerance = 0.02;
    QuadratureConfig quadrature;
    OutputConfig outputs;
    KlConfig kl;
    AssumptionsConfig assumptions;

    void validate() const;
};

ModelSpec build_model(const ModelConfig& mc);

// Named suites shipped with the binary; unknown names raise ConfigError
// listing the valid ones.
ExperimentConfig builtin_suite(const std::string& name);
std::vector<std::string> builtin_suite_names();

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

// Content hash (16 hex digits) of the canonical serialized config plus the
// version tag; identical configs on identical code map to the same run id.
std::string run_id(const ExperimentConfig& cfg);

}  // namespace bflim
