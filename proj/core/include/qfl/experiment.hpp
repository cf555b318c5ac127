#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qfl/federation.hpp"

namespace qfl {

// Two class-conditional Gaussian clusters at +-mu*u for a seeded unit
// direction u, isotropic sigma elsewhere.
struct SyntheticSpec {
  int train = 600;
  int val = 150;
  int test = 150;
  int dim = kFeatureDim;
  double mu = 0.5;
  double sigma = 0.125;
  double balance = 0.5;
};

struct DataConfig {
  enum class Source { Synthetic, Csv };
  Source source = Source::Synthetic;
  SyntheticSpec synthetic;
  std::string train_path;
  std::string val_path;
  std::string test_path;
};

struct ExperimentConfig {
  std::string preset = "custom";  // custom | exp1 | exp2 | exp3
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  FederationConfig federation;
  PartitionSpec partition;
  DataConfig data;
  std::vector<double> noise_grid = {1e-4, 2.5e-4, 5e-4, 7.5e-4, 1e-3};

  void validate() const;
};

// Raised for malformed configuration; the message names the offending field.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

ExperimentConfig preset_config(const std::string& name);
ExperimentConfig parse_config_text(const std::string& json_text);
ExperimentConfig parse_config_file(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

// Applies a dotted-path override ("topology.tau=0.9") onto the JSON form of
// the config; the value is parsed as JSON when possible, else as a string.
std::string apply_override(const std::string& json_text, const std::string& key,
                           const std::string& value);

struct SyntheticData {
  Dataset train;
  Dataset val;
  Dataset test;
};

SyntheticData generate_synthetic(const SyntheticSpec& spec, RngSeed seed);

struct VariantOutcome {
  std::string name;
  FederationConfig federation;
  RunResult result;
};

struct ExperimentOutcome {
  std::vector<VariantOutcome> variants;
  std::string out_dir;
};

// The preset's variant list: exp1 compares aggregation strategies, exp2
// compares topologies, exp3 sweeps the noise grid and adds Steane-encoded
// runs at the highest level. Custom runs the config as-is.
std::vector<std::pair<std::string, FederationConfig>> experiment_variants(
    const ExperimentConfig& config);

// Runs every variant on shared data and partition, writing
// <out_dir>/<variant>/rounds.csv + summary.json and <out_dir>/seeds.json.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

void write_rounds_csv(const std::string& path, const std::vector<RoundRecord>& rounds,
                      int shots);

}  // namespace qfl
