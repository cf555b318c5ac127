// Experiment runner for the quantum federated learning simulator.
//
//   qflsim run   --preset exp2 --seed 7 --out results [--config cfg.json]
//                [--set key=value ...]
//   qflsim synth --out data --seed 7 --train 600 --val 150 --test 150
//
// `run` executes one experiment preset (or a custom config) and writes one
// rounds.csv + summary.json per variant plus a seeds manifest. `synth` writes
// feature CSVs from the synthetic generator.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qfl/experiment.hpp"

namespace {

struct RunArgs {
  std::string config_path;
  std::string preset;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool out_set = false;
  std::vector<std::string> overrides;
};

int do_run(const RunArgs& args) {
  std::string json_text;
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) {
      std::cerr << "config error: cannot open '" << args.config_path << "'\n";
      return 2;
    }
    json_text.assign((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
  } else {
    json_text = "{}";
  }
  if (!args.preset.empty()) {
    json_text = qfl::apply_override(json_text, "preset", args.preset);
  }
  if (args.seed_set) {
    json_text = qfl::apply_override(json_text, "seed", std::to_string(args.seed));
  }
  if (args.out_set) {
    json_text = qfl::apply_override(json_text, "out_dir", args.out_dir);
  }
  for (const auto& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "config error: --set expects key=value, got '" << kv << "'\n";
      return 2;
    }
    json_text = qfl::apply_override(json_text, kv.substr(0, eq), kv.substr(eq + 1));
  }

  const qfl::ExperimentConfig config = qfl::parse_config_text(json_text);
  const qfl::ExperimentOutcome outcome = qfl::run_experiment(config);
  for (const auto& variant : outcome.variants) {
    const auto& last = variant.result.rounds.back();
    std::printf("%-36s rounds=%zu val_acc=%.4f test_acc=%.4f logical=%lld\n",
                variant.name.c_str(), variant.result.rounds.size(), last.val_acc,
                last.test_acc, static_cast<long long>(last.cum_logical));
  }
  std::printf("artifacts written to %s\n", outcome.out_dir.c_str());
  return 0;
}

int do_synth(const qfl::SyntheticSpec& spec, const std::string& out_dir,
             std::uint64_t seed) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const qfl::SyntheticData data = qfl::generate_synthetic(spec, qfl::RngSeed{seed});
  qfl::save_feature_csv(data.train, (fs::path(out_dir) / "train.csv").string());
  qfl::save_feature_csv(data.val, (fs::path(out_dir) / "val.csv").string());
  qfl::save_feature_csv(data.test, (fs::path(out_dir) / "test.csv").string());
  std::printf("wrote %zu/%zu/%zu samples to %s\n", data.train.size(), data.val.size(),
              data.test.size(), out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum federated learning simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "run an experiment");
  run->add_option("--config", run_args.config_path, "JSON config file");
  run->add_option("--preset", run_args.preset, "preset: custom | exp1 | exp2 | exp3");
  run->add_option("--seed", run_args.seed, "master seed")
      ->each([&](const std::string&) { run_args.seed_set = true; });
  run->add_option("--out", run_args.out_dir, "output directory")
      ->envname("QFLSIM_OUT")
      ->each([&](const std::string&) { run_args.out_set = true; });
  run->add_option("--set", run_args.overrides, "config override key=value (repeatable)");

  qfl::SyntheticSpec synth_spec;
  std::string synth_out = "data";
  std::uint64_t synth_seed = 1;
  auto* synth = app.add_subcommand("synth", "generate synthetic feature CSVs");
  synth->add_option("--out", synth_out, "output directory")->envname("QFLSIM_OUT");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--train", synth_spec.train, "training samples");
  synth->add_option("--val", synth_spec.val, "validation samples");
  synth->add_option("--test", synth_spec.test, "test samples");
  synth->add_option("--dim", synth_spec.dim, "feature dimension");
  synth->add_option("--mu", synth_spec.mu, "class separation");
  synth->add_option("--sigma", synth_spec.sigma, "cluster spread");
  synth->add_option("--balance", synth_spec.balance, "class-1 fraction");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return do_run(run_args);
    }
    return do_synth(synth_spec, synth_out, synth_seed);
  } catch (const qfl::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
