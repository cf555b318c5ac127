#include "qfl/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include "json.hpp"

namespace qfl {

namespace {

using nlohmann::ordered_json;

enum ExperimentStreamTag : std::uint64_t {
  kTagData = 10,
  kTagPartition = 11,
  kTagRun = 12,
};

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

[[noreturn]] void fail_field(const std::string& path, const std::string& why) {
  throw ConfigError("config error at '" + path + "': " + why);
}

void check_keys(const ordered_json& obj, const std::set<std::string>& allowed,
                const std::string& path) {
  for (const auto& item : obj.items()) {
    if (!allowed.contains(item.key())) {
      fail_field(path.empty() ? item.key() : path + "." + item.key(), "unknown field");
    }
  }
}

template <typename T>
void read_field(const ordered_json& obj, const char* key, const std::string& path, T& out) {
  if (!obj.contains(key)) return;
  try {
    obj.at(key).get_to(out);
  } catch (const nlohmann::json::exception&) {
    fail_field(path, "wrong type");
  }
}

MaskStrategy parse_mask_strategy(const std::string& s) {
  if (s == "full") return MaskStrategy::Full;
  if (s == "random_k") return MaskStrategy::RandomK;
  if (s == "lightcone") return MaskStrategy::LightCone;
  fail_field("mask.strategy", "expected full | random_k | lightcone");
}

const char* mask_strategy_name(MaskStrategy s) {
  switch (s) {
    case MaskStrategy::Full: return "full";
    case MaskStrategy::RandomK: return "random_k";
    case MaskStrategy::LightCone: return "lightcone";
  }
  return "?";
}

TopologyKind parse_topology_kind(const std::string& s) {
  if (s == "centralized") return TopologyKind::Centralized;
  if (s == "decentralized") return TopologyKind::Decentralized;
  if (s == "hybrid") return TopologyKind::Hybrid;
  fail_field("topology.kind", "expected centralized | decentralized | hybrid");
}

const char* topology_kind_name(TopologyKind k) {
  switch (k) {
    case TopologyKind::Centralized: return "centralized";
    case TopologyKind::Decentralized: return "decentralized";
    case TopologyKind::Hybrid: return "hybrid";
  }
  return "?";
}

ChannelMode parse_channel_mode(const std::string& s) {
  if (s == "raw") return ChannelMode::Raw;
  if (s == "steane") return ChannelMode::Steane;
  fail_field("channel.mode", "expected raw | steane");
}

const char* channel_mode_name(ChannelMode m) {
  return m == ChannelMode::Raw ? "raw" : "steane";
}

ordered_json config_to_json(const ExperimentConfig& cfg) {
  const FederationConfig& fed = cfg.federation;
  ordered_json j;
  j["preset"] = cfg.preset;
  j["seed"] = cfg.seed;
  j["out_dir"] = cfg.out_dir;
  j["clients"] = fed.clients;
  j["rounds"] = fed.rounds;
  j["shots"] = fed.plan.shots;
  j["workers"] = fed.workers;
  j["mask"] = {{"strategy", mask_strategy_name(fed.mask.strategy)}, {"k", fed.mask.k}};
  j["topology"] = {{"kind", topology_kind_name(fed.topology.kind)},
                   {"tau", fed.topology.tau}};
  j["channel"] = {{"p", fed.channel.p},
                  {"mode", channel_mode_name(fed.channel.mode)},
                  {"decoys", fed.channel.decoys},
                  {"adversary", fed.channel.adversary}};
  j["encoding"] = {{"bound", fed.encoding.bound}, {"margin", fed.encoding.margin}};
  j["broadcast"] = {{"perfect", fed.broadcast.perfect},
                    {"restrict_to_mask", fed.broadcast.restrict_to_mask}};
  j["training"] = {{"batch_size", fed.training.batch_size},
                   {"learning_rate", fed.training.learning_rate},
                   {"local_epochs", fed.training.local_epochs},
                   {"init_adapter_w_std", fed.training.init_adapter_w_std},
                   {"init_theta_range", fed.training.init_theta_range}};
  if (cfg.partition.kind == PartitionSpec::Kind::Dirichlet) {
    j["partition"] = {{"kind", "dirichlet"}, {"alpha", cfg.partition.alpha}};
  } else {
    ordered_json counts = ordered_json::array();
    for (const auto& c : cfg.partition.counts) {
      counts.push_back(ordered_json::array({c[0], c[1]}));
    }
    j["partition"] = {{"kind", "explicit"}, {"counts", counts}};
  }
  if (cfg.data.source == DataConfig::Source::Synthetic) {
    const SyntheticSpec& s = cfg.data.synthetic;
    j["data"] = {{"source", "synthetic"}, {"train", s.train}, {"val", s.val},
                 {"test", s.test},        {"dim", s.dim},     {"mu", s.mu},
                 {"sigma", s.sigma},      {"balance", s.balance}};
  } else {
    j["data"] = {{"source", "csv"},
                 {"train", cfg.data.train_path},
                 {"val", cfg.data.val_path},
                 {"test", cfg.data.test_path}};
  }
  j["noise_grid"] = cfg.noise_grid;
  return j;
}

ExperimentConfig config_from_json(const ordered_json& j) {
  std::string preset = "custom";
  read_field(j, "preset", "preset", preset);
  ExperimentConfig cfg = preset_config(preset);
  FederationConfig& fed = cfg.federation;

  check_keys(j, {"preset", "seed", "out_dir", "clients", "rounds", "shots", "workers",
                 "mask", "topology", "channel", "encoding", "broadcast", "training",
                 "partition", "data", "noise_grid"},
             "");
  read_field(j, "seed", "seed", cfg.seed);
  read_field(j, "out_dir", "out_dir", cfg.out_dir);
  read_field(j, "clients", "clients", fed.clients);
  read_field(j, "rounds", "rounds", fed.rounds);
  read_field(j, "shots", "shots", fed.plan.shots);
  read_field(j, "workers", "workers", fed.workers);

  if (j.contains("mask")) {
    const auto& m = j.at("mask");
    check_keys(m, {"strategy", "k"}, "mask");
    std::string strategy = mask_strategy_name(fed.mask.strategy);
    read_field(m, "strategy", "mask.strategy", strategy);
    fed.mask.strategy = parse_mask_strategy(strategy);
    read_field(m, "k", "mask.k", fed.mask.k);
  }
  if (j.contains("topology")) {
    const auto& t = j.at("topology");
    check_keys(t, {"kind", "tau"}, "topology");
    std::string kind = topology_kind_name(fed.topology.kind);
    read_field(t, "kind", "topology.kind", kind);
    fed.topology.kind = parse_topology_kind(kind);
    read_field(t, "tau", "topology.tau", fed.topology.tau);
  }
  if (j.contains("channel")) {
    const auto& c = j.at("channel");
    check_keys(c, {"p", "mode", "decoys", "adversary"}, "channel");
    read_field(c, "p", "channel.p", fed.channel.p);
    std::string mode = channel_mode_name(fed.channel.mode);
    read_field(c, "mode", "channel.mode", mode);
    fed.channel.mode = parse_channel_mode(mode);
    read_field(c, "decoys", "channel.decoys", fed.channel.decoys);
    read_field(c, "adversary", "channel.adversary", fed.channel.adversary);
  }
  if (j.contains("encoding")) {
    const auto& e = j.at("encoding");
    check_keys(e, {"bound", "margin"}, "encoding");
    read_field(e, "bound", "encoding.bound", fed.encoding.bound);
    read_field(e, "margin", "encoding.margin", fed.encoding.margin);
  }
  if (j.contains("broadcast")) {
    const auto& b = j.at("broadcast");
    check_keys(b, {"perfect", "restrict_to_mask"}, "broadcast");
    read_field(b, "perfect", "broadcast.perfect", fed.broadcast.perfect);
    read_field(b, "restrict_to_mask", "broadcast.restrict_to_mask",
               fed.broadcast.restrict_to_mask);
  }
  if (j.contains("training")) {
    const auto& t = j.at("training");
    check_keys(t, {"batch_size", "learning_rate", "local_epochs", "init_adapter_w_std",
                   "init_theta_range"},
               "training");
    read_field(t, "batch_size", "training.batch_size", fed.training.batch_size);
    read_field(t, "learning_rate", "training.learning_rate", fed.training.learning_rate);
    read_field(t, "local_epochs", "training.local_epochs", fed.training.local_epochs);
    read_field(t, "init_adapter_w_std", "training.init_adapter_w_std",
               fed.training.init_adapter_w_std);
    read_field(t, "init_theta_range", "training.init_theta_range",
               fed.training.init_theta_range);
  }
  if (j.contains("partition")) {
    const auto& p = j.at("partition");
    check_keys(p, {"kind", "alpha", "counts"}, "partition");
    std::string kind = cfg.partition.kind == PartitionSpec::Kind::Dirichlet ? "dirichlet"
                                                                            : "explicit";
    read_field(p, "kind", "partition.kind", kind);
    if (kind == "dirichlet") {
      cfg.partition.kind = PartitionSpec::Kind::Dirichlet;
      read_field(p, "alpha", "partition.alpha", cfg.partition.alpha);
    } else if (kind == "explicit") {
      cfg.partition.kind = PartitionSpec::Kind::Explicit;
      if (!p.contains("counts")) fail_field("partition.counts", "required in explicit mode");
      cfg.partition.counts.clear();
      try {
        for (const auto& row : p.at("counts")) {
          if (row.size() != 2) fail_field("partition.counts", "each entry needs two counts");
          cfg.partition.counts.push_back(
              {row.at(0).get<std::int64_t>(), row.at(1).get<std::int64_t>()});
        }
      } catch (const nlohmann::json::exception&) {
        fail_field("partition.counts", "wrong type");
      }
    } else {
      fail_field("partition.kind", "expected dirichlet | explicit");
    }
  }
  if (j.contains("data")) {
    const auto& d = j.at("data");
    std::string source =
        cfg.data.source == DataConfig::Source::Synthetic ? "synthetic" : "csv";
    read_field(d, "source", "data.source", source);
    if (source == "synthetic") {
      cfg.data.source = DataConfig::Source::Synthetic;
      check_keys(d, {"source", "train", "val", "test", "dim", "mu", "sigma", "balance"},
                 "data");
      SyntheticSpec& s = cfg.data.synthetic;
      read_field(d, "train", "data.train", s.train);
      read_field(d, "val", "data.val", s.val);
      read_field(d, "test", "data.test", s.test);
      read_field(d, "dim", "data.dim", s.dim);
      read_field(d, "mu", "data.mu", s.mu);
      read_field(d, "sigma", "data.sigma", s.sigma);
      read_field(d, "balance", "data.balance", s.balance);
    } else if (source == "csv") {
      cfg.data.source = DataConfig::Source::Csv;
      check_keys(d, {"source", "train", "val", "test"}, "data");
      read_field(d, "train", "data.train", cfg.data.train_path);
      read_field(d, "val", "data.val", cfg.data.val_path);
      read_field(d, "test", "data.test", cfg.data.test_path);
    } else {
      fail_field("data.source", "expected synthetic | csv");
    }
  }
  read_field(j, "noise_grid", "noise_grid", cfg.noise_grid);
  cfg.validate();
  return cfg;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (preset != "custom" && preset != "exp1" && preset != "exp2" && preset != "exp3") {
    fail_field("preset", "unknown preset '" + preset + "'");
  }
  if (preset != "custom" &&
      !(federation.clients == 3 || federation.clients == 5 || federation.clients == 7)) {
    fail_field("clients", "presets require 3, 5 or 7 clients");
  }
  if (preset == "exp3" && federation.clients != 3) {
    fail_field("clients", "exp3 runs with 3 clients");
  }
  if (federation.clients < 2) fail_field("clients", "need at least two clients");
  if (federation.rounds < 1) fail_field("rounds", "need at least one round");
  if (federation.plan.shots < 2 || federation.plan.shots % 2 != 0) {
    fail_field("shots", "must be even and at least 2");
  }
  if (federation.workers < 1) fail_field("workers", "must be at least 1");
  if (federation.mask.k < 0 || federation.mask.k > federation.layout.param_count()) {
    fail_field("mask.k", "out of range for the circuit");
  }
  if (federation.topology.kind == TopologyKind::Hybrid &&
      !(federation.topology.tau >= 0.0 && federation.topology.tau < 1.0)) {
    fail_field("topology.tau", "must be in [0, 1)");
  }
  if (!(federation.channel.p >= 0.0 && federation.channel.p <= 1.0)) {
    fail_field("channel.p", "must be in [0, 1]");
  }
  if (federation.channel.decoys < 0) fail_field("channel.decoys", "must be >= 0");
  if (federation.encoding.bound <= 0.0) fail_field("encoding.bound", "must be positive");
  if (federation.encoding.margin < 0.0) fail_field("encoding.margin", "must be >= 0");
  if (federation.training.batch_size < 1) fail_field("training.batch_size", "must be >= 1");
  if (federation.training.local_epochs < 1) {
    fail_field("training.local_epochs", "must be >= 1");
  }
  if (partition.kind == PartitionSpec::Kind::Dirichlet && !(partition.alpha > 0.0)) {
    fail_field("partition.alpha", "must be positive");
  }
  if (partition.kind == PartitionSpec::Kind::Explicit &&
      static_cast<int>(partition.counts.size()) != federation.clients) {
    fail_field("partition.counts", "need one entry per client");
  }
  if (data.source == DataConfig::Source::Synthetic) {
    const SyntheticSpec& s = data.synthetic;
    if (s.train < 1 || s.val < 1 || s.test < 1) {
      fail_field("data.train", "split sizes must be positive");
    }
    if (s.dim < 1) fail_field("data.dim", "must be positive");
    if (!(s.sigma > 0.0)) fail_field("data.sigma", "must be positive");
    if (!(s.balance >= 0.0 && s.balance <= 1.0)) {
      fail_field("data.balance", "must be in [0, 1]");
    }
  } else {
    if (data.train_path.empty()) fail_field("data.train", "path required");
    if (data.val_path.empty()) fail_field("data.val", "path required");
    if (data.test_path.empty()) fail_field("data.test", "path required");
  }
  if (preset == "exp3" && noise_grid.empty()) {
    fail_field("noise_grid", "exp3 needs at least one noise level");
  }
  for (double p : noise_grid) {
    if (!(p >= 0.0 && p <= 1.0)) fail_field("noise_grid", "levels must be in [0, 1]");
  }
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig cfg;
  cfg.preset = name;
  // Desk-scale defaults: a tight encoding bound keeps per-parameter shot
  // noise at M=64 small, and the wide margin keeps clipped values away from
  // the atan2 wrap point where a sign flip on the sine estimate would jump
  // the decoded value across the whole range.
  cfg.federation.encoding.bound = 0.25;
  cfg.federation.encoding.margin = 0.4;
  cfg.data.synthetic.train = 900;
  cfg.data.synthetic.mu = 0.4;
  cfg.data.synthetic.sigma = 0.05;
  // Strongly heterogeneous shards; the topology comparisons presume a
  // non-IID regime.
  cfg.partition.alpha = 0.2;
  if (name == "custom" || name == "exp1") {
    // exp1 compares aggregation strategies under the centralized topology.
  } else if (name == "exp2") {
    cfg.federation.topology.kind = TopologyKind::Hybrid;
    cfg.federation.topology.tau = 0.85;
  } else if (name == "exp3") {
    cfg.federation.clients = 3;
    cfg.federation.channel.p = 1e-3;
  } else {
    fail_field("preset", "unknown preset '" + name + "'");
  }
  return cfg;
}

ExperimentConfig parse_config_text(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config error: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw ConfigError("config error: top level must be an object");
  }
  return config_from_json(j);
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config error: cannot open '" + path + "'");
  }
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config_text(text);
}

std::string serialize_config(const ExperimentConfig& config) {
  return config_to_json(config).dump(2);
}

std::string apply_override(const std::string& json_text, const std::string& key,
                           const std::string& value) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config error: invalid JSON: ") + e.what());
  }
  ordered_json parsed_value;
  try {
    parsed_value = ordered_json::parse(value);
  } catch (const nlohmann::json::exception&) {
    parsed_value = value;  // plain string
  }
  ordered_json* node = &j;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty()) {
      throw ConfigError("config error: bad override key '" + key + "'");
    }
    if (dot == std::string::npos) {
      (*node)[part] = parsed_value;
      break;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
  return j.dump();
}

SyntheticData generate_synthetic(const SyntheticSpec& spec, RngSeed seed) {
  if (!(spec.sigma > 0.0)) {
    throw ConfigError("config error at 'data.sigma': must be positive");
  }
  Rng dir_rng(seed.child(0));
  std::vector<double> direction(spec.dim);
  double norm = 0.0;
  for (auto& u : direction) {
    u = dir_rng.normal();
    norm += u * u;
  }
  norm = std::sqrt(norm);
  for (auto& u : direction) u /= norm;

  auto make_split = [&](int n, RngSeed split_seed) {
    Rng rng(split_seed);
    Dataset data;
    data.dim = spec.dim;
    const int n_pos = static_cast<int>(std::llround(spec.balance * n));
    std::vector<int> labels(n, 0);
    for (int i = 0; i < n_pos; ++i) labels[i] = 1;
    rng.shuffle(labels);
    std::vector<double> row(spec.dim);
    for (int i = 0; i < n; ++i) {
      const double sign = labels[i] == 1 ? 1.0 : -1.0;
      for (int d = 0; d < spec.dim; ++d) {
        row[d] = sign * spec.mu * direction[d] + spec.sigma * rng.normal();
      }
      data.append(row, labels[i]);
    }
    return data;
  };

  SyntheticData out;
  out.train = make_split(spec.train, seed.child(1));
  out.val = make_split(spec.val, seed.child(2));
  out.test = make_split(spec.test, seed.child(3));
  return out;
}

std::vector<std::pair<std::string, FederationConfig>> experiment_variants(
    const ExperimentConfig& config) {
  std::vector<std::pair<std::string, FederationConfig>> variants;
  const FederationConfig& base = config.federation;
  if (config.preset == "exp1") {
    for (MaskStrategy strategy :
         {MaskStrategy::Full, MaskStrategy::RandomK, MaskStrategy::LightCone}) {
      FederationConfig fed = base;
      fed.topology.kind = TopologyKind::Centralized;
      fed.mask.strategy = strategy;
      variants.emplace_back(mask_strategy_name(strategy), fed);
    }
  } else if (config.preset == "exp2") {
    for (TopologyKind kind : {TopologyKind::Centralized, TopologyKind::Decentralized,
                              TopologyKind::Hybrid}) {
      FederationConfig fed = base;
      fed.topology.kind = kind;
      variants.emplace_back(topology_kind_name(kind), fed);
    }
  } else if (config.preset == "exp3") {
    auto add = [&](double p, ChannelMode mode) {
      char tag[48];
      std::snprintf(tag, sizeof tag, "p%g%s", p,
                    mode == ChannelMode::Steane ? "_steane" : "");
      FederationConfig fed = base;
      fed.channel.p = p;
      fed.channel.mode = mode;
      fed.topology.kind = TopologyKind::Centralized;
      fed.mask.strategy = MaskStrategy::Full;
      variants.emplace_back(std::string("centralized_full_") + tag, fed);
      fed.mask.strategy = MaskStrategy::LightCone;
      variants.emplace_back(std::string("centralized_lightcone_") + tag, fed);
      fed.topology.kind = TopologyKind::Decentralized;
      fed.mask.strategy = MaskStrategy::Full;
      variants.emplace_back(std::string("decentralized_") + tag, fed);
    };
    for (double p : config.noise_grid) {
      add(p, ChannelMode::Raw);
    }
    const double p_max = *std::max_element(config.noise_grid.begin(), config.noise_grid.end());
    add(p_max, ChannelMode::Steane);
  } else {
    variants.emplace_back("run", base);
  }
  return variants;
}

void write_rounds_csv(const std::string& path, const std::vector<RoundRecord>& rounds,
                      int shots) {
  std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
  if (!out) {
    throw std::runtime_error("write_rounds_csv: cannot open " + path);
  }
  out << "round,phase,shots,val_loss,val_acc,test_loss,test_acc,"
         "cum_logical,cum_physical,cum_discarded,cum_clipped,switch\n";
  for (const auto& r : rounds) {
    out << r.round << ',' << phase_name(r.phase) << ',' << shots << ','
        << fmt_double(r.val_loss) << ',' << fmt_double(r.val_acc) << ','
        << fmt_double(r.test_loss) << ',' << fmt_double(r.test_acc) << ','
        << r.cum_logical << ',' << r.cum_physical << ',' << r.cum_discarded << ','
        << r.cum_clipped << ',' << (r.switched ? 1 : 0) << '\n';
  }
  if (!out) {
    throw std::runtime_error("write_rounds_csv: write failed for " + path);
  }
}

namespace {

ordered_json ledger_to_json(const TransmissionLedger& ledger) {
  return {{"qsa_out", ledger.qsa_out},
          {"qsa_back", ledger.qsa_back},
          {"broadcast", ledger.broadcast},
          {"decoy", ledger.decoy},
          {"logical_total", ledger.logical_total()},
          {"physical_total", ledger.physical_total},
          {"discarded_shots", ledger.discarded_shots},
          {"clipped_values", ledger.clipped_values}};
}

void write_variant_summary(const std::string& path, const ExperimentConfig& config,
                           const VariantOutcome& variant) {
  ExperimentConfig echoed = config;
  echoed.federation = variant.federation;
  const FederationConfig& fed = variant.federation;
  const std::int64_t params = ModelParams(fed.layout).param_count();
  const std::int64_t t = variant.result.switched
                             ? variant.result.switch_round
                             : fed.rounds;
  ordered_json j;
  j["variant"] = variant.name;
  j["config"] = ordered_json::parse(serialize_config(echoed));
  j["formula_costs"] = {
      {"params", params},
      {"centralized", cost_model(fed.rounds, fed.rounds, fed.clients, fed.plan.shots,
                                 params, CostConvention::Centralized)},
      {"decentralized", cost_model(fed.rounds, 0, fed.clients, fed.plan.shots, params,
                                   CostConvention::Decentralized)},
      {"hybrid", cost_model(fed.rounds, t, fed.clients, fed.plan.shots, params,
                            CostConvention::Hybrid)},
      {"aggregation_only", cost_model(fed.rounds, fed.rounds, fed.clients, fed.plan.shots,
                                      params, CostConvention::AggregationOnly)},
      {"aggregation_only_masked",
       2 * static_cast<std::int64_t>(fed.clients) * fed.plan.shots *
           variant.result.mask_size_total}};
  const RoundRecord& last = variant.result.rounds.back();
  j["final"] = {{"val_loss", last.val_loss},
                {"val_acc", last.val_acc},
                {"test_loss", last.test_loss},
                {"test_acc", last.test_acc}};
  j["ledger"] = ledger_to_json(variant.result.ledger);
  j["switch"] = {{"switched", variant.result.switched},
                 {"round", variant.result.switch_round}};
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("summary: cannot open " + path);
  }
  out << j.dump(2) << '\n';
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  config.validate();
  namespace fs = std::filesystem;
  const RngSeed master{config.seed};

  SyntheticData data;
  if (config.data.source == DataConfig::Source::Synthetic) {
    data = generate_synthetic(config.data.synthetic, master.child(kTagData));
  } else {
    data.train = load_feature_csv(config.data.train_path);
    data.val = load_feature_csv(config.data.val_path);
    data.test = load_feature_csv(config.data.test_path);
  }

  Rng partition_rng(master.child(kTagPartition));
  const Partition partition = partition_noniid(data.train.labels, config.federation.clients,
                                               config.partition, partition_rng);
  std::vector<Dataset> shards;
  shards.reserve(partition.size());
  for (const auto& indices : partition) {
    shards.push_back(subset(data.train, indices));
  }

  fs::create_directories(config.out_dir);
  ExperimentOutcome outcome;
  outcome.out_dir = config.out_dir;
  const RngSeed run_seed = master.child(kTagRun);

  for (auto& [name, fed] : experiment_variants(config)) {
    VariantOutcome variant;
    variant.name = name;
    variant.federation = fed;
    variant.result = run_federation(fed, shards, data.val, data.test, run_seed);
    const fs::path dir = fs::path(config.out_dir) / name;
    fs::create_directories(dir);
    write_rounds_csv((dir / "rounds.csv").string(), variant.result.rounds, fed.plan.shots);
    write_variant_summary((dir / "summary.json").string(), config, variant);
    outcome.variants.push_back(std::move(variant));
  }

  ordered_json seeds;
  seeds["master"] = config.seed;
  seeds["streams"] = {{"data", master.child(kTagData).value},
                      {"partition", master.child(kTagPartition).value},
                      {"run", run_seed.value}};
  std::ofstream seeds_out((fs::path(config.out_dir) / "seeds.json").string(),
                          std::ios::binary);
  if (!seeds_out) {
    throw std::runtime_error("run_experiment: cannot write seeds manifest");
  }
  seeds_out << seeds.dump(2) << '\n';
  return outcome;
}

}  // namespace qfl
