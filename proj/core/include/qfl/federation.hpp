#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qfl/dataset.hpp"
#include "qfl/qsa.hpp"

namespace qfl {

enum class TopologyKind { Centralized, Decentralized, Hybrid };

struct Topology {
  TopologyKind kind = TopologyKind::Centralized;
  double tau = 0.85;  // hybrid switching threshold on validation accuracy
};

// Closed-form transmission counts. Centralized rounds cost 3NMP (2NMP secure
// aggregation + NMP teleportation broadcast), decentralized rounds 2NMP,
// hybrid {3t + 2(T-t)}NMP for a switch at round t. AggregationOnly counts the
// 2NMP aggregation term alone.
enum class CostConvention { Centralized, Decentralized, Hybrid, AggregationOnly };

std::int64_t cost_model(std::int64_t rounds, std::int64_t switch_round,
                        std::int64_t clients, std::int64_t shots, std::int64_t params,
                        CostConvention convention);

struct PartitionSpec {
  enum class Kind { Dirichlet, Explicit };
  Kind kind = Kind::Dirichlet;
  double alpha = 0.5;
  // Explicit mode: per-client {class-0 count, class-1 count}; each column must
  // sum to the class total.
  std::vector<std::array<std::int64_t, 2>> counts;
};

using Partition = std::vector<std::vector<std::size_t>>;

// Splits sample indices across clients. Dirichlet mode draws per-class client
// proportions from Dirichlet(alpha); explicit mode reproduces the given
// counts exactly. Every client ends up nonempty.
Partition partition_noniid(std::span<const int> labels, int n_clients,
                           const PartitionSpec& spec, Rng& rng);

struct Metrics {
  double loss = 0.0;
  double accuracy = 0.0;
};

// Mean BCE and thresholded (y_hat >= 0.5) accuracy.
Metrics evaluate(const ModelParams& params, const Dataset& data);

enum class MaskStrategy { Full, RandomK, LightCone };

struct MaskConfig {
  MaskStrategy strategy = MaskStrategy::Full;
  int k = 20;
};

struct ChannelConfig {
  double p = 0.0;
  ChannelMode mode = ChannelMode::Raw;
  int decoys = 0;
  bool adversary = false;
};

struct BroadcastConfig {
  bool perfect = false;           // skip shot estimation, deliver exact values
  bool restrict_to_mask = false;  // broadcast masked indices only
};

struct TrainingConfig {
  int batch_size = 16;
  double learning_rate = 1e-3;
  int local_epochs = 1;
  double init_adapter_w_std = 0.1;
  double init_theta_range = 0.6;
};

struct FederationConfig {
  int clients = 3;
  int rounds = 30;
  ShotPlan plan{64};
  MaskConfig mask;
  Topology topology;
  ChannelConfig channel;
  EncodingScheme encoding;
  BroadcastConfig broadcast;
  TrainingConfig training;
  CircuitLayout layout = CircuitLayout::brickwork();
  int workers = 1;

  void validate() const;
};

enum class Phase { Central, Decentral };

struct RoundRecord {
  int round = 0;  // 1-based, contiguous
  Phase phase = Phase::Central;
  double val_loss = 0.0;
  double val_acc = 0.0;
  double test_loss = 0.0;
  double test_acc = 0.0;
  // Cumulative ledger snapshot at the end of the round.
  std::int64_t cum_logical = 0;
  std::int64_t cum_physical = 0;
  std::int64_t cum_discarded = 0;
  std::int64_t cum_clipped = 0;
  std::int64_t cum_decoy = 0;
  int mask_size = 0;
  int aggregation_failures = 0;
  int decoy_detections = 0;
  bool switched = false;  // hybrid transition decided at this round's end
};

struct RunResult {
  std::vector<RoundRecord> rounds;
  TransmissionLedger ledger;
  ModelParams model;  // final global model (centralized/hybrid) or last acting model
  bool switched = false;
  int switch_round = 0;  // t; equals rounds when the threshold never fired
  std::int64_t mask_size_total = 0;
};

// Runs T federated rounds over the given client shards. All randomness is
// derived from `seed` through per-purpose child streams, so a run is
// reproducible bit-for-bit for any worker count.
RunResult run_federation(const FederationConfig& config,
                         const std::vector<Dataset>& client_data,
                         const Dataset& validation, const Dataset& test, RngSeed seed);

const char* phase_name(Phase phase);

}  // namespace qfl
