#include "qfl/federation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace qfl {

namespace {

// Child-stream tags; every random decision in a run derives from
// (seed, tag, round, ...) so that worker partitioning cannot reorder draws.
enum StreamTag : std::uint64_t {
  kTagInit = 1,
  kTagTrain = 2,
  kTagAggregate = 3,
  kTagBroadcast = 4,
  kTagMask = 5,
  kTagDecoy = 6,
};

void parallel_chunks(std::size_t total, int workers,
                     const std::function<void(int, std::size_t, std::size_t)>& fn) {
  const int n_workers = std::max(1, workers);
  if (n_workers == 1 || total < 2) {
    fn(0, 0, total);
    return;
  }
  std::vector<std::thread> threads;
  const std::size_t chunk = (total + n_workers - 1) / n_workers;
  for (int w = 0; w < n_workers; ++w) {
    const std::size_t begin = std::min(total, static_cast<std::size_t>(w) * chunk);
    const std::size_t end = std::min(total, begin + chunk);
    if (begin < end) {
      threads.emplace_back(fn, w, begin, end);
    }
  }
  for (auto& t : threads) t.join();
}

struct ClientState {
  Dataset data;
  ModelParams params;
  AdamState adam;
};

void train_one_epoch(ClientState& client, const TrainingConfig& cfg, Rng& rng) {
  const std::size_t n = client.data.size();
  if (n == 0) return;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);
  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
  std::vector<double> batch_features;
  std::vector<int> batch_labels;
  for (std::size_t start = 0; start < n; start += batch) {
    const std::size_t stop = std::min(n, start + batch);
    batch_features.clear();
    batch_labels.clear();
    for (std::size_t i = start; i < stop; ++i) {
      const auto row = client.data.row(order[i]);
      batch_features.insert(batch_features.end(), row.begin(), row.end());
      batch_labels.push_back(client.data.labels[order[i]]);
    }
    const LossGrad lg = loss_and_grad(client.params, batch_features, batch_labels);
    adam_step(client.adam, client.params, lg.grad);
  }
}

SelectionMask make_mask(const MaskConfig& cfg, const ModelParams& reference,
                        RngSeed mask_seed) {
  switch (cfg.strategy) {
    case MaskStrategy::Full:
      return full_mask(reference);
    case MaskStrategy::LightCone:
      return lightcone_mask(reference);
    case MaskStrategy::RandomK: {
      Rng rng(mask_seed);
      return random_k_mask(reference, cfg.k, rng);
    }
  }
  throw std::invalid_argument("make_mask: unknown strategy");
}

}  // namespace

void FederationConfig::validate() const {
  if (clients < 2) throw std::invalid_argument("federation: need at least two clients");
  if (rounds < 1) throw std::invalid_argument("federation: need at least one round");
  plan.validate();
  if (channel.p < 0.0 || channel.p > 1.0) {
    throw std::invalid_argument("federation: channel.p must be in [0, 1]");
  }
  if (channel.decoys < 0) throw std::invalid_argument("federation: negative decoy count");
  // tau = 0 is the degenerate always-switch case used by smoke setups.
  if (topology.kind == TopologyKind::Hybrid &&
      !(topology.tau >= 0.0 && topology.tau < 1.0)) {
    throw std::invalid_argument("federation: hybrid tau must be in [0, 1)");
  }
  if (training.batch_size < 1) throw std::invalid_argument("federation: batch_size must be >= 1");
  if (workers < 1) throw std::invalid_argument("federation: workers must be >= 1");
  if (encoding.bound <= 0.0) throw std::invalid_argument("federation: encoding bound must be positive");
}

std::int64_t cost_model(std::int64_t rounds, std::int64_t switch_round,
                        std::int64_t clients, std::int64_t shots, std::int64_t params,
                        CostConvention convention) {
  if (rounds < 0 || switch_round < 0 || switch_round > rounds) {
    throw std::invalid_argument("cost_model: require 0 <= switch_round <= rounds");
  }
  const std::int64_t nmp = clients * shots * params;
  switch (convention) {
    case CostConvention::Centralized:
      return 3 * rounds * nmp;
    case CostConvention::Decentralized:
      return 2 * rounds * nmp;
    case CostConvention::Hybrid:
      return (3 * switch_round + 2 * (rounds - switch_round)) * nmp;
    case CostConvention::AggregationOnly:
      return 2 * rounds * nmp;
  }
  throw std::invalid_argument("cost_model: unknown convention");
}

Partition partition_noniid(std::span<const int> labels, int n_clients,
                           const PartitionSpec& spec, Rng& rng) {
  if (n_clients < 1) {
    throw std::invalid_argument("partition: need at least one client");
  }
  if (labels.size() < static_cast<std::size_t>(n_clients)) {
    throw std::invalid_argument("partition: fewer samples than clients");
  }
  std::vector<std::size_t> class_indices[2];
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      throw std::invalid_argument("partition: labels must be binary");
    }
    class_indices[labels[i]].push_back(i);
  }

  Partition parts(n_clients);
  for (int cls = 0; cls < 2; ++cls) {
    auto& pool = class_indices[cls];
    rng.shuffle(pool);
    const std::int64_t total = static_cast<std::int64_t>(pool.size());
    std::vector<std::int64_t> counts(n_clients, 0);
    if (spec.kind == PartitionSpec::Kind::Explicit) {
      if (static_cast<int>(spec.counts.size()) != n_clients) {
        throw std::invalid_argument("partition: explicit counts need one entry per client");
      }
      std::int64_t sum = 0;
      for (int c = 0; c < n_clients; ++c) {
        if (spec.counts[c][cls] < 0) {
          throw std::invalid_argument("partition: negative explicit count");
        }
        counts[c] = spec.counts[c][cls];
        sum += counts[c];
      }
      if (sum != total) {
        throw std::invalid_argument("partition: explicit counts do not sum to the class total");
      }
    } else {
      // Largest-remainder apportionment of Dirichlet proportions.
      const auto w = rng.dirichlet(spec.alpha, static_cast<std::size_t>(n_clients));
      std::vector<double> remainders(n_clients);
      std::int64_t assigned = 0;
      for (int c = 0; c < n_clients; ++c) {
        const double exact = w[c] * static_cast<double>(total);
        counts[c] = static_cast<std::int64_t>(std::floor(exact));
        remainders[c] = exact - static_cast<double>(counts[c]);
        assigned += counts[c];
      }
      std::vector<int> order(n_clients);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return remainders[a] > remainders[b];
      });
      for (std::int64_t i = 0; assigned < total; ++i, ++assigned) {
        counts[order[i % n_clients]] += 1;
      }
    }
    std::size_t cursor = 0;
    for (int c = 0; c < n_clients; ++c) {
      for (std::int64_t i = 0; i < counts[c]; ++i) {
        parts[c].push_back(pool[cursor++]);
      }
    }
  }

  // Dirichlet draws can leave a client with nothing; move one sample over
  // from the largest shard (lowest index wins ties) to keep every client
  // populated.
  for (int c = 0; c < n_clients; ++c) {
    if (!parts[c].empty()) continue;
    int donor = -1;
    for (int d = 0; d < n_clients; ++d) {
      if (donor < 0 || parts[d].size() > parts[donor].size()) donor = d;
    }
    if (parts[donor].empty()) {
      throw std::invalid_argument("partition: not enough samples to cover all clients");
    }
    parts[c].push_back(parts[donor].back());
    parts[donor].pop_back();
  }
  for (auto& p : parts) {
    std::sort(p.begin(), p.end());
  }
  return parts;
}

Metrics evaluate(const ModelParams& params, const Dataset& data) {
  if (data.size() == 0) {
    throw std::invalid_argument("evaluate: empty dataset");
  }
  Metrics m;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double y_hat = predict(params, data.row(i));
    const double y = static_cast<double>(data.labels[i]);
    m.loss += -(y * std::log(y_hat) + (1.0 - y) * std::log(1.0 - y_hat));
    const int predicted = y_hat >= 0.5 ? 1 : 0;
    m.accuracy += predicted == data.labels[i] ? 1.0 : 0.0;
  }
  m.loss /= static_cast<double>(data.size());
  m.accuracy /= static_cast<double>(data.size());
  return m;
}

const char* phase_name(Phase phase) {
  return phase == Phase::Central ? "central" : "decentral";
}

namespace {

// Teleports chosen global parameters to every client. Per-(client, index)
// RNG substreams keep the result independent of the worker layout.
void broadcast_model(const FederationConfig& cfg, const ModelParams& global,
                     std::vector<ClientState>& clients, const SelectionMask& mask,
                     TransmissionLedger& ledger, RngSeed round_seed,
                     int& failures) {
  const int param_count = global.param_count();
  std::vector<int> indices;
  if (cfg.broadcast.restrict_to_mask) {
    for (int i = 0; i < param_count; ++i) {
      if (mask.included[i]) indices.push_back(i);
    }
  } else {
    indices.resize(param_count);
    std::iota(indices.begin(), indices.end(), 0);
  }

  const LegConfig leg{DepolarizingChannel{cfg.channel.p}, cfg.channel.mode, false};
  for (std::size_t c = 0; c < clients.size(); ++c) {
    if (cfg.broadcast.perfect) {
      // Idealized redistribution: transmissions are counted, estimation is
      // bypassed.
      ledger.broadcast += static_cast<std::int64_t>(indices.size()) * cfg.plan.shots;
      count_traversals(cfg.channel.mode,
                       static_cast<std::int64_t>(indices.size()) * cfg.plan.shots, ledger);
      for (int idx : indices) {
        clients[c].params.flat()[idx] = global.flat()[idx];
      }
      continue;
    }
    const RngSeed client_seed = round_seed.child(kTagBroadcast, c);
    std::vector<TransmissionLedger> worker_ledgers(std::max(1, cfg.workers));
    std::vector<double> received(indices.size());
    std::vector<std::uint8_t> ok(indices.size(), 0);
    parallel_chunks(indices.size(), cfg.workers,
                    [&](int w, std::size_t begin, std::size_t end) {
                      for (std::size_t pos = begin; pos < end; ++pos) {
                        const int idx = indices[pos];
                        Rng rng(client_seed.child(static_cast<std::uint64_t>(idx)));
                        const auto est =
                            teleport_parameter(global.flat()[idx], cfg.encoding, cfg.plan,
                                               leg, worker_ledgers[w], rng);
                        if (est.has_value()) {
                          received[pos] = *est;
                          ok[pos] = 1;
                        }
                      }
                    });
    for (const auto& wl : worker_ledgers) ledger.merge(wl);
    for (std::size_t pos = 0; pos < indices.size(); ++pos) {
      if (ok[pos]) {
        clients[c].params.flat()[indices[pos]] = received[pos];
      } else {
        ++failures;
      }
    }
  }
}

}  // namespace

RunResult run_federation(const FederationConfig& config,
                         const std::vector<Dataset>& client_data,
                         const Dataset& validation, const Dataset& test, RngSeed seed) {
  config.validate();
  if (static_cast<int>(client_data.size()) != config.clients) {
    throw std::invalid_argument("run_federation: one dataset per client required");
  }
  for (const auto& d : client_data) {
    if (d.size() == 0) {
      throw std::invalid_argument("run_federation: empty client shard");
    }
  }

  Rng init_rng(seed.child(kTagInit));
  ModelParams global = ModelParams::random_init(config.layout, init_rng,
                                                config.training.init_adapter_w_std,
                                                config.training.init_theta_range);
  std::vector<ClientState> clients;
  clients.reserve(config.clients);
  for (int c = 0; c < config.clients; ++c) {
    clients.push_back(ClientState{client_data[c], global,
                                  AdamState(global.param_count(), config.training.learning_rate)});
  }

  RunResult result;
  result.model = global;
  result.switch_round = config.rounds;
  Phase phase = config.topology.kind == TopologyKind::Decentralized ? Phase::Decentral
                                                                    : Phase::Central;
  TransmissionLedger ledger;
  int acting_rotation = 0;

  for (int round = 1; round <= config.rounds; ++round) {
    const RngSeed round_seed = seed.child(round);

    // Local training, one (or more) epochs per client; clients are
    // independent, so they can run on separate workers.
    parallel_chunks(clients.size(), std::min(config.workers, config.clients),
                    [&](int, std::size_t begin, std::size_t end) {
                      for (std::size_t c = begin; c < end; ++c) {
                        for (int e = 0; e < config.training.local_epochs; ++e) {
                          Rng rng(round_seed.child(kTagTrain, c, e));
                          train_one_epoch(clients[c], config.training, rng);
                        }
                      }
                    });

    RoundRecord record;
    record.round = round;
    record.phase = phase;

    if (config.channel.decoys > 0) {
      for (std::size_t c = 0; c < clients.size(); ++c) {
        Rng rng(round_seed.child(kTagDecoy, c));
        if (decoy_round(config.channel.decoys, config.channel.adversary, ledger, rng)) {
          record.decoy_detections += 1;
        }
      }
    }

    const int acting = phase == Phase::Decentral ? acting_rotation % config.clients : -1;
    if (phase == Phase::Decentral) {
      acting_rotation += 1;
    }

    // Mask from the model acting as the aggregation reference this round.
    const ModelParams& reference = phase == Phase::Central ? global : clients[acting].params;
    const SelectionMask mask =
        make_mask(config.mask, reference, round_seed.child(kTagMask));
    record.mask_size = mask.count();
    result.mask_size_total += mask.count();

    std::vector<std::span<const double>> client_values;
    client_values.reserve(clients.size());
    for (const auto& c : clients) {
      client_values.push_back(c.params.flat());
    }
    std::vector<LegConfig> legs(config.clients,
                                LegConfig{DepolarizingChannel{config.channel.p},
                                          config.channel.mode, false});
    if (phase == Phase::Decentral) {
      legs[acting].local = true;  // the acting client holds its own qubit
    }

    const AggregatedModel aggregated =
        aggregate_model(client_values, mask, config.encoding, config.plan, legs, ledger,
                        round_seed.child(kTagAggregate), config.workers);

    ModelParams& target = phase == Phase::Central ? global : clients[acting].params;
    for (std::size_t pos = 0; pos < aggregated.indices.size(); ++pos) {
      if (aggregated.values[pos].has_value()) {
        target.flat()[aggregated.indices[pos]] = *aggregated.values[pos];
      } else {
        record.aggregation_failures += 1;  // keep the previous value
      }
    }

    if (phase == Phase::Central) {
      broadcast_model(config, global, clients, mask, ledger, round_seed,
                      record.aggregation_failures);
    }

    const ModelParams& eval_model = phase == Phase::Central ? global : clients[acting].params;
    const Metrics val = evaluate(eval_model, validation);
    const Metrics tst = evaluate(eval_model, test);
    record.val_loss = val.loss;
    record.val_acc = val.accuracy;
    record.test_loss = tst.loss;
    record.test_acc = tst.accuracy;

    if (config.topology.kind == TopologyKind::Hybrid && phase == Phase::Central &&
        !result.switched && val.accuracy >= config.topology.tau) {
      result.switched = true;
      result.switch_round = round;
      record.switched = true;
      phase = Phase::Decentral;
    }

    record.cum_logical = ledger.logical_total();
    record.cum_physical = ledger.physical_total;
    record.cum_discarded = ledger.discarded_shots;
    record.cum_clipped = ledger.clipped_values;
    record.cum_decoy = ledger.decoy;
    result.rounds.push_back(record);
    result.model = eval_model;
  }

  result.ledger = ledger;
  return result;
}

}  // namespace qfl
