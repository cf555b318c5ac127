#include "qfl/qsa.hpp"

#include <atomic>
#include <stdexcept>
#include <thread>

namespace qfl {

void ShotPlan::validate() const {
  if (shots < 2 || shots % 2 != 0) {
    throw std::invalid_argument("ShotPlan: shots must be even and at least 2");
  }
}

ShotEffect ghz_shot_effect(std::span<const double> leg_phases,
                           std::span<const LegNoise> noise) {
  if (leg_phases.size() != noise.size() || leg_phases.empty()) {
    throw std::invalid_argument("ghz_shot_effect: phase/noise size mismatch");
  }
  double phase = 0.0;
  bool z_parity = false;
  bool first_x = false;
  bool constant_x = true;
  for (std::size_t k = 0; k < leg_phases.size(); ++k) {
    const bool x_out = pauli_x_bit(noise[k].outbound);
    const bool x_total = x_out ^ pauli_x_bit(noise[k].inbound);
    const bool z_total = pauli_z_bit(noise[k].outbound) ^ pauli_z_bit(noise[k].inbound);
    phase += x_out ? -leg_phases[k] : leg_phases[k];
    z_parity ^= z_total;
    if (k == 0) {
      first_x = x_total;
    } else if (x_total != first_x) {
      constant_x = false;
    }
  }
  ShotEffect effect;
  effect.discard = !constant_x;
  if (z_parity) {
    phase += std::numbers::pi;
  }
  effect.phase = first_x ? -phase : phase;
  return effect;
}

double teleport_shot_phase(double phase, Pauli resource_error) {
  double out = pauli_x_bit(resource_error) ? -phase : phase;
  if (pauli_z_bit(resource_error)) {
    out += std::numbers::pi;
  }
  return out;
}

double estimate_phase(std::int64_t zeros_x, std::int64_t kept_x, std::int64_t zeros_y,
                      std::int64_t kept_y) {
  const double cos_est = 2.0 * static_cast<double>(zeros_x) / static_cast<double>(kept_x) - 1.0;
  const double sin_est = 2.0 * static_cast<double>(zeros_y) / static_cast<double>(kept_y) - 1.0;
  return std::atan2(sin_est, cos_est);
}

std::optional<double> aggregate_parameter(std::span<const double> values,
                                          const EncodingScheme& scheme,
                                          const ShotPlan& plan,
                                          std::span<const LegConfig> legs,
                                          TransmissionLedger& ledger, Rng& rng) {
  return detail::aggregate_parameter_with(values, scheme, plan, legs, ledger, rng,
                                          detail::DepolarizingSource{});
}

std::optional<double> teleport_parameter(double value, const EncodingScheme& scheme,
                                         const ShotPlan& plan, const LegConfig& leg,
                                         TransmissionLedger& ledger, Rng& rng) {
  return detail::teleport_parameter_with(value, scheme, plan, leg, ledger, rng,
                                         detail::DepolarizingSource{});
}

AggregatedModel aggregate_model(std::span<const std::span<const double>> client_values,
                                const SelectionMask& mask, const EncodingScheme& scheme,
                                const ShotPlan& plan, std::span<const LegConfig> legs,
                                TransmissionLedger& ledger, RngSeed base_seed,
                                int workers) {
  if (client_values.size() < 2) {
    throw std::invalid_argument("aggregate_model: need at least two clients");
  }
  const std::size_t param_count = client_values.front().size();
  for (const auto& c : client_values) {
    if (c.size() != param_count) {
      throw std::invalid_argument("aggregate_model: client parameter sizes differ");
    }
  }
  if (mask.included.size() != param_count) {
    throw std::invalid_argument("aggregate_model: mask size mismatch");
  }

  AggregatedModel result;
  for (std::size_t i = 0; i < param_count; ++i) {
    if (mask.included[i]) {
      result.indices.push_back(static_cast<int>(i));
    }
  }
  result.values.assign(result.indices.size(), std::nullopt);

  const int n_workers = std::max(1, workers);
  std::vector<TransmissionLedger> worker_ledgers(n_workers);
  auto run_chunk = [&](int worker, std::size_t begin, std::size_t end) {
    std::vector<double> values(client_values.size());
    for (std::size_t pos = begin; pos < end; ++pos) {
      const int index = result.indices[pos];
      for (std::size_t c = 0; c < client_values.size(); ++c) {
        values[c] = client_values[c][index];
      }
      Rng rng(base_seed.child(static_cast<std::uint64_t>(index)));
      result.values[pos] = aggregate_parameter(values, scheme, plan, legs,
                                               worker_ledgers[worker], rng);
    }
  };

  if (n_workers == 1 || result.indices.size() < 2) {
    run_chunk(0, 0, result.indices.size());
  } else {
    std::vector<std::thread> threads;
    const std::size_t total = result.indices.size();
    const std::size_t chunk = (total + n_workers - 1) / n_workers;
    for (int w = 0; w < n_workers; ++w) {
      const std::size_t begin = std::min(total, static_cast<std::size_t>(w) * chunk);
      const std::size_t end = std::min(total, begin + chunk);
      if (begin < end) {
        threads.emplace_back(run_chunk, w, begin, end);
      }
    }
    for (auto& t : threads) t.join();
  }
  for (const auto& wl : worker_ledgers) {
    ledger.merge(wl);
  }
  return result;
}

}  // namespace qfl
