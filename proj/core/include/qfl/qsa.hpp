#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "qfl/channel.hpp"
#include "qfl/model.hpp"
#include "qfl/rng.hpp"

namespace qfl {

// Real -> angle scaling for phase-encoded values. Values are clipped to
// [-bound, bound]; the margin keeps |sum * scale| strictly below pi so the
// atan2 estimate never wraps.
struct EncodingScheme {
  double bound = 5.0;
  double margin = 0.05;

  double scale(int participants) const {
    return std::numbers::pi / (participants * bound * (1.0 + margin));
  }
};

// Shots per encoded value: first half measured in the X basis, second half in
// the Y basis.
struct ShotPlan {
  int shots = 64;

  int per_basis() const { return shots / 2; }
  void validate() const;
};

// One GHZ leg: the channel it traverses, or a local (noiseless, uncounted)
// leg when the aggregator holds its own qubit.
struct LegConfig {
  DepolarizingChannel channel;
  ChannelMode mode = ChannelMode::Raw;
  bool local = false;
};

struct LegNoise {
  Pauli outbound = Pauli::I;
  Pauli inbound = Pauli::I;
};

struct ShotEffect {
  bool discard = false;  // decode ancilla parity fired
  double phase = 0.0;    // effective phase seen by the estimator
};

// Pure per-shot algebra of the GHZ round trip, oracle-checked against the
// statevector decode circuit:
//  - an outbound X on leg k negates that leg's phase contribution (the
//    encoding Rz anticommutes with X),
//  - odd total Z parity adds pi,
//  - a non-constant X pattern across legs flips decode ancillas and the shot
//    is discarded; the all-X pattern is undetectable and conjugates the
//    phase.
ShotEffect ghz_shot_effect(std::span<const double> leg_phases,
                           std::span<const LegNoise> noise);

// Action of the Bell-resource error on a teleported phase state:
// phase' = (-1)^x * phase + pi * z.
double teleport_shot_phase(double phase, Pauli resource_error);

// P(outcome 0) for one kept shot.
inline double shot_probability_zero_x(double phase) { return 0.5 * (1.0 + std::cos(phase)); }
inline double shot_probability_zero_y(double phase) { return 0.5 * (1.0 + std::sin(phase)); }

// atan2 estimate from per-basis zero counts.
double estimate_phase(std::int64_t zeros_x, std::int64_t kept_x, std::int64_t zeros_y,
                      std::int64_t kept_y);

namespace detail {

// Pauli sources are injectable so tests can force error patterns; the
// default draws from the depolarizing channel.
template <typename Source>
Pauli transmit_with(const DepolarizingChannel& channel, ChannelMode mode,
                    TransmissionLedger& ledger, Rng& rng, Source&& source) {
  if (mode == ChannelMode::Steane) {
    ledger.physical_total += 7;
    std::array<Pauli, 7> physical;
    for (auto& e : physical) e = source(channel.p, rng);
    return steane_correct(physical);
  }
  ledger.physical_total += 1;
  return source(channel.p, rng);
}

struct DepolarizingSource {
  Pauli operator()(double p, Rng& rng) const { return sample_pauli(p, rng); }
};

template <typename Source>
std::optional<double> aggregate_parameter_with(std::span<const double> values,
                                               const EncodingScheme& scheme,
                                               const ShotPlan& plan,
                                               std::span<const LegConfig> legs,
                                               TransmissionLedger& ledger, Rng& rng,
                                               Source&& source) {
  if (values.size() < 2) {
    throw std::invalid_argument("aggregate_parameter: need at least two participants");
  }
  if (legs.size() != values.size()) {
    throw std::invalid_argument("aggregate_parameter: one leg per participant required");
  }
  plan.validate();
  const int n = static_cast<int>(values.size());
  const double scale = scheme.scale(n);

  std::vector<double> phases(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    double v = values[k];
    if (v > scheme.bound || v < -scheme.bound) {
      v = v > 0 ? scheme.bound : -scheme.bound;
      ledger.clipped_values += 1;
    }
    phases[k] = scale * v;
  }

  std::int64_t non_local = 0;
  for (const auto& leg : legs) non_local += leg.local ? 0 : 1;
  ledger.qsa_out += non_local * plan.shots;
  ledger.qsa_back += non_local * plan.shots;

  std::int64_t zeros_x = 0, kept_x = 0, zeros_y = 0, kept_y = 0;
  std::vector<LegNoise> noise(values.size());
  for (int shot = 0; shot < plan.shots; ++shot) {
    const bool x_basis = shot < plan.per_basis();
    for (std::size_t k = 0; k < legs.size(); ++k) {
      if (legs[k].local) {
        noise[k] = {};
        continue;
      }
      noise[k].outbound = transmit_with(legs[k].channel, legs[k].mode, ledger, rng, source);
      noise[k].inbound = transmit_with(legs[k].channel, legs[k].mode, ledger, rng, source);
    }
    const ShotEffect effect = ghz_shot_effect(phases, noise);
    if (effect.discard) {
      ledger.discarded_shots += 1;
      continue;
    }
    const double p0 = x_basis ? shot_probability_zero_x(effect.phase)
                              : shot_probability_zero_y(effect.phase);
    const bool zero = rng.uniform01() < p0;
    if (x_basis) {
      kept_x += 1;
      zeros_x += zero;
    } else {
      kept_y += 1;
      zeros_y += zero;
    }
  }
  if (kept_x == 0 || kept_y == 0) {
    return std::nullopt;
  }
  return estimate_phase(zeros_x, kept_x, zeros_y, kept_y) / (scale * n);
}

template <typename Source>
std::optional<double> teleport_parameter_with(double value, const EncodingScheme& scheme,
                                              const ShotPlan& plan, const LegConfig& leg,
                                              TransmissionLedger& ledger, Rng& rng,
                                              Source&& source) {
  plan.validate();
  const double scale = scheme.scale(1);
  if (value > scheme.bound || value < -scheme.bound) {
    value = value > 0 ? scheme.bound : -scheme.bound;
    ledger.clipped_values += 1;
  }
  const double phase = scale * value;
  ledger.broadcast += plan.shots;

  std::int64_t zeros_x = 0, kept_x = 0, zeros_y = 0, kept_y = 0;
  for (int shot = 0; shot < plan.shots; ++shot) {
    const bool x_basis = shot < plan.per_basis();
    const Pauli err = transmit_with(leg.channel, leg.mode, ledger, rng, source);
    const double effective = teleport_shot_phase(phase, err);
    const double p0 = x_basis ? shot_probability_zero_x(effective)
                              : shot_probability_zero_y(effective);
    const bool zero = rng.uniform01() < p0;
    if (x_basis) {
      kept_x += 1;
      zeros_x += zero;
    } else {
      kept_y += 1;
      zeros_y += zero;
    }
  }
  if (kept_x == 0 || kept_y == 0) {
    return std::nullopt;
  }
  return estimate_phase(zeros_x, kept_x, zeros_y, kept_y) / scale;
}

}  // namespace detail

// Estimated mean of the participants' values from M simulated GHZ round
// trips. Noise propagates through the Pauli-frame fast path; shots whose
// decode ancillas fire are discarded. Returns nullopt when one basis loses
// every shot.
std::optional<double> aggregate_parameter(std::span<const double> values,
                                          const EncodingScheme& scheme,
                                          const ShotPlan& plan,
                                          std::span<const LegConfig> legs,
                                          TransmissionLedger& ledger, Rng& rng);

// Estimated value after teleporting the phase state through a noisy Bell
// resource, M shots.
std::optional<double> teleport_parameter(double value, const EncodingScheme& scheme,
                                         const ShotPlan& plan, const LegConfig& leg,
                                         TransmissionLedger& ledger, Rng& rng);

struct AggregatedModel {
  std::vector<int> indices;                    // masked flat indices, ascending
  std::vector<std::optional<double>> values;   // estimate per index
};

// Runs aggregate_parameter for every masked index. Each index draws from its
// own RNG substream derived from (base_seed, index), so results are identical
// for any worker count; per-worker ledgers are merged at the end.
AggregatedModel aggregate_model(std::span<const std::span<const double>> client_values,
                                const SelectionMask& mask, const EncodingScheme& scheme,
                                const ShotPlan& plan, std::span<const LegConfig> legs,
                                TransmissionLedger& ledger, RngSeed base_seed,
                                int workers = 1);

}  // namespace qfl
