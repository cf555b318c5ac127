#pragma once

#include <array>
#include <cstdint>

#include "qfl/rng.hpp"

namespace qfl {

// bit 0 = X component, bit 1 = Z component; composition is bitwise XOR
// (global phases are irrelevant at the frame level).
enum class Pauli : std::uint8_t { I = 0, X = 1, Z = 2, Y = 3 };

constexpr bool pauli_x_bit(Pauli p) { return (static_cast<std::uint8_t>(p) & 1) != 0; }
constexpr bool pauli_z_bit(Pauli p) { return (static_cast<std::uint8_t>(p) & 2) != 0; }
constexpr Pauli pauli_from_bits(bool x, bool z) {
  return static_cast<Pauli>((x ? 1 : 0) | (z ? 2 : 0));
}
constexpr Pauli pauli_compose(Pauli a, Pauli b) {
  return static_cast<Pauli>(static_cast<std::uint8_t>(a) ^ static_cast<std::uint8_t>(b));
}
const char* pauli_name(Pauli p);

// Accumulated X/Z error bits on one tracked qubit.
struct PauliFrame {
  bool x = false;
  bool z = false;

  void apply(Pauli p) {
    x ^= pauli_x_bit(p);
    z ^= pauli_z_bit(p);
  }
  Pauli as_pauli() const { return pauli_from_bits(x, z); }
};

// Per traversal: identity with probability 1-p, otherwise X, Y, Z each p/3.
struct DepolarizingChannel {
  double p = 0.0;
};

enum class ChannelMode { Raw, Steane };

// Exact count of qubit channel traversals by category. qsa_out/qsa_back/
// broadcast count logical traversals; physical_total counts physical qubits
// on the wire (x7 for Steane-encoded traversals, +1 per decoy).
struct TransmissionLedger {
  std::int64_t qsa_out = 0;
  std::int64_t qsa_back = 0;
  std::int64_t broadcast = 0;
  std::int64_t decoy = 0;
  std::int64_t physical_total = 0;
  std::int64_t discarded_shots = 0;
  std::int64_t clipped_values = 0;

  std::int64_t logical_total() const { return qsa_out + qsa_back + broadcast; }
  void merge(const TransmissionLedger& other);
};

Pauli sample_pauli(double p, Rng& rng);

// Steane [[7,1,3]] correction at the Pauli level. Decomposes the physical
// error into X and Z bit vectors, corrects each against the [7,4] Hamming
// check matrix (columns = binary 1..7), and reports the residual logical
// Pauli. The residual vector is always a Hamming codeword; it is a logical
// flip exactly when its weight is odd.
Pauli steane_correct(const std::array<Pauli, 7>& physical);

// One encoded traversal: 7 iid physical Paulis, then correction.
Pauli steane_residual(double p, Rng& rng);

// One logical traversal through the channel. Raw mode samples one Pauli;
// Steane mode transports 7 physical qubits and returns the residual logical
// Pauli. Updates physical_total only; callers account the logical category.
Pauli transmit(const DepolarizingChannel& channel, ChannelMode mode,
               TransmissionLedger& ledger, Rng& rng);

void traverse(const DepolarizingChannel& channel, PauliFrame& frame, ChannelMode mode,
              TransmissionLedger& ledger, Rng& rng);

// Ledger-only accounting for idealized transmissions (no noise sampled).
void count_traversals(ChannelMode mode, std::int64_t n, TransmissionLedger& ledger);

// Monte Carlo fraction of Steane-encoded traversals with a residual logical
// error.
double logical_error_rate(double p, std::int64_t trials, Rng& rng);

// One decoy verification round: n_decoys qubits prepared uniformly in
// {|0>,|1>,|+>,|->}. An intercept-resend adversary measures each in a random
// basis and resends; verification measures in the preparation basis. Returns
// true when any decoy mismatches. Detection probability is 1 - (3/4)^d.
bool decoy_round(int n_decoys, bool adversary_active, TransmissionLedger& ledger,
                 Rng& rng);

}  // namespace qfl
