#include "qfl/channel.hpp"

#include <bit>
#include <stdexcept>

namespace qfl {

namespace {

// Hamming [7,4] parity checks as qubit bitmasks; row r collects the positions
// i whose column value i+1 has bit r set.
constexpr std::uint32_t kCheckRows[3] = {0x55, 0x66, 0x78};

int syndrome_of(std::uint32_t v) {
  int s = 0;
  for (int r = 0; r < 3; ++r) {
    s |= (std::popcount(v & kCheckRows[r]) & 1) << r;
  }
  return s;
}

// Correct a 7-bit error vector; returns whether the residual codeword is a
// logical flip (odd weight).
bool correct_vector(std::uint32_t v) {
  const int s = syndrome_of(v);
  if (s != 0) {
    v ^= 1u << (s - 1);
  }
  return (std::popcount(v) & 1) != 0;
}

}  // namespace

const char* pauli_name(Pauli p) {
  switch (p) {
    case Pauli::I: return "I";
    case Pauli::X: return "X";
    case Pauli::Z: return "Z";
    case Pauli::Y: return "Y";
  }
  return "?";
}

void TransmissionLedger::merge(const TransmissionLedger& other) {
  qsa_out += other.qsa_out;
  qsa_back += other.qsa_back;
  broadcast += other.broadcast;
  decoy += other.decoy;
  physical_total += other.physical_total;
  discarded_shots += other.discarded_shots;
  clipped_values += other.clipped_values;
}

Pauli sample_pauli(double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("sample_pauli: p must be in [0, 1]");
  }
  const double u = rng.uniform01();
  if (u >= p) {
    return Pauli::I;
  }
  const int pick = static_cast<int>(u / p * 3.0);
  switch (pick) {
    case 0: return Pauli::X;
    case 1: return Pauli::Y;
    default: return Pauli::Z;
  }
}

Pauli steane_correct(const std::array<Pauli, 7>& physical) {
  std::uint32_t xvec = 0;
  std::uint32_t zvec = 0;
  for (int i = 0; i < 7; ++i) {
    if (pauli_x_bit(physical[i])) xvec |= 1u << i;
    if (pauli_z_bit(physical[i])) zvec |= 1u << i;
  }
  const bool logical_x = correct_vector(xvec);
  const bool logical_z = correct_vector(zvec);
  return pauli_from_bits(logical_x, logical_z);
}

Pauli steane_residual(double p, Rng& rng) {
  std::array<Pauli, 7> physical;
  for (auto& e : physical) {
    e = sample_pauli(p, rng);
  }
  return steane_correct(physical);
}

Pauli transmit(const DepolarizingChannel& channel, ChannelMode mode,
               TransmissionLedger& ledger, Rng& rng) {
  if (mode == ChannelMode::Steane) {
    ledger.physical_total += 7;
    return steane_residual(channel.p, rng);
  }
  ledger.physical_total += 1;
  return sample_pauli(channel.p, rng);
}

void traverse(const DepolarizingChannel& channel, PauliFrame& frame, ChannelMode mode,
              TransmissionLedger& ledger, Rng& rng) {
  frame.apply(transmit(channel, mode, ledger, rng));
}

void count_traversals(ChannelMode mode, std::int64_t n, TransmissionLedger& ledger) {
  ledger.physical_total += (mode == ChannelMode::Steane ? 7 : 1) * n;
}

double logical_error_rate(double p, std::int64_t trials, Rng& rng) {
  if (trials < 1) {
    throw std::invalid_argument("logical_error_rate: need at least one trial");
  }
  std::int64_t failures = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    if (steane_residual(p, rng) != Pauli::I) {
      ++failures;
    }
  }
  return static_cast<double>(failures) / static_cast<double>(trials);
}

bool decoy_round(int n_decoys, bool adversary_active, TransmissionLedger& ledger,
                 Rng& rng) {
  if (n_decoys < 0) {
    throw std::invalid_argument("decoy_round: negative decoy count");
  }
  bool detected = false;
  for (int i = 0; i < n_decoys; ++i) {
    ledger.decoy += 1;
    ledger.physical_total += 1;
    const bool prep_basis_x = rng.bernoulli(0.5);
    const bool prep_bit = rng.bernoulli(0.5);
    bool verified_bit = prep_bit;
    if (adversary_active) {
      const bool meas_basis_x = rng.bernoulli(0.5);
      if (meas_basis_x != prep_basis_x) {
        // Wrong-basis measurement destroys the encoding; the resent state
        // projects to a uniform bit in the preparation basis.
        rng.bernoulli(0.5);  // adversary's own (unused) outcome
        verified_bit = rng.bernoulli(0.5);
      }
    }
    if (verified_bit != prep_bit) {
      detected = true;
    }
  }
  return detected;
}

}  // namespace qfl
