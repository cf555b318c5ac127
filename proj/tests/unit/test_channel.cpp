#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "qfl/channel.hpp"
#include "support/oracles.hpp"

using namespace qfl;

TEST_CASE("pauli bit encoding composes by xor") {
  CHECK(pauli_compose(Pauli::X, Pauli::Z) == Pauli::Y);
  CHECK(pauli_compose(Pauli::Y, Pauli::Y) == Pauli::I);
  CHECK(pauli_from_bits(true, true) == Pauli::Y);
  PauliFrame frame;
  frame.apply(Pauli::Z);
  CHECK(frame.z);
  CHECK(!frame.x);
  frame.apply(Pauli::Y);
  CHECK(frame.as_pauli() == Pauli::X);
}

TEST_CASE("applying the same pauli twice restores the frame") {
  for (Pauli p : {Pauli::I, Pauli::X, Pauli::Z, Pauli::Y}) {
    PauliFrame frame{true, false};
    frame.apply(p);
    frame.apply(p);
    CHECK(frame.x);
    CHECK(!frame.z);
  }
}

TEST_CASE("sample_pauli distribution endpoints") {
  SUBCASE("p = 0 always yields identity") {
    Rng rng(RngSeed{50});
    for (int i = 0; i < 1000; ++i) {
      CHECK(sample_pauli(0.0, rng) == Pauli::I);
    }
  }
  SUBCASE("p = 1 never yields identity and splits evenly") {
    Rng rng(RngSeed{51});
    const int trials = 100000;
    int counts[4] = {0, 0, 0, 0};
    for (int i = 0; i < trials; ++i) {
      counts[static_cast<int>(sample_pauli(1.0, rng))] += 1;
    }
    CHECK(counts[0] == 0);
    const double expected = trials / 3.0;
    const double sigma = std::sqrt(trials * (1.0 / 3.0) * (2.0 / 3.0));
    for (int k = 1; k < 4; ++k) {
      CHECK(std::abs(counts[k] - expected) < 3.0 * sigma);
    }
  }
  SUBCASE("p outside [0,1] is rejected") {
    Rng rng(RngSeed{52});
    CHECK_THROWS_AS(sample_pauli(-0.1, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_pauli(1.1, rng), std::invalid_argument);
  }
}

TEST_CASE("average output fidelity of the sampled channel is 1 - p/2") {
  // Per trajectory the output is P|psi>; the pure-state (Uhlmann) fidelity is
  // |<psi|P|psi>|, whose Haar average is 1/2 for each non-identity Pauli.
  Rng rng(RngSeed{53});
  const double p = 1e-3;
  const int trials = 2000000;
  double total = 0.0, total_sq = 0.0;
  for (int i = 0; i < trials; ++i) {
    double gx = rng.normal(), gy = rng.normal(), gz = rng.normal();
    const double norm = std::sqrt(gx * gx + gy * gy + gz * gz);
    double f = 1.0;
    switch (sample_pauli(p, rng)) {
      case Pauli::I: f = 1.0; break;
      case Pauli::X: f = std::abs(gx) / norm; break;
      case Pauli::Y: f = std::abs(gy) / norm; break;
      case Pauli::Z: f = std::abs(gz) / norm; break;
    }
    total += f;
    total_sq += f * f;
  }
  const double mean = total / trials;
  const double var = total_sq / trials - mean * mean;
  const double sigma = std::sqrt(var / trials);
  CHECK(std::abs(mean - (1.0 - p / 2.0)) < 3.0 * sigma);
}

TEST_CASE("steane corrects every weight-one physical error") {
  std::array<Pauli, 7> physical;
  physical.fill(Pauli::I);
  CHECK(steane_correct(physical) == Pauli::I);
  for (int pos = 0; pos < 7; ++pos) {
    for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
      physical.fill(Pauli::I);
      physical[pos] = p;
      CHECK(steane_correct(physical) == Pauli::I);
    }
  }
}

TEST_CASE("weight-two X errors produce a logical X flip") {
  for (int i = 0; i < 7; ++i) {
    for (int j = i + 1; j < 7; ++j) {
      std::array<Pauli, 7> physical;
      physical.fill(Pauli::I);
      physical[i] = Pauli::X;
      physical[j] = Pauli::X;
      CHECK(steane_correct(physical) == Pauli::X);
    }
  }
}

TEST_CASE("weight-two behavior follows the CSS decomposition") {
  // X and Z vectors decode independently: two qubits with X-components flip
  // the logical X; an {X, Z} pair has two weight-one vectors and is benign.
  std::array<Pauli, 7> physical;
  physical.fill(Pauli::I);
  physical[1] = Pauli::X;
  physical[4] = Pauli::Z;
  CHECK(steane_correct(physical) == Pauli::I);
  physical.fill(Pauli::I);
  physical[2] = Pauli::Y;
  physical[6] = Pauli::Y;
  CHECK(steane_correct(physical) == Pauli::Y);
  physical.fill(Pauli::I);
  physical[0] = Pauli::Y;
  physical[3] = Pauli::Z;
  CHECK(steane_correct(physical) == Pauli::Z);
}

TEST_CASE("monte carlo logical rate matches low-weight enumeration at p = 1e-3") {
  const double p = 1e-3;
  const double expected = qfl::test::steane_logical_rate_enumerated(p, 2);
  // Closed form for comparison: 21 position pairs, 7 of 9 Pauli type pairs
  // flip a logical, each with probability (p/3)^2 (1-p)^5.
  const double closed_form = 147.0 * (p / 3.0) * (p / 3.0) * std::pow(1.0 - p, 5);
  CHECK(expected == doctest::Approx(closed_form).epsilon(1e-12));

  Rng rng(RngSeed{54});
  const std::int64_t trials = 2000000;
  const double estimate = logical_error_rate(p, trials, rng);
  const double sigma = std::sqrt(expected * (1.0 - expected) / trials);
  CHECK(std::abs(estimate - expected) < 3.0 * sigma);
  CHECK(estimate < p);  // below pseudo-threshold
  CHECK(logical_error_rate(0.0, 10000, rng) == 0.0);
}

TEST_CASE("logical rate scales quadratically below threshold") {
  Rng rng(RngSeed{55});
  const std::vector<double> levels = {1e-3, 2e-3, 4e-3};
  std::vector<double> rates;
  for (double p : levels) {
    rates.push_back(logical_error_rate(p, 2000000, rng));
  }
  // Log-log slope via least squares over the three points.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double x = std::log(levels[i]);
    const double y = std::log(rates[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double n = static_cast<double>(levels.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope > 1.7);
  CHECK(slope < 2.3);
}

TEST_CASE("transmit accounting: raw counts 1, steane counts 7") {
  TransmissionLedger ledger;
  Rng rng(RngSeed{56});
  const DepolarizingChannel quiet{0.0};
  CHECK(transmit(quiet, ChannelMode::Raw, ledger, rng) == Pauli::I);
  CHECK(ledger.physical_total == 1);
  CHECK(transmit(quiet, ChannelMode::Steane, ledger, rng) == Pauli::I);
  CHECK(ledger.physical_total == 8);

  PauliFrame frame;
  traverse(quiet, frame, ChannelMode::Raw, ledger, rng);
  CHECK(!frame.x);
  CHECK(!frame.z);
  CHECK(ledger.physical_total == 9);

  count_traversals(ChannelMode::Steane, 3, ledger);
  CHECK(ledger.physical_total == 30);
}

TEST_CASE("ledger conservation over a mixed workload") {
  TransmissionLedger ledger;
  Rng rng(RngSeed{57});
  const DepolarizingChannel ch{0.2};
  PauliFrame frame;
  const std::int64_t raw_n = 500, steane_n = 200, decoys = 40;
  for (std::int64_t i = 0; i < raw_n; ++i) {
    traverse(ch, frame, ChannelMode::Raw, ledger, rng);
  }
  for (std::int64_t i = 0; i < steane_n; ++i) {
    traverse(ch, frame, ChannelMode::Steane, ledger, rng);
  }
  decoy_round(static_cast<int>(decoys), true, ledger, rng);
  CHECK(ledger.physical_total == raw_n + 7 * steane_n + decoys);
  CHECK(ledger.decoy == decoys);
}

TEST_CASE("ledger merge adds counter-wise") {
  TransmissionLedger a, b;
  a.qsa_out = 5; a.physical_total = 12; a.discarded_shots = 1;
  b.qsa_out = 2; b.qsa_back = 3; b.physical_total = 4; b.clipped_values = 7;
  a.merge(b);
  CHECK(a.qsa_out == 7);
  CHECK(a.qsa_back == 3);
  CHECK(a.physical_total == 16);
  CHECK(a.discarded_shots == 1);
  CHECK(a.clipped_values == 7);
}

TEST_CASE("decoy detection") {
  SUBCASE("no adversary never fires") {
    TransmissionLedger ledger;
    Rng rng(RngSeed{58});
    for (int i = 0; i < 2000; ++i) {
      CHECK(!decoy_round(4, false, ledger, rng));
    }
    CHECK(ledger.decoy == 8000);
  }
  SUBCASE("zero decoys never detect an active adversary") {
    TransmissionLedger ledger;
    Rng rng(RngSeed{59});
    for (int i = 0; i < 1000; ++i) {
      CHECK(!decoy_round(0, true, ledger, rng));
    }
  }
  SUBCASE("detection rate matches 1 - (3/4)^d within 3 sigma") {
    for (int d : {1, 4}) {
      TransmissionLedger ledger;
      Rng rng(RngSeed{60});
      const int trials = 100000;
      int detected = 0;
      for (int i = 0; i < trials; ++i) {
        detected += decoy_round(d, true, ledger, rng);
      }
      const double expected = 1.0 - std::pow(0.75, d);
      const double sigma = std::sqrt(expected * (1.0 - expected) / trials);
      CHECK(std::abs(static_cast<double>(detected) / trials - expected) < 3.0 * sigma);
    }
  }
}
