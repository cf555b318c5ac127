#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "qfl/statevector.hpp"

using namespace qfl;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("hadamard on |0> gives the equal superposition") {
  StateVector psi(1);
  psi.apply(Gate::h(0));
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(psi.amp(0) - std::complex<double>(s, 0)) < 1e-12);
  CHECK(std::abs(psi.amp(1) - std::complex<double>(s, 0)) < 1e-12);
}

TEST_CASE("rz applies the documented half-angle phases") {
  StateVector psi(1);
  psi.apply(Gate::x(0));
  const double theta = 0.7;
  psi.apply(Gate::rz(0, theta));
  // Rz(a) = diag(e^{-ia/2}, e^{+ia/2}); |1> picks up e^{+ia/2}, and the
  // relative phase between |1> and |0> is e^{ia}.
  CHECK(std::abs(psi.amp(1) - std::polar(1.0, theta / 2.0)) < 1e-12);

  StateVector plus(1);
  plus.apply(Gate::h(0));
  plus.apply(Gate::rz(0, theta));
  const auto relative = plus.amp(1) / plus.amp(0);
  CHECK(std::abs(relative - std::polar(1.0, theta)) < 1e-12);
}

TEST_CASE("cnot maps |10> to |11>") {
  StateVector psi(2);
  psi.apply(Gate::x(0));  // control = qubit 0 (little-endian index 1)
  psi.apply(Gate::cnot(0, 1));
  CHECK(std::abs(psi.amp(3) - std::complex<double>(1, 0)) < 1e-12);
  CHECK(psi.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ghz preparation yields the two-corner state") {
  SUBCASE("n = 2 is the Bell state") {
    const StateVector psi = ghz_prepare(2);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(psi.amp(0) - std::complex<double>(s, 0)) < 1e-12);
    CHECK(std::abs(psi.amp(1)) < 1e-12);
    CHECK(std::abs(psi.amp(2)) < 1e-12);
    CHECK(std::abs(psi.amp(3) - std::complex<double>(s, 0)) < 1e-12);
  }
  SUBCASE("n = 3 has support only on 000 and 111") {
    const StateVector psi = ghz_prepare(3);
    const double s = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < psi.amps().size(); ++i) {
      if (i == 0 || i == 7) {
        CHECK(std::abs(psi.amp(i) - std::complex<double>(s, 0)) < 1e-12);
      } else {
        CHECK(std::abs(psi.amp(i)) < 1e-12);
      }
    }
  }
  SUBCASE("fidelity with the ideal state is 1 up to the cap") {
    for (int n = 2; n <= kDefaultQubitCap; ++n) {
      const StateVector psi = ghz_prepare(n);
      std::vector<std::complex<double>> ideal(std::size_t{1} << n);
      ideal.front() = 1.0 / std::sqrt(2.0);
      ideal.back() = 1.0 / std::sqrt(2.0);
      CHECK(psi.fidelity(StateVector::from_amps(std::move(ideal))) ==
            doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("out-of-range sizes are rejected") {
    CHECK_THROWS_AS(ghz_prepare(1), std::invalid_argument);
    CHECK_THROWS_AS(ghz_prepare(kDefaultQubitCap + 1), std::invalid_argument);
    CHECK_THROWS_AS(StateVector(13), std::invalid_argument);
  }
}

TEST_CASE("ghz decode inverts preparation exactly") {
  for (int n : {2, 3, 5, 7}) {
    StateVector psi = ghz_prepare(n);
    ghz_decode(psi);
    CHECK(std::abs(psi.amp(0) - std::complex<double>(1, 0)) < 1e-12);
    for (std::size_t i = 1; i < psi.amps().size(); ++i) {
      CHECK(std::abs(psi.amp(i)) < 1e-12);
    }
  }
}

TEST_CASE("ghz decode flags X errors on the ancilla qubits") {
  for (int k = 1; k < 4; ++k) {
    StateVector psi = ghz_prepare(4);
    psi.apply(Gate::x(k));
    ghz_decode(psi);
    // Qubit k must read 1 with certainty.
    const std::size_t mask = std::size_t{1} << k;
    double p_one = 0.0;
    for (std::size_t i = 0; i < psi.amps().size(); ++i) {
      if (i & mask) p_one += std::norm(psi.amp(i));
    }
    CHECK(p_one == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("a Z error on any leg shifts the decoded phase by pi") {
  const double phi = 0.9;
  for (int k = 0; k < 3; ++k) {
    StateVector psi = ghz_prepare(3);
    psi.apply(Gate::rz(0, phi));  // all phase on one leg; only the sum matters
    psi.apply(Gate::z(k));
    ghz_decode(psi);
    // After decode, P(qubit0 = 0) = (1 + cos(phi + pi))/2.
    double p_zero = 0.0;
    for (std::size_t i = 0; i < psi.amps().size(); i += 2) {
      p_zero += std::norm(psi.amp(i));
    }
    CHECK(p_zero == doctest::Approx(0.5 * (1.0 + std::cos(phi + kPi))).epsilon(1e-12));
  }
}

TEST_CASE("expectation_z basics") {
  StateVector psi(1);
  CHECK(psi.expectation_z(0) == doctest::Approx(1.0));
  psi.apply(Gate::h(0));
  CHECK(std::abs(psi.expectation_z(0)) < 1e-12);

  StateVector rot(1);
  rot.apply(Gate::ry(0, kPi / 3.0));
  CHECK(rot.expectation_z(0) == doctest::Approx(std::cos(kPi / 3.0)).epsilon(1e-12));

  CHECK_THROWS_AS(psi.expectation_z(1), std::out_of_range);
}

TEST_CASE("norm is preserved through random circuits") {
  Rng rng(RngSeed{42});
  StateVector psi(5);
  for (int step = 0; step < 200; ++step) {
    const int q = static_cast<int>(rng.uniform_int(5));
    int r = static_cast<int>(rng.uniform_int(5));
    if (r == q) r = (r + 1) % 5;
    switch (rng.uniform_int(6)) {
      case 0: psi.apply(Gate::h(q)); break;
      case 1: psi.apply(Gate::rx(q, rng.uniform(-kPi, kPi))); break;
      case 2: psi.apply(Gate::ry(q, rng.uniform(-kPi, kPi))); break;
      case 3: psi.apply(Gate::rz(q, rng.uniform(-kPi, kPi))); break;
      case 4: psi.apply(Gate::cnot(q, r)); break;
      default: psi.apply(Gate::cz(q, r)); break;
    }
    CHECK(std::abs(1.0 - psi.norm_sq()) < 1e-10);
  }
}

TEST_CASE("gate followed by its inverse restores the state") {
  Rng rng(RngSeed{43});
  StateVector psi(3);
  psi.apply(Gate::h(0));
  psi.apply(Gate::cnot(0, 2));
  psi.apply(Gate::ry(1, 0.8));
  const std::vector<std::complex<double>> snapshot(psi.amps().begin(), psi.amps().end());

  const double angle = rng.uniform(-kPi, kPi);
  const std::vector<std::pair<Gate, Gate>> pairs = {
      {Gate::h(1), Gate::h(1)},
      {Gate::x(2), Gate::x(2)},
      {Gate::y(0), Gate::y(0)},
      {Gate::z(1), Gate::z(1)},
      {Gate::cnot(1, 2), Gate::cnot(1, 2)},
      {Gate::cz(0, 2), Gate::cz(0, 2)},
      {Gate::rx(0, angle), Gate::rx(0, -angle)},
      {Gate::ry(2, angle), Gate::ry(2, -angle)},
      {Gate::rz(1, angle), Gate::rz(1, -angle)},
  };
  for (const auto& [gate, inverse] : pairs) {
    psi.apply(gate);
    psi.apply(inverse);
    for (std::size_t i = 0; i < snapshot.size(); ++i) {
      CHECK(std::abs(psi.amp(i) - snapshot[i]) < 1e-10);
    }
  }
}

TEST_CASE("gate argument validation") {
  StateVector psi(2);
  CHECK_THROWS_AS(psi.apply(Gate::h(2)), std::out_of_range);
  CHECK_THROWS_AS(psi.apply(Gate::cnot(0, 0)), std::invalid_argument);
  CHECK_THROWS_AS(psi.apply(Gate::rz(0, std::nan(""))), std::invalid_argument);
}

TEST_CASE("measurement is seeded and follows the Born rule") {
  SUBCASE("|0> in Z basis always reads 0") {
    StateVector psi(1);
    const std::vector<MeasurementBasis> bases = {MeasurementBasis::Z};
    Rng rng(RngSeed{7});
    for (int i = 0; i < 100; ++i) {
      CHECK(measure(psi, bases, rng)[0] == 0);
    }
  }

  SUBCASE("identical seeds give identical outcomes") {
    StateVector psi = ghz_prepare(3);
    const std::vector<MeasurementBasis> bases(3, MeasurementBasis::X);
    Rng a(RngSeed{123});
    Rng b(RngSeed{123});
    for (int i = 0; i < 50; ++i) {
      CHECK(measure(psi, bases, a) == measure(psi, bases, b));
    }
  }

  SUBCASE("phase state frequencies match (1 +- trig)/2 within 3 sigma") {
    const double phi = 1.1;
    StateVector psi(1);
    psi.apply(Gate::h(0));
    psi.apply(Gate::rz(0, phi));

    const int shots = 100000;
    for (auto [basis, expected] :
         {std::pair{MeasurementBasis::X, 0.5 * (1.0 + std::cos(phi))},
          std::pair{MeasurementBasis::Y, 0.5 * (1.0 + std::sin(phi))}}) {
      Rng rng(RngSeed{99});
      const std::vector<MeasurementBasis> bases = {basis};
      int zeros = 0;
      for (int i = 0; i < shots; ++i) {
        zeros += measure(psi, bases, rng)[0] == 0;
      }
      const double freq = static_cast<double>(zeros) / shots;
      const double sigma = std::sqrt(expected * (1.0 - expected) / shots);
      CHECK(std::abs(freq - expected) < 3.0 * sigma);
    }
  }
}
