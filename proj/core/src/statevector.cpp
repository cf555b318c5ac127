#include "qfl/statevector.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qfl {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

StateVector::StateVector(int n_qubits, int qubit_cap) : n_qubits_(n_qubits) {
  if (n_qubits < 1) {
    throw std::invalid_argument("StateVector: need at least one qubit");
  }
  if (n_qubits > qubit_cap) {
    throw std::invalid_argument("StateVector: qubit count exceeds cap");
  }
  amps_.assign(std::size_t{1} << n_qubits, {0.0, 0.0});
  amps_[0] = {1.0, 0.0};
}

StateVector StateVector::from_amps(std::vector<std::complex<double>> amps, int qubit_cap) {
  if (!is_power_of_two(amps.size())) {
    throw std::invalid_argument("StateVector::from_amps: size must be a power of two");
  }
  int n = 0;
  while ((std::size_t{1} << n) < amps.size()) ++n;
  StateVector s(n == 0 ? 1 : n, qubit_cap);
  if (n == 0) {
    throw std::invalid_argument("StateVector::from_amps: need at least two amplitudes");
  }
  s.amps_ = std::move(amps);
  double norm = s.norm_sq();
  if (std::abs(norm - 1.0) > 1e-9) {
    throw std::invalid_argument("StateVector::from_amps: amplitudes not normalized");
  }
  return s;
}

void StateVector::check_qubit(int q) const {
  if (q < 0 || q >= n_qubits_) {
    throw std::out_of_range("StateVector: qubit index out of range");
  }
}

void StateVector::apply_single(int q, const std::complex<double> m[2][2]) {
  const std::size_t step = std::size_t{1} << q;
  const std::size_t dim = amps_.size();
  for (std::size_t base = 0; base < dim; base += 2 * step) {
    for (std::size_t offset = 0; offset < step; ++offset) {
      const std::size_t i0 = base + offset;
      const std::size_t i1 = i0 + step;
      const std::complex<double> a0 = amps_[i0];
      const std::complex<double> a1 = amps_[i1];
      amps_[i0] = m[0][0] * a0 + m[0][1] * a1;
      amps_[i1] = m[1][0] * a0 + m[1][1] * a1;
    }
  }
}

void StateVector::apply_diag(int q, std::complex<double> d0, std::complex<double> d1) {
  const std::size_t mask = std::size_t{1} << q;
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    amps_[i] *= (i & mask) ? d1 : d0;
  }
}

void StateVector::apply_cnot(int control, int target) {
  const std::size_t cmask = std::size_t{1} << control;
  const std::size_t tmask = std::size_t{1} << target;
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if ((i & cmask) && !(i & tmask)) {
      std::swap(amps_[i], amps_[i | tmask]);
    }
  }
}

void StateVector::apply_cz(int a, int b) {
  const std::size_t mask = (std::size_t{1} << a) | (std::size_t{1} << b);
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if ((i & mask) == mask) amps_[i] = -amps_[i];
  }
}

void StateVector::apply(const Gate& gate) {
  check_qubit(gate.q0);
  switch (gate.kind) {
    case GateKind::H: {
      const double s = 1.0 / std::sqrt(2.0);
      const std::complex<double> m[2][2] = {{s, s}, {s, -s}};
      apply_single(gate.q0, m);
      return;
    }
    case GateKind::X: {
      const std::complex<double> m[2][2] = {{0.0, 1.0}, {1.0, 0.0}};
      apply_single(gate.q0, m);
      return;
    }
    case GateKind::Y: {
      const std::complex<double> m[2][2] = {{0.0, -kI}, {kI, 0.0}};
      apply_single(gate.q0, m);
      return;
    }
    case GateKind::Z:
      apply_diag(gate.q0, 1.0, -1.0);
      return;
    case GateKind::CNot:
      check_qubit(gate.q1);
      if (gate.q0 == gate.q1) {
        throw std::invalid_argument("CNot: control equals target");
      }
      apply_cnot(gate.q0, gate.q1);
      return;
    case GateKind::CZ:
      check_qubit(gate.q1);
      if (gate.q0 == gate.q1) {
        throw std::invalid_argument("CZ: qubits must be distinct");
      }
      apply_cz(gate.q0, gate.q1);
      return;
    case GateKind::Rx:
    case GateKind::Ry:
    case GateKind::Rz: {
      if (!std::isfinite(gate.angle)) {
        throw std::invalid_argument("rotation gate: angle must be finite");
      }
      const double c = std::cos(gate.angle / 2.0);
      const double s = std::sin(gate.angle / 2.0);
      if (gate.kind == GateKind::Rx) {
        const std::complex<double> m[2][2] = {{c, -kI * s}, {-kI * s, c}};
        apply_single(gate.q0, m);
      } else if (gate.kind == GateKind::Ry) {
        const std::complex<double> m[2][2] = {{c, -s}, {s, c}};
        apply_single(gate.q0, m);
      } else {
        apply_diag(gate.q0, {c, -s}, {c, s});
      }
      return;
    }
  }
  throw std::invalid_argument("unknown gate kind");
}

double StateVector::norm_sq() const {
  double total = 0.0;
  for (const auto& a : amps_) total += std::norm(a);
  return total;
}

double StateVector::expectation_z(int qubit) const {
  check_qubit(qubit);
  const std::size_t mask = std::size_t{1} << qubit;
  double value = 0.0;
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    const double p = std::norm(amps_[i]);
    value += (i & mask) ? -p : p;
  }
  return value;
}

double StateVector::fidelity(const StateVector& other) const {
  if (other.n_qubits_ != n_qubits_) {
    throw std::invalid_argument("fidelity: qubit counts differ");
  }
  std::complex<double> overlap{0.0, 0.0};
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    overlap += std::conj(other.amps_[i]) * amps_[i];
  }
  return std::norm(overlap);
}

StateVector ghz_prepare(int n_qubits, int qubit_cap) {
  if (n_qubits < 2) {
    throw std::invalid_argument("ghz_prepare: need at least two qubits");
  }
  StateVector state(n_qubits, qubit_cap);
  state.apply(Gate::h(0));
  for (int k = 1; k < n_qubits; ++k) {
    state.apply(Gate::cnot(0, k));
  }
  return state;
}

void ghz_decode(StateVector& state) {
  for (int k = 1; k < state.n_qubits(); ++k) {
    state.apply(Gate::cnot(0, k));
  }
  state.apply(Gate::h(0));
}

std::vector<int> measure(const StateVector& state,
                         std::span<const MeasurementBasis> bases, Rng& rng) {
  if (static_cast<int>(bases.size()) != state.n_qubits()) {
    throw std::invalid_argument("measure: one basis per qubit required");
  }
  StateVector rotated = state;
  for (int q = 0; q < state.n_qubits(); ++q) {
    switch (bases[q]) {
      case MeasurementBasis::X:
        rotated.apply(Gate::h(q));
        break;
      case MeasurementBasis::Y:
        rotated.apply(Gate::rz(q, -std::numbers::pi / 2.0));
        rotated.apply(Gate::h(q));
        break;
      case MeasurementBasis::Z:
        break;
    }
  }
  const double u = rng.uniform01();
  double cumulative = 0.0;
  std::size_t outcome = rotated.amps().size() - 1;
  for (std::size_t i = 0; i < rotated.amps().size(); ++i) {
    cumulative += std::norm(rotated.amp(i));
    if (u < cumulative) {
      outcome = i;
      break;
    }
  }
  std::vector<int> bits(state.n_qubits());
  for (int q = 0; q < state.n_qubits(); ++q) {
    bits[q] = static_cast<int>((outcome >> q) & 1);
  }
  return bits;
}

}  // namespace qfl
