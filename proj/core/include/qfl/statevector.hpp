#pragma once

#include <complex>
#include <span>
#include <vector>

#include "qfl/rng.hpp"

namespace qfl {

// Construction beyond the qubit cap is rejected; protocol oracles never need
// more than 7 qubits and the QNN uses 6.
inline constexpr int kDefaultQubitCap = 12;

enum class GateKind { H, X, Y, Z, CNot, CZ, Rx, Ry, Rz };

// Rotation gates use the half-angle convention exp(-i * angle * P / 2); in
// particular Rz(a) = diag(e^{-ia/2}, e^{+ia/2}). This convention is fixed
// repo-wide; every phase-encoding computation assumes it.
struct Gate {
  GateKind kind = GateKind::H;
  int q0 = 0;
  int q1 = -1;  // second qubit for CNot (target) and CZ
  double angle = 0.0;

  static Gate h(int q) { return {GateKind::H, q}; }
  static Gate x(int q) { return {GateKind::X, q}; }
  static Gate y(int q) { return {GateKind::Y, q}; }
  static Gate z(int q) { return {GateKind::Z, q}; }
  static Gate cnot(int control, int target) { return {GateKind::CNot, control, target}; }
  static Gate cz(int a, int b) { return {GateKind::CZ, a, b}; }
  static Gate rx(int q, double angle) { return {GateKind::Rx, q, -1, angle}; }
  static Gate ry(int q, double angle) { return {GateKind::Ry, q, -1, angle}; }
  static Gate rz(int q, double angle) { return {GateKind::Rz, q, -1, angle}; }
};

enum class MeasurementBasis { X, Y, Z };

// Dense pure state, little-endian: qubit 0 is the least significant bit of
// the amplitude index.
class StateVector {
 public:
  explicit StateVector(int n_qubits, int qubit_cap = kDefaultQubitCap);
  static StateVector from_amps(std::vector<std::complex<double>> amps,
                               int qubit_cap = kDefaultQubitCap);

  int n_qubits() const { return n_qubits_; }
  std::span<const std::complex<double>> amps() const { return amps_; }
  std::complex<double> amp(std::size_t i) const { return amps_[i]; }

  void apply(const Gate& gate);

  double norm_sq() const;
  double expectation_z(int qubit) const;
  // |<other|this>|^2
  double fidelity(const StateVector& other) const;

 private:
  void check_qubit(int q) const;
  void apply_single(int q, const std::complex<double> m[2][2]);
  void apply_diag(int q, std::complex<double> d0, std::complex<double> d1);
  void apply_cnot(int control, int target);
  void apply_cz(int a, int b);

  int n_qubits_;
  std::vector<std::complex<double>> amps_;
};

// (|0...0> + |1...1>)/sqrt(2) via H on qubit 0 and a CNOT fan-out.
StateVector ghz_prepare(int n_qubits, int qubit_cap = kDefaultQubitCap);

// Inverse of the preparation: CNOT(0->k) for k = 1..n-1, then H on qubit 0.
// On an error-free encoded state carrying relative phase phi, qubit 0 ends in
// (|0>(1+e^{i phi}) + |1>(1-e^{i phi}))/2 and qubits 1..n-1 end in |0>.
void ghz_decode(StateVector& state);

// Samples one bitstring from the Born distribution after per-qubit basis
// rotations (X: H; Y: Rz(-pi/2) then H; Z: none). Does not mutate the input.
std::vector<int> measure(const StateVector& state,
                         std::span<const MeasurementBasis> bases, Rng& rng);

}  // namespace qfl
