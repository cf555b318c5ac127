#include "qfl/qnn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qfl {

namespace {

// enc_angles is layer-major: enc_angles[layer * n_qubits + q].
StateVector run_circuit(const CircuitLayout& layout, std::span<const double> enc_angles,
                        std::span<const double> theta) {
  StateVector psi(layout.n_qubits);
  for (int layer = 0; layer < layout.n_layers; ++layer) {
    for (int q = 0; q < layout.n_qubits; ++q) {
      psi.apply(Gate::ry(q, enc_angles[static_cast<std::size_t>(layer) * layout.n_qubits + q]));
    }
    for (int q = 0; q < layout.n_qubits; ++q) {
      psi.apply(Gate::ry(q, theta[layout.theta_index(layer, q, 0)]));
      psi.apply(Gate::rz(q, theta[layout.theta_index(layer, q, 1)]));
    }
    for (const auto& [a, b] : layout.entanglers[layer]) {
      psi.apply(Gate::cz(a, b));
    }
  }
  return psi;
}

std::vector<double> expand_features(const CircuitLayout& layout,
                                    std::span<const double> features) {
  std::vector<double> enc(static_cast<std::size_t>(layout.n_layers) * layout.n_qubits);
  for (int layer = 0; layer < layout.n_layers; ++layer) {
    for (int q = 0; q < layout.n_qubits; ++q) {
      enc[static_cast<std::size_t>(layer) * layout.n_qubits + q] = features[q];
    }
  }
  return enc;
}

double weighted_from_angles(const CircuitLayout& layout, std::span<const double> enc,
                            std::span<const double> theta,
                            std::span<const double> weights) {
  StateVector psi = run_circuit(layout, enc, theta);
  double value = 0.0;
  for (int q = 0; q < layout.n_qubits; ++q) {
    value += weights[q] * psi.expectation_z(q);
  }
  return value;
}

void check_sizes(const CircuitLayout& layout, std::span<const double> features,
                 std::span<const double> theta) {
  if (static_cast<int>(features.size()) != layout.n_qubits) {
    throw std::invalid_argument("qnn: feature count must equal qubit count");
  }
  if (static_cast<int>(theta.size()) != layout.param_count()) {
    throw std::invalid_argument("qnn: theta size mismatch");
  }
}

}  // namespace

CircuitLayout CircuitLayout::brickwork(int n_qubits, int n_layers) {
  CircuitLayout layout;
  layout.n_qubits = n_qubits;
  layout.n_layers = n_layers;
  layout.entanglers.resize(n_layers);
  for (int layer = 0; layer < n_layers; ++layer) {
    const int first = (layer % 2 == 0) ? 0 : 1;
    for (int q = first; q + 1 < n_qubits; q += 2) {
      layout.entanglers[layer].emplace_back(q, q + 1);
    }
  }
  layout.validate();
  return layout;
}

void CircuitLayout::validate() const {
  if (n_qubits < 1 || n_layers < 1) {
    throw std::invalid_argument("layout: need at least one qubit and one layer");
  }
  if (static_cast<int>(entanglers.size()) != n_layers) {
    throw std::invalid_argument("layout: one entangler list per layer required");
  }
  for (const auto& layer : entanglers) {
    std::vector<int> seen;
    for (const auto& [a, b] : layer) {
      if (a < 0 || a >= n_qubits || b < 0 || b >= n_qubits || a == b) {
        throw std::invalid_argument("layout: invalid entangler pair");
      }
      seen.push_back(a);
      seen.push_back(b);
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
      throw std::invalid_argument("layout: entangler pairs within a layer must be disjoint");
    }
  }
}

std::vector<double> qnn_forward(const CircuitLayout& layout,
                                std::span<const double> features,
                                std::span<const double> theta) {
  check_sizes(layout, features, theta);
  const auto enc = expand_features(layout, features);
  StateVector psi = run_circuit(layout, enc, theta);
  std::vector<double> out(layout.n_qubits);
  for (int q = 0; q < layout.n_qubits; ++q) {
    out[q] = psi.expectation_z(q);
  }
  return out;
}

double qnn_weighted(const CircuitLayout& layout, std::span<const double> features,
                    std::span<const double> theta,
                    std::span<const double> output_weights) {
  check_sizes(layout, features, theta);
  const auto enc = expand_features(layout, features);
  return weighted_from_angles(layout, enc, theta, output_weights);
}

std::vector<double> param_shift_grad(const CircuitLayout& layout,
                                     std::span<const double> features,
                                     std::span<const double> theta,
                                     std::span<const double> output_weights) {
  check_sizes(layout, features, theta);
  const auto enc = expand_features(layout, features);
  std::vector<double> shifted(theta.begin(), theta.end());
  std::vector<double> grad(theta.size());
  constexpr double kShift = std::numbers::pi / 2.0;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    shifted[j] = theta[j] + kShift;
    const double plus = weighted_from_angles(layout, enc, shifted, output_weights);
    shifted[j] = theta[j] - kShift;
    const double minus = weighted_from_angles(layout, enc, shifted, output_weights);
    shifted[j] = theta[j];
    grad[j] = 0.5 * (plus - minus);
  }
  return grad;
}

std::vector<double> encoder_grad(const CircuitLayout& layout,
                                 std::span<const double> features,
                                 std::span<const double> theta,
                                 std::span<const double> output_weights) {
  check_sizes(layout, features, theta);
  auto enc = expand_features(layout, features);
  std::vector<double> grad(layout.n_qubits, 0.0);
  constexpr double kShift = std::numbers::pi / 2.0;
  for (int q = 0; q < layout.n_qubits; ++q) {
    for (int layer = 0; layer < layout.n_layers; ++layer) {
      const std::size_t slot = static_cast<std::size_t>(layer) * layout.n_qubits + q;
      const double original = enc[slot];
      enc[slot] = original + kShift;
      const double plus = weighted_from_angles(layout, enc, theta, output_weights);
      enc[slot] = original - kShift;
      const double minus = weighted_from_angles(layout, enc, theta, output_weights);
      enc[slot] = original;
      grad[q] += 0.5 * (plus - minus);
    }
  }
  return grad;
}

LightCone light_cone(const CircuitLayout& layout, int output_qubit) {
  if (output_qubit < 0 || output_qubit >= layout.n_qubits) {
    throw std::out_of_range("light_cone: output qubit out of range");
  }
  std::vector<bool> reachable(layout.n_qubits, false);
  reachable[output_qubit] = true;
  LightCone cone;
  cone.output_qubit = output_qubit;
  for (int layer = layout.n_layers - 1; layer >= 0; --layer) {
    // Entanglers act after the layer's rotations, so expand first. Pairs are
    // disjoint within a layer, so one pass suffices.
    for (const auto& [a, b] : layout.entanglers[layer]) {
      if (reachable[a] || reachable[b]) {
        reachable[a] = true;
        reachable[b] = true;
      }
    }
    for (int q = 0; q < layout.n_qubits; ++q) {
      if (reachable[q]) {
        cone.param_indices.push_back(layout.theta_index(layer, q, 0));
        cone.param_indices.push_back(layout.theta_index(layer, q, 1));
      }
    }
  }
  std::sort(cone.param_indices.begin(), cone.param_indices.end());
  return cone;
}

}  // namespace qfl
