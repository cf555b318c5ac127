#pragma once

#include <span>
#include <utility>
#include <vector>

#include "qfl/statevector.hpp"

namespace qfl {

// Data re-uploading circuit with a brickwork CZ entangler pattern. Per layer
// the gate order is: encoder Ry(feature_q) on every qubit, trainable Ry then
// trainable Rz per qubit, then the layer's CZ pairs. The order is load-bearing
// for the light-cone analysis below.
struct CircuitLayout {
  int n_qubits = 6;
  int n_layers = 3;
  // entanglers[layer] lists the disjoint CZ pairs applied after that layer's
  // rotations.
  std::vector<std::vector<std::pair<int, int>>> entanglers;

  // Alternating bricks: even layers (0-based) pair (0,1),(2,3),...; odd
  // layers pair (1,2),(3,4),....
  static CircuitLayout brickwork(int n_qubits = 6, int n_layers = 3);

  int param_count() const { return n_qubits * n_layers * 2; }

  // theta layout: [layer][qubit][rotation], rotation 0 = Ry, 1 = Rz.
  int theta_index(int layer, int qubit, int rotation) const {
    return (layer * n_qubits + qubit) * 2 + rotation;
  }

  void validate() const;
};

// Trainable-parameter indices that can causally influence one output qubit.
struct LightCone {
  int output_qubit = 0;
  std::vector<int> param_indices;  // sorted
};

// <Z_q> for every qubit; exact statevector evaluation, no shots.
std::vector<double> qnn_forward(const CircuitLayout& layout,
                                std::span<const double> features,
                                std::span<const double> theta);

// sum_q output_weights[q] * <Z_q>
double qnn_weighted(const CircuitLayout& layout, std::span<const double> features,
                    std::span<const double> theta,
                    std::span<const double> output_weights);

// Two-point parameter-shift gradient of the weighted output w.r.t. theta.
std::vector<double> param_shift_grad(const CircuitLayout& layout,
                                     std::span<const double> features,
                                     std::span<const double> theta,
                                     std::span<const double> output_weights);

// Gradient of the weighted output w.r.t. the input features; each feature is
// re-uploaded once per layer, so the shift rule is summed over layers.
std::vector<double> encoder_grad(const CircuitLayout& layout,
                                 std::span<const double> features,
                                 std::span<const double> theta,
                                 std::span<const double> output_weights);

// Backward reachability from the measured qubit: walking from the last layer
// to the first, first union in partners through that layer's entangler pairs,
// then collect that layer's rotation parameters on the expanded set.
LightCone light_cone(const CircuitLayout& layout, int output_qubit);

}  // namespace qfl
