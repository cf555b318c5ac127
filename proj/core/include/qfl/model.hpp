#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qfl/qnn.hpp"
#include "qfl/rng.hpp"

namespace qfl {

inline constexpr int kFeatureDim = 512;

// Predicted probabilities are clamped to keep the BCE loss finite.
inline constexpr double kProbClampLo = 1e-7;
inline constexpr double kProbClampHi = 1.0 - 1e-7;

enum class ParamComponent { AdapterW, AdapterB, Lambda, Theta };

struct ParamRef {
  ParamComponent component = ParamComponent::AdapterW;
  int position = 0;
};

// Flat trainable parameter vector with layout
// [adapter_w (n_qubits x 512, row major)][adapter_b][lambda][theta].
// At the default 6-qubit / 3-layer circuit this is 3072 + 6 + 6 + 36 = 3120.
class ModelParams {
 public:
  explicit ModelParams(CircuitLayout layout = CircuitLayout::brickwork());

  static ModelParams random_init(const CircuitLayout& layout, Rng& rng,
                                 double adapter_w_std = 0.1,
                                 double theta_range = 0.6);

  const CircuitLayout& layout() const { return layout_; }
  int param_count() const { return static_cast<int>(values_.size()); }

  std::span<double> flat() { return values_; }
  std::span<const double> flat() const { return values_; }

  int adapter_w_offset() const { return 0; }
  int adapter_b_offset() const { return layout_.n_qubits * kFeatureDim; }
  int lambda_offset() const { return adapter_b_offset() + layout_.n_qubits; }
  int theta_offset() const { return lambda_offset() + layout_.n_qubits; }

  std::span<double> adapter_w() { return flat().subspan(0, adapter_b_offset()); }
  std::span<double> adapter_b() { return flat().subspan(adapter_b_offset(), layout_.n_qubits); }
  std::span<double> lambda() { return flat().subspan(lambda_offset(), layout_.n_qubits); }
  std::span<double> theta() { return flat().subspan(theta_offset(), layout_.param_count()); }
  std::span<const double> adapter_w() const { return flat().subspan(0, adapter_b_offset()); }
  std::span<const double> adapter_b() const { return flat().subspan(adapter_b_offset(), layout_.n_qubits); }
  std::span<const double> lambda() const { return flat().subspan(lambda_offset(), layout_.n_qubits); }
  std::span<const double> theta() const { return flat().subspan(theta_offset(), layout_.param_count()); }

  ParamRef param_ref(int flat_index) const;
  int flat_index(ParamRef ref) const;

 private:
  CircuitLayout layout_;
  std::vector<double> values_;
};

// Aggregation mask over the flat parameter vector. Masks restrict what is
// transmitted, never what is trained locally.
struct SelectionMask {
  std::vector<std::uint8_t> included;
  int count() const;
};

SelectionMask full_mask(const ModelParams& params);
// Adapter and lambda always included, plus the light cone of the qubit with
// the largest lambda component (ties break to the lowest index).
SelectionMask lightcone_mask(const ModelParams& params);
// Adapter and lambda always included, plus k uniformly chosen theta indices.
SelectionMask random_k_mask(const ModelParams& params, int k, Rng& rng);

std::vector<double> softmax(std::span<const double> v);

struct PredictTrace {
  std::vector<double> z;             // adapter output fed to the circuit
  std::vector<double> expectations;  // <Z_q>
  std::vector<double> weights;       // softmax(lambda)
  double inner = 0.0;                // weights . expectations
  double y_hat = 0.0;
  bool clamped = false;
};

PredictTrace predict_trace(const ModelParams& params, std::span<const double> features);
double predict(const ModelParams& params, std::span<const double> features);

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad;
};

// Mean binary cross-entropy over the batch plus its gradient: analytic for
// the adapter, lambda and the head, parameter-shift for theta. features_flat
// is batch-major (n x 512).
LossGrad loss_and_grad(const ModelParams& params, std::span<const double> features_flat,
                       std::span<const int> labels);

struct AdamState {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;

  explicit AdamState(int param_count, double lr = 1e-3)
      : learning_rate(lr), m(param_count, 0.0), v(param_count, 0.0) {}
};

// Standard Adam with bias correction, applied to every parameter.
void adam_step(AdamState& state, ModelParams& params, std::span<const double> grad);

}  // namespace qfl
