#include "qfl/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qfl {

ModelParams::ModelParams(CircuitLayout layout) : layout_(std::move(layout)) {
  layout_.validate();
  values_.assign(static_cast<std::size_t>(layout_.n_qubits) * kFeatureDim +
                     2 * layout_.n_qubits + layout_.param_count(),
                 0.0);
}

ModelParams ModelParams::random_init(const CircuitLayout& layout, Rng& rng,
                                     double adapter_w_std, double theta_range) {
  ModelParams params(layout);
  for (auto& w : params.adapter_w()) {
    w = rng.normal(0.0, adapter_w_std);
  }
  for (auto& t : params.theta()) {
    t = rng.uniform(-theta_range, theta_range);
  }
  return params;
}

ParamRef ModelParams::param_ref(int flat_index) const {
  if (flat_index < 0 || flat_index >= param_count()) {
    throw std::out_of_range("param_ref: flat index out of range");
  }
  if (flat_index < adapter_b_offset()) {
    return {ParamComponent::AdapterW, flat_index};
  }
  if (flat_index < lambda_offset()) {
    return {ParamComponent::AdapterB, flat_index - adapter_b_offset()};
  }
  if (flat_index < theta_offset()) {
    return {ParamComponent::Lambda, flat_index - lambda_offset()};
  }
  return {ParamComponent::Theta, flat_index - theta_offset()};
}

int ModelParams::flat_index(ParamRef ref) const {
  switch (ref.component) {
    case ParamComponent::AdapterW:
      return ref.position;
    case ParamComponent::AdapterB:
      return adapter_b_offset() + ref.position;
    case ParamComponent::Lambda:
      return lambda_offset() + ref.position;
    case ParamComponent::Theta:
      return theta_offset() + ref.position;
  }
  throw std::invalid_argument("flat_index: unknown component");
}

int SelectionMask::count() const {
  int total = 0;
  for (auto b : included) total += b != 0;
  return total;
}

SelectionMask full_mask(const ModelParams& params) {
  return {std::vector<std::uint8_t>(params.param_count(), 1)};
}

namespace {

SelectionMask base_mask(const ModelParams& params) {
  SelectionMask mask{std::vector<std::uint8_t>(params.param_count(), 0)};
  for (int i = 0; i < params.theta_offset(); ++i) {
    mask.included[i] = 1;  // adapter_w, adapter_b, lambda
  }
  return mask;
}

}  // namespace

SelectionMask lightcone_mask(const ModelParams& params) {
  SelectionMask mask = base_mask(params);
  const auto lambda = params.lambda();
  int dominant = 0;
  for (int q = 1; q < params.layout().n_qubits; ++q) {
    if (lambda[q] > lambda[dominant]) dominant = q;
  }
  const LightCone cone = light_cone(params.layout(), dominant);
  for (int idx : cone.param_indices) {
    mask.included[params.theta_offset() + idx] = 1;
  }
  return mask;
}

SelectionMask random_k_mask(const ModelParams& params, int k, Rng& rng) {
  const int n_theta = params.layout().param_count();
  if (k < 0 || k > n_theta) {
    throw std::invalid_argument("random_k_mask: k out of range");
  }
  SelectionMask mask = base_mask(params);
  std::vector<int> order(n_theta);
  for (int i = 0; i < n_theta; ++i) order[i] = i;
  rng.shuffle(order);
  for (int i = 0; i < k; ++i) {
    mask.included[params.theta_offset() + order[i]] = 1;
  }
  return mask;
}

std::vector<double> softmax(std::span<const double> v) {
  double max_v = v[0];
  for (double x : v) max_v = std::max(max_v, x);
  std::vector<double> out(v.size());
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - max_v);
    total += out[i];
  }
  for (auto& x : out) x /= total;
  return out;
}

PredictTrace predict_trace(const ModelParams& params, std::span<const double> features) {
  if (static_cast<int>(features.size()) != kFeatureDim) {
    throw std::invalid_argument("predict: feature dimension mismatch");
  }
  for (double f : features) {
    if (!std::isfinite(f)) {
      throw std::invalid_argument("predict: non-finite feature value");
    }
  }
  const int n = params.layout().n_qubits;
  PredictTrace trace;
  trace.z.assign(n, 0.0);
  const auto w = params.adapter_w();
  const auto b = params.adapter_b();
  for (int q = 0; q < n; ++q) {
    double acc = 0.0;
    const double* row = w.data() + static_cast<std::size_t>(q) * kFeatureDim;
    for (int i = 0; i < kFeatureDim; ++i) {
      acc += row[i] * features[i];
    }
    trace.z[q] = acc + b[q];
  }
  trace.expectations = qnn_forward(params.layout(), trace.z, params.theta());
  trace.weights = softmax(params.lambda());
  trace.inner = 0.0;
  for (int q = 0; q < n; ++q) {
    trace.inner += trace.weights[q] * trace.expectations[q];
  }
  const double raw = 0.5 * (1.0 + trace.inner);
  trace.y_hat = std::clamp(raw, kProbClampLo, kProbClampHi);
  trace.clamped = raw < kProbClampLo || raw > kProbClampHi;
  return trace;
}

double predict(const ModelParams& params, std::span<const double> features) {
  return predict_trace(params, features).y_hat;
}

LossGrad loss_and_grad(const ModelParams& params, std::span<const double> features_flat,
                       std::span<const int> labels) {
  const std::size_t batch = labels.size();
  if (batch == 0) {
    throw std::invalid_argument("loss_and_grad: empty batch");
  }
  if (features_flat.size() != batch * kFeatureDim) {
    throw std::invalid_argument("loss_and_grad: feature block size mismatch");
  }
  const int n = params.layout().n_qubits;
  LossGrad result;
  result.grad.assign(params.param_count(), 0.0);
  const double inv_batch = 1.0 / static_cast<double>(batch);

  for (std::size_t s = 0; s < batch; ++s) {
    const auto features = features_flat.subspan(s * kFeatureDim, kFeatureDim);
    const PredictTrace trace = predict_trace(params, features);
    const double y = static_cast<double>(labels[s]);
    const double y_hat = trace.y_hat;
    result.loss += -(y * std::log(y_hat) + (1.0 - y) * std::log(1.0 - y_hat)) * inv_batch;

    // d loss / d y_hat, zero if the affine head output was clamped.
    if (trace.clamped) continue;
    const double dl_dy = (y_hat - y) / (y_hat * (1.0 - y_hat));
    const double dl_ds = 0.5 * dl_dy * inv_batch;

    // lambda: d s / d lambda_i = softmax_i * (e_i - s)
    for (int q = 0; q < n; ++q) {
      result.grad[params.lambda_offset() + q] +=
          dl_ds * trace.weights[q] * (trace.expectations[q] - trace.inner);
    }

    // theta via parameter shift, features via the re-uploaded shift rule;
    // both take the softmax weights scaled by the upstream BCE term.
    std::vector<double> out_w(n);
    for (int q = 0; q < n; ++q) out_w[q] = dl_ds * trace.weights[q];
    const auto theta_g = param_shift_grad(params.layout(), trace.z, params.theta(), out_w);
    for (std::size_t j = 0; j < theta_g.size(); ++j) {
      result.grad[params.theta_offset() + static_cast<int>(j)] += theta_g[j];
    }
    const auto z_g = encoder_grad(params.layout(), trace.z, params.theta(), out_w);
    for (int q = 0; q < n; ++q) {
      result.grad[params.adapter_b_offset() + q] += z_g[q];
      double* row = result.grad.data() + static_cast<std::size_t>(q) * kFeatureDim;
      for (int i = 0; i < kFeatureDim; ++i) {
        row[i] += z_g[q] * features[i];
      }
    }
  }
  return result;
}

void adam_step(AdamState& state, ModelParams& params, std::span<const double> grad) {
  auto values = params.flat();
  if (grad.size() != values.size() || state.m.size() != values.size()) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < values.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    values[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

}  // namespace qfl
