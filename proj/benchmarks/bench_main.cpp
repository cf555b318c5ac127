#include <benchmark/benchmark.h>

#include <numbers>
#include <vector>

#include "qfl/channel.hpp"
#include "qfl/qnn.hpp"
#include "qfl/qsa.hpp"
#include "qfl/statevector.hpp"

namespace {

void BM_GhzPrepareDecode(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    qfl::StateVector psi = qfl::ghz_prepare(n);
    qfl::ghz_decode(psi);
    benchmark::DoNotOptimize(psi.amp(0));
  }
}
BENCHMARK(BM_GhzPrepareDecode)->Arg(3)->Arg(7)->Arg(12);

void BM_QnnForward(benchmark::State& state) {
  const auto layout = qfl::CircuitLayout::brickwork();
  std::vector<double> features(layout.n_qubits, 0.3);
  std::vector<double> theta(layout.param_count(), 0.1);
  for (auto _ : state) {
    auto out = qfl::qnn_forward(layout, features, theta);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_QnnForward);

void BM_ParamShiftGrad(benchmark::State& state) {
  const auto layout = qfl::CircuitLayout::brickwork();
  std::vector<double> features(layout.n_qubits, 0.3);
  std::vector<double> theta(layout.param_count(), 0.1);
  std::vector<double> weights(layout.n_qubits, 1.0 / layout.n_qubits);
  for (auto _ : state) {
    auto grad = qfl::param_shift_grad(layout, features, theta, weights);
    benchmark::DoNotOptimize(grad.data());
  }
}
BENCHMARK(BM_ParamShiftGrad);

void BM_SteaneCorrect(benchmark::State& state) {
  qfl::Rng rng(qfl::RngSeed{5});
  std::array<qfl::Pauli, 7> physical;
  for (auto _ : state) {
    for (auto& e : physical) e = qfl::sample_pauli(0.01, rng);
    benchmark::DoNotOptimize(qfl::steane_correct(physical));
  }
}
BENCHMARK(BM_SteaneCorrect);

void BM_AggregateParameter(benchmark::State& state) {
  const std::vector<double> values = {0.3, -0.1, 0.5};
  const qfl::EncodingScheme scheme;
  const qfl::ShotPlan plan{static_cast<int>(state.range(0))};
  const std::vector<qfl::LegConfig> legs(3, qfl::LegConfig{{1e-3}, qfl::ChannelMode::Raw, false});
  qfl::TransmissionLedger ledger;
  qfl::Rng rng(qfl::RngSeed{17});
  for (auto _ : state) {
    auto est = qfl::aggregate_parameter(values, scheme, plan, legs, ledger, rng);
    benchmark::DoNotOptimize(est);
  }
}
BENCHMARK(BM_AggregateParameter)->Arg(64)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
