// Throughput comparison of the production Eigen filter against the naive
// serial dense-matrix reference, and of serial vs OpenMP suite evaluation.
//
//   cmake --build build --target coop_bench && ./build/benchmarks/coop_bench

#include <benchmark/benchmark.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "coop/evaluation.hpp"
#include "coop/kalman.hpp"
#include "coop/reference_filter.hpp"
#include "coop/simulator.hpp"

using namespace coop;

namespace {

TrialRecord bench_trial() {
  TrialSpec spec;
  spec.requested_xi = 1;
  spec.physical = PhysicalIntensity::Hard;
  spec.verbal = VerbalCue::Forward;
  spec.duration_s = 5.0;
  spec.seed = 1234;
  return simulate_trial(spec, ModelParams::defaults());
}

std::vector<TrialRecord> bench_suite(int n_trials) {
  const std::vector<TrialSpec> specs =
      generate_trial_suite(1, n_trials, 888);
  return simulate_suite(specs, n_trials, ModelParams::defaults(),
                        BehaviorMode::Model);
}

ref::Estimate to_ref(const StateEstimate& est) {
  ref::Estimate out;
  for (int i = 0; i < 4; ++i) {
    out.mean[static_cast<std::size_t>(i)] = est.mean[i];
    for (int j = 0; j < 4; ++j) {
      out.cov[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          est.cov(i, j);
    }
  }
  return out;
}

void BM_FilterTrial_Main(benchmark::State& state) {
  const TrialRecord record = bench_trial();
  const ModelParams p = ModelParams::defaults();
  const StateEstimate init =
      default_initial_estimate(record.measurements.front());
  for (auto _ : state) {
    const FilterTrace trace = filter_trial(record, p, init);
    benchmark::DoNotOptimize(trace.estimates.back().mean[3]);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<long>(record.measurements.size()));
}
BENCHMARK(BM_FilterTrial_Main);

void BM_FilterTrial_Reference(benchmark::State& state) {
  const TrialRecord record = bench_trial();
  const ModelParams p = ModelParams::defaults();
  const ref::Estimate init =
      to_ref(default_initial_estimate(record.measurements.front()));
  for (auto _ : state) {
    const ref::Trace trace = ref::filter_trial_reference(record, p, init);
    benchmark::DoNotOptimize(trace.estimates.back().mean[3]);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<long>(record.measurements.size()));
}
BENCHMARK(BM_FilterTrial_Reference);

void BM_EvaluateSuite_Serial(benchmark::State& state) {
  const std::vector<TrialRecord> records =
      bench_suite(static_cast<int>(state.range(0)));
  const ModelParams p = ModelParams::defaults();
  for (auto _ : state) {
    const EvaluationReport report =
        evaluate_suite(records, p, JudgmentConfig{}, /*threads=*/1);
    benchmark::DoNotOptimize(report.overall_accuracy);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<long>(records.size()));
}
BENCHMARK(BM_EvaluateSuite_Serial)->Arg(100);

void BM_EvaluateSuite_OpenMP(benchmark::State& state) {
  const std::vector<TrialRecord> records =
      bench_suite(static_cast<int>(state.range(0)));
  const ModelParams p = ModelParams::defaults();
  for (auto _ : state) {
    const EvaluationReport report =
        evaluate_suite(records, p, JudgmentConfig{}, /*threads=*/0);
    benchmark::DoNotOptimize(report.overall_accuracy);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<long>(records.size()));
#ifdef _OPENMP
  state.SetLabel(std::to_string(omp_get_max_threads()) + " threads");
#endif
}
BENCHMARK(BM_EvaluateSuite_OpenMP)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
