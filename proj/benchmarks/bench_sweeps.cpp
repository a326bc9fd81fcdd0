#include <benchmark/benchmark.h>

#include "elastobayes/experiment.hpp"
#include "elastobayes/samplers.hpp"
#include "elastobayes/saem.hpp"

using namespace elastobayes;

namespace {

struct Setup {
  std::unique_ptr<Experiment> experiment;
  LatentState state;
  Eigen::VectorXd lambda2;
};

Setup make_setup(int n) {
  ExperimentConfig cfg;
  cfg.levels = {n};
  cfg.fine = 4 * n;
  Rng rng(7);
  Setup s;
  s.experiment = std::make_unique<Experiment>(cfg, rng);
  const InverseProblem& p = s.experiment->problem(0);
  s.lambda2 = Eigen::VectorXd::Constant(p.n_elements(), 1e-2);
  s.state = initial_state(p, s.lambda2, rng);
  return s;
}

void gibbs_sweep(benchmark::State& st, GibbsMode mode) {
  Setup s = make_setup(static_cast<int>(st.range(0)));
  const InverseProblem& p = s.experiment->problem(0);
  GibbsSampler g(p, mode);
  g.set_discrepancy(s.lambda2);
  Rng rng(11);
  for (auto _ : st) {
    s.state = g.sweep(std::move(s.state), rng);
    benchmark::DoNotOptimize(s.state.E.data());
  }
  st.counters["free_dofs"] = p.n_free();
  st.counters["per_dof"] =
      benchmark::Counter(static_cast<double>(p.n_free()) * st.iterations(),
                         benchmark::Counter::kIsRate | benchmark::Counter::kInvert);
}

void BM_SweepFull(benchmark::State& st) { gibbs_sweep(st, GibbsMode::Full); }
void BM_SweepBlock(benchmark::State& st) { gibbs_sweep(st, GibbsMode::Block); }

void BM_DisplacementBlockScan(benchmark::State& st) {
  Setup s = make_setup(static_cast<int>(st.range(0)));
  const InverseProblem& p = s.experiment->problem(0);
  Rng rng(3);
  for (auto _ : st) {
    sweep_displacement_blocks(p, s.state, s.lambda2, rng);
    benchmark::DoNotOptimize(s.state.u.data());
  }
  st.counters["per_dof"] =
      benchmark::Counter(static_cast<double>(p.n_free()) * st.iterations(),
                         benchmark::Counter::kIsRate | benchmark::Counter::kInvert);
}

void BM_DisplacementFullDraw(benchmark::State& st) {
  Setup s = make_setup(static_cast<int>(st.range(0)));
  const InverseProblem& p = s.experiment->problem(0);
  Rng rng(3);
  for (auto _ : st) {
    s.state.u = sample_displacement_full(p, s.state, s.lambda2, rng);
    benchmark::DoNotOptimize(s.state.u.data());
  }
  st.counters["per_dof"] =
      benchmark::Counter(static_cast<double>(p.n_free()) * st.iterations(),
                         benchmark::Counter::kIsRate | benchmark::Counter::kInvert);
}

}  // namespace

BENCHMARK(BM_SweepFull)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepBlock)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DisplacementBlockScan)->Arg(5)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DisplacementFullDraw)->Arg(5)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
