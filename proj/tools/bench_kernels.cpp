// Serial reference versus OpenMP kernel for each Monte Carlo loop.

#include <benchmark/benchmark.h>

#include "jrc/association.hpp"
#include "jrc/channel.hpp"
#include "jrc/comms.hpp"
#include "jrc/coverage.hpp"
#include "jrc/detector.hpp"
#include "jrc/estimation.hpp"

using namespace jrc;

namespace {

Execution policy(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

void BM_SinrTerms(benchmark::State& state) {
  const auto layout = generate_layout({25, 10, Rect::square(500.0)}, 1);
  ChannelConfig cfg;
  const auto channels = build_channels(layout, cfg, 2);
  const auto pilots = assign_pilots(10, 2, 3);
  const double sigma2 = noise_power_watts(20e6);
  const auto est = build_estimators(channels, pilots, sigma2);
  const auto assoc = initial_association(channels.beta, 2);
  SinrOptions opts;
  opts.n_mc = 200;
  opts.exec = policy(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_sinr_terms(channels, pilots, est, assoc, sigma2, opts, 4));
  }
  label(state);
}

void BM_CoverageMonteCarlo(benchmark::State& state) {
  CoverageParams p;
  p.rho = 0.05;
  p.alpha_prime = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pdc_monte_carlo(20.0, p, PathMode::NLoS, 20000, 5, policy(state)));
  }
  label(state);
}

void BM_DetectorCalibration(benchmark::State& state) {
  std::vector<EchoModel> models;
  for (int k = 0; k < 4; ++k) {
    EchoModel m;
    m.steering = array_response(0.2 * k, 0.0, 4);
    m.sigma2_target = 2.0;
    m.sigma2_clutter = 1.0;
    m.noise_cov = CMat::Identity(4, 4);
    models.push_back(std::move(m));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(calibrate_threshold(models, 0.1, 20000, 6, policy(state)));
  }
  label(state);
}

}  // namespace

BENCHMARK(BM_SinrTerms)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CoverageMonteCarlo)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DetectorCalibration)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
