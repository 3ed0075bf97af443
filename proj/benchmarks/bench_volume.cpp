#include <benchmark/benchmark.h>

#include "starvol/centroid.hpp"
#include "starvol/stable.hpp"
#include "starvol/volume.hpp"

using namespace starvol;

namespace {

StarBody make_body(int n, int N, double p, std::uint64_t seed) {
  RngStream rng(seed, 0);
  DensityFamily F = DensityFamily::iid(uniform_ball(n, 1.0), N, 1);
  const BlockSampleMatrix X = draw_blocks(F, rng);
  return empirical_dual_centroid(X, std::vector<SupportBody>(static_cast<std::size_t>(N), segment(1.0)),
                                 p);
}

void BM_positive_stable(benchmark::State& state) {
  RngStream rng(1, 0);
  const double alpha = state.range(0) / 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_positive_stable(alpha, rng));
}
BENCHMARK(BM_positive_stable)->Arg(50)->Arg(75);

void BM_volume_radial(benchmark::State& state) {
  const StarBody K = make_body(2, static_cast<int>(state.range(0)), 0.5, 7);
  const SphereGrid grid = sphere_quadrature(2, 512, GridMode::deterministic);
  for (auto _ : state) benchmark::DoNotOptimize(volume_radial(K, grid).value);
}
BENCHMARK(BM_volume_radial)->Arg(8)->Arg(64);

void BM_volume_gaussian_extrapolated(benchmark::State& state) {
  const StarBody K = make_body(2, 8, 0.5, 7);
  RngStream rng(2, 0);
  for (auto _ : state)
    benchmark::DoNotOptimize(volume_gaussian_extrapolated(K, static_cast<std::size_t>(state.range(0)), rng).value);
}
BENCHMARK(BM_volume_gaussian_extrapolated)->Arg(10000);

void BM_nt_mixture(benchmark::State& state) {
  RngStream rng(3, 0);
  Eigen::MatrixXd X(2, 3);
  X << 1.0, 0.2, -0.3, 0.1, 0.9, 0.4;
  MixtureConfig cfg;
  cfg.budget = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(nt_mixture_volume(X, 1.0, cfg, rng).value);
}
BENCHMARK(BM_nt_mixture)->Arg(10000);

void BM_empirical_rho(benchmark::State& state) {
  const StarBody K = make_body(2, 64, 1.0, 9);
  RngStream rng(4, 0);
  const Eigen::VectorXd u = draw_sphere(2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(K.rho_unit(u));
}
BENCHMARK(BM_empirical_rho);

}  // namespace

BENCHMARK_MAIN();
