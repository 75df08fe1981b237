#include <benchmark/benchmark.h>

#include <random>

#include "p4ip/anscombe.hpp"
#include "p4ip/denoisers.hpp"
#include "p4ip/operators.hpp"
#include "p4ip/sampling.hpp"
#include "p4ip/solver.hpp"

namespace {

p4ip::Image random_image(int w, int h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    p4ip::Image img(w, h);
    for (double& v : img.data) {
        v = 4.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    }
    return img;
}

void BM_ConvolveDirectCauchy15(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto H = p4ip::LinearOperator::convolution(p4ip::make_cauchy_kernel(), n, n);
    const p4ip::Image img = random_image(n, n, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(H.apply(img));
    }
    state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_ConvolveDirectCauchy15)->Arg(64)->Arg(128);

void BM_ConvolveFftGaussian25(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto H = p4ip::LinearOperator::convolution(p4ip::make_gaussian_kernel(), n, n);
    const p4ip::Image img = random_image(n, n, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(H.apply(img));
    }
    state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_ConvolveFftGaussian25)->Arg(64)->Arg(128)->Arg(256);

void BM_PoissonSample(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const p4ip::Image img = random_image(n, n, 3);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(p4ip::poisson_sample(img, seed++));
    }
    state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_PoissonSample)->Arg(128)->Arg(256);

void BM_ClosedFormXUpdate(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const p4ip::Image y = p4ip::poisson_sample(random_image(n, n, 4), 7);
    const p4ip::Image v = random_image(n, n, 5);
    const p4ip::Image u(n, n, 0.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(p4ip::x_update_denoise(y, v, u, 0.5));
    }
    state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_ClosedFormXUpdate)->Arg(128)->Arg(512);

void BM_NlmDenoise(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const p4ip::Image img = random_image(n, n, 6);
    const p4ip::Denoiser nlm = p4ip::nlm_denoiser();
    for (auto _ : state) {
        benchmark::DoNotOptimize(nlm(img, 0.5));
    }
    state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_NlmDenoise)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_AnscombeRoundTrip(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const p4ip::Image img = p4ip::poisson_sample(random_image(n, n, 8), 9);
    for (auto _ : state) {
        benchmark::DoNotOptimize(p4ip::anscombe_inverse_unbiased(p4ip::anscombe_forward(img)));
    }
    state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_AnscombeRoundTrip)->Arg(256);

void BM_SolverDenoiseSweep(benchmark::State& state) {
    const int n = 32;
    const p4ip::Image y = p4ip::poisson_sample(random_image(n, n, 10), 11);
    const auto H = p4ip::LinearOperator::identity(n, n);
    const p4ip::Denoiser den = p4ip::tikhonov_prox_denoiser();
    p4ip::SolverParams params = p4ip::denoise_params_for_peak(1.0, 20);
    for (auto _ : state) {
        benchmark::DoNotOptimize(p4ip::p4ip_run(y, H, den, params));
    }
}
BENCHMARK(BM_SolverDenoiseSweep)->Unit(benchmark::kMillisecond);

void BM_DeblurInnerSolve(benchmark::State& state) {
    const int n = 64;
    const auto H = p4ip::LinearOperator::convolution(p4ip::make_gaussian_kernel(), n, n);
    const p4ip::Image clean = random_image(n, n, 12);
    const p4ip::Image y = p4ip::poisson_sample(H.apply(clean), 13);
    const p4ip::Image v = clean;
    const p4ip::Image u(n, n, 0.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(p4ip::x_update_general(y, v, u, 0.5, H, y));
    }
}
BENCHMARK(BM_DeblurInnerSolve)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
