#include <benchmark/benchmark.h>

#include "qent/antisymmetric.hpp"
#include "qent/kernels.hpp"
#include "qent/lindblad.hpp"
#include "qent/random.hpp"

namespace {

using namespace qent;

std::vector<LocalJump> thermal_jumps(int d) {
  std::vector<LocalJump> jumps;
  for (const Site site : {Site::First, Site::Second}) {
    for (const auto& term : local_jump_operators(EnvironmentModel::thermal(1.0, 0.2), d)) {
      jumps.push_back({site, term.op, term.rate});
    }
  }
  return jumps;
}

template <bool Parallel>
void BM_LindbladApply(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const HilbertDims dims(d, d);
  Rng rng = make_rng(1);
  const CMatrix rho = random_density_matrix(dims, dims.total(), rng).matrix();
  const auto jumps = thermal_jumps(d);
  CMatrix out;
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::lindblad_apply_parallel(dims, jumps, rho, out);
    } else {
      kernels::lindblad_apply_serial(dims, jumps, rho, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_BuildT(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const HilbertDims dims(d, d);
  Rng rng = make_rng(2);
  std::vector<CVector> phis;
  for (int j = 0; j < 4; ++j) phis.push_back(random_complex_gaussian(dims.total(), rng));
  const auto chis = chi_indices(dims);
  for (auto _ : state) {
    auto mats = Parallel ? kernels::build_T_parallel(dims, chis, phis)
                         : kernels::build_T_serial(dims, chis, phis);
    benchmark::DoNotOptimize(mats.data());
  }
}

}  // namespace

BENCHMARK(BM_LindbladApply<false>)->Name("lindblad_apply/serial")->Arg(3)->Arg(5)->Arg(8);
BENCHMARK(BM_LindbladApply<true>)->Name("lindblad_apply/parallel")->Arg(3)->Arg(5)->Arg(8);
BENCHMARK(BM_BuildT<false>)->Name("build_T/serial")->Arg(3)->Arg(5)->Arg(8);
BENCHMARK(BM_BuildT<true>)->Name("build_T/parallel")->Arg(3)->Arg(5)->Arg(8);

BENCHMARK_MAIN();
