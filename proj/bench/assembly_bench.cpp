// OpenMP nonlocal assembly against the serial reference, on the split square.
//   assembly_bench --benchmark_filter=Full

#include <benchmark/benchmark.h>
#include <omp.h>

#include "nlfem/assembly.hpp"

using namespace nlfem;

namespace {

const Mesh& mesh_for(int level) {
  static const GeometrySpec g = GeometrySpec::square_split({-0.5, 0.5, -0.5, 0.5});
  static const Mesh meshes[] = {build_mesh(g, 0.2), build_mesh(g, 0.1), build_mesh(g, 0.07)};
  return meshes[level];
}

void set_counters(benchmark::State& state, const Mesh& m) {
  state.counters["triangles"] = m.num_triangles();
  state.counters["dofs"] = interior_dofs(m).size();
}

void BM_FullParallel(benchmark::State& state) {
  const Mesh& m = mesh_for(static_cast<int>(state.range(0)));
  const IndexMap map = interior_dofs(m);
  const AssemblyOptions opts{static_cast<int>(state.range(1)), 2.0e9};
  for (auto _ : state)
    benchmark::DoNotOptimize(assemble_nonlocal_full(m, 0.5, KernelWeight::constant(1.0), {}, {}, map, opts));
  set_counters(state, m);
  state.counters["workers"] = static_cast<double>(state.range(1));
}

void BM_FullReference(benchmark::State& state) {
  const Mesh& m = mesh_for(static_cast<int>(state.range(0)));
  const IndexMap map = interior_dofs(m);
  for (auto _ : state)
    benchmark::DoNotOptimize(assemble_nonlocal_full_reference(m, 0.5, KernelWeight::constant(1.0), {}, {}, map));
  set_counters(state, m);
}

void BM_CensoredParallel(benchmark::State& state) {
  const Mesh& m = mesh_for(static_cast<int>(state.range(0)));
  const IndexMap map = interior_dofs(m);
  const AssemblyOptions opts{static_cast<int>(state.range(1)), 2.0e9};
  for (auto _ : state)
    benchmark::DoNotOptimize(assemble_nonlocal_censored(m, 0.75, KernelWeight::constant(1.0), {}, map, opts));
  set_counters(state, m);
}

void BM_CensoredReference(benchmark::State& state) {
  const Mesh& m = mesh_for(static_cast<int>(state.range(0)));
  const IndexMap map = interior_dofs(m);
  for (auto _ : state)
    benchmark::DoNotOptimize(assemble_nonlocal_censored_reference(m, 0.75, KernelWeight::constant(1.0), {}, map));
  set_counters(state, m);
}

void worker_args(benchmark::internal::Benchmark* b) {
  const int maxw = omp_get_max_threads();
  for (int level = 0; level < 3; ++level)
    for (int w = 1; w <= maxw; w *= 2) b->Args({level, w});
}

}  // namespace

BENCHMARK(BM_FullParallel)->Apply(worker_args)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FullReference)->DenseRange(0, 2)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CensoredParallel)->Apply(worker_args)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CensoredReference)->DenseRange(0, 2)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
