// Serial reference loops against their OpenMP versions on a 300 x 100
// two-layer mesh (the size of the cantilever examples).

#include <jointopt/density_fields.hpp>
#include <jointopt/kernels.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace jointopt;

namespace {

struct Fixture {
  MultiPartMesh mesh;
  ElementStiffness ke = element_stiffness_q4(0.3);
  DensityFilter filter;
  Vector u, young, rho;

  Fixture()
      : mesh({build_part_mesh(200, 100, 1.0, Vec2(0, 0), 0),
              build_part_mesh(200, 100, 1.0, Vec2(100, 0), 1)}),
        filter(build_filter(mesh, 4.0)) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    u.resize(mesh.num_dofs());
    for (auto& v : u) v = d(rng) - 0.5;
    young.resize(mesh.num_elements());
    for (auto& v : young) v = 1e-9 + d(rng);
    rho = young;
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

template <bool Parallel>
void BM_ElementEnergies(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    Vector e = Parallel ? kernels::parallel::element_energies(f.mesh, f.ke, f.u)
                        : kernels::serial::element_energies(f.mesh, f.ke, f.u);
    benchmark::DoNotOptimize(e.data());
  }
  state.SetItemsProcessed(state.iterations() * f.mesh.num_elements());
}

template <bool Parallel>
void BM_FilterApply(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    Vector y = Parallel ? kernels::parallel::row_apply(f.filter.weights(), f.rho)
                        : kernels::serial::row_apply(f.filter.weights(), f.rho);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * f.mesh.num_elements());
}

template <bool Parallel>
void BM_CircleMask(benchmark::State& state) {
  const Fixture& f = fixture();
  kernels::CircleMaskOutput out;
  out.values = Vector::Ones(f.mesh.num_elements());
  out.d_dx = Vector::Zero(f.mesh.num_elements());
  out.d_dy = Vector::Zero(f.mesh.num_elements());
  const Vec2 ref(150.0, 50.0);
  for (auto _ : state) {
    if (Parallel)
      kernels::parallel::circle_mask(ref, 10.0, 10.0, f.mesh.element_centers(), 0,
                                     f.mesh.num_elements(), out);
    else
      kernels::serial::circle_mask(ref, 10.0, 10.0, f.mesh.element_centers(), 0,
                                   f.mesh.num_elements(), out);
    benchmark::DoNotOptimize(out.values.data());
  }
  state.SetItemsProcessed(state.iterations() * f.mesh.num_elements());
}

template <bool Parallel>
void BM_MaterialValues(benchmark::State& state) {
  const Fixture& f = fixture();
  std::vector<double> values;
  for (auto _ : state) {
    if (Parallel)
      kernels::parallel::material_values(f.mesh, f.young, f.ke, values);
    else
      kernels::serial::material_values(f.mesh, f.young, f.ke, values);
    benchmark::DoNotOptimize(values.data());
  }
  state.SetItemsProcessed(state.iterations() * f.mesh.num_elements());
}

}  // namespace

BENCHMARK(BM_ElementEnergies<false>)->Name("element_energies/serial");
BENCHMARK(BM_ElementEnergies<true>)->Name("element_energies/parallel");
BENCHMARK(BM_FilterApply<false>)->Name("filter_apply/serial");
BENCHMARK(BM_FilterApply<true>)->Name("filter_apply/parallel");
BENCHMARK(BM_CircleMask<false>)->Name("circle_mask/serial");
BENCHMARK(BM_CircleMask<true>)->Name("circle_mask/parallel");
BENCHMARK(BM_MaterialValues<false>)->Name("material_values/serial");
BENCHMARK(BM_MaterialValues<true>)->Name("material_values/parallel");

BENCHMARK_MAIN();
