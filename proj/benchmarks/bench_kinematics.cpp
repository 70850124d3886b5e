#include <benchmark/benchmark.h>

#include "modkin/hybrid_kin.hpp"
#include "modkin/mobility.hpp"
#include "modkin/module_kin.hpp"
#include "modkin/parallel_kin.hpp"

using namespace modkin;

namespace {

const ActuatorPair kPair{deg_to_rad(22.0), deg_to_rad(23.0)};

HybridGeometry stack(std::size_t modules) {
  HybridGeometry g;
  g.modules.assign(modules, ModuleGeometry{});
  return g;
}

void BM_ModuleFk(benchmark::State& state) {
  const ModuleGeometry g;
  for (auto _ : state) benchmark::DoNotOptimize(module_fk(kPair.theta_r1, kPair.theta_r2, g));
}
BENCHMARK(BM_ModuleFk);

void BM_ModuleIk(benchmark::State& state) {
  const ModuleGeometry g;
  const Vec2 tip = module_fk(kPair.theta_r1, kPair.theta_r2, g).tip;
  for (auto _ : state) benchmark::DoNotOptimize(module_ik(tip, g));
}
BENCHMARK(BM_ModuleIk);

void BM_Hybrid4Fk(benchmark::State& state) {
  const HybridGeometry g = stack(2);
  const ActuatorPair act[] = {kPair, kPair};
  for (auto _ : state) benchmark::DoNotOptimize(hybrid_actuators_fk(act, g));
}
BENCHMARK(BM_Hybrid4Fk);

void BM_Hybrid4Ik(benchmark::State& state) {
  const HybridGeometry g = stack(2);
  const ActuatorPair act[] = {kPair, kPair};
  const HomTransform pose = hybrid_actuators_fk(act, g);
  for (auto _ : state) benchmark::DoNotOptimize(hybrid_actuators_ik(pose, std::nullopt, g));
}
BENCHMARK(BM_Hybrid4Ik);

void BM_Hybrid6Ik(benchmark::State& state) {
  const HybridGeometry g = stack(3);
  const SerialJoints6 j{0.4, 150.0, 0.7, 160.0, -0.3, 140.0};
  const HomTransform pose = fk_rprprp(j, g);
  for (auto _ : state) benchmark::DoNotOptimize(ik_rprprp(pose, j.d6, g));
}
BENCHMARK(BM_Hybrid6Ik);

void BM_ParallelIk(benchmark::State& state) {
  const ParallelGeometry g = ParallelGeometry::symmetric(200.0, 150.0);
  const PlatformPose home = nominal_home_pose(g);
  for (auto _ : state) benchmark::DoNotOptimize(parallel_ik(home, g));
}
BENCHMARK(BM_ParallelIk);

void BM_ParallelFkAllModes(benchmark::State& state) {
  const ParallelGeometry g = ParallelGeometry::symmetric(200.0, 150.0);
  const auto limbs = parallel_ik(nominal_home_pose(g), g);
  const std::array<double, 3> q_bar{limbs[0].q_bar + 5.0, limbs[1].q_bar - 3.0, limbs[2].q_bar};
  for (auto _ : state) benchmark::DoNotOptimize(parallel_fk(q_bar, std::nullopt, g));
}
BENCHMARK(BM_ParallelFkAllModes)->Unit(benchmark::kMillisecond);

void BM_ParallelFkWithAngles(benchmark::State& state) {
  const ParallelGeometry g = ParallelGeometry::symmetric(200.0, 150.0);
  const auto limbs = parallel_ik(nominal_home_pose(g), g);
  const std::array<double, 3> q{limbs[0].q, limbs[1].q, limbs[2].q};
  const std::array<double, 3> q_bar{limbs[0].q_bar, limbs[1].q_bar, limbs[2].q_bar};
  for (auto _ : state) benchmark::DoNotOptimize(parallel_fk(q_bar, q, g));
}
BENCHMARK(BM_ParallelFkWithAngles)->Unit(benchmark::kMillisecond);

void BM_MechanismDof(benchmark::State& state) {
  const Topology t = shipped_topology("parallel");
  for (auto _ : state) benchmark::DoNotOptimize(mechanism_dof(t));
}
BENCHMARK(BM_MechanismDof);

}  // namespace

BENCHMARK_MAIN();
