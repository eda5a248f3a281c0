#include <benchmark/benchmark.h>

#include <memory>

#include "ecnav/environment.hpp"
#include "ecnav/mapgen.hpp"
#include "ecnav/navplan.hpp"
#include "ecnav/policy.hpp"
#include "ecnav/sim.hpp"

namespace {

using namespace ecnav;

GeneratedMap bench_map(int rooms = 4) {
  MapParams p;
  p.room_number = rooms;
  p.seed = 42;
  return generate_map(p);
}

void BM_GenerateMap(benchmark::State& state) {
  MapParams p;
  p.room_number = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    p.seed = seed++;
    benchmark::DoNotOptimize(generate_map(p));
  }
}
BENCHMARK(BM_GenerateMap)->Arg(1)->Arg(4)->Arg(9)->Unit(benchmark::kMillisecond);

void BM_Raycast(benchmark::State& state) {
  const auto map = bench_map();
  WorldState w;
  w.grid = std::make_shared<const OccupancyGrid>(map.grid);
  w.ego.position = map.graph.rooms.front().center();
  PedParams peds;
  peds.count = static_cast<int>(state.range(0));
  peds.seed = 1;
  w.pedestrians = spawn_pedestrians(*w.grid, peds);
  for (auto _ : state) benchmark::DoNotOptimize(raycast_scan(w, 360, 5.0));
}
BENCHMARK(BM_Raycast)->Arg(0)->Arg(18)->Unit(benchmark::kMicrosecond);

void BM_PlanGlobal(benchmark::State& state) {
  const auto map = bench_map(static_cast<int>(state.range(0)));
  const auto sg = longest_path(map.grid, map.graph, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(plan_global(map.grid, sg.start, sg.goal, 0.2, 0.1));
}
BENCHMARK(BM_PlanGlobal)->Arg(4)->Arg(9)->Unit(benchmark::kMillisecond);

void BM_DetectGaps(benchmark::State& state) {
  const auto map = bench_map();
  WorldState w;
  w.grid = std::make_shared<const OccupancyGrid>(map.grid);
  w.ego.position = map.graph.rooms.front().center();
  const LaserScan scan = raycast_scan(w, 360, 5.0);
  for (auto _ : state) benchmark::DoNotOptimize(detect_gaps(scan, 0.2));
}
BENCHMARK(BM_DetectGaps)->Unit(benchmark::kMicrosecond);

void BM_Episode(benchmark::State& state) {
  EnvLevels levels{};
  levels.fill(static_cast<double>(state.range(0)) / 4.0);
  const EnvConfig env = env_config_from_levels(levels);
  const ScriptedPolicy policy;
  const SimConfig sim;
  std::uint64_t i = 0;
  for (auto _ : state) {
    state.PauseTiming();
    NavTask task = build_task(env, derive_seed(7, "map", i), derive_seed(7, "task", i), 0.3);
    ++i;
    state.ResumeTiming();
    EpisodeOptions o;
    o.keep_trace = false;
    benchmark::DoNotOptimize(run_episode(task.grid, std::move(task.pedestrians), policy, task.start, task.goal, sim, o));
  }
}
BENCHMARK(BM_Episode)->Arg(0)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
