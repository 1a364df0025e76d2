#include <benchmark/benchmark.h>

#include <fstream>
#include <random>
#include <sstream>

#include "chorrev/explorer.hpp"
#include "chorrev/projection.hpp"
#include "chorrev/session.hpp"

using namespace chorrev;

namespace {

Choreography travel() {
  std::ifstream in(std::string(CHORREV_FIXTURES) + "/travel.rchor");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_choreography(ss.str());
}

void BM_Parse(benchmark::State& state) {
  std::ifstream in(std::string(CHORREV_FIXTURES) + "/travel.rchor");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  for (auto _ : state) benchmark::DoNotOptimize(parse_choreography(text));
}
BENCHMARK(BM_Parse);

void BM_Semantics(benchmark::State& state) {
  auto g = travel();
  for (auto _ : state) benchmark::DoNotOptimize(semantics(g));
}
BENCHMARK(BM_Semantics);

void BM_Project(benchmark::State& state) {
  auto g = travel();
  for (auto _ : state) benchmark::DoNotOptimize(project_system(g));
}
BENCHMARK(BM_Project);

// Causal graph of a configuration after a random run of the given length.
void BM_CausalGraph(benchmark::State& state) {
  auto g = travel();
  Session s(g);
  std::mt19937_64 rng(7);
  s.run_random(static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(CausalGraph(s.config().channels, s.context()));
  std::size_t logs = 0;
  for (const auto& [c, st] : s.config().channels) logs += st.consumed.size() + st.pending.size();
  state.counters["logs"] = static_cast<double>(logs);
}
BENCHMARK(BM_CausalGraph)->Arg(10)->Arg(40)->Arg(100);

void BM_RandomRun(benchmark::State& state) {
  auto g = travel();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Session s(g);
    std::mt19937_64 rng(seed++);
    benchmark::DoNotOptimize(s.run_random(100, rng));
  }
}
BENCHMARK(BM_RandomRun)->Unit(benchmark::kMillisecond);

void BM_Explore(benchmark::State& state) {
  auto g = travel();
  System s = project_system(g);
  CausalContext ctx(g);
  ExploreOptions opts;
  opts.bound = {400, static_cast<int>(state.range(0))};
  opts.reversals = true;
  std::size_t n = 0;
  for (auto _ : state) n = reachable(s, &ctx, opts).size();
  state.counters["configs"] = static_cast<double>(n);
}
BENCHMARK(BM_Explore)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
