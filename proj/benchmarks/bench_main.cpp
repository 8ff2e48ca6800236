#include <benchmark/benchmark.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "speechlabel/alignment.hpp"
#include "speechlabel/dataset.hpp"
#include "speechlabel/matcher.hpp"
#include "speechlabel/metrics.hpp"

using namespace speechlabel;

namespace {

void BM_SegmentRecording(benchmark::State& state) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 60.0);
  std::vector<double> clicks(static_cast<std::size_t>(state.range(0)));
  for (auto& c : clicks) c = u(gen);
  std::sort(clicks.begin(), clicks.end());
  for (auto _ : state) benchmark::DoNotOptimize(segment_recording(clicks, 60.0, 0.5));
}
BENCHMARK(BM_SegmentRecording)->Arg(5)->Arg(20)->Arg(200);

struct MatcherSetup {
  std::vector<std::string> names;
  EmbeddingTable table{16};

  explicit MatcherSetup(std::size_t n) {
    std::mt19937_64 gen(2);
    std::normal_distribution<double> normal;
    for (std::size_t i = 0; i < n; ++i) {
      names.push_back("class" + std::to_string(i));
      std::vector<float> v(16);
      for (auto& x : v) x = static_cast<float>(normal(gen));
      table.add(names.back(), v);
    }
    std::vector<float> v(16);
    for (auto& x : v) x = static_cast<float>(normal(gen));
    table.add("unknownword", v);
  }
};

void BM_ResolveFallback(benchmark::State& state) {
  const MatcherSetup setup(static_cast<std::size_t>(state.range(0)));
  const auto vocab = Vocabulary::from_names("bench", setup.names);
  const LabelMatcher matcher(vocab, setup.table);
  TranscriptionResult r;
  r.alternatives = {{"unknownword", 1, std::nullopt}, {"unknownword unknownword", 2, std::nullopt}, {"zzz", 3, std::nullopt}};
  for (auto _ : state) benchmark::DoNotOptimize(matcher.resolve(r));
}
BENCHMARK(BM_ResolveFallback)->Arg(80)->Arg(200);

void BM_ResolveExact(benchmark::State& state) {
  const MatcherSetup setup(200);
  const auto vocab = Vocabulary::from_names("bench", setup.names);
  const LabelMatcher matcher(vocab, setup.table);
  TranscriptionResult r;
  r.alternatives = {{"Class17", 1, std::nullopt}};
  for (auto _ : state) benchmark::DoNotOptimize(matcher.resolve(r));
}
BENCHMARK(BM_ResolveExact);

void BM_PointInPolygon(benchmark::State& state) {
  Polygon poly;
  const auto n = static_cast<std::size_t>(state.range(0));
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 6.283185307179586 * static_cast<double>(i) / static_cast<double>(n);
    const double r = i % 2 ? 80.0 : 100.0;
    poly.push_back({200.0 + r * std::cos(a), 200.0 + r * std::sin(a)});
  }
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(50.0, 350.0);
  std::vector<Point> probes(1024);
  for (auto& p : probes) p = {u(gen), u(gen)};
  std::size_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(point_in_polygon(poly, probes[k++ % probes.size()]));
}
BENCHMARK(BM_PointInPolygon)->Arg(8)->Arg(64)->Arg(512);

void BM_Spearman(benchmark::State& state) {
  std::mt19937_64 gen(4);
  std::vector<double> x(static_cast<std::size_t>(state.range(0)));
  std::vector<double> y(x.size());
  for (auto& v : x) v = static_cast<double>(gen() % 50);
  for (auto& v : y) v = static_cast<double>(gen() % 50);
  for (auto _ : state) benchmark::DoNotOptimize(spearman_rank_correlation(x, y));
}
BENCHMARK(BM_Spearman)->Arg(100)->Arg(10000);

}  // namespace
BENCHMARK_MAIN();
