// benchmarks/sga_bench.cpp

#include <fstream>
#include <random>
#include <sstream>

#include <benchmark/benchmark.h>

#include "sga/decode.hpp"
#include "sga/scoring.hpp"
#include "sga/simulate.hpp"
#include "sga/variants.hpp"

namespace {

using namespace sga;

TaggedParagraph fixture(const char *name) {
  std::ifstream in(std::string(SGA_FIXTURE_DIR) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_tagged_or_throw(ss.str());
}

TokenList random_tokens(std::mt19937_64 &rng, std::size_t n) {
  TokenList out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::string(1, static_cast<char>('a' + rng() % 8)));
  return out;
}

void BM_Align(benchmark::State &state) {
  std::mt19937_64 rng(1);
  auto n = static_cast<std::size_t>(state.range(0));
  auto ref = random_tokens(rng, n), hyp = random_tokens(rng, n);
  for (auto _ : state) benchmark::DoNotOptimize(align(ref, hyp));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Align)->RangeMultiplier(2)->Range(16, 512)->Complexity();

void BM_GScore(benchmark::State &state) {
  auto p = fixture("poetry.txt");
  auto forms = render_gold(p);
  auto reading = simulate_reading(p, 0.7, 5).transcript;
  for (auto _ : state) benchmark::DoNotOptimize(g_score(reading, forms));
}
BENCHMARK(BM_GScore);

void BM_TrainClm(benchmark::State &state) {
  auto corpus = variant_corpus(fixture("poetry.txt"));
  auto order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(NGramLM::train(corpus, order));
}
BENCHMARK(BM_TrainClm)->DenseRange(1, 4);

void BM_ConstrainedDecode(benchmark::State &state) {
  auto p = fixture(state.range(0) ? "walk_script.txt" : "poetry.txt");
  auto lats = paragraph_lattices(p);
  auto lm = NGramLM::train(variant_corpus(p), 3);
  ChannelConfig noise;
  noise.p_sub = noise.p_del = noise.p_ins = 0.05;
  auto heard = simulate_asr(simulate_reading(p, 0.7, 9).transcript, p, noise, 9);
  for (auto _ : state)
    benchmark::DoNotOptimize(constrained_decode(heard, lats, &lm, FusionConfig{}, ChannelConfig{}));
}
BENCHMARK(BM_ConstrainedDecode)->Arg(0)->Arg(1);

void BM_SimulateCohort(benchmark::State &state) {
  auto p = fixture("poetry.txt");
  for (auto _ : state) benchmark::DoNotOptimize(simulate_cohort(p, CohortSimulation{}));
}
BENCHMARK(BM_SimulateCohort)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
