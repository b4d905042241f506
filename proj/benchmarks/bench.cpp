#include <random>

#include <benchmark/benchmark.h>

#include "trackcoh/cohomology.hpp"

using namespace tc;

namespace {

void BM_Smith(benchmark::State& st)
{
    std::mt19937 rng(1);
    std::uniform_int_distribution<int> entry(-9, 9);
    auto n = std::size_t(st.range(0));
    IntMatrix a = zero_matrix(n, n);
    for (auto& r : a)
        for (auto& v : r)
            v = entry(rng);
    for (auto _ : st)
        benchmark::DoNotOptimize(smith_normal_form(a));
}
BENCHMARK(BM_Smith)->Arg(6)->Arg(12)->Arg(24);

// level sizes grow roughly 20x per level at bound 2
void BM_TowerLevels(benchmark::State& st)
{
    auto x = track_T1();
    for (auto _ : st) {
        Tower t(x, int(st.range(0)));
        t.enumerate(int(st.range(1)));
        benchmark::DoNotOptimize(t.count(int(st.range(1))));
    }
}
BENCHMARK(BM_TowerLevels)->Args({1, 3})->Args({2, 2})->Args({2, 3})->Unit(benchmark::kMillisecond);

void BM_CohomologyT1(benchmark::State& st)
{
    auto x = track_T1();
    auto method = st.range(0) ? Method::Prime : Method::Integer;
    for (auto _ : st) {
        Tower t(x, 1);
        CochainModel cm(t, CochainKind::Alg, 3);
        auto c = normalize(cm);
        benchmark::DoNotOptimize(cohomology_all(c, {2}, 2, method));
    }
}
BENCHMARK(BM_CohomologyT1)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Reduction(benchmark::State& st)
{
    Tower t(track_FAT2(), 1);
    CochainModel cm(t, CochainKind::Mid, 3);
    auto c = normalize(cm);
    for (auto _ : st)
        benchmark::DoNotOptimize(ReducedComplex(c, st.range(0), false));
}
BENCHMARK(BM_Reduction)->Arg(0)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_Les(benchmark::State& st)
{
    auto x = st.range(0) ? track_FAT2() : track_T1();
    for (auto _ : st) {
        Tower t(x, 1);
        benchmark::DoNotOptimize(les(t, 2, 3));
    }
}
BENCHMARK(BM_Les)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
