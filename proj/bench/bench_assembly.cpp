#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "thetaconf/confsym.hpp"
#include "thetaconf/parallel.hpp"
#include "thetaconf/varprin.hpp"

using namespace thetaconf;

namespace {

struct Problem {
    TriMesh mesh;
    std::vector<TriangleFrame> frames;
    OmegaField field;
};

Problem make_problem(int n) {
    Problem p{gen_lattice(LatticeSpec::from_angles(1.0, 1.1, n, n)), {}, {}};
    p.frames = make_frames(p.mesh);
    p.field = OmegaField::zeros(p.mesh);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> d(-0.05, 0.05);
    for (int e : p.field.free_edges()) p.field.value[e] = d(rng);
    return p;
}

constexpr double kTheta = 0.7;

void BM_serial(benchmark::State& s) {
    Problem p = make_problem(static_cast<int>(s.range(0)));
    for (auto _ : s) benchmark::DoNotOptimize(serial::assemble(p.mesh, p.frames, p.field, kTheta));
    s.counters["triangles"] = static_cast<double>(p.mesh.triangles.size());
}

void BM_parallel(benchmark::State& s) {
    Problem p = make_problem(static_cast<int>(s.range(0)));
    for (auto _ : s) benchmark::DoNotOptimize(assemble(p.mesh, p.frames, p.field, kTheta));
    s.counters["triangles"] = static_cast<double>(p.mesh.triangles.size());
    s.counters["threads"] = thread_limit();
}

} // namespace

BENCHMARK(BM_serial)->Arg(16)->Arg(48)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_parallel)->Arg(16)->Arg(48)->Arg(128)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
    apply_thread_env();
    benchmark::Initialize(&argc, argv);
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
