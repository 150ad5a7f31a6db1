// Serial reference against the OpenMP kernels: Jacobi triple sweeps and
// per-entry matrix composition. Results are compared before timing.

#include "pvad/dirac.hpp"
#include "pvad/model.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

#include <cstdio>
#include <cstdlib>

using namespace pvad;

namespace {

struct Data {
    ModelFile mf = load_model("sl3min", 8);
    const PVAStructure& h1 = mf.structure("H1");
    DiracResult d = dirac_reduce(h1, mf.constraint("phi"), 8);
    PVAStructure h1d = reduced_structure(d, "H1D", 8);
    MatrixOp h1n = h1d.normal(10);
};

const Data& data() {
    static const Data d;
    return d;
}

void same_verdicts(const JacobiReport& a, const JacobiReport& b, const char* what) {
    bool ok = a.pass == b.pass && a.triples.size() == b.triples.size();
    for (std::size_t i = 0; ok && i < a.triples.size(); ++i) ok = a.triples[i].pass == b.triples[i].pass;
    if (!ok) {
        std::fprintf(stderr, "serial and parallel %s disagree\n", what);
        std::exit(1);
    }
}

void BM_JacobiH1(benchmark::State& st) {
    bool par = st.range(0);
    for (auto _ : st) benchmark::DoNotOptimize(check_jacobi(data().h1, 6, 6, par));
    st.SetLabel(par ? "openmp" : "serial");
}

void BM_JacobiH1D(benchmark::State& st) {
    bool par = st.range(0);
    int k = static_cast<int>(st.range(1));
    for (auto _ : st) benchmark::DoNotOptimize(check_jacobi(data().h1d, k, k, par));
    st.SetLabel(par ? "openmp" : "serial");
}

void BM_ComposeH1D(benchmark::State& st) {
    bool par = st.range(0);
    int k = static_cast<int>(st.range(1));
    const MatrixOp& m = data().h1n;
    for (auto _ : st) benchmark::DoNotOptimize(compose(m, m, k, par));
    st.SetLabel(par ? "openmp" : "serial");
}

BENCHMARK(BM_JacobiH1)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_JacobiH1D)->Args({0, 4})->Args({1, 4})->Args({0, 6})->Args({1, 6})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ComposeH1D)->Args({0, 8})->Args({1, 8})->Args({0, 12})->Args({1, 12})->Unit(benchmark::kMillisecond);

} // namespace

int main(int argc, char** argv) {
    std::printf("omp threads: %d\n", omp_get_max_threads());
    const Data& d = data();
    same_verdicts(check_jacobi(d.h1, 6, 6, false), check_jacobi(d.h1, 6, 6, true), "H1 sweeps");
    same_verdicts(check_jacobi(d.h1d, 4, 4, false), check_jacobi(d.h1d, 4, 4, true), "H1D sweeps");
    if (!(compose(d.h1n, d.h1n, 8, false) == compose(d.h1n, d.h1n, 8, true))) {
        std::fprintf(stderr, "serial and parallel composition disagree\n");
        return 1;
    }
    benchmark::Initialize(&argc, argv);
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
