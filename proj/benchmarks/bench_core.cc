// Copyright 2026 The Unravel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <vector>

#include <benchmark/benchmark.h>

#include "unravel/continuous_rf.h"
#include "unravel/protocol.h"
#include "unravel/qmat.h"
#include "unravel/readout.h"
#include "unravel/rng.h"
#include "unravel/statistics.h"
#include "unravel/trajectory.h"

namespace {

using namespace unravel;

ProtocolSpec two_qubit_spec(Unraveling u) {
    ProtocolSpec spec;
    spec.n_qubits = 2;
    spec.omega = 10;
    spec.delta = 1;
    spec.coupling_j = -0.5;
    spec.t1 = 0.6;
    spec.t2 = 1.4;
    spec.t_grid = {0, 2.5};
    spec.unraveling = u;
    spec.shots_per_time = 2000;
    spec.seed = 1;
    return spec;
}

void BM_ExpmHermitian(benchmark::State &state) {
    Matrix h = h_two_qubit(10, 1, -0.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(expm_hermitian(h, 0.37));
    }
}
BENCHMARK(BM_ExpmHermitian);

void BM_EnumerateBranches(benchmark::State &state) {
    ProtocolSpec spec = two_qubit_spec(state.range(0) == 0 ? Unraveling::Projective : Unraveling::Kick);
    for (auto _ : state) {
        benchmark::DoNotOptimize(enumerate_branches(spec, 2.5));
    }
}
BENCHMARK(BM_EnumerateBranches)->Arg(0)->Arg(1);

void BM_SampleShots(benchmark::State &state) {
    ProtocolSpec spec = two_qubit_spec(Unraveling::Projective);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_shots(spec, std::size_t{1}));
    }
}
BENCHMARK(BM_SampleShots);

void BM_Unfold(benchmark::State &state) {
    std::vector<ReadoutNoiseParams> params(2, ReadoutNoiseParams::from_fidelity(0.995));
    AssignmentMatrix m = assignment_from_params(params, 2);
    std::vector<double> freq{0.4, 0.3, 0.2, 0.1};
    for (auto _ : state) {
        benchmark::DoNotOptimize(unfold(freq, m));
    }
}
BENCHMARK(BM_Unfold);

void BM_Bootstrap(benchmark::State &state) {
    KeyedRng rng(3, Stream::Shots, {});
    const double p[2] = {0.5, 0.5};
    CountTable table{sample_multinomial(1000, p, rng)};
    ScalarEstimator est = [](const CountTable &t) { return double(t[0][1]) / double(t[0][0] + t[0][1]); };
    BootstrapOptions opt;
    opt.n_resamples = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(bootstrap_ci(table, est, opt));
    }
}
BENCHMARK(BM_Bootstrap)->Arg(100)->Arg(1000);

void BM_RfTrajectory(benchmark::State &state) {
    RFParams params;
    params.omega = 4;
    params.delta = 2;
    params.dt = 0.002;
    params.t_max = 5;
    params.record_every = 125;
    for (auto _ : state) {
        if (state.range(0) == 0) {
            benchmark::DoNotOptimize(jump_trajectory(params, 11));
        } else {
            benchmark::DoNotOptimize(homodyne_trajectory(params, 11));
        }
    }
}
BENCHMARK(BM_RfTrajectory)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
