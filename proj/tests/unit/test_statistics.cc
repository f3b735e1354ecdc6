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

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracle.h"
#include "unravel/error.h"
#include "unravel/statistics.h"

using namespace unravel;

namespace {

ProtocolSpec spec_1q(Unraveling u) {
    ProtocolSpec s;
    s.omega = 4;
    s.delta = 2;
    s.t1 = 2;
    s.t2 = 4;
    s.t_grid = oracle::uniform_grid(5.0);
    s.unraveling = u;
    s.shots_per_time = 1000;
    s.seed = 5;
    return s;
}

ProtocolSpec spec_2q(Unraveling u) {
    ProtocolSpec s = spec_1q(u);
    s.n_qubits = 2;
    s.omega = 10;
    s.delta = 1;
    s.coupling_j = -0.5;
    s.t1 = 0.6;
    s.t2 = 1.4;
    s.t_grid = oracle::uniform_grid(2.5);
    s.shots_per_time = 2000;
    return s;
}

ConditionalEstimate est(double w, double e) {
    ConditionalEstimate c;
    c.weight = w;
    c.value = e;
    return c;
}

Branch counted(std::vector<std::uint64_t> counts) {
    Branch b;
    b.counts = std::move(counts);
    b.weight = 1;
    return b;
}

double scalar_e(const CountTable &c) {
    double n0 = static_cast<double>(c[0][0]);
    double n1 = static_cast<double>(c[0][1]);
    return (n1 - n0) / (n0 + n1);
}

}  // namespace

TEST(Statistics, ConditionalEstimateFromCounts) {
    EXPECT_DOUBLE_EQ(conditional_estimate(counted({100, 0}), 1, EnsembleMode::Sampled).value, -1.0);
    EXPECT_DOUBLE_EQ(conditional_estimate(counted({37, 37}), 1, EnsembleMode::Sampled).value, 0.0);
    EXPECT_EQ(*conditional_estimate(counted({37, 37}), 1, EnsembleMode::Sampled).n_shots, 74u);
    // two qubits: qubit-1 marginal, outcomes 10 and 11 count as b1 = 1
    EXPECT_DOUBLE_EQ(conditional_estimate(counted({1, 2, 3, 4}), 2, EnsembleMode::Sampled).value, (7.0 - 3.0) / 10.0);
    EXPECT_THROW(conditional_estimate(counted({0, 0}), 1, EnsembleMode::Sampled), EmptyBranchError);
    Branch undefined;
    EXPECT_THROW(conditional_estimate(undefined, 1, EnsembleMode::Exact), UndefinedBranchError);
}

TEST(Statistics, ExactEstimateFollowsRabiFormula) {
    auto s = spec_1q(Unraveling::Projective);
    for (double t : {0.0, 0.3, 1.1, 1.9}) {
        auto ens = enumerate_branches(s, t);
        double e = conditional_estimate(ens.branches[0], 1, EnsembleMode::Exact).value;
        EXPECT_NEAR(e, 1.6 * std::pow(std::sin(std::sqrt(5.0) * t), 2) - 1, 1e-12);
    }
}

TEST(Statistics, MeanAndVarianceBasics) {
    std::vector<ConditionalEstimate> one{est(1, -1)};
    EXPECT_DOUBLE_EQ(ensemble_mean(one), -1.0);
    EXPECT_DOUBLE_EQ(trajectory_variance(one), 0.0);
    std::vector<ConditionalEstimate> two{est(0.5, 1), est(0.5, -1)};
    EXPECT_DOUBLE_EQ(ensemble_mean(two), 0.0);
    EXPECT_DOUBLE_EQ(trajectory_variance(two), 1.0);
    std::vector<ConditionalEstimate> bad{est(0.5, 1), est(0.4, -1)};
    EXPECT_THROW(ensemble_mean(bad), NormalizationError);
}

TEST(Statistics, LinearBlindnessAndVarianceSensitivity) {
    for (auto make : {spec_1q, spec_2q}) {
        auto sp = make(Unraveling::Projective);
        auto sk = make(Unraveling::Kick);
        double max_gap = 0;
        for (double t : sp.t_grid) {
            auto ep = enumerate_branches(sp, t);
            auto ek = enumerate_branches(sk, t);
            auto xp = estimate_branches(ep);
            auto xk = estimate_branches(ek);
            double mp = ensemble_mean(xp);
            EXPECT_NEAR(mp, ensemble_mean(xk), 1e-12);
            EXPECT_NEAR(mp, expval(measured_observable(sp.n_qubits), ensemble_average_state(ep)), 1e-12);
            EXPECT_GE(trajectory_variance(xp), -1e-12);
            EXPECT_GE(trajectory_variance(xk), -1e-12);
            auto ap = entropy_of_average(ep);
            auto ak = entropy_of_average(ek);
            EXPECT_NEAR(ap.full, ak.full, 1e-12);
            EXPECT_NEAR(ap.reduced, ak.reduced, 1e-12);
            if (t > sp.t1) {
                max_gap = std::max(max_gap, std::abs(trajectory_variance(xp) - trajectory_variance(xk)));
            }
        }
        EXPECT_GT(max_gap, 1e-11);
    }
}

TEST(Statistics, VarianceAtFinalTimeMatchesOracle) {
    auto rp = oracle::stats(oracle::one_qubit_reference(), false, 5.0);
    auto rk = oracle::stats(oracle::one_qubit_reference(), true, 5.0);
    double vp = trajectory_variance(estimate_branches(enumerate_branches(spec_1q(Unraveling::Projective), 5.0)));
    double vk = trajectory_variance(estimate_branches(enumerate_branches(spec_1q(Unraveling::Kick), 5.0)));
    EXPECT_NEAR(vp, rp.var, 1e-11);
    EXPECT_NEAR(vk, rk.var, 1e-11);
    EXPECT_GT(std::abs(vp - vk), 1e-3);
}

TEST(Statistics, TrajectoryAveragedEntropy) {
    for (auto u : {Unraveling::Projective, Unraveling::Kick}) {
        auto s = spec_1q(u);
        for (double t : s.t_grid) {
            EXPECT_EQ(traj_avg_entropy(enumerate_branches(s, t)), 0.0);
        }
    }
    auto product = spec_2q(Unraveling::Projective);
    product.omega = 0;
    EXPECT_NEAR(traj_avg_entropy(enumerate_branches(product, 2.5)), 0.0, 1e-12);

    auto ep = enumerate_branches(spec_2q(Unraveling::Projective), 2.5);
    auto ek = enumerate_branches(spec_2q(Unraveling::Kick), 2.5);
    double sp = traj_avg_entropy(ep);
    double sk = traj_avg_entropy(ek);
    EXPECT_GT(std::abs(sp - sk), 1e-6);
    EXPECT_LE(sp, entropy_of_average(ep).reduced + 1e-10);
    EXPECT_LE(sk, entropy_of_average(ek).reduced + 1e-10);
}

TEST(Statistics, EntropyOfAverage) {
    auto s = spec_1q(Unraveling::Projective);
    EXPECT_NEAR(entropy_of_average(enumerate_branches(s, 0.0)).full, 0.0, 1e-12);
    double pe = oracle::rabi_excited_population(4, 2, 2);
    auto above = entropy_of_average(enumerate_branches(s, 2.0 + 1e-12));
    EXPECT_NEAR(above.full, oracle::binary_entropy(pe), 1e-9);
    EXPECT_DOUBLE_EQ(above.full, above.reduced);
}

TEST(Statistics, ConcavityGapOnRandomProtocols) {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int trial = 0; trial < 20; trial++) {
        auto s = spec_2q(trial % 2 ? Unraveling::Kick : Unraveling::Projective);
        s.omega = u(rng);
        s.delta = u(rng);
        s.coupling_j = u(rng);
        for (double t : {0.3, 0.9, 1.7, 2.5}) {
            auto ens = enumerate_branches(s, t);
            EXPECT_GE(entropy_of_average(ens).reduced, traj_avg_entropy(ens) - 1e-10);
        }
    }
}

TEST(Statistics, SemiExperimentalEntropy) {
    auto ideal = enumerate_branches(spec_2q(Unraveling::Projective), 2.0);
    std::vector<BranchWeight> exact;
    for (const auto &b : ideal.branches) {
        exact.push_back({b.label, b.weight});
    }
    auto semi = semi_experimental_entropy(exact, ideal);
    auto avg = entropy_of_average(ideal);
    EXPECT_NEAR(semi.of_average_full, avg.full, 1e-12);
    EXPECT_NEAR(semi.of_average_reduced, avg.reduced, 1e-12);
    EXPECT_NEAR(semi.traj_avg, traj_avg_entropy(ideal), 1e-12);

    std::size_t pick = 5;
    std::vector<BranchWeight> one{{ideal.branches[pick].label, 3.0}};
    auto single = semi_experimental_entropy(one, ideal);
    EXPECT_NEAR(single.of_average_full, 0.0, 1e-10);
    double s_pick = vn_entropy(conditional_reduced_state(ideal.branches[pick]));
    EXPECT_NEAR(single.of_average_reduced, s_pick, 1e-10);
    EXPECT_NEAR(single.traj_avg, s_pick, 1e-10);

    std::vector<BranchWeight> wrong{{RecordLabel{{"Z", "Z"}}, 1.0}};
    EXPECT_THROW(semi_experimental_entropy(wrong, ideal), SchemaError);
}

TEST(Statistics, SemiExperimentalConvergesAtLargeShots) {
    auto s = spec_1q(Unraveling::Projective);
    s.shots_per_time = 1000000;
    const std::size_t i = 40;  // t = 4, two interventions
    auto ideal = enumerate_branches(s, s.t_grid[i]);
    auto counts = count_table(sample_shots(s, i));
    auto point = sampled_statistics(ideal, counts, nullptr, true).semi->of_average_full;
    BootstrapOptions opt;
    opt.n_resamples = 200;
    opt.seed = 3;
    opt.scheme = ResampleScheme::Pooled;
    ScalarEstimator f = [&](const CountTable &c) {
        return sampled_statistics(ideal, c, nullptr, true).semi->of_average_full;
    };
    auto ci = bootstrap_ci(counts, f, opt);
    double exact = entropy_of_average(ideal).full;
    EXPECT_LE(std::abs(point - exact), 3 * std::max(ci.half_width(), 1e-6));
}

TEST(Statistics, NearestRankPercentile) {
    std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    EXPECT_EQ(nearest_rank_percentile(v, 16), 2);
    EXPECT_EQ(nearest_rank_percentile(v, 84), 9);
    EXPECT_EQ(nearest_rank_percentile(v, 50), 5);
    EXPECT_EQ(nearest_rank_percentile(v, 100), 10);
    EXPECT_THROW(nearest_rank_percentile(std::vector<double>{}, 50), SampleSizeError);
    EXPECT_THROW(nearest_rank_percentile(v, 0), ParameterError);
}

TEST(Statistics, BootstrapBasics) {
    BootstrapOptions opt;
    opt.seed = 17;
    CountTable all_zero{{1000, 0}};
    auto flat = bootstrap_ci(all_zero, ScalarEstimator(scalar_e), opt);
    EXPECT_EQ(flat.lo, -1.0);
    EXPECT_EQ(flat.hi, -1.0);

    CountTable half{{500, 500}};
    auto a = bootstrap_ci(half, ScalarEstimator(scalar_e), opt);
    auto b = bootstrap_ci(half, ScalarEstimator(scalar_e), opt);
    EXPECT_EQ(a.lo, b.lo);
    EXPECT_EQ(a.hi, b.hi);
    EXPECT_NEAR(a.hi - a.lo, 0.063, 0.3 * 0.063);
    EXPECT_TRUE(a.contains(0.0));

    opt.n_resamples = 50;
    EXPECT_THROW(bootstrap_ci(half, ScalarEstimator(scalar_e), opt), ParameterError);
}

TEST(Statistics, BootstrapDiscardsFailuresAndLimitsThem) {
    BootstrapOptions opt;
    opt.seed = 2;
    CountTable c{{500, 500}};
    int calls = 0;
    ScalarEstimator sometimes = [&](const CountTable &t) {
        if (++calls % 50 == 0) {
            throw NumericalError("synthetic");
        }
        return scalar_e(t);
    };
    EXPECT_NO_THROW(bootstrap_ci(c, sometimes, opt));
    ScalarEstimator often = [&](const CountTable &t) {
        if (++calls % 5 == 0) {
            throw NumericalError("synthetic");
        }
        return scalar_e(t);
    };
    EXPECT_THROW(bootstrap_ci(c, often, opt), BootstrapError);
}

TEST(Statistics, BootstrapIntervalContainsMedian) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; trial++) {
        std::uniform_int_distribution<std::uint64_t> d(0, 1000);
        CountTable c{{d(rng), d(rng)}, {d(rng) + 1, d(rng)}};
        BootstrapOptions opt;
        opt.seed = static_cast<std::uint64_t>(trial);
        opt.scheme = trial % 2 ? ResampleScheme::Pooled : ResampleScheme::WithinGroup;
        std::vector<double> seen;
        VectorEstimator f = [&](const CountTable &t) {
            double n = 0;
            double ones = 0;
            for (const auto &g : t) {
                n += static_cast<double>(g[0] + g[1]);
                ones += static_cast<double>(g[1]);
            }
            return std::vector<double>{ones / n};
        };
        auto ci = bootstrap_ci(c, f, opt);
        // recompute the resample distribution through a recording estimator
        VectorEstimator rec = [&](const CountTable &t) {
            auto v = f(t);
            seen.push_back(v[0]);
            return v;
        };
        bootstrap_ci(c, rec, opt);
        std::sort(seen.begin(), seen.end());
        double median = nearest_rank_percentile(seen, 50);
        EXPECT_TRUE(ci[0].contains(median));
    }
}

TEST(Statistics, WithinGroupKeepsGroupSizes) {
    CountTable c{{300, 200}, {10, 490}};
    BootstrapOptions opt;
    opt.n_resamples = 100;
    opt.scheme = ResampleScheme::WithinGroup;
    bool pooled_changed = false;
    VectorEstimator check = [&](const CountTable &t) {
        EXPECT_EQ(t[0][0] + t[0][1], 500u);
        EXPECT_EQ(t[1][0] + t[1][1], 500u);
        return std::vector<double>{0.0};
    };
    bootstrap_ci(c, check, opt);
    opt.scheme = ResampleScheme::Pooled;
    VectorEstimator pooled = [&](const CountTable &t) {
        EXPECT_EQ(t[0][0] + t[0][1] + t[1][0] + t[1][1], 1000u);
        pooled_changed = pooled_changed || t[0][0] + t[0][1] != 500u;
        return std::vector<double>{0.0};
    };
    bootstrap_ci(c, pooled, opt);
    EXPECT_TRUE(pooled_changed);
}

TEST(Statistics, EmptySampledBranchesDroppedAndRenormalized) {
    TrajectoryEnsemble ens;
    ens.mode = EnsembleMode::Sampled;
    ens.unraveling = Unraveling::Kick;
    for (int r = 0; r < 3; r++) {
        Branch b;
        b.label.tokens = {std::to_string(r)};
        b.weight = r == 1 ? 0.0 : 0.5;
        b.counts = r == 1 ? std::vector<std::uint64_t>{0, 0} : std::vector<std::uint64_t>{10, 30};
        ens.branches.push_back(b);
    }
    auto e = estimate_branches(ens, nullptr, false);
    ASSERT_EQ(e.size(), 2u);
    EXPECT_DOUBLE_EQ(e[0].weight + e[1].weight, 1.0);
    EXPECT_DOUBLE_EQ(ensemble_mean(e), 0.5);
}
