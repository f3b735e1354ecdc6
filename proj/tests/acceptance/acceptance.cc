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

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits non-zero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "unravel/continuous_rf.h"
#include "unravel/experiment.h"
#include "unravel/protocol.h"
#include "unravel/qmat.h"
#include "unravel/readout.h"
#include "unravel/rng.h"
#include "unravel/statistics.h"

namespace {

using namespace unravel;

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char *format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

// Fixture rows keyed by (unraveling, time index).
struct FixtureRow {
    double time = 0;
    double mu = 0;
    double var_traj = 0;
    double s_avg_state = 0;
    double s_avg_reduced = 0;
    double s_traj_avg = 0;
};

std::map<std::string, std::vector<FixtureRow>> load_fixture(const std::string &name) {
    std::ifstream in(std::string(UNRAVEL_FIXTURE_DIR) + "/" + name);
    if (!in) {
        throw std::runtime_error("cannot open fixture " + name);
    }
    std::map<std::string, std::vector<FixtureRow>> out;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        if (cells.size() != 7) {
            throw std::runtime_error("malformed fixture line in " + name);
        }
        FixtureRow r{std::stod(cells[0]), std::stod(cells[2]), std::stod(cells[3]),
                     std::stod(cells[4]), std::stod(cells[5]), std::stod(cells[6])};
        out[cells[1]].push_back(r);
    }
    return out;
}

ExperimentConfig load(const std::string &name) {
    return load_config(std::string(UNRAVEL_CONFIG_DIR) + "/" + name);
}

// Rows indexed by (unraveling, mode, quantity) in time order.
using Series = std::map<std::tuple<std::string, std::string, std::string>, std::vector<ResultRow>>;

Series index_rows(const std::vector<ResultRow> &rows) {
    Series s;
    for (const auto &r : rows) {
        s[{r.unraveling, r.mode, r.quantity}].push_back(r);
    }
    for (auto &[key, v] : s) {
        std::sort(v.begin(), v.end(), [](const ResultRow &a, const ResultRow &b) { return a.time < b.time; });
    }
    return s;
}

const std::vector<ResultRow> &series(const Series &s, const std::string &u, const std::string &mode,
                                     const std::string &q) {
    auto it = s.find({u, mode, q});
    if (it == s.end()) {
        throw std::runtime_error("missing rows for " + u + "/" + mode + "/" + q);
    }
    return it->second;
}

struct DiscreteRuns {
    ExperimentConfig config;
    Series rows;
    double exact_seconds = 0;
};

// Exact and sampled runs are kept separate so the exact timing is meaningful.
DiscreteRuns run_discrete(const std::string &name) {
    DiscreteRuns d;
    d.config = load(name);
    ExperimentConfig exact = d.config;
    exact.mode = ModeSelection::Exact;
    auto start = Clock::now();
    auto exact_out = run(exact);
    d.exact_seconds = seconds_since(start);
    ExperimentConfig sampled = d.config;
    sampled.mode = ModeSelection::Sampled;
    auto sampled_out = run(sampled);
    auto rows = exact_out.rows;
    rows.insert(rows.end(), sampled_out.rows.begin(), sampled_out.rows.end());
    d.rows = index_rows(rows);
    return d;
}

DensityMatrix random_density(Eigen::Index dim, std::mt19937_64 &gen) {
    std::normal_distribution<double> n01;
    Matrix g(dim, dim);
    for (Eigen::Index i = 0; i < dim; i++) {
        for (Eigen::Index j = 0; j < dim; j++) {
            g(i, j) = Complex(n01(gen), n01(gen));
        }
    }
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

Outcome channel_equality() {
    std::mt19937_64 gen(7301);
    double worst = 0;
    auto start = Clock::now();
    for (Eigen::Index dim : {2, 4}) {
        for (int i = 0; i < 1000; i++) {
            DensityMatrix rho = random_density(dim, gen);
            Matrix diff = dephase_projective(rho).matrix() - dephase_kick(rho).matrix();
            worst = std::max(worst, diff.cwiseAbs().maxCoeff());
        }
    }
    double secs = seconds_since(start);
    return {worst < 1e-13 && secs < 1.0,
            fmt("max |M_proj - M_kick| = %.3g over 2000 states in dims 2 and 4 (< 1e-13); %.3f s (< 1 s)", worst,
                secs)};
}

Outcome linear_blindness(const DiscreteRuns &one, const DiscreteRuns &two) {
    double worst = 0;
    std::size_t points = 0;
    bool all_grids = true;
    for (const auto *d : {&one, &two}) {
        const auto &p = series(d->rows, "projective", "exact", "mu");
        const auto &k = series(d->rows, "kick", "exact", "mu");
        all_grids = all_grids && p.size() == 51 && k.size() == 51;
        for (std::size_t i = 0; i < std::min(p.size(), k.size()); i++) {
            worst = std::max(worst, std::abs(p[i].value - k[i].value));
            points++;
        }
    }
    double secs = one.exact_seconds + two.exact_seconds;
    return {all_grids && worst <= 1e-12 && secs < 5.0,
            fmt("max |mu_proj - mu_kick| = %.3g at %zu grid times (<= 1e-12); exact runs %.2f s (< 5 s)", worst,
                points, secs)};
}

struct Coverage {
    std::size_t n = 0;
    std::size_t in_ci = 0;
    std::size_t in_3ci = 0;
};

Coverage coverage(const std::vector<ResultRow> &sampled, const std::vector<FixtureRow> &exact,
                  double FixtureRow::*field) {
    Coverage c;
    for (std::size_t i = 0; i < std::min(sampled.size(), exact.size()); i++) {
        const auto &r = sampled[i];
        if (!r.ci_lo || !r.ci_hi || std::abs(r.time - exact[i].time) > 1e-12) {
            throw std::runtime_error("sampled rows lack intervals or misalign with the fixture");
        }
        double truth = exact[i].*field;
        double half = 0.5 * (*r.ci_hi - *r.ci_lo);
        c.n++;
        c.in_ci += (*r.ci_lo <= truth && truth <= *r.ci_hi) ? 1 : 0;
        c.in_3ci += std::abs(truth - r.value) <= 3 * half ? 1 : 0;
    }
    return c;
}

Outcome variance_separation(const DiscreteRuns &one, const DiscreteRuns &two) {
    bool pass = true;
    std::string detail;
    const std::pair<const DiscreteRuns *, const char *> sets[] = {{&one, "exact_1q.csv"}, {&two, "exact_2q.csv"}};
    for (const auto &[d, file] : sets) {
        auto fx = load_fixture(file);
        const auto &fp = fx.at("projective");
        const auto &fk = fx.at("kick");
        double sep = 0;
        for (std::size_t i = 0; i < std::min(fp.size(), fk.size()); i++) {
            sep = std::max(sep, std::abs(fp[i].var_traj - fk[i].var_traj));
        }
        double engine_dev = 0;
        for (const char *u : {"projective", "kick"}) {
            const auto &rows = series(d->rows, u, "exact", "var_traj");
            const auto &ref = fx.at(u);
            for (std::size_t i = 0; i < std::min(rows.size(), ref.size()); i++) {
                engine_dev = std::max(engine_dev, std::abs(rows[i].value - ref[i].var_traj));
            }
        }
        pass = pass && sep > 0.01 && engine_dev < 1e-10;
        detail += fmt("%dq: max |dVar| = %.4f (> 0.01), engine vs fixture %.2g; ", d->config.qubits(), sep,
                      engine_dev);
        for (const char *u : {"projective", "kick"}) {
            for (const auto &[q, field] : {std::pair{"var_traj", &FixtureRow::var_traj}, std::pair{"mu", &FixtureRow::mu}}) {
                Coverage c = coverage(series(d->rows, u, "sampled", q), fx.at(u), field);
                double f1 = double(c.in_ci) / double(c.n);
                double f3 = double(c.in_3ci) / double(c.n);
                pass = pass && c.n == 51 && f1 >= 0.60 && f3 >= 0.95;
                detail += fmt("%s %s %.2f/%.2f; ", u, q, f1, f3);
            }
        }
    }
    detail += "sampled coverage shown as in-CI/in-3CI (>= 0.60/0.95)";
    return {pass, detail};
}

bool later_than(double t, double t1) {
    return t > t1 + 1e-12;
}

Outcome entropy_hierarchy(const DiscreteRuns &one, const DiscreteRuns &two) {
    bool pass = true;
    std::string detail;

    double worst_gap = 0;
    for (const char *u : {"projective", "kick"}) {
        const auto &red = series(two.rows, u, "exact", "S_avg_reduced");
        const auto &avg = series(two.rows, u, "exact", "S_traj_avg");
        pass = pass && red.size() == 51 && avg.size() == 51;
        for (std::size_t i = 0; i < std::min(red.size(), avg.size()); i++) {
            worst_gap = std::min(worst_gap, red[i].value - avg[i].value);
        }
    }
    pass = pass && worst_gap >= -1e-10;
    detail += fmt("2q min S(rho^(1)) - E_r[S] = %.3g (>= -1e-10); ", worst_gap);

    auto fx2 = load_fixture("exact_2q.csv");
    double curve_gap = 0;
    double engine_dev = 0;
    for (std::size_t i = 0; i < fx2.at("projective").size(); i++) {
        const auto &p = fx2.at("projective")[i];
        const auto &k = fx2.at("kick")[i];
        if (later_than(p.time, two.config.t1)) {
            curve_gap = std::max(curve_gap, std::abs(p.s_traj_avg - k.s_traj_avg));
        }
    }
    for (const char *u : {"projective", "kick"}) {
        const auto &rows = series(two.rows, u, "exact", "S_traj_avg");
        for (std::size_t i = 0; i < rows.size(); i++) {
            engine_dev = std::max(engine_dev, std::abs(rows[i].value - fx2.at(u)[i].s_traj_avg));
        }
    }
    pass = pass && curve_gap > 0.01 && engine_dev < 1e-10;
    detail += fmt("2q max |E_r[S] proj - kick| for t > t1 = %.4f bits (> 0.01); ", curve_gap);

    double max_conditional = 0;
    for (const char *u : {"projective", "kick"}) {
        for (const auto &r : series(one.rows, u, "exact", "S_traj_avg")) {
            max_conditional = std::max(max_conditional, std::abs(r.value));
        }
    }
    auto fx1 = load_fixture("exact_1q.csv");
    double max_mixed = 0;
    for (const auto &r : fx1.at("projective")) {
        if (later_than(r.time, one.config.t1)) {
            max_mixed = std::max(max_mixed, r.s_avg_state);
        }
    }
    double mixed_dev = 0;
    const auto &s_state = series(one.rows, "projective", "exact", "S_avg_state");
    for (std::size_t i = 0; i < s_state.size(); i++) {
        mixed_dev = std::max(mixed_dev, std::abs(s_state[i].value - fx1.at("projective")[i].s_avg_state));
    }
    pass = pass && max_conditional == 0.0 && max_mixed > 0.1 && mixed_dev < 1e-10;
    detail += fmt("1q max |E_r[S]| = %g (== 0), max S(rho) for t > t1 = %.4f bits (> 0.1)", max_conditional,
                  max_mixed);
    return {pass, detail};
}

Outcome readout_round_trip() {
    constexpr std::uint64_t kShots = 100000;
    constexpr std::uint64_t kSeed = 99173;
    auto start = Clock::now();
    std::vector<ReadoutNoiseParams> params(2, ReadoutNoiseParams::from_fidelity(0.995));
    AssignmentMatrix truth = assignment_from_params(params, 2);
    AssignmentMatrix m = calibrate(simulated_basis_measurement(truth, derive_key(kSeed, Stream::Calibration, {})), 4,
                                   kShots);
    const double bound = 5.0 * std::sqrt(1.0 / double(kShots));
    double worst = 0;
    for (std::uint64_t trial = 0; trial < 100; trial++) {
        KeyedRng rng(kSeed, Stream::Shots, {trial});
        std::vector<double> p(4);
        double total = 0;
        for (auto &x : p) {
            x = -std::log(1.0 - rng.uniform());
            total += x;
        }
        for (auto &x : p) {
            x /= total;
        }
        auto true_counts = sample_multinomial(kShots, p, rng);
        auto observed = corrupt_counts(true_counts, truth, derive_key(kSeed, Stream::Readout, {trial}));
        std::vector<double> freq(4);
        for (std::size_t k = 0; k < 4; k++) {
            freq[k] = double(observed[k]) / double(kShots);
        }
        UnfoldResult res = unfold(freq, m);
        for (std::size_t k = 0; k < 4; k++) {
            worst = std::max(worst, std::abs(res.probabilities[Eigen::Index(k)] - p[k]));
        }
    }
    double secs = seconds_since(start);
    return {worst <= bound && secs < 10.0,
            fmt("F = 0.995, %llu shots, 100 distributions: max |p_hat - p| = %.4g (<= %.4g); %.2f s (< 10 s)",
                static_cast<unsigned long long>(kShots), worst, bound, secs)};
}

Outcome rf_consistency() {
    RFParams params = load("continuous_rf.json").rf_params();
    auto start = Clock::now();
    auto master = me_solve(params);
    auto jumps = jump_ensemble(params, 0);
    auto homodyne = homodyne_ensemble(params, 0);
    double secs = seconds_since(start);

    const std::size_t n_records = master.size();
    bool pass = params.n_traj == 10000 && n_records == 21;
    double worst_z = 0;
    double best_sep = 0;
    for (std::size_t k = 1; k < n_records; k++) {
        double exact = expval(pauli::z(), master[k]);
        RFMoments mj = rf_moments(jumps, k);
        RFMoments mh = rf_moments(homodyne, k);
        worst_z = std::max({worst_z, std::abs(mj.mean - exact) / mj.mean_se, std::abs(mh.mean - exact) / mh.mean_se});
        double band = std::hypot(mj.variance_se, mh.variance_se);
        best_sep = std::max(best_sep, std::abs(mj.variance - mh.variance) / band);
    }
    pass = pass && worst_z <= 3.0 && best_sep > 3.0 && secs < 120.0;
    return {pass, fmt("%zu trajectories, %zu sampled times: max |mean - me_solve| = %.2f SE (<= 3); max |dVar| = "
                      "%.1f combined sigma (> 3); %.1f s (< 120 s)",
                      params.n_traj, n_records - 1, worst_z, best_sep, secs)};
}

Outcome bootstrap_sanity() {
    constexpr std::uint64_t kShots = 1000;
    constexpr std::size_t kReplications = 500;
    constexpr std::uint64_t kSeed = 4242;
    const double p[2] = {0.5, 0.5};
    ScalarEstimator z_mean = [](const CountTable &t) {
        double n = double(t[0][0] + t[0][1]);
        return (double(t[0][1]) - double(t[0][0])) / n;
    };
    std::size_t covered = 0;
    double width_sum = 0;
    for (std::size_t rep = 0; rep < kReplications; rep++) {
        KeyedRng rng(kSeed, Stream::Shots, {rep});
        CountTable table{sample_multinomial(kShots, p, rng)};
        BootstrapOptions opt;
        opt.n_resamples = 1000;
        opt.seed = derive_key(kSeed, Stream::Bootstrap, {rep});
        opt.scheme = ResampleScheme::Pooled;
        Interval ci = bootstrap_ci(table, z_mean, opt);
        covered += ci.contains(0.0) ? 1 : 0;
        width_sum += ci.hi - ci.lo;
    }
    double cov = double(covered) / double(kReplications);
    double width = width_sum / double(kReplications);
    const double predicted = 2.0 / std::sqrt(double(kShots));
    bool pass = cov >= 0.55 && cov <= 0.80 && std::abs(width - predicted) <= 0.3 * predicted;
    return {pass, fmt("coverage %.3f over %zu replications (in [0.55, 0.80]); mean width %.4f vs %.4f (+-30%%)", cov,
                      kReplications, width, predicted)};
}

Outcome determinism() {
    bool pass = true;
    std::string detail;
    auto rf = load("continuous_rf.json");
    rf.n_traj = 200;
    for (auto config : {load("discrete_1q.json"), load("discrete_2q.json"), rf}) {
        std::string reference = rows_to_csv(run(config, 1).rows);
        std::size_t identical = 0;
        for (std::size_t threads : {2, 3, 8}) {
            identical += rows_to_csv(run(config, threads).rows) == reference ? 1 : 0;
        }
        identical += rows_to_csv(run(config, 1).rows) == reference ? 1 : 0;
        pass = pass && identical == 4;
        detail += fmt("%s %zu/4 identical; ", std::string(to_string(config.kind)).c_str(), identical);
    }
    detail += "threads 1, 2, 3, 8 and a repeat at 1";
    return {pass, detail};
}

}  // namespace

int main() {
    struct Criterion {
        const char *name;
        std::function<Outcome()> check;
    };

    DiscreteRuns one;
    DiscreteRuns two;
    bool loaded = false;
    auto discrete = [&]() {
        if (!loaded) {
            one = run_discrete("discrete_1q.json");
            two = run_discrete("discrete_2q.json");
            loaded = true;
        }
    };

    const Criterion criteria[] = {
        {"channel-equality", channel_equality},
        {"linear-blindness", [&] { discrete(); return linear_blindness(one, two); }},
        {"variance-separation", [&] { discrete(); return variance_separation(one, two); }},
        {"entropy-hierarchy", [&] { discrete(); return entropy_hierarchy(one, two); }},
        {"readout-round-trip", readout_round_trip},
        {"rf-consistency", rf_consistency},
        {"bootstrap-sanity", bootstrap_sanity},
        {"determinism", determinism},
    };

    int failures = 0;
    for (const auto &c : criteria) {
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception &e) {
            o = {false, std::string("error: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s %-20s %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", int(std::size(criteria)) - failures, std::size(criteria));
    return failures == 0 ? 0 : 1;
}
