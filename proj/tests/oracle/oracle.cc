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

#include "oracle.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracle {

Mat identity(int n) {
    Mat m(static_cast<std::size_t>(n * n), 0.0);
    for (int i = 0; i < n; i++) {
        m[i * n + i] = 1.0;
    }
    return m;
}

Mat matmul(const Mat &a, const Mat &b, int n) {
    Mat c(static_cast<std::size_t>(n * n), 0.0);
    for (int i = 0; i < n; i++) {
        for (int k = 0; k < n; k++) {
            for (int j = 0; j < n; j++) {
                c[i * n + j] += a[i * n + k] * b[k * n + j];
            }
        }
    }
    return c;
}

Vec apply(const Mat &a, const Vec &v, int n) {
    Vec out(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; i++) {
        for (int k = 0; k < n; k++) {
            out[i] += a[i * n + k] * v[k];
        }
    }
    return out;
}

Mat expm_taylor(const Mat &h, int n, double t) {
    double norm = 0;
    for (const auto &x : h) {
        norm += std::norm(x);
    }
    norm = std::sqrt(norm);
    int steps = std::max(1, static_cast<int>(std::ceil(norm * std::abs(t) / 0.1)));
    double dt = t / steps;
    Mat gen(h.size());
    for (std::size_t i = 0; i < h.size(); i++) {
        gen[i] = C(0, -dt) * h[i];
    }
    Mat step = identity(n);
    Mat term = identity(n);
    for (int k = 1; k <= 30; k++) {
        term = matmul(term, gen, n);
        for (auto &x : term) {
            x /= static_cast<double>(k);
        }
        for (std::size_t i = 0; i < step.size(); i++) {
            step[i] += term[i];
        }
    }
    Mat u = identity(n);
    for (int s = 0; s < steps; s++) {
        u = matmul(u, step, n);
    }
    return u;
}

std::vector<double> hermitian_eigenvalues(const Mat &a, int n) {
    const int m = 2 * n;
    std::vector<double> s(static_cast<std::size_t>(m * m));
    for (int i = 0; i < n; i++) {
        for (int j = 0; j < n; j++) {
            double re = a[i * n + j].real();
            double im = a[i * n + j].imag();
            s[i * m + j] = re;
            s[(i + n) * m + (j + n)] = re;
            s[i * m + (j + n)] = -im;
            s[(i + n) * m + j] = im;
        }
    }
    for (int sweep = 0; sweep < 100; sweep++) {
        double off = 0;
        for (int p = 0; p < m; p++) {
            for (int q = p + 1; q < m; q++) {
                off += s[p * m + q] * s[p * m + q];
            }
        }
        if (off < 1e-30) {
            break;
        }
        for (int p = 0; p < m; p++) {
            for (int q = p + 1; q < m; q++) {
                double apq = s[p * m + q];
                if (std::abs(apq) < 1e-300) {
                    continue;
                }
                double theta = (s[q * m + q] - s[p * m + p]) / (2 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
                double c = 1 / std::sqrt(t * t + 1);
                double sn = t * c;
                for (int k = 0; k < m; k++) {
                    double skp = s[k * m + p];
                    double skq = s[k * m + q];
                    s[k * m + p] = c * skp - sn * skq;
                    s[k * m + q] = sn * skp + c * skq;
                }
                for (int k = 0; k < m; k++) {
                    double spk = s[p * m + k];
                    double sqk = s[q * m + k];
                    s[p * m + k] = c * spk - sn * sqk;
                    s[q * m + k] = sn * spk + c * sqk;
                }
            }
        }
    }
    std::vector<double> all(static_cast<std::size_t>(m));
    for (int i = 0; i < m; i++) {
        all[i] = s[i * m + i];
    }
    std::sort(all.begin(), all.end());
    std::vector<double> out;
    for (int i = 0; i < m; i += 2) {
        out.push_back(0.5 * (all[i] + all[i + 1]));
    }
    return out;
}

double entropy_bits(const Mat &rho, int n) {
    double s = 0;
    for (double lam : hermitian_eigenvalues(rho, n)) {
        if (lam > 1e-15) {
            s -= lam * std::log2(lam);
        }
    }
    return s;
}

double binary_entropy(double p) {
    double s = 0;
    for (double x : {p, 1 - p}) {
        if (x > 0) {
            s -= x * std::log2(x);
        }
    }
    return s;
}

Params one_qubit_reference() {
    return {1, 4.0, 2.0, 0.0, 2.0, 4.0};
}

Params two_qubit_reference() {
    return {2, 10.0, 1.0, -0.5, 0.6, 1.4};
}

Mat hamiltonian(const Params &p) {
    // sigma_z = diag(-1, +1): H_RF = [[delta/2, omega/2], [omega/2, -delta/2]].
    Mat h1 = {p.delta / 2, p.omega / 2, p.omega / 2, -p.delta / 2};
    if (p.n_qubits == 1) {
        return h1;
    }
    Mat h(16, 0.0);
    for (int a = 0; a < 2; a++) {
        for (int b = 0; b < 2; b++) {
            for (int c = 0; c < 2; c++) {
                for (int d = 0; d < 2; d++) {
                    int row = 2 * a + b;
                    int col = 2 * c + d;
                    C v = 0;
                    if (b == d) {
                        v += h1[a * 2 + c];
                    }
                    if (a == c) {
                        v += h1[b * 2 + d];
                    }
                    h[row * 4 + col] += v;
                }
            }
        }
    }
    for (int i = 0; i < 4; i++) {
        double za = (i >> 1) ? 1.0 : -1.0;
        double zb = (i & 1) ? 1.0 : -1.0;
        h[i * 4 + i] += p.j * za * zb;
    }
    return h;
}

namespace {

double norm2(const Vec &v) {
    double s = 0;
    for (const auto &x : v) {
        s += std::norm(x);
    }
    return s;
}

std::string token_name(const Params &p, bool kick, int tok) {
    if (p.n_qubits == 1) {
        return kick ? (tok ? "Z" : "I") : std::to_string(tok);
    }
    return {char('0' + (tok >> 1)), char('0' + (tok & 1))};
}

void branch(const Params &p, bool kick, const std::vector<double> &times, std::size_t k, const Mat &h,
            Record rec, double now, double t_end, std::vector<Record> &out) {
    const int n = 1 << p.n_qubits;
    if (rec.psi.empty()) {
        // zero-probability record: children inherit weight 0
        if (k == times.size()) {
            out.push_back(rec);
            return;
        }
        for (int tok = 0; tok < n; tok++) {
            Record child = rec;
            child.label += token_name(p, kick, tok);
            branch(p, kick, times, k + 1, h, child, now, t_end, out);
        }
        return;
    }
    double next = k < times.size() ? times[k] : t_end;
    rec.psi = apply(expm_taylor(h, n, next - now), rec.psi, n);
    if (k == times.size()) {
        out.push_back(rec);
        return;
    }
    for (int tok = 0; tok < n; tok++) {
        Record child;
        child.label = rec.label + token_name(p, kick, tok);
        if (kick) {
            child.psi = rec.psi;
            // token bits pick sigma_z on (qubit 1, qubit 2); sigma_z|0> = -|0>
            for (int i = 0; i < n; i++) {
                double phase = 1;
                if (p.n_qubits == 1) {
                    if (tok == 1 && i == 0) {
                        phase = -1;
                    }
                } else {
                    if ((tok >> 1) && !(i >> 1)) {
                        phase = -phase;
                    }
                    if ((tok & 1) && !(i & 1)) {
                        phase = -phase;
                    }
                }
                child.psi[i] *= phase;
            }
            child.weight = rec.weight / n;
        } else {
            Vec proj(static_cast<std::size_t>(n), 0.0);
            proj[tok] = rec.psi[tok];
            double prob = norm2(proj);
            child.weight = rec.weight * prob;
            if (prob > 1e-24 && child.weight > 1e-24) {
                for (auto &x : proj) {
                    x /= std::sqrt(prob);
                }
                child.psi = proj;
            } else {
                child.weight = 0;
            }
        }
        branch(p, kick, times, k + 1, h, child, next, t_end, out);
    }
}

double observable(const Vec &psi, int n_qubits) {
    double e = 0;
    for (std::size_t i = 0; i < psi.size(); i++) {
        int b1 = n_qubits == 1 ? static_cast<int>(i) : static_cast<int>(i >> 1);
        e += (b1 ? 1.0 : -1.0) * std::norm(psi[i]);
    }
    return e;
}

Mat reduced_first(const Mat &rho4) {
    Mat r(4, 0.0);
    for (int a = 0; a < 2; a++) {
        for (int b = 0; b < 2; b++) {
            for (int c = 0; c < 2; c++) {
                r[a * 2 + b] += rho4[(2 * a + c) * 4 + (2 * b + c)];
            }
        }
    }
    return r;
}

Mat outer(const Vec &v) {
    const std::size_t n = v.size();
    Mat m(n * n);
    for (std::size_t i = 0; i < n; i++) {
        for (std::size_t j = 0; j < n; j++) {
            m[i * n + j] = v[i] * std::conj(v[j]);
        }
    }
    return m;
}

}  // namespace

std::vector<Record> records(const Params &p, bool kick, double t) {
    std::vector<double> times;
    for (double tk : {p.t1, p.t2}) {
        if (t >= tk) {
            times.push_back(tk);
        }
    }
    Record root;
    root.weight = 1;
    root.psi = Vec(static_cast<std::size_t>(1 << p.n_qubits), 0.0);
    root.psi[0] = 1;
    std::vector<Record> out;
    branch(p, kick, times, 0, hamiltonian(p), root, 0.0, t, out);
    return out;
}

Stats stats(const Params &p, bool kick, double t) {
    const int n = 1 << p.n_qubits;
    auto recs = records(p, kick, t);
    Stats s;
    for (const auto &r : recs) {
        if (!r.psi.empty()) {
            s.mu += r.weight * observable(r.psi, p.n_qubits);
        }
    }
    Mat avg(static_cast<std::size_t>(n * n), 0.0);
    for (const auto &r : recs) {
        if (r.psi.empty()) {
            continue;
        }
        double d = observable(r.psi, p.n_qubits) - s.mu;
        s.var += r.weight * d * d;
        auto rho = outer(r.psi);
        for (std::size_t i = 0; i < avg.size(); i++) {
            avg[i] += r.weight * rho[i];
        }
        if (p.n_qubits == 2) {
            s.s_traj_avg += r.weight * entropy_bits(reduced_first(rho), 2);
        }
    }
    s.s_avg_state = entropy_bits(avg, n);
    s.s_avg_reduced = p.n_qubits == 2 ? entropy_bits(reduced_first(avg), 2) : s.s_avg_state;
    return s;
}

double rabi_excited_population(double omega, double delta, double t) {
    double w = std::sqrt(omega * omega + delta * delta);
    double s = std::sin(w * t / 2);
    return omega * omega / (w * w) * s * s;
}

double bloch_steady_state(double omega, double delta, double gamma) {
    return (omega * omega / 4) / (delta * delta + gamma * gamma / 4 + omega * omega / 2);
}

std::vector<double> uniform_grid(double t_final) {
    std::vector<double> g;
    for (int i = 0; i <= 50; i++) {
        g.push_back(t_final * i / 50.0);
    }
    return g;
}

}  // namespace oracle
