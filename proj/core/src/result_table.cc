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
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "unravel/error.h"
#include "unravel/experiment.h"

namespace unravel {

void sort_rows(std::vector<ResultRow> &rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const ResultRow &a, const ResultRow &b) {
        return std::tie(a.quantity, a.unraveling, a.time, a.mode) < std::tie(b.quantity, b.unraveling, b.time, b.mode);
    });
}

std::string format_double(double v) {
    if (v == 0) {
        return "0";
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string rows_to_csv(const std::vector<ResultRow> &rows) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto &r : rows) {
        out += format_double(r.time);
        out += ',';
        out += r.protocol;
        out += ',';
        out += r.unraveling;
        out += ',';
        out += r.mode;
        out += ',';
        out += r.quantity;
        out += ',';
        out += format_double(r.value);
        out += ',';
        if (r.ci_lo) {
            out += format_double(*r.ci_lo);
        }
        out += ',';
        if (r.ci_hi) {
            out += format_double(*r.ci_hi);
        }
        out += ',';
        out += std::to_string(r.shots);
        out += ',';
        out += std::to_string(r.seed);
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_double(std::string_view s, std::size_t line_no) {
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw SchemaError("csv line " + std::to_string(line_no) + ": bad number '" + std::string(s) + "'");
    }
    return v;
}

std::uint64_t parse_u64(std::string_view s, std::size_t line_no) {
    std::uint64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw SchemaError("csv line " + std::to_string(line_no) + ": bad integer '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

std::vector<ResultRow> parse_csv(std::string_view text) {
    std::vector<ResultRow> rows;
    std::size_t line_no = 0;
    bool header_seen = false;
    for (auto line : split(text, '\n')) {
        line_no++;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            continue;
        }
        if (!header_seen) {
            if (line != kCsvHeader) {
                throw SchemaError("csv: unexpected header '" + std::string(line) + "'");
            }
            header_seen = true;
            continue;
        }
        auto f = split(line, ',');
        if (f.size() != 10) {
            throw SchemaError("csv line " + std::to_string(line_no) + ": expected 10 fields");
        }
        ResultRow r;
        r.time = parse_double(f[0], line_no);
        r.protocol = f[1];
        r.unraveling = f[2];
        r.mode = f[3];
        r.quantity = f[4];
        r.value = parse_double(f[5], line_no);
        if (!f[6].empty()) {
            r.ci_lo = parse_double(f[6], line_no);
        }
        if (!f[7].empty()) {
            r.ci_hi = parse_double(f[7], line_no);
        }
        r.shots = parse_u64(f[8], line_no);
        r.seed = parse_u64(f[9], line_no);
        rows.push_back(std::move(r));
    }
    if (!header_seen) {
        throw SchemaError("csv: missing header");
    }
    return rows;
}

std::vector<ResultRow> read_csv(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open result table " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_csv(text.str());
}

std::string calibration_to_json(const CalibrationResult &c) {
    auto matrix = [](const AssignmentMatrix &m) {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (Eigen::Index i = 0; i < m.n_outcomes(); i++) {
            nlohmann::ordered_json row = nlohmann::ordered_json::array();
            for (Eigen::Index j = 0; j < m.n_outcomes(); j++) {
                row.push_back(m(i, j));
            }
            rows.push_back(row);
        }
        return rows;
    };
    nlohmann::ordered_json j;
    j["n_qubits"] = c.n_qubits;
    j["shots_per_state"] = c.shots_per_state;
    j["layout"] = "entry [observed][prepared], outcomes ordered 00,01,10,11 with qubit 1 first";
    j["truth"] = matrix(c.truth);
    j["estimate"] = matrix(c.estimate);
    return j.dump(2);
}

std::vector<double> make_grid(double t_final, std::size_t n_points, const std::vector<double> &interventions) {
    if (!std::isfinite(t_final) || !(t_final > 0)) {
        throw ParameterError("make_grid: t_final must be positive");
    }
    if (n_points < 2) {
        throw ParameterError("make_grid: need at least 2 points");
    }
    std::vector<double> grid(n_points);
    const double denom = static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; i++) {
        grid[i] = t_final * static_cast<double>(i) / denom;
    }
    for (double t : interventions) {
        if (!(t > 0) || t > t_final) {
            continue;
        }
        auto it = std::min_element(grid.begin(), grid.end(),
                                   [t](double a, double b) { return std::abs(a - t) < std::abs(b - t); });
        if (std::abs(*it - t) <= 1e-9) {
            *it = t;
        } else {
            grid.insert(std::upper_bound(grid.begin(), grid.end(), t), t);
        }
    }
    return grid;
}

GridSet default_grids() {
    return {make_grid(5.0, 51, {2.0, 4.0}), make_grid(2.5, 51, {0.6, 1.4})};
}

ToleranceSpec ToleranceSpec::parse(std::string_view spec) {
    ToleranceSpec out;
    if (spec.empty()) {
        return out;
    }
    for (auto item : split(spec, ',')) {
        auto eq = item.find('=');
        if (eq == std::string_view::npos || eq == 0) {
            throw ParameterError("tolerance spec: expected name=value, got '" + std::string(item) + "'");
        }
        auto name = item.substr(0, eq);
        auto text = item.substr(eq + 1);
        double v = 0;
        auto res = std::from_chars(text.data(), text.data() + text.size(), v);
        if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !(v >= 0)) {
            throw ParameterError("tolerance spec: bad value '" + std::string(text) + "'");
        }
        if (name == "*") {
            out.fallback = v;
        } else if (name == "coverage") {
            out.coverage = v;
        } else if (name == "coverage3") {
            out.coverage3 = v;
        } else {
            out.per_quantity[std::string(name)] = v;
        }
    }
    return out;
}

namespace {

const std::string &column(const ResultRow &r, const std::string &name) {
    if (name == "protocol") {
        return r.protocol;
    }
    if (name == "unraveling") {
        return r.unraveling;
    }
    if (name == "mode") {
        return r.mode;
    }
    if (name == "quantity") {
        return r.quantity;
    }
    throw ParameterError("compare: cannot filter on column '" + name + "'");
}

std::vector<const ResultRow *> filtered(const std::vector<ResultRow> &rows,
                                        const std::map<std::string, std::string> &filter) {
    std::vector<const ResultRow *> out;
    for (const auto &r : rows) {
        bool keep = true;
        for (const auto &[col, value] : filter) {
            keep = keep && column(r, col) == value;
        }
        if (keep) {
            out.push_back(&r);
        }
    }
    return out;
}

std::string row_key(const ResultRow &r, const std::vector<std::string> &ignore) {
    auto ignored = [&](const char *c) { return std::find(ignore.begin(), ignore.end(), c) != ignore.end(); };
    std::string key = r.quantity;
    if (!ignored("time")) {
        key += "|t=" + format_double(r.time);
    }
    for (const char *c : {"protocol", "unraveling", "mode"}) {
        if (!ignored(c)) {
            key += "|" + column(r, c);
        }
    }
    return key;
}

}  // namespace

CompareReport compare(const std::vector<ResultRow> &a, const std::vector<ResultRow> &b, const CompareOptions &opt) {
    for (const auto &c : opt.ignore) {
        if (c != "time" && c != "protocol" && c != "unraveling" && c != "mode") {
            throw ParameterError("compare: cannot ignore column '" + c + "'");
        }
    }
    auto rows_a = filtered(a, opt.filter_a);
    auto rows_b = filtered(b, opt.filter_b);
    std::map<std::string, const ResultRow *> index_b;
    for (const auto *r : rows_b) {
        if (!index_b.emplace(row_key(*r, opt.ignore), r).second) {
            throw SchemaError("compare: duplicate key " + row_key(*r, opt.ignore) + " in table B");
        }
    }
    std::map<std::string, QuantityReport> per;
    std::set<std::string> seen_a;
    for (const auto *ra : rows_a) {
        auto key = row_key(*ra, opt.ignore);
        if (!seen_a.insert(key).second) {
            throw SchemaError("compare: duplicate key " + key + " in table A");
        }
        auto it = index_b.find(key);
        if (it == index_b.end()) {
            throw SchemaError("compare: key " + key + " missing from table B");
        }
        const ResultRow &rb = *it->second;
        auto &q = per[ra->quantity];
        q.quantity = ra->quantity;
        q.n_rows++;
        q.max_abs_deviation = std::max(q.max_abs_deviation, std::abs(ra->value - rb.value));
        const ResultRow *with_ci = ra->ci_lo && ra->ci_hi ? ra : (rb.ci_lo && rb.ci_hi ? &rb : nullptr);
        if (with_ci != nullptr) {
            const ResultRow &other = with_ci == ra ? rb : *ra;
            q.n_with_ci++;
            if (*with_ci->ci_lo <= other.value && other.value <= *with_ci->ci_hi) {
                q.n_in_ci++;
            }
            double half = 0.5 * (*with_ci->ci_hi - *with_ci->ci_lo);
            if (std::abs(other.value - with_ci->value) <= 3.0 * half) {
                q.n_in_3ci++;
            }
        }
    }
    if (seen_a.size() != index_b.size()) {
        throw SchemaError("compare: table B has " + std::to_string(index_b.size() - seen_a.size()) +
                          " rows without a partner in table A");
    }

    CompareReport report;
    for (auto &[name, q] : per) {
        auto tol = opt.tolerance.per_quantity.find(name);
        if (tol != opt.tolerance.per_quantity.end()) {
            q.tolerance = tol->second;
        } else {
            q.tolerance = opt.tolerance.fallback;
        }
        if (q.tolerance && q.max_abs_deviation > *q.tolerance) {
            q.pass = false;
        }
        if (q.n_with_ci > 0) {
            double n = static_cast<double>(q.n_with_ci);
            if (opt.tolerance.coverage && static_cast<double>(q.n_in_ci) / n < *opt.tolerance.coverage) {
                q.pass = false;
            }
            if (opt.tolerance.coverage3 && static_cast<double>(q.n_in_3ci) / n < *opt.tolerance.coverage3) {
                q.pass = false;
            }
        }
        report.pass = report.pass && q.pass;
        report.quantities.push_back(q);
    }
    return report;
}

std::string CompareReport::to_text() const {
    std::ostringstream out;
    for (const auto &q : quantities) {
        out << q.quantity << ": rows=" << q.n_rows << " max_abs_dev=" << format_double(q.max_abs_deviation);
        if (q.tolerance) {
            out << " tol=" << format_double(*q.tolerance);
        }
        if (q.n_with_ci > 0) {
            out << " in_ci=" << q.n_in_ci << "/" << q.n_with_ci << " in_3ci=" << q.n_in_3ci << "/" << q.n_with_ci;
        }
        out << (q.pass ? " PASS" : " FAIL") << '\n';
    }
    out << "overall: " << (pass ? "PASS" : "FAIL") << '\n';
    return out.str();
}

}  // namespace unravel
