// Copyright 2026 The wmchsh Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wmchsh/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "wmchsh/error.hpp"

namespace wmchsh::io {

using Json = nlohmann::ordered_json;

std::string format_double(double value) {
    if (value == 0.0) {
        return "0";
    }
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return {buf.data(), res.ptr};
}

namespace {

std::string dump(const Json &j) { return j.dump(2) + "\n"; }

Json optional_value(const std::optional<double> &v) { return v ? Json(*v) : Json(nullptr); }

Json table_entries(const WeakJointTable &table) {
    Json out = Json::array();
    for (const auto &e : table.entries()) {
        Json row;
        row["x"] = e.x;
        row["z"] = e.z;
        if (table.mode() == WeakJointTable::Mode::TwoSided) {
            row["p"] = e.p;
            row["q"] = e.q;
        } else {
            row["b"] = e.p;
        }
        row["value"] = optional_value(e.value);
        out.push_back(row);
    }
    return out;
}

Json table_object(const WeakJointTable &table) {
    Json j;
    if (table.mode() == WeakJointTable::Mode::TwoSided) {
        j["mode"] = "two_sided";
    } else {
        j["mode"] = "one_sided";
        j["setting"] = to_string(table.setting());
    }
    j["entries"] = table_entries(table);
    return j;
}

Json matrix_json(const ComplexMatrix &m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.dim(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.dim(); ++j) {
            row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
        }
        rows.push_back(row);
    }
    return rows;
}

Json outcome_json(const ChshOutcome &o) {
    return Json{{"p_plus", o.p_plus}, {"p_minus", o.p_minus}, {"chsh", o.chsh_value}};
}

std::vector<std::string> split(const std::string &line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

void strip_cr(std::string &line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
}

std::string where(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

template <typename T> T parse_number(const std::string &text, std::size_t line_no, const char *what) {
    T value{};
    const auto *end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, value);
    if (text.empty() || res.ec != std::errc() || res.ptr != end) {
        throw ValidationError(where(line_no) + "bad " + what + " '" + text + "'");
    }
    return value;
}

void expect_header(std::istream &in, const std::string &header) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ValidationError("empty file, expected header '" + header + "'");
    }
    strip_cr(line);
    if (line != header) {
        throw ValidationError("line 1: expected header '" + header + "', got '" + line + "'");
    }
}

// Config helpers. Every section is an object whose keys must be known.

void check_keys(const Json &obj, const std::string &section, std::initializer_list<const char *> known) {
    if (!obj.is_object()) {
        throw ValidationError("config: '" + section + "' must be an object");
    }
    const std::set<std::string> allowed(known.begin(), known.end());
    for (const auto &[key, value] : obj.items()) {
        if (allowed.count(key) == 0) {
            throw ValidationError("config: unknown key '" + section + "." + key + "'");
        }
    }
}

void read_double(const Json &obj, const char *key, double &target, const std::string &section) {
    if (!obj.contains(key)) {
        return;
    }
    const Json &v = obj.at(key);
    if (!v.is_number()) {
        throw ValidationError("config: '" + section + "." + key + "' must be a number");
    }
    target = v.get<double>();
}

template <typename T> void read_integer(const Json &obj, const char *key, T &target, const std::string &section) {
    if (!obj.contains(key)) {
        return;
    }
    const Json &v = obj.at(key);
    if (!v.is_number_integer() || (std::is_unsigned_v<T> && v.is_number_integer() && !v.is_number_unsigned())) {
        throw ValidationError("config: '" + section + "." + key + "' must be a non-negative integer");
    }
    target = v.get<T>();
}

} // namespace

std::string table_csv(const WeakJointTable &table) {
    std::ostringstream out;
    out << "x,z,p,q,value\n";
    const bool two = table.mode() == WeakJointTable::Mode::TwoSided;
    const bool is_p = table.setting() == BobSetting::P;
    for (const auto &e : table.entries()) {
        out << e.x << ',' << e.z << ',';
        if (two) {
            out << e.p << ',' << e.q;
        } else if (is_p) {
            out << e.p << ',';
        } else {
            out << ',' << e.p;
        }
        out << ',' << (e.value ? format_double(*e.value) : "undefined") << '\n';
    }
    return out.str();
}

std::string table_json(const WeakJointTable &table) { return dump(table_object(table)); }

std::string transient_json(const TransientMatrix &transient) {
    Json j;
    j["selection_prob"] = transient.selection_prob;
    j["min_eigenvalue"] = hermitian_eigenvalues(transient.matrix).front();
    j["negativity"] = negativity(transient);
    j["matrix"] = matrix_json(transient.matrix);
    return dump(j);
}

std::string density_csv(const SpatialDensity &density, const std::vector<double> &positions) {
    std::ostringstream out;
    out << "r,x,bob_outcome,density\n";
    for (double r : positions) {
        for (int x : kOutcomes) {
            for (int b : kOutcomes) {
                out << format_double(r) << ',' << x << ',' << b << ',' << format_double(density(r, x, b)) << '\n';
            }
        }
    }
    return out.str();
}

void write_counts_csv(std::ostream &out, const std::vector<CountRecord> &records) {
    out << kCountsHeader << '\n';
    for (const auto &r : records) {
        out << r.condition << ',' << format_double(r.slit_position) << ',' << r.repeat << ',' << r.coincidences
            << ',' << r.accidentals << '\n';
    }
}

std::vector<CountRecord> read_counts_csv(std::istream &in) {
    expect_header(in, kCountsHeader);
    std::vector<CountRecord> out;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 5) {
            throw ValidationError(where(line_no) + "expected 5 fields");
        }
        CountRecord r;
        r.condition = f[0];
        (void)parse_condition(r.condition);
        r.slit_position = parse_number<double>(f[1], line_no, "slit position");
        r.repeat = parse_number<int>(f[2], line_no, "repeat");
        r.coincidences = parse_number<std::int64_t>(f[3], line_no, "coincidence count");
        r.accidentals = parse_number<std::int64_t>(f[4], line_no, "accidental count");
        if (r.repeat < 0 || r.coincidences < 0 || r.accidentals < 0) {
            throw ValidationError(where(line_no) + "negative value");
        }
        out.push_back(std::move(r));
    }
    if (out.empty()) {
        throw ValidationError("counts file has no records");
    }
    return out;
}

void write_tomography_csv(std::ostream &out, const std::vector<TomographyCount> &counts) {
    out << kTomographyHeader << '\n';
    for (const auto &c : counts) {
        out << c.setting << ',' << c.counts << '\n';
    }
}

std::vector<TomographyCount> read_tomography_csv(std::istream &in) {
    expect_header(in, kTomographyHeader);
    std::vector<TomographyCount> out;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 2 || f[0].size() != 2) {
            throw ValidationError(where(line_no) + "expected setting,counts");
        }
        for (char c : f[0]) {
            (void)polarization_projector(c);
        }
        const auto n = parse_number<std::int64_t>(f[1], line_no, "count");
        if (n < 0) {
            throw ValidationError(where(line_no) + "negative count");
        }
        out.push_back({f[0], n});
    }
    return out;
}

void RunConfig::validate() const {
    source.validate();
    scan.validate();
    pointer.validate();
    tomography.validate();
    if (threads < 1) {
        throw ValidationError("threads must be at least 1");
    }
}

RunConfig parse_config(const std::string &json_text) {
    Json j;
    try {
        j = Json::parse(json_text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(j, "config", {"source", "scan", "pointer", "tomography", "weak_basis", "seed", "threads"});
    RunConfig cfg;
    if (j.contains("source")) {
        const Json &s = j["source"];
        check_keys(s, "source", {"theta", "phi", "werner_v", "pair_rate"});
        read_double(s, "theta", cfg.source.theta, "source");
        read_double(s, "phi", cfg.source.phi, "source");
        read_double(s, "werner_v", cfg.source.werner_v, "source");
        read_double(s, "pair_rate", cfg.source.pair_rate, "source");
    }
    if (j.contains("scan")) {
        const Json &s = j["scan"];
        check_keys(s, "scan",
                   {"slit_width", "step", "range", "dwell", "repeats", "coincidence_window", "pump_period",
                    "accidental_rate"});
        read_double(s, "slit_width", cfg.scan.slit_width, "scan");
        read_double(s, "step", cfg.scan.step, "scan");
        read_double(s, "range", cfg.scan.range, "scan");
        read_double(s, "dwell", cfg.scan.dwell, "scan");
        read_integer(s, "repeats", cfg.scan.repeats, "scan");
        read_double(s, "coincidence_window", cfg.scan.coincidence_window, "scan");
        read_double(s, "pump_period", cfg.scan.pump_period, "scan");
        read_double(s, "accidental_rate", cfg.scan.accidental_rate, "scan");
    }
    if (j.contains("pointer")) {
        const Json &s = j["pointer"];
        check_keys(s, "pointer", {"r_H", "r_V", "sigma"});
        read_double(s, "r_H", cfg.pointer.r_H, "pointer");
        read_double(s, "r_V", cfg.pointer.r_V, "pointer");
        read_double(s, "sigma", cfg.pointer.sigma, "pointer");
    }
    if (j.contains("tomography")) {
        const Json &s = j["tomography"];
        check_keys(s, "tomography", {"pairs_per_setting", "overcomplete"});
        read_double(s, "pairs_per_setting", cfg.tomography.pairs_per_setting, "tomography");
        if (s.contains("overcomplete")) {
            if (!s["overcomplete"].is_boolean()) {
                throw ValidationError("config: 'tomography.overcomplete' must be a boolean");
            }
            cfg.tomography.overcomplete = s["overcomplete"].get<bool>();
        }
    }
    if (j.contains("weak_basis")) {
        if (!j["weak_basis"].is_string()) {
            throw ValidationError("config: 'weak_basis' must be \"Z\" or \"X\"");
        }
        cfg.weak_basis = parse_weak_basis(j["weak_basis"].get<std::string>());
    }
    read_integer(j, "seed", cfg.seed, "config");
    read_integer(j, "threads", cfg.threads, "config");
    cfg.validate();
    return cfg;
}

std::string config_json(const RunConfig &c) {
    Json j;
    j["source"] = {{"theta", c.source.theta},
                   {"phi", c.source.phi},
                   {"werner_v", c.source.werner_v},
                   {"pair_rate", c.source.pair_rate}};
    j["scan"] = {{"slit_width", c.scan.slit_width},
                 {"step", c.scan.step},
                 {"range", c.scan.range},
                 {"dwell", c.scan.dwell},
                 {"repeats", c.scan.repeats},
                 {"coincidence_window", c.scan.coincidence_window},
                 {"pump_period", c.scan.pump_period},
                 {"accidental_rate", c.scan.accidental_rate}};
    j["pointer"] = {{"r_H", c.pointer.r_H}, {"r_V", c.pointer.r_V}, {"sigma", c.pointer.sigma}};
    j["tomography"] = {{"pairs_per_setting", c.tomography.pairs_per_setting},
                       {"overcomplete", c.tomography.overcomplete}};
    j["weak_basis"] = to_string(c.weak_basis);
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    return dump(j);
}

DensityMatrix parse_density_json(const std::string &json_text) {
    Json j;
    try {
        j = Json::parse(json_text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ValidationError(std::string("state file is not valid JSON: ") + e.what());
    }
    check_keys(j, "state", {"re", "im"});
    if (!j.contains("re")) {
        throw ValidationError("state file needs an \"re\" array");
    }
    ComplexMatrix m(4);
    auto fill = [&](const char *key, bool imag) {
        const Json &rows = j[key];
        if (!rows.is_array() || rows.size() != 4) {
            throw ValidationError(std::string("state.") + key + " must be a 4x4 array");
        }
        for (std::size_t r = 0; r < 4; ++r) {
            if (!rows[r].is_array() || rows[r].size() != 4) {
                throw ValidationError(std::string("state.") + key + " must be a 4x4 array");
            }
            for (std::size_t c = 0; c < 4; ++c) {
                if (!rows[r][c].is_number()) {
                    throw ValidationError(std::string("state.") + key + " entries must be numbers");
                }
                const double v = rows[r][c].get<double>();
                m(r, c) += imag ? Complex(0.0, v) : Complex(v, 0.0);
            }
        }
    };
    fill("re", false);
    if (j.contains("im")) {
        fill("im", true);
    }
    return DensityMatrix(m, kReconstructionTol);
}

std::string density_json(const DensityMatrix &rho) {
    Json re = Json::array();
    Json im = Json::array();
    for (std::size_t i = 0; i < rho.dim(); ++i) {
        Json rr = Json::array();
        Json ii = Json::array();
        for (std::size_t k = 0; k < rho.dim(); ++k) {
            rr.push_back(rho.matrix()(i, k).real());
            ii.push_back(rho.matrix()(i, k).imag());
        }
        re.push_back(rr);
        im.push_back(ii);
    }
    return dump(Json{{"re", re}, {"im", im}});
}

namespace {

Json fit_json(const CentroidFit &f) {
    return Json{{"center", f.center},         {"uncertainty", f.uncertainty}, {"width", f.width},
                {"amplitude", f.amplitude},   {"residual", f.residual},       {"iterations", f.iterations}};
}

Json estimated_table(const WeakJointTable &value, const Uncertainty &err, BobSetting s) {
    const WeakJointTable &e = s == BobSetting::P ? err.p_table : err.q_table;
    Json rows = Json::array();
    for (const auto &entry : value.entries()) {
        rows.push_back(Json{{"x", entry.x},
                            {"z", entry.z},
                            {"b", entry.p},
                            {"value", optional_value(entry.value)},
                            {"error", e.value(entry.x, entry.z, entry.p)}});
    }
    return rows;
}

Json quantity(double value, const AnalysisResult &r, double Uncertainty::*field) {
    return Json{{"value", value},
                {"error", r.total_se.*field},
                {"repeat_se", r.repeat_se.*field},
                {"poisson_se", r.poisson_se.*field},
                {"centroid_se", r.centroid_se.*field}};
}

} // namespace

std::string analysis_json(const AnalysisResult &r) {
    Json j;
    j["weak_basis"] = to_string(r.estimate.basis);
    j["repeats"] = r.repeats;
    j["centroids"] = {{"r_H", fit_json(r.centroids.h)},
                      {"r_V", fit_json(r.centroids.v)},
                      {"delta_r", r.centroids.v.center - r.centroids.h.center}};
    j["totals"] = {{"P", r.estimate.total_p}, {"Q", r.estimate.total_q}};
    j["tables"] = {{"P", estimated_table(r.estimate.p_table, r.total_se, BobSetting::P)},
                   {"Q", estimated_table(r.estimate.q_table, r.total_se, BobSetting::Q)}};
    j["p_plus"] = quantity(r.estimate.chsh.p_plus, r, &Uncertainty::p_plus);
    j["p_minus"] = quantity(r.estimate.chsh.p_minus, r, &Uncertainty::p_minus);
    j["chsh"] = quantity(r.estimate.chsh.chsh_value, r, &Uncertainty::chsh);
    j["warnings"] = r.warnings;
    return dump(j);
}

std::string tomography_json(const TomographyResult &r) {
    Json j;
    j["rho"] = Json::parse(density_json(r.rho));
    j["physical"] = r.physical;
    j["min_eigenvalue"] = r.min_eigenvalue;
    j["tangle"] = optional_value(r.tangle);
    j["tangle_se"] = r.tangle_se;
    j["fidelity_singlet"] = r.fidelity;
    j["fidelity_se"] = r.fidelity_se;
    j["predicted"] = outcome_json(r.predicted);
    j["predicted_se"] = {{"p_plus", r.p_plus_se}, {"p_minus", r.p_minus_se}, {"chsh", r.chsh_se}};
    j["bootstrap_samples"] = r.bootstrap_samples;
    return dump(j);
}

std::string sweep_csv(const std::vector<SweepRow> &rows) {
    std::ostringstream out;
    out << "tangle,p_plus,p_plus_err,p_minus,p_minus_err,chsh,chsh_err,analytic_p_plus,analytic_p_minus,"
           "analytic_chsh\n";
    for (const auto &r : rows) {
        out << format_double(r.tangle) << ',' << format_double(r.estimate.p_plus) << ','
            << format_double(r.error.p_plus) << ',' << format_double(r.estimate.p_minus) << ','
            << format_double(r.error.p_minus) << ',' << format_double(r.estimate.chsh_value) << ','
            << format_double(r.error.chsh) << ',' << format_double(r.analytic.p_plus) << ','
            << format_double(r.analytic.p_minus) << ',' << format_double(r.analytic.chsh_value) << '\n';
    }
    return out.str();
}

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << content;
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

} // namespace wmchsh::io
