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

#include "wmchsh/cli.hpp"

#include <charconv>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wmchsh/analysis.hpp"
#include "wmchsh/error.hpp"
#include "wmchsh/io.hpp"
#include "wmchsh/transient.hpp"
#include "wmchsh/weak_values.hpp"

namespace wmchsh {

using Json = nlohmann::ordered_json;

namespace {

double parse_real(const std::string &text, const std::string &what) {
    double value = 0.0;
    const auto *end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, value);
    if (text.empty() || res.ec != std::errc() || res.ptr != end) {
        throw ValidationError("bad " + what + " '" + text + "'");
    }
    return value;
}

std::vector<double> parse_list(const std::string &text) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        out.push_back(parse_real(item, "theta"));
    }
    if (out.empty()) {
        throw ValidationError("empty theta list");
    }
    return out;
}

} // namespace

StateSpec parse_state_spec(const std::string &text) {
    StateSpec s;
    if (text == "singlet") {
        return s;
    }
    if (text.rfind("theta=", 0) == 0) {
        s.kind = StateSpec::Kind::Theta;
        const std::string rest = text.substr(6);
        const auto comma = rest.find(',');
        s.theta = parse_real(rest.substr(0, comma), "theta");
        if (comma != std::string::npos) {
            const std::string tail = rest.substr(comma + 1);
            if (tail.rfind("phi=", 0) != 0) {
                throw ValidationError("expected phi=... after theta in '" + text + "'");
            }
            s.phi = parse_real(tail.substr(4), "phi");
        }
        SourceConfig{s.theta, s.phi, 1.0, 0.0}.validate();
        return s;
    }
    if (text.rfind("werner:", 0) == 0 || text.rfind("werner=", 0) == 0) {
        s.kind = StateSpec::Kind::Werner;
        s.werner_v = parse_real(text.substr(7), "werner weight");
        SourceConfig{45.0, 0.0, s.werner_v, 0.0}.validate();
        return s;
    }
    if (std::filesystem::exists(text)) {
        s.kind = StateSpec::Kind::File;
        s.path = text;
        return s;
    }
    throw ValidationError("unknown state '" + text + "' (singlet | theta=DEG[,phi=RAD] | werner:V | file)");
}

DensityMatrix StateSpec::density() const {
    if (kind == Kind::File) {
        return io::parse_density_json(io::read_file(path));
    }
    return delivered_state(apply({}));
}

SourceConfig StateSpec::apply(SourceConfig src) const {
    switch (kind) {
    case Kind::Singlet:
        src.theta = 45.0;
        src.phi = 0.0;
        src.werner_v = 1.0;
        break;
    case Kind::Theta:
        src.theta = theta;
        src.phi = phi;
        src.werner_v = 1.0;
        break;
    case Kind::Werner:
        src.theta = 45.0;
        src.phi = 0.0;
        src.werner_v = werner_v;
        break;
    case Kind::File:
        throw ValidationError("a state file cannot drive the source; use singlet, theta=... or werner:V");
    }
    return src;
}

namespace {

struct Options {
    std::string state = "singlet";
    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> weak_basis;
    std::optional<std::string> bob_setting;
    std::optional<int> repeats;
    std::optional<unsigned> threads;
    std::string format = "json";
    std::string counts_path;
    std::optional<std::string> tomo_counts;
    std::optional<std::string> tomo_counts_out;
    std::string thetas = "45,40,35,30,25,20,15,10,5,0";
    bool weighted = false;
    int bootstrap = 200;
    bool state_given = false;
};

io::RunConfig load_config(const Options &o) {
    io::RunConfig cfg;
    if (o.config_path) {
        cfg = io::parse_config(io::read_file(*o.config_path));
    }
    if (o.seed) {
        cfg.seed = *o.seed;
    }
    if (o.weak_basis) {
        cfg.weak_basis = parse_weak_basis(*o.weak_basis);
    }
    if (o.repeats) {
        cfg.scan.repeats = *o.repeats;
    }
    if (o.threads) {
        cfg.threads = *o.threads;
    }
    if (o.state_given) {
        cfg.source = parse_state_spec(o.state).apply(cfg.source);
    }
    cfg.validate();
    return cfg;
}

MeasurementFrame frame_for(WeakBasis basis) {
    return basis == WeakBasis::Z ? MeasurementFrame::standard() : MeasurementFrame::weak_x();
}

std::string dump(const Json &j) { return j.dump(2) + "\n"; }

/// Writes `content` to --out (plus a metadata sidecar) or to `out`.
void emit(const Options &o, std::ostream &out, const std::string &content, const Json &meta) {
    if (o.out) {
        io::write_file(*o.out, content);
        io::write_file(*o.out + ".meta.json", dump(meta));
    } else {
        out << content;
    }
}

Json base_meta(const std::string &command) {
    Json meta;
    meta["command"] = command;
    meta["version"] = kVersion;
    return meta;
}

Json config_meta(const io::RunConfig &cfg) { return Json::parse(io::config_json(cfg)); }

int cmd_analytic(const Options &o, std::ostream &out) {
    const StateSpec spec = parse_state_spec(o.state);
    const DensityMatrix rho = spec.density();
    const WeakBasis basis = o.weak_basis ? parse_weak_basis(*o.weak_basis) : WeakBasis::Z;
    const MeasurementFrame frame = frame_for(basis);
    const WeakJointTable table = o.bob_setting
                                     ? weak_joint_one_sided(rho, frame, parse_bob_setting(*o.bob_setting))
                                     : weak_joint_table(rho, frame);
    const ChshOutcome outcome = analytic_outcome(rho, frame);

    std::string content;
    if (o.format == "csv") {
        content = io::table_csv(table);
    } else {
        Json j;
        j["state"] = o.state;
        j["weak_basis"] = to_string(basis);
        if (rho.is_physical()) {
            j["tangle"] = tangle(rho);
        } else {
            j["tangle"] = nullptr;
        }
        j["p_plus"] = outcome.p_plus;
        j["p_minus"] = outcome.p_minus;
        j["chsh"] = outcome.chsh_value;
        j["table"] = Json::parse(io::table_json(table));
        content = dump(j);
    }
    Json meta = base_meta("analytic");
    meta["state"] = o.state;
    meta["weak_basis"] = to_string(basis);
    meta["bob_setting"] = o.bob_setting ? Json(*o.bob_setting) : Json(nullptr);
    meta["format"] = o.format;
    emit(o, out, content, meta);
    if (o.out) {
        out << "p_plus " << io::format_double(outcome.p_plus) << "  p_minus " << io::format_double(outcome.p_minus)
            << "  chsh " << io::format_double(outcome.chsh_value) << '\n';
    }
    return kExitOk;
}

int cmd_simulate(const Options &o, std::ostream &out, std::ostream &err) {
    if (!o.out) {
        throw ValidationError("simulate needs --out");
    }
    const io::RunConfig cfg = load_config(o);
    const SimulationResult run =
        simulate_run(cfg.source, cfg.scan, cfg.pointer, cfg.weak_basis, cfg.seed, cfg.threads);
    std::ostringstream csv;
    io::write_counts_csv(csv, run.records);
    for (const auto &w : run.warnings) {
        err << "warning: " << w << '\n';
    }
    Json meta = base_meta("simulate");
    meta["config"] = config_meta(cfg);
    meta["records"] = run.records.size();
    meta["warnings"] = run.warnings;
    emit(o, out, csv.str(), meta);
    out << "wrote " << run.records.size() << " records to " << *o.out << '\n';
    return kExitOk;
}

int cmd_analyze(const Options &o, std::ostream &out, std::ostream &err) {
    std::istringstream in(io::read_file(o.counts_path));
    const auto records = io::read_counts_csv(in);
    FitOptions fit;
    fit.weighted = o.weighted;
    const AnalysisResult res = analyze_records(records, fit);
    for (const auto &w : res.warnings) {
        err << "warning: " << w << '\n';
    }
    Json meta = base_meta("analyze");
    meta["input"] = o.counts_path;
    meta["weighted_fit"] = o.weighted;
    emit(o, out, io::analysis_json(res), meta);
    return kExitOk;
}

int cmd_sweep(const Options &o, std::ostream &out) {
    const io::RunConfig cfg = load_config(o);
    const auto thetas = parse_list(o.thetas);
    const auto rows = sweep_tangle(thetas, cfg.source, cfg.scan, cfg.pointer, cfg.weak_basis, cfg.seed, cfg.threads);
    Json meta = base_meta("sweep");
    meta["config"] = config_meta(cfg);
    meta["thetas"] = thetas;
    emit(o, out, io::sweep_csv(rows), meta);
    return kExitOk;
}

int cmd_tomography(const Options &o, std::ostream &out) {
    const io::RunConfig cfg = load_config(o);
    std::vector<TomographyCount> counts;
    if (o.tomo_counts) {
        std::istringstream in(io::read_file(*o.tomo_counts));
        counts = io::read_tomography_csv(in);
    } else {
        counts = simulate_tomography(cfg.source, cfg.tomography, cfg.seed);
    }
    if (o.tomo_counts_out) {
        std::ostringstream csv;
        io::write_tomography_csv(csv, counts);
        io::write_file(*o.tomo_counts_out, csv.str());
    }
    const MeasurementFrame frame = frame_for(cfg.weak_basis);
    const TomographyResult res = analyze_tomography(counts, frame, cfg.seed, o.bootstrap);

    Json j = Json::parse(io::tomography_json(res));
    j["weak_basis"] = to_string(cfg.weak_basis);
    Json transients = Json::array();
    for (BobSetting s : {BobSetting::P, BobSetting::Q}) {
        for (int x : kOutcomes) {
            for (int b : kOutcomes) {
                Json t{{"setting", to_string(s)}, {"x", x}, {"b", b}};
                try {
                    const TransientMatrix r = transient_matrix(
                        res.rho, tensor_product(frame.alice_strong.projector(x), frame.bob(s).projector(b)));
                    t["selection_prob"] = r.selection_prob;
                    t["min_eigenvalue"] = hermitian_eigenvalues(r.matrix).front();
                    t["negativity"] = negativity(r);
                } catch (const NumericError &) {
                    t["selection_prob"] = 0.0;
                    t["min_eigenvalue"] = nullptr;
                    t["negativity"] = nullptr;
                }
                transients.push_back(t);
            }
        }
    }
    j["transients"] = transients;
    if (!o.tomo_counts) {
        j["configured"] = {{"tangle", tangle(delivered_state(cfg.source))},
                           {"p_plus", analytic_outcome(delivered_state(cfg.source), frame).p_plus},
                           {"p_minus", analytic_outcome(delivered_state(cfg.source), frame).p_minus}};
    }
    Json meta = base_meta("tomography");
    meta["config"] = config_meta(cfg);
    meta["input"] = o.tomo_counts ? Json(*o.tomo_counts) : Json(nullptr);
    meta["bootstrap"] = o.bootstrap;
    emit(o, out, dump(j), meta);
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Weak-measurement CHSH: analytic tables, virtual experiment and estimation pipeline", "wmchsh"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--config", o.config_path, "Run configuration JSON");
        sub->add_option("--seed", o.seed, "64-bit seed");
        sub->add_option("--weak-basis", o.weak_basis, "Z or X")->check(CLI::IsMember({"Z", "X"}));
        sub->add_option("--repeats", o.repeats, "Override scan.repeats");
        sub->add_option("--threads", o.threads, "Worker threads (results do not depend on it)");
        sub->add_option("--state", o.state, "singlet | theta=DEG[,phi=RAD] | werner:V");
    };

    auto *analytic = app.add_subcommand("analytic", "Analytic weak-valued table and outcome probabilities");
    analytic->add_option("--state", o.state, "singlet | theta=DEG[,phi=RAD] | werner:V | state.json");
    analytic->add_option("--weak-basis", o.weak_basis, "Z or X")->check(CLI::IsMember({"Z", "X"}));
    analytic->add_option("--bob-setting", o.bob_setting, "P or Q: one-sided table for this setting")
        ->check(CLI::IsMember({"P", "Q"}));
    analytic->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    analytic->add_option("--out", o.out, "Output file (default stdout)");

    auto *simulate = app.add_subcommand("simulate", "Simulate slit-scan coincidence counts");
    add_common(simulate);
    simulate->add_option("--out", o.out, "Counts CSV")->required();

    auto *analyze = app.add_subcommand("analyze", "Estimate weak-valued probabilities from counts");
    analyze->add_option("counts", o.counts_path, "Counts CSV")->required();
    analyze->add_option("--out", o.out, "Results JSON (default stdout)");
    analyze->add_flag("--weighted", o.weighted, "Weight the centroid fits by 1/variance");

    auto *sweep = app.add_subcommand("sweep", "Simulate and analyze a range of pump angles");
    add_common(sweep);
    sweep->add_option("--thetas", o.thetas, "Comma-separated pump angles in degrees");
    sweep->add_option("--out", o.out, "CSV output (default stdout)");

    auto *tomo = app.add_subcommand("tomography", "Linear-inversion tomography and transient prediction");
    add_common(tomo);
    tomo->add_option("--counts", o.tomo_counts, "Tomography CSV to reconstruct instead of simulating");
    tomo->add_option("--counts-out", o.tomo_counts_out, "Write the simulated tomography counts here");
    tomo->add_option("--bootstrap", o.bootstrap, "Bootstrap replicates")->check(CLI::NonNegativeNumber);
    tomo->add_option("--out", o.out, "Results JSON (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        std::ostringstream o_out;
        std::ostringstream o_err;
        const int code = app.exit(e, o_out, o_err);
        out << o_out.str();
        err << o_err.str();
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        for (auto *sub : {simulate, sweep, tomo}) {
            if (sub->parsed() && sub->get_option("--state")->count() > 0) {
                o.state_given = true;
            }
        }
        if (analytic->parsed()) {
            return cmd_analytic(o, out);
        }
        if (simulate->parsed()) {
            return cmd_simulate(o, out, err);
        }
        if (analyze->parsed()) {
            return cmd_analyze(o, out, err);
        }
        if (sweep->parsed()) {
            return cmd_sweep(o, out);
        }
        return cmd_tomography(o, out);
    } catch (const ValidationError &e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const IoError &e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const NumericError &e) {
        err << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
}

} // namespace wmchsh
