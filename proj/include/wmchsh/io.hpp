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

#pragma once

/**
 * @file io.hpp
 * CSV and JSON serialization for tables, count records, tomography data, run
 * configuration and analysis results. Doubles are written in shortest
 * round-trip form, so equal inputs give byte-identical files.
 */

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wmchsh/analysis.hpp"
#include "wmchsh/experiment.hpp"
#include "wmchsh/pointer.hpp"
#include "wmchsh/transient.hpp"
#include "wmchsh/weak_values.hpp"

namespace wmchsh::io {

/// Shortest decimal string that parses back to `value`.
std::string format_double(double value);

/// Columns x,z,p,q,value. One-sided tables leave the unused Bob column empty;
/// undefined entries are written as "undefined".
std::string table_csv(const WeakJointTable &table);
std::string table_json(const WeakJointTable &table);

/// Entries as [re, im] pairs, with the postselection probability.
std::string transient_json(const TransientMatrix &transient);

/// Columns r,x,bob_outcome,density sampled at `positions`.
std::string density_csv(const SpatialDensity &density, const std::vector<double> &positions);

inline const std::string kCountsHeader = "condition,slit_position_um,repeat,coincidences,accidentals";
inline const std::string kTomographyHeader = "setting,counts";

void write_counts_csv(std::ostream &out, const std::vector<CountRecord> &records);
/// Throws ValidationError (with the line number) on malformed input.
std::vector<CountRecord> read_counts_csv(std::istream &in);

void write_tomography_csv(std::ostream &out, const std::vector<TomographyCount> &counts);
std::vector<TomographyCount> read_tomography_csv(std::istream &in);

/// Everything a run needs besides the command itself.
struct RunConfig {
    SourceConfig source;
    ScanConfig scan;
    PointerConfig pointer;
    TomographyConfig tomography;
    WeakBasis weak_basis = WeakBasis::Z;
    std::uint64_t seed = 0;
    unsigned threads = 1;

    void validate() const;
};

/// Sections "source", "scan", "pointer", "tomography" with the struct field
/// names, plus "weak_basis", "seed" and "threads". Missing keys keep their
/// defaults; unknown keys are rejected.
RunConfig parse_config(const std::string &json_text);
std::string config_json(const RunConfig &config);

/// Two-qubit density matrix from {"re": [[...]], "im": [[...]]}.
DensityMatrix parse_density_json(const std::string &json_text);
std::string density_json(const DensityMatrix &rho);

std::string analysis_json(const AnalysisResult &result);
std::string tomography_json(const TomographyResult &result);

/// Columns tangle,p_plus,p_plus_err,p_minus,p_minus_err,chsh,chsh_err,
/// analytic_p_plus,analytic_p_minus,analytic_chsh.
std::string sweep_csv(const std::vector<SweepRow> &rows);

/// Throw IoError when the file cannot be opened.
std::string read_file(const std::string &path);
void write_file(const std::string &path, const std::string &content);

} // namespace wmchsh::io
