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
 * @file cli.hpp
 * Command-line front end: analytic | simulate | analyze | sweep | tomography.
 *
 * Exit codes: 0 success, 1 validation, 2 I/O, 3 numeric failure.
 */

#include <iosfwd>
#include <string>

#include "wmchsh/experiment.hpp"
#include "wmchsh/linalg.hpp"

namespace wmchsh {

inline constexpr const char *kVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitIo = 2, kExitNumeric = 3 };

/// State given on the command line: "singlet", "theta=DEG[,phi=RAD]",
/// "werner:V" (also "werner=V") or a path to a JSON density matrix.
struct StateSpec {
    enum class Kind { Singlet, Theta, Werner, File };
    Kind kind = Kind::Singlet;
    double theta = 45.0;
    double phi = 0.0;
    double werner_v = 1.0;
    std::string path;

    [[nodiscard]] DensityMatrix density() const;
    /// Overrides the state fields of `src`; file states are rejected.
    [[nodiscard]] SourceConfig apply(SourceConfig src) const;
};

StateSpec parse_state_spec(const std::string &text);

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace wmchsh
