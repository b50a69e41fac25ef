// Copyright 2026 The selfcheck Authors
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

// Conformance tests of a source against the ideal correlation specification.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selfcheck/source.hpp"

namespace selfcheck {

inline constexpr double kDefaultExactTol = 1e-9;
/// Denominators below this make a conditional probability degenerate.
inline constexpr double kDegenerateMass = 1e-14;

enum class CheckMode { exact, empirical };

/// Which quantity a deviation refers to.
///   marginal:    || P_beta^y psi ||^2 against 1/2 (alpha unused)
///   same_basis:  conditional || R_beta^x P_beta^y psi ||^2 / || P_beta^y psi ||^2 against delta_xy
///   cross_basis: same conditional with alpha != beta, against 1/2
///   table:       one correlation-table entry against the ideal table
enum class DeviationKind { marginal, same_basis, cross_basis, table };

/// Indices and outcomes follow the table convention: alpha and x belong to
/// the R family, beta and y to the P family.
struct Deviation {
    DeviationKind kind = DeviationKind::table;
    int alpha = 0;
    int beta = 0;
    Outcome x = Outcome::plus;
    Outcome y = Outcome::plus;
    double value = 0.0;
    bool degenerate = false;
};

struct CheckReport {
    CheckMode mode = CheckMode::exact;
    std::vector<Deviation> deviations;
    double max_abs_dev = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::optional<std::uint64_t> sample_size;
};

/// Conjugate-coding test over measurements 2 and 3 only.
CheckReport check_conjugate(const Source &s, double tol = kDefaultExactTol);

/// All 36 correlation-table entries against the ideal table. Throws
/// ContractError on a source without measurement 1.
CheckReport check_self_checking(const Source &s, double tol = kDefaultExactTol);

/// Frequencies from simulated button presses: for each (alpha, beta) pair,
/// `n_samples` rounds of measuring P_beta on A and then R_alpha on B. Each
/// pair draws from its own stream derived from `seed`. Restricted to
/// `indices` when given, otherwise to every index the source carries.
CheckReport empirical_check(const Source &s, std::uint64_t n_samples, std::uint64_t seed, double eps,
                            const std::vector<int> &indices = {});

/// Stream seed for pair (alpha, beta) of an empirical run.
std::uint64_t pair_stream_seed(std::uint64_t seed, int alpha, int beta);

std::string to_string(CheckMode mode);
std::string to_string(DeviationKind kind);

}  // namespace selfcheck
