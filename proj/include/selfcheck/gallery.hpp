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

// Sources that exercise the checker: honest extended ideal sources, a
// classical hidden-variable source that passes the conjugate-coding test, and
// perturbations of good sources.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "selfcheck/source.hpp"

namespace selfcheck {

/// Dims (4, 4), psi = 1/2 sum_lambda e_lambda (x) e_lambda over lambda in {0,1}^2
/// (index 2*l1 + l2). Measurement 2 reads l1, measurement 3 reads l2, on both
/// factors. Every projector is diagonal, so anyone who reads lambda in the
/// computational basis knows both bits without disturbing the state.
Source build_classical_source();

struct ExtendedIdealOptions {
    /// Force all |alpha_i| equal (degenerate Schmidt spectrum).
    bool equal_magnitudes = false;
};

/// Haar-random block embeddings and random complex alpha_i with
/// sum 2|alpha_i|^2 = 1. Requires dim >= 2 * num_blocks on each factor.
Source build_random_extended_ideal(std::size_t num_blocks, BipartiteShape dims, Rng &rng,
                                   ExtendedIdealOptions options = {});

enum class PerturbMode { state, measurement };

/// state: psi + epsilon * (random unit vector), renormalized.
/// measurement: every projector pair conjugated by exp(t K), t uniform in
/// [-epsilon, epsilon], K a random real antisymmetric generator of unit
/// operator norm (a plane rotation by t on a qubit). epsilon = 0 returns s.
Source perturb_source(const Source &s, double epsilon, PerturbMode mode, Rng &rng);

/// Adds diagonal-or-not index-1 measurements (plus, I - plus) to a
/// conjugate-coding source.
Source complete_with_index1(const Source &conjugate, const Projector &p1_plus, const Projector &r1_plus);

struct CompletionScan {
    double min_max_abs_dev = 0.0;
    std::uint32_t best_p_mask = 0;
    std::uint32_t best_r_mask = 0;
    std::uint64_t evaluated = 0;
};

/// Every pair of diagonal completions (2^dim_a * 2^dim_b of them) scored by
/// check_self_checking. Exhaustive; dims limited to 8.
CompletionScan scan_diagonal_completions(const Source &conjugate);

struct CompletionSearch {
    double best_max_abs_dev = 0.0;
    std::size_t evaluations = 0;
};

/// Random restarts over general (non-diagonal) completions of every rank,
/// each followed by a shrinking random local refinement. Empirical evidence
/// only; finds no certificate of optimality.
CompletionSearch search_completions(const Source &conjugate, std::size_t restarts, std::size_t refine_steps,
                                    Rng &rng);

enum class Verdict { pass, fail, not_applicable };
std::string to_string(Verdict v);

struct GalleryEntry {
    std::string name;
    Source source;
    /// keys: "conjugate", "self_checking"
    std::map<std::string, Verdict> expected;
    std::optional<std::uint64_t> seed;
    std::string notes;
};

/// Deterministic regression corpus with fixed seeds.
std::vector<GalleryEntry> gallery();

/// Verdicts actually produced by the checker at default tolerances.
std::map<std::string, Verdict> observed_verdicts(const Source &s);

}  // namespace selfcheck
