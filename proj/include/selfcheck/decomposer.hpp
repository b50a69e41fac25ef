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

// Extraction of the EPR-block structure of a self-checking source.
//
// Given a source that reproduces the ideal correlation table, psi splits as
//
//     psi = sum_i alpha_i (a_i(0) (x) b_i(0) + a_i(1) (x) b_i(1))
//
// with mutually orthogonal two-dimensional blocks on which every measurement
// acts like the ideal qubit measurement. The construction:
//
//   1. Schmidt-decompose P_1^+ psi = sum_i alpha_i a_i(0) (x) b_i(0).
//   2. a_i(1) = beta (P_3^+ - P_2^+) a_i(0), b_i(1) = beta (R_3^+ - R_2^+) b_i(0)
//      with beta = 1 / (2 sin(pi/8) cos(pi/8)) = sqrt(2).
//
// Every structural identity the construction relies on is re-checked
// numerically and reported in a LemmaReport.

#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "selfcheck/checker.hpp"
#include "selfcheck/source.hpp"

namespace selfcheck {

inline constexpr double kDefaultLemmaTol = 1e-8;

/// 1 / (2 sin(theta) cos(theta)) = sqrt(2) for theta = pi/8.
double block_beta();

/// u_1 .. u_5 in C^2 for theta = pi/8:
///   u1 = (1, 0)              u2 = (cos^2, sin cos)   u3 = (sin^2, -sin cos)
///   u4 = (cos^2, -sin cos)   u5 = (sin^2, sin cos)
std::array<CVector, 5> u_vectors();

struct Block {
    cd alpha;
    CVector a0;
    CVector a1;
    CVector b0;
    CVector b1;
};

/// Per-identity maximum deviation, judged against one tolerance.
class LemmaReport {
   public:
    explicit LemmaReport(double tolerance = kDefaultLemmaTol) : tolerance_(tolerance) {}

    /// Keeps the maximum over repeated records of the same id.
    void record(const std::string &id, double deviation);
    void merge(const LemmaReport &other);

    double tolerance() const { return tolerance_; }
    bool has(const std::string &id) const { return deviations_.count(id) != 0; }
    double deviation(const std::string &id) const;
    bool pass(const std::string &id) const { return deviation(id) <= tolerance_; }
    bool all_pass() const;
    const std::map<std::string, double> &deviations() const { return deviations_; }

   private:
    double tolerance_;
    std::map<std::string, double> deviations_;
};

struct Decomposition {
    std::vector<Block> blocks;
    double residual = 0.0;
    /// Largest inter-block overlap found before re-orthogonalization.
    double corrected_overlap = 0.0;
    LemmaReport diagnostics;
};

struct DecomposeOptions {
    /// Self-checking precondition tolerance; also scales the residual bound 10 * tol * sqrt(dim).
    double tol = kDefaultExactTol;
    double lemma_tol = kDefaultLemmaTol;
    double sigma_min = kDefaultSchmidtCutoff;
    /// Inter-block overlaps up to this are re-orthogonalized away; above it, structural failure.
    double overlap_cutoff = 1e-8;
    /// Block norm / in-block orthogonality tolerance.
    double block_tol = 1e-9;
};

/// The source failed the self-checking test that decomposition requires.
class PreconditionError : public std::runtime_error {
   public:
    explicit PreconditionError(CheckReport report);
    const CheckReport &report() const { return report_; }

   private:
    CheckReport report_;
};

/// The extracted blocks do not have the required structure.
class StructuralError : public std::runtime_error {
   public:
    StructuralError(const std::string &what, LemmaReport diagnostics);
    const LemmaReport &diagnostics() const { return diagnostics_; }

   private:
    LemmaReport diagnostics_;
};

Decomposition decompose(const Source &s, const DecomposeOptions &options = {});

/// L1, L3 (both h variants), L4 and their P <-> R exchanged forms.
LemmaReport verify_lemma_identities(const Source &s, double lemma_tol = kDefaultLemmaTol);
/// Global Gram equality (L2) and per-block Gram equality (L7), both sides.
LemmaReport verify_isomorphism(const Source &s, const Decomposition &d, double lemma_tol = kDefaultLemmaTol);
/// Every projector acts on every block as the ideal qubit projector.
LemmaReport verify_block_actions(const Source &s, const Decomposition &d, double lemma_tol = kDefaultLemmaTol);
/// P_1^- psi reconstruction, the P_1^- operator identity, and block orthogonality.
LemmaReport verify_completion(const Source &s, const Decomposition &d, double lemma_tol = kDefaultLemmaTol);

/// Runs every lemma check without enforcing the precondition, to localize
/// which identity breaks on a non-conforming source. Blocks are still
/// extracted when possible.
LemmaReport diagnose(const Source &s, const DecomposeOptions &options = {});

/// Largest singular value of PQ - QP.
double commutator_norm(const CMatrix &p, const CMatrix &q);

/// <w, w'> with w = cos(theta) bj0 + sin(theta) bj1 and
/// w' = -sin(theta) bi0 + cos(theta) bi1. R_3^+ bj0 is along w
/// and R_3^- bi0 along w', so a non-zero value means two blocks cannot share
/// one pair of orthogonal R_3 projectors.
cd orthogonality_witness(const CVector &bi0, const CVector &bi1, const CVector &bj0, const CVector &bj1);

/// Sum over blocks of the projectors onto span{x0, x1} on the given factor.
CMatrix block_sum_projector(const Decomposition &d, Factor side);

}  // namespace selfcheck
