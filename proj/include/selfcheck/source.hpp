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

// Photon sources: a pure bipartite state plus two-outcome projective
// measurement families on each factor, indexed 1..3. The P family acts on
// factor A (the source side), the R family on factor B (the transmitted side).

#pragma once

#include <array>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "selfcheck/linalg.hpp"

namespace selfcheck {

enum class Outcome : int { plus = 0, minus = 1 };
inline constexpr std::array<Outcome, 2> kOutcomes{Outcome::plus, Outcome::minus};
inline constexpr std::array<int, 3> kAllIndices{1, 2, 3};

inline int bit_of(Outcome x) { return static_cast<int>(x); }
inline Outcome outcome_of_bit(int bit) { return bit == 0 ? Outcome::plus : Outcome::minus; }
inline char outcome_char(Outcome x) { return x == Outcome::plus ? '+' : '-'; }

/// pi/8: the rotation between adjacent measurement bases.
inline constexpr double kTheta = std::numbers::pi / 8.0;

/// Angle of the basis used by measurement `index`: 0, -pi/8, +pi/8.
double basis_angle(int index);

/// Real rotated basis e0 = (cos phi, sin phi), e1 = (-sin phi, cos phi).
struct AngleBasis {
    double angle = 0.0;
    CVector e0;
    CVector e1;

    const CVector &vec(Outcome x) const { return x == Outcome::plus ? e0 : e1; }
};

AngleBasis basis_at_angle(double phi);

/// 2x2 projector of the ideal source for measurement `index`, outcome `x`.
CMatrix ideal_local_projector(int index, Outcome x);

struct ProjectorPair {
    Projector plus;
    Projector minus;

    const Projector &operator[](Outcome x) const { return x == Outcome::plus ? plus : minus; }
};

/// Pair (P, I - P).
ProjectorPair complementary_pair(Projector plus);

/// Up to three projector pairs acting on one local factor. Each present pair
/// must be complete (plus + minus = I) and orthogonal (plus * minus = 0)
/// within 1e-10.
class MeasurementFamily {
   public:
    static constexpr double kCompletenessTol = 1e-10;

    MeasurementFamily(std::size_t dim, std::array<std::optional<ProjectorPair>, 3> pairs);

    std::size_t dim() const { return dim_; }
    bool has(int index) const;
    const ProjectorPair &pair(int index) const;
    const CMatrix &op(int index, Outcome x) const { return pair(index)[x].matrix(); }

    MeasurementFamily with(int index, ProjectorPair pair) const;
    MeasurementFamily without(int index) const;

   private:
    std::size_t dim_;
    std::array<std::optional<ProjectorPair>, 3> pairs_;
};

enum class SourceKind { conjugate_coding, self_checking_candidate };

/// Validated at construction. The kind is inferred: indices 2 and 3 are
/// required on both sides; index 1 must be present on both sides or neither.
class Source {
   public:
    static constexpr double kNormTol = 1e-12;

    Source(BipartiteShape shape, CVector psi, MeasurementFamily p_family, MeasurementFamily r_family);

    BipartiteShape shape() const { return shape_; }
    const CVector &psi() const { return psi_; }
    const MeasurementFamily &p_family() const { return p_; }
    const MeasurementFamily &r_family() const { return r_; }
    SourceKind kind() const { return kind_; }
    /// Indices present in both families, ascending.
    std::vector<int> indices() const;

    /// (P_index^x (x) I) v
    CVector apply_p(int index, Outcome x, const CVector &v) const;
    /// (I (x) R_index^x) v
    CVector apply_r(int index, Outcome x, const CVector &v) const;

    /// Same source with the roles of the two factors exchanged: psi is
    /// re-indexed B-major and the P and R families trade places.
    Source swapped() const;
    Source with_psi(CVector psi) const;

   private:
    BipartiteShape shape_;
    CVector psi_;
    MeasurementFamily p_;
    MeasurementFamily r_;
    SourceKind kind_;
};

/// p[alpha][beta][x][y] = || R_alpha^x P_beta^y psi ||^2; alpha indexes the
/// R family (factor B), beta the P family (factor A).
class CorrelationTable {
   public:
    explicit CorrelationTable(std::vector<int> indices);

    const std::vector<int> &indices() const { return indices_; }
    bool has(int index) const;
    double at(int alpha, int beta, Outcome x, Outcome y) const;
    double &at(int alpha, int beta, Outcome x, Outcome y);

   private:
    static std::size_t slot(int alpha, int beta, Outcome x, Outcome y);

    std::vector<int> indices_;
    std::array<double, 36> data_{};
};

/// Max entrywise difference over the indices both tables share.
double max_abs_diff(const CorrelationTable &a, const CorrelationTable &b);

Source build_ideal_source();
/// Closed form: 1/2 cos^2(delta) on the diagonal x = y, 1/2 sin^2(delta) off it,
/// delta the angle between the two measurement bases.
CorrelationTable ideal_reference_table();
CorrelationTable correlation_table(const Source &s);

struct Emission {
    Outcome outcome = Outcome::plus;
    /// || P_button^outcome psi ||^2
    double probability = 0.0;
    /// tr_A(P psi psi^dagger P); trace equals `probability`.
    CMatrix density;
    /// density / probability (zero matrix on a zero-probability branch).
    CMatrix normalized_density;
};

/// Deterministic branch of an emission.
Emission emission_branch(const Source &s, int button, Outcome x);
/// Press `button`; the outcome is sampled from the Born probabilities.
Emission emit(const Source &s, int button, Rng &rng);

/// Pure source on an enlarged A factor (dim_a * rank) reproducing every
/// correlation of the mixed state rho. P projectors are extended by the
/// identity on the ancilla, which is the fast index of the enlarged factor.
Source purify(const CMatrix &rho, BipartiteShape shape, const MeasurementFamily &p_family,
              const MeasurementFamily &r_family);
/// tr(R_alpha^x P_beta^y rho P_beta^y) for every entry.
CorrelationTable correlation_table_mixed(const CMatrix &rho, BipartiteShape shape, const MeasurementFamily &p_family,
                                         const MeasurementFamily &r_family);

/// One summand of an extended ideal source: embed_a (dim_a x 2) and embed_b
/// (dim_b x 2) are isometries carrying the ideal qubit into the block.
struct ExtendedBlock {
    cd alpha;
    CMatrix embed_a;
    CMatrix embed_b;
};

/// psi = sum_i alpha_i (a_i(0) (x) b_i(0) + a_i(1) (x) b_i(1)) with
/// sum_i 2|alpha_i|^2 = 1. Every plus projector acts as the ideal one inside
/// each block and as zero on the complement of the block sum; the matching
/// minus projector is its complement.
Source build_extended_ideal(std::span<const ExtendedBlock> blocks, BipartiteShape shape);

}  // namespace selfcheck
