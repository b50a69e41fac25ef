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

// Dense complex linear algebra for small bipartite Hilbert spaces.
//
// Joint index convention everywhere: joint = i_a * dim_b + i_b (A-major).

#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace selfcheck {

using cd = std::complex<double>;
using Rng = std::mt19937_64;

class CVector {
   public:
    CVector() = default;
    explicit CVector(std::size_t dim) : data_(dim, cd{0.0, 0.0}) {}
    explicit CVector(std::vector<cd> entries) : data_(std::move(entries)) {}
    CVector(std::initializer_list<cd> entries) : data_(entries) {}

    static CVector basis(std::size_t dim, std::size_t index);

    std::size_t dim() const { return data_.size(); }
    cd &operator[](std::size_t i) { return data_[i]; }
    const cd &operator[](std::size_t i) const { return data_[i]; }
    std::span<const cd> entries() const { return data_; }
    std::span<cd> entries() { return data_; }

    double norm() const;
    double norm_squared() const;
    CVector normalized() const;

    CVector &operator+=(const CVector &other);
    CVector &operator-=(const CVector &other);
    CVector &operator*=(cd scale);

    bool operator==(const CVector &other) const = default;

   private:
    std::vector<cd> data_;
};

CVector operator+(CVector a, const CVector &b);
CVector operator-(CVector a, const CVector &b);
CVector operator*(cd scale, CVector v);
CVector operator*(CVector v, cd scale);

/// Conjugate-linear in the first argument: <a, b> = sum conj(a_i) b_i.
cd inner(const CVector &a, const CVector &b);
double max_abs_diff(const CVector &a, const CVector &b);

class CMatrix {
   public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    /// Row-major entries; throws ShapeError if the count does not match.
    CMatrix(std::size_t rows, std::size_t cols, std::vector<cd> entries);

    static CMatrix identity(std::size_t n);
    static CMatrix diagonal(std::span<const cd> diag);
    /// |v><w|
    static CMatrix outer(const CVector &v, const CVector &w);
    /// Matrix whose columns are the given vectors.
    static CMatrix from_columns(std::span<const CVector> columns);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    cd &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cd &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    std::span<const cd> entries() const { return data_; }

    CVector column(std::size_t c) const;
    CMatrix adjoint() const;
    cd trace() const;

    CMatrix &operator+=(const CMatrix &other);
    CMatrix &operator-=(const CMatrix &other);
    CMatrix &operator*=(cd scale);

    bool operator==(const CMatrix &other) const = default;

   private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cd> data_;
};

CMatrix operator+(CMatrix a, const CMatrix &b);
CMatrix operator-(CMatrix a, const CMatrix &b);
CMatrix operator*(const CMatrix &a, const CMatrix &b);
CMatrix operator*(cd scale, CMatrix m);
CVector operator*(const CMatrix &m, const CVector &v);

double max_abs_diff(const CMatrix &a, const CMatrix &b);
/// max |M - M^dagger|
double hermiticity_defect(const CMatrix &m);
/// Largest singular value.
double operator_norm(const CMatrix &m);

struct BipartiteShape {
    std::size_t dim_a = 0;
    std::size_t dim_b = 0;

    std::size_t joint_dim() const { return dim_a * dim_b; }
    std::size_t joint_index(std::size_t i_a, std::size_t i_b) const { return i_a * dim_b + i_b; }
    bool operator==(const BipartiteShape &) const = default;
};

enum class Factor { a, b };

/// Orthogonal projector. Construction rejects matrices that are not
/// Hermitian within 1e-12 or not idempotent within 1e-10.
class Projector {
   public:
    static constexpr double kHermitianTol = 1e-12;
    static constexpr double kIdempotentTol = 1e-10;

    explicit Projector(CMatrix matrix);

    const CMatrix &matrix() const { return matrix_; }
    std::size_t dim() const { return matrix_.rows(); }
    /// Rounded trace.
    std::size_t rank() const;
    Projector complement() const;

   private:
    CMatrix matrix_;
};

struct SchmidtResult {
    std::vector<double> coefficients;
    std::vector<CVector> left_vectors;
    std::vector<CVector> right_vectors;
    double residual = 0.0;
    /// Squared mass of the coefficients removed by the cutoff.
    double dropped_mass = 0.0;
};

struct SvdResult {
    CMatrix u;                   // rows x k, orthonormal columns where sigma > 0
    std::vector<double> sigma;   // descending, k = min(rows, cols)
    CMatrix v;                   // cols x k
};

struct EigenResult {
    std::vector<double> values;  // ascending
    CMatrix vectors;             // columns
};

CVector tensor_vec(const CVector &v, const CVector &w);
CMatrix tensor_op(const CMatrix &a, const CMatrix &b);
CMatrix partial_trace(const CMatrix &rho, BipartiteShape shape, Factor over);
/// tr_A |v><v| without forming the joint outer product.
CMatrix reduced_density_b(const CVector &v, BipartiteShape shape);

/// (op (x) I) v and (I (x) op) v.
CVector apply_a(const CMatrix &op, const CVector &v, BipartiteShape shape);
CVector apply_b(const CMatrix &op, const CVector &v, BipartiteShape shape);
CVector apply_local(Factor side, const CMatrix &op, const CVector &v, BipartiteShape shape);

/// One-sided (Hestenes) Jacobi SVD.
SvdResult svd(const CMatrix &m);
/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
EigenResult hermitian_eigen(const CMatrix &h);

inline constexpr double kDefaultSchmidtCutoff = 1e-10;

/// Coefficients below sigma_min * ||v|| are dropped.
SchmidtResult schmidt_decompose(const CVector &v, BipartiteShape shape,
                                double sigma_min = kDefaultSchmidtCutoff);

/// Throws ValidationError unless the vectors are orthonormal within 1e-10.
Projector projector_onto(std::span<const CVector> vectors);
CMatrix gram_matrix(std::span<const CVector> vectors);

/// Gaussian complex vector scaled to unit norm.
CVector random_unit_vector(std::size_t dim, Rng &rng);
/// Haar-distributed unitary: Gram-Schmidt (two passes) on Gaussian columns.
CMatrix random_unitary(std::size_t dim, Rng &rng);

}  // namespace selfcheck
