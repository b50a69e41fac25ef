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

#include "selfcheck/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "selfcheck/errors.hpp"

namespace selfcheck {

namespace {

constexpr int kMaxJacobiSweeps = 80;

void require_same_dim(const CVector &a, const CVector &b, const char *what) {
    if (a.dim() != b.dim()) {
        throw ShapeError(std::string(what) + ": vector dimensions " + std::to_string(a.dim()) + " and " +
                         std::to_string(b.dim()) + " differ");
    }
}

void require_same_shape(const CMatrix &a, const CMatrix &b, const char *what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError(std::string(what) + ": matrix shapes differ");
    }
}

void require_local(const CMatrix &op, std::size_t dim, const char *what) {
    if (op.rows() != dim || op.cols() != dim) {
        throw ShapeError(std::string(what) + ": operator is " + std::to_string(op.rows()) + "x" +
                         std::to_string(op.cols()) + ", factor dimension is " + std::to_string(dim));
    }
}

// Tall case only (rows >= cols). Columns of `work` converge to U * Sigma.
SvdResult tall_svd(CMatrix work) {
    const std::size_t m = work.rows();
    const std::size_t n = work.cols();
    CMatrix v = CMatrix::identity(n);

    for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0;
                double beta = 0.0;
                cd gamma{0.0, 0.0};
                for (std::size_t i = 0; i < m; ++i) {
                    alpha += std::norm(work(i, p));
                    beta += std::norm(work(i, q));
                    gamma += std::conj(work(i, p)) * work(i, q);
                }
                const double g = std::abs(gamma);
                if (g == 0.0 || g <= 1e-15 * std::sqrt(alpha * beta)) {
                    continue;
                }
                rotated = true;
                // Rotate the phase out of gamma, then a real Jacobi rotation.
                const cd phase = std::conj(gamma) / g;
                const double zeta = (beta - alpha) / (2.0 * g);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const cd wp = work(i, p);
                    const cd wq = work(i, q) * phase;
                    work(i, p) = c * wp - s * wq;
                    work(i, q) = s * wp + c * wq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const cd vp = v(i, p);
                    const cd vq = v(i, q) * phase;
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
        if (!rotated) {
            break;
        }
    }

    std::vector<double> norms(n);
    for (std::size_t j = 0; j < n; ++j) {
        norms[j] = work.column(j).norm();
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });

    SvdResult out{CMatrix(m, n), std::vector<double>(n), CMatrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = order[k];
        out.sigma[k] = norms[j];
        for (std::size_t i = 0; i < m; ++i) {
            out.u(i, k) = norms[j] > 0.0 ? work(i, j) / norms[j] : cd{0.0, 0.0};
        }
        for (std::size_t i = 0; i < n; ++i) {
            out.v(i, k) = v(i, j);
        }
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------- CVector

CVector CVector::basis(std::size_t dim, std::size_t index) {
    CVector e(dim);
    e[index] = 1.0;
    return e;
}

double CVector::norm_squared() const {
    double acc = 0.0;
    for (const cd &z : data_) {
        acc += std::norm(z);
    }
    return acc;
}

double CVector::norm() const { return std::sqrt(norm_squared()); }

CVector CVector::normalized() const {
    const double n = norm();
    if (n == 0.0) {
        throw ValidationError("cannot normalize the zero vector");
    }
    return (1.0 / n) * *this;
}

CVector &CVector::operator+=(const CVector &other) {
    require_same_dim(*this, other, "vector add");
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] += other.data_[i];
    }
    return *this;
}

CVector &CVector::operator-=(const CVector &other) {
    require_same_dim(*this, other, "vector subtract");
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] -= other.data_[i];
    }
    return *this;
}

CVector &CVector::operator*=(cd scale) {
    for (cd &z : data_) {
        z *= scale;
    }
    return *this;
}

CVector operator+(CVector a, const CVector &b) { return a += b; }
CVector operator-(CVector a, const CVector &b) { return a -= b; }
CVector operator*(cd scale, CVector v) { return v *= scale; }
CVector operator*(CVector v, cd scale) { return v *= scale; }

cd inner(const CVector &a, const CVector &b) {
    require_same_dim(a, b, "inner");
    cd acc{0.0, 0.0};
    for (std::size_t i = 0; i < a.dim(); ++i) {
        acc += std::conj(a[i]) * b[i];
    }
    return acc;
}

double max_abs_diff(const CVector &a, const CVector &b) {
    require_same_dim(a, b, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

// ---------------------------------------------------------------- CMatrix

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cd> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
        throw ShapeError("matrix entries: expected " + std::to_string(rows_ * cols_) + ", got " +
                         std::to_string(data_.size()));
    }
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

CMatrix CMatrix::diagonal(std::span<const cd> diag) {
    CMatrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) {
        m(i, i) = diag[i];
    }
    return m;
}

CMatrix CMatrix::outer(const CVector &v, const CVector &w) {
    CMatrix m(v.dim(), w.dim());
    for (std::size_t i = 0; i < v.dim(); ++i) {
        for (std::size_t j = 0; j < w.dim(); ++j) {
            m(i, j) = v[i] * std::conj(w[j]);
        }
    }
    return m;
}

CMatrix CMatrix::from_columns(std::span<const CVector> columns) {
    if (columns.empty()) {
        return {};
    }
    CMatrix m(columns[0].dim(), columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c].dim() != m.rows()) {
            throw ShapeError("from_columns: ragged columns");
        }
        for (std::size_t r = 0; r < m.rows(); ++r) {
            m(r, c) = columns[c][r];
        }
    }
    return m;
}

CVector CMatrix::column(std::size_t c) const {
    CVector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        v[r] = (*this)(r, c);
    }
    return v;
}

CMatrix CMatrix::adjoint() const {
    CMatrix m(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            m(c, r) = std::conj((*this)(r, c));
        }
    }
    return m;
}

cd CMatrix::trace() const {
    if (!is_square()) {
        throw ShapeError("trace of a non-square matrix");
    }
    cd t{0.0, 0.0};
    for (std::size_t i = 0; i < rows_; ++i) {
        t += (*this)(i, i);
    }
    return t;
}

CMatrix &CMatrix::operator+=(const CMatrix &other) {
    require_same_shape(*this, other, "matrix add");
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] += other.data_[i];
    }
    return *this;
}

CMatrix &CMatrix::operator-=(const CMatrix &other) {
    require_same_shape(*this, other, "matrix subtract");
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] -= other.data_[i];
    }
    return *this;
}

CMatrix &CMatrix::operator*=(cd scale) {
    for (cd &z : data_) {
        z *= scale;
    }
    return *this;
}

CMatrix operator+(CMatrix a, const CMatrix &b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix &b) { return a -= b; }
CMatrix operator*(cd scale, CMatrix m) { return m *= scale; }

CMatrix operator*(const CMatrix &a, const CMatrix &b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matrix product: inner dimensions " + std::to_string(a.cols()) + " and " +
                         std::to_string(b.rows()) + " differ");
    }
    CMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cd aik = a(i, k);
            if (aik == cd{0.0, 0.0}) {
                continue;
            }
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

CVector operator*(const CMatrix &m, const CVector &v) {
    if (m.cols() != v.dim()) {
        throw ShapeError("matrix-vector product: dimensions " + std::to_string(m.cols()) + " and " +
                         std::to_string(v.dim()) + " differ");
    }
    CVector out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        cd acc{0.0, 0.0};
        for (std::size_t j = 0; j < m.cols(); ++j) {
            acc += m(i, j) * v[j];
        }
        out[i] = acc;
    }
    return out;
}

double max_abs_diff(const CMatrix &a, const CMatrix &b) {
    require_same_shape(a, b, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.entries().size(); ++i) {
        m = std::max(m, std::abs(a.entries()[i] - b.entries()[i]));
    }
    return m;
}

double hermiticity_defect(const CMatrix &m) {
    if (!m.is_square()) {
        throw ShapeError("hermiticity of a non-square matrix");
    }
    return max_abs_diff(m, m.adjoint());
}

double operator_norm(const CMatrix &m) {
    if (m.rows() == 0 || m.cols() == 0) {
        return 0.0;
    }
    return svd(m).sigma.front();
}

// ---------------------------------------------------------------- Projector

Projector::Projector(CMatrix matrix) : matrix_(std::move(matrix)) {
    if (!matrix_.is_square()) {
        throw ShapeError("projector matrix must be square");
    }
    const double herm = hermiticity_defect(matrix_);
    if (herm > kHermitianTol) {
        throw ValidationError("projector is not Hermitian (defect " + std::to_string(herm) + ")");
    }
    const double idem = max_abs_diff(matrix_ * matrix_, matrix_);
    if (idem > kIdempotentTol) {
        throw ValidationError("projector is not idempotent (defect " + std::to_string(idem) + ")");
    }
}

std::size_t Projector::rank() const {
    return static_cast<std::size_t>(std::llround(matrix_.trace().real()));
}

Projector Projector::complement() const { return Projector(CMatrix::identity(dim()) - matrix_); }

// ---------------------------------------------------------------- tensor structure

CVector tensor_vec(const CVector &v, const CVector &w) {
    CVector out(v.dim() * w.dim());
    for (std::size_t i = 0; i < v.dim(); ++i) {
        for (std::size_t j = 0; j < w.dim(); ++j) {
            out[i * w.dim() + j] = v[i] * w[j];
        }
    }
    return out;
}

CMatrix tensor_op(const CMatrix &a, const CMatrix &b) {
    if (!a.is_square() || !b.is_square()) {
        throw ShapeError("tensor_op requires square operands");
    }
    const std::size_t na = a.rows();
    const std::size_t nb = b.rows();
    CMatrix out(na * nb, na * nb);
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < na; ++j) {
            const cd aij = a(i, j);
            for (std::size_t k = 0; k < nb; ++k) {
                for (std::size_t l = 0; l < nb; ++l) {
                    out(i * nb + k, j * nb + l) = aij * b(k, l);
                }
            }
        }
    }
    return out;
}

CMatrix partial_trace(const CMatrix &rho, BipartiteShape shape, Factor over) {
    const std::size_t n = shape.joint_dim();
    if (rho.rows() != n || rho.cols() != n) {
        throw ShapeError("partial_trace: matrix is " + std::to_string(rho.rows()) + "x" +
                         std::to_string(rho.cols()) + ", shape needs " + std::to_string(n));
    }
    if (over == Factor::a) {
        CMatrix out(shape.dim_b, shape.dim_b);
        for (std::size_t ia = 0; ia < shape.dim_a; ++ia) {
            for (std::size_t i = 0; i < shape.dim_b; ++i) {
                for (std::size_t j = 0; j < shape.dim_b; ++j) {
                    out(i, j) += rho(shape.joint_index(ia, i), shape.joint_index(ia, j));
                }
            }
        }
        return out;
    }
    CMatrix out(shape.dim_a, shape.dim_a);
    for (std::size_t ib = 0; ib < shape.dim_b; ++ib) {
        for (std::size_t i = 0; i < shape.dim_a; ++i) {
            for (std::size_t j = 0; j < shape.dim_a; ++j) {
                out(i, j) += rho(shape.joint_index(i, ib), shape.joint_index(j, ib));
            }
        }
    }
    return out;
}

CMatrix reduced_density_b(const CVector &v, BipartiteShape shape) {
    if (v.dim() != shape.joint_dim()) {
        throw ShapeError("reduced_density_b: vector dimension does not match shape");
    }
    CMatrix out(shape.dim_b, shape.dim_b);
    for (std::size_t ia = 0; ia < shape.dim_a; ++ia) {
        for (std::size_t i = 0; i < shape.dim_b; ++i) {
            const cd vi = v[shape.joint_index(ia, i)];
            for (std::size_t j = 0; j < shape.dim_b; ++j) {
                out(i, j) += vi * std::conj(v[shape.joint_index(ia, j)]);
            }
        }
    }
    return out;
}

CVector apply_a(const CMatrix &op, const CVector &v, BipartiteShape shape) {
    require_local(op, shape.dim_a, "apply_a");
    if (v.dim() != shape.joint_dim()) {
        throw ShapeError("apply_a: vector dimension does not match shape");
    }
    CVector out(v.dim());
    for (std::size_t i = 0; i < shape.dim_a; ++i) {
        for (std::size_t k = 0; k < shape.dim_a; ++k) {
            const cd c = op(i, k);
            if (c == cd{0.0, 0.0}) {
                continue;
            }
            for (std::size_t b = 0; b < shape.dim_b; ++b) {
                out[shape.joint_index(i, b)] += c * v[shape.joint_index(k, b)];
            }
        }
    }
    return out;
}

CVector apply_b(const CMatrix &op, const CVector &v, BipartiteShape shape) {
    require_local(op, shape.dim_b, "apply_b");
    if (v.dim() != shape.joint_dim()) {
        throw ShapeError("apply_b: vector dimension does not match shape");
    }
    CVector out(v.dim());
    for (std::size_t a = 0; a < shape.dim_a; ++a) {
        for (std::size_t j = 0; j < shape.dim_b; ++j) {
            cd acc{0.0, 0.0};
            for (std::size_t l = 0; l < shape.dim_b; ++l) {
                acc += op(j, l) * v[shape.joint_index(a, l)];
            }
            out[shape.joint_index(a, j)] = acc;
        }
    }
    return out;
}

CVector apply_local(Factor side, const CMatrix &op, const CVector &v, BipartiteShape shape) {
    return side == Factor::a ? apply_a(op, v, shape) : apply_b(op, v, shape);
}

// ---------------------------------------------------------------- decompositions

SvdResult svd(const CMatrix &m) {
    if (m.rows() >= m.cols()) {
        return tall_svd(m);
    }
    // M^dagger = V S U^dagger
    SvdResult t = tall_svd(m.adjoint());
    return SvdResult{std::move(t.v), std::move(t.sigma), std::move(t.u)};
}

EigenResult hermitian_eigen(const CMatrix &h) {
    if (!h.is_square()) {
        throw ShapeError("hermitian_eigen requires a square matrix");
    }
    const std::size_t n = h.rows();
    CMatrix a = h;
    CMatrix v = CMatrix::identity(n);

    double scale = 0.0;
    for (const cd &z : a.entries()) {
        scale = std::max(scale, std::abs(z));
    }

    for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off = std::max(off, std::abs(a(p, q)));
            }
        }
        if (off <= 1e-15 * scale || off == 0.0) {
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cd apq = a(p, q);
                const double r = std::abs(apq);
                if (r == 0.0) {
                    continue;
                }
                // J = diag(1, e^{-i phi}) * [[c, s], [-s, c]] on (p, q).
                const cd ph = std::conj(apq) / r;  // e^{-i phi}
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = (aqq - app) / (2.0 * r);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                // A <- A J
                for (std::size_t k = 0; k < n; ++k) {
                    const cd kp = a(k, p);
                    const cd kq = a(k, q) * ph;
                    a(k, p) = c * kp - s * kq;
                    a(k, q) = s * kp + c * kq;
                }
                // A <- J^dagger A
                const cd phc = std::conj(ph);
                for (std::size_t k = 0; k < n; ++k) {
                    const cd pk = a(p, k);
                    const cd qk = a(q, k) * phc;
                    a(p, k) = c * pk - s * qk;
                    a(q, k) = s * pk + c * qk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (std::size_t k = 0; k < n; ++k) {
                    const cd kp = v(k, p);
                    const cd kq = v(k, q) * ph;
                    v(k, p) = c * kp - s * kq;
                    v(k, q) = s * kp + c * kq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
    EigenResult out{std::vector<double>(n), CMatrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) {
            out.vectors(i, k) = v(i, order[k]);
        }
    }
    return out;
}

SchmidtResult schmidt_decompose(const CVector &v, BipartiteShape shape, double sigma_min) {
    if (v.dim() != shape.joint_dim()) {
        throw ShapeError("schmidt_decompose: vector dimension " + std::to_string(v.dim()) +
                         " does not match shape " + std::to_string(shape.dim_a) + "x" +
                         std::to_string(shape.dim_b));
    }
    SchmidtResult out;
    const double total = v.norm();
    if (total == 0.0) {
        return out;
    }

    // v = sum_ab M[a][b] e_a (x) e_b, and M = U S V^dagger gives
    // v = sum_i s_i u_i (x) conj(v_i).
    const CMatrix coeff(shape.dim_a, shape.dim_b, std::vector<cd>(v.entries().begin(), v.entries().end()));
    const SvdResult dec = svd(coeff);

    CVector recon(v.dim());
    for (std::size_t i = 0; i < dec.sigma.size(); ++i) {
        const double s = dec.sigma[i];
        if (s <= sigma_min * total) {
            out.dropped_mass += s * s;
            continue;
        }
        CVector left = dec.u.column(i);
        CVector right(shape.dim_b);
        for (std::size_t b = 0; b < shape.dim_b; ++b) {
            right[b] = std::conj(dec.v(b, i));
        }
        recon += s * tensor_vec(left, right);
        out.coefficients.push_back(s);
        out.left_vectors.push_back(std::move(left));
        out.right_vectors.push_back(std::move(right));
    }
    out.residual = (v - recon).norm();
    return out;
}

Projector projector_onto(std::span<const CVector> vectors) {
    if (vectors.empty()) {
        throw ValidationError("projector_onto: need at least one vector");
    }
    const CMatrix gram = gram_matrix(vectors);
    const double defect = max_abs_diff(gram, CMatrix::identity(vectors.size()));
    if (defect > 1e-10) {
        throw ValidationError("projector_onto: vectors are not orthonormal (defect " + std::to_string(defect) + ")");
    }
    CMatrix m(vectors[0].dim(), vectors[0].dim());
    for (const CVector &v : vectors) {
        m += CMatrix::outer(v, v);
    }
    return Projector(std::move(m));
}

CMatrix gram_matrix(std::span<const CVector> vectors) {
    CMatrix g(vectors.size(), vectors.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        for (std::size_t j = 0; j < vectors.size(); ++j) {
            g(i, j) = inner(vectors[i], vectors[j]);
        }
    }
    return g;
}

CVector random_unit_vector(std::size_t dim, Rng &rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (;;) {
        CVector v(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            v[i] = cd{re, im};
        }
        if (v.norm() > 1e-8) {
            return v.normalized();
        }
    }
}

CMatrix random_unitary(std::size_t dim, Rng &rng) {
    std::vector<CVector> cols;
    cols.reserve(dim);
    while (cols.size() < dim) {
        CVector c = random_unit_vector(dim, rng);
        // Two passes of modified Gram-Schmidt.
        for (int pass = 0; pass < 2; ++pass) {
            for (const CVector &q : cols) {
                c -= inner(q, c) * q;
            }
        }
        if (c.norm() < 1e-6) {
            continue;
        }
        cols.push_back(c.normalized());
    }
    return CMatrix::from_columns(cols);
}

}  // namespace selfcheck
