#pragma once

// Small dense linear-algebra kernels.  Problem dimensions stay below ~100 in
// every experiment, so everything here is straightforward O(d^3) code with no
// external dependencies.

#include <algorithm>
#include <cstddef>
#include <numeric>

#include "common.hpp"
#include "rng.hpp"

namespace som {

// Dense row-major matrix.
struct mat {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;

    mat() = default;
    mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    static mat identity(std::size_t n) {
        mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    Vec col(std::size_t j) const {
        Vec v(rows);
        for (std::size_t i = 0; i < rows; ++i) v[i] = (*this)(i, j);
        return v;
    }
};

inline double max_abs(const mat& m) {
    double v = 0.0;
    for (double x : m.a) v = std::max(v, std::abs(x));
    return v;
}

inline double frobenius_norm(const mat& m) {
    double s = 0.0;
    for (double x : m.a) s += x * x;
    return std::sqrt(s);
}

// max |A^T A - I|, the orthonormality defect of a frame.
inline double orthonormality_defect(const mat& f) {
    double defect = 0.0;
    for (std::size_t c1 = 0; c1 < f.cols; ++c1) {
        for (std::size_t c2 = c1; c2 < f.cols; ++c2) {
            double g = 0.0;
            for (std::size_t i = 0; i < f.rows; ++i) g += f(i, c1) * f(i, c2);
            if (c1 == c2) g -= 1.0;
            defect = std::max(defect, std::abs(g));
        }
    }
    return defect;
}

// Solves A x = b for symmetric positive definite A by Cholesky (LL^T).
inline Vec cholesky_solve(mat A, Vec b) {
    const std::size_t n = A.rows;
    if (A.cols != n || b.size() != n) throw invalid_input("cholesky_solve: shape mismatch");
    for (std::size_t j = 0; j < n; ++j) {
        double d = A(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= A(j, k) * A(j, k);
        if (!(d > 0.0)) throw invalid_input("cholesky_solve: matrix not positive definite");
        const double ljj = std::sqrt(d);
        A(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = A(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= A(i, k) * A(j, k);
            A(i, j) = s / ljj;
        }
    }
    // L y = b
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= A(i, k) * b[k];
        b[i] = s / A(i, i);
    }
    // L^T x = y
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= A(k, ii) * b[k];
        b[ii] = s / A(ii, ii);
    }
    return b;
}

struct sym_eig_result {
    Vec values;   // ascending
    mat vectors;  // orthonormal eigenvectors as columns, matching values
};

// Full spectral decomposition of a symmetric matrix by cyclic Jacobi
// rotations.  Input asymmetry beyond 1e-12 (relative) is rejected.
inline sym_eig_result sym_eig(const mat& M) {
    const std::size_t n = M.rows;
    if (M.cols != n || n == 0) throw invalid_input("sym_eig: matrix must be square and nonempty");
    const double scale = std::max(max_abs(M), 1e-300);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(M(i, j) - M(j, i)) > 1e-12 * scale)
                throw invalid_input("sym_eig: matrix is not symmetric");

    mat A = M;
    mat V = mat::identity(n);
    const double norm = std::max(frobenius_norm(M), 1e-300);
    const double tol = 1e-13 * norm;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * A(p, q) * A(p, q);
        if (std::sqrt(off) <= tol) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double tau = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // A <- J^T A J with J the (p,q) rotation
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = A(i, p), aiq = A(i, q);
                    A(i, p) = c * aip - s * aiq;
                    A(i, q) = s * aip + c * aiq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const double apj = A(p, j), aqj = A(q, j);
                    A(p, j) = c * apj - s * aqj;
                    A(q, j) = s * apj + c * aqj;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = V(i, p), viq = V(i, q);
                    V(i, p) = c * vip - s * viq;
                    V(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t i, std::size_t j) { return A(i, i) < A(j, j); });

    sym_eig_result out;
    out.values.resize(n);
    out.vectors = mat(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = A(idx[j], idx[j]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = V(i, idx[j]);
    }
    return out;
}

// An orthonormal basis of (a subspace of) the orthogonal complement of y:
// the first r non-pivot columns of the Householder reflector that maps
// y/|y| onto the first axis.  Deterministic; requires |y| > 0, r <= d - 1.
inline mat householder_complement(const Vec& y, std::size_t r) {
    const std::size_t d = y.size();
    const double ny = vec_norm(y);
    if (!(ny > 0.0)) throw degenerate_instance("householder_complement: zero vector");
    if (r + 1 > d) throw invalid_input("householder_complement: r exceeds d - 1");

    Vec v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = y[i] / ny;
    v[0] += (v[0] >= 0.0 ? 1.0 : -1.0);
    const double beta = 2.0 / vec_norm_sq(v);

    mat frame(d, r);
    for (std::size_t c = 0; c < r; ++c) {
        const std::size_t j = c + 1;  // columns 1..d-1 of H are orthogonal to y
        for (std::size_t i = 0; i < d; ++i)
            frame(i, c) = (i == j ? 1.0 : 0.0) - beta * v[i] * v[j];
    }
    return frame;
}

// Gram-Schmidt of `candidate` against accepted columns; returns false when
// the residual is numerically negligible.
inline bool orthonormalize_against(const std::vector<Vec>& basis, Vec& candidate) {
    for (int pass = 0; pass < 2; ++pass) {
        for (const Vec& b : basis) {
            const double proj = vec_dot(b, candidate);
            vec_axpy(-proj, b, candidate);
        }
    }
    const double nrm = vec_norm(candidate);
    if (nrm < 1e-10) return false;
    vec_scale(candidate, 1.0 / nrm);
    return true;
}

// Orthonormal basis of the complement of span(basis), dimension d - |basis|.
inline mat complement_basis(const std::vector<Vec>& basis, std::size_t d) {
    std::vector<Vec> acc = basis;
    std::vector<Vec> out;
    for (std::size_t j = 0; j < d && acc.size() < d; ++j) {
        Vec e(d, 0.0);
        e[j] = 1.0;
        if (orthonormalize_against(acc, e)) {
            acc.push_back(e);
            out.push_back(acc.back());
        }
    }
    mat frame(d, out.size());
    for (std::size_t c = 0; c < out.size(); ++c)
        for (std::size_t i = 0; i < d; ++i) frame(i, c) = out[c][i];
    return frame;
}

// Haar-ish random orthogonal matrix via Gram-Schmidt on Gaussian columns.
inline mat random_orthogonal(std::size_t d, rng& gen) {
    std::vector<Vec> cols;
    while (cols.size() < d) {
        Vec c = gen.normal_vec(d);
        if (orthonormalize_against(cols, c)) cols.push_back(c);
    }
    mat q(d, d);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < d; ++i) q(i, j) = cols[j][i];
    return q;
}

inline Vec mat_vec(const mat& A, const Vec& x) {
    Vec y(A.rows, 0.0);
    for (std::size_t i = 0; i < A.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < A.cols; ++j) s += A(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

}  // namespace som
