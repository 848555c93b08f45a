#pragma once

// Dense complex linear algebra shared by every layer: the rank policy,
// range / kernel extraction and subspaces compared through their projectors.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "cstarloc/error.hpp"

namespace cstarloc {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace tol {
/// Singular values / eigenvalues below rank_rel * (largest one) are null directions.
inline constexpr double rank_rel = 1e-9;
/// Two subspaces are equal when their orthogonal projectors differ by at most this (Frobenius).
inline constexpr double subspace_frobenius = 1e-8;
/// Hermiticity / positivity slack used when accepting densities.
inline constexpr double density = 1e-9;
}  // namespace tol

namespace linalg {

/// Values above rel * max(largest value, scale). A nonzero scale lets callers measure
/// against the size of the map that produced the values, so numerical zeros stay zero.
inline Eigen::Index numerical_rank(const RealVector &values, double rel = tol::rank_rel, double scale = 0.0) {
    if (values.size() == 0) return 0;
    const double top = std::max(values.maxCoeff(), scale);
    if (!(top > 0.0)) return 0;
    const double cut = rel * top;
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < values.size(); ++i)
        if (values[i] > cut) ++r;
    return r;
}

/// Orthonormal basis (columns) of the column space of m.
inline Matrix range_basis(const Matrix &m, double rel = tol::rank_rel, double scale = 0.0) {
    if (m.cols() == 0 || m.rows() == 0) return Matrix(m.rows(), 0);
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
    const RealVector &s = svd.singularValues();
    const Eigen::Index r = numerical_rank(s, rel, scale);
    return svd.matrixU().leftCols(r);
}

/// Orthonormal basis (columns) of the kernel of m.
inline Matrix null_basis(const Matrix &m, double rel = tol::rank_rel, double scale = 0.0) {
    const Eigen::Index n = m.cols();
    if (n == 0) return Matrix(0, 0);
    if (m.rows() == 0) return Matrix::Identity(n, n);
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const Eigen::Index r = numerical_rank(svd.singularValues(), rel, scale);
    return svd.matrixV().rightCols(n - r);
}

/// Largest singular value (spectral norm).
inline double spectral_norm(const Matrix &m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

/// Retained spectral part of a Hermitian PSD matrix: g ~= vectors * diag(values) * vectors^H,
/// keeping eigenvalues above rank_rel * largest.
struct PsdFactor {
    Matrix vectors;       // n x r, orthonormal columns
    RealVector values;    // r positive eigenvalues
    Matrix null_vectors;  // n x (n - r)
};

inline PsdFactor psd_factor(const Matrix &g, double rel = tol::rank_rel) {
    PsdFactor out;
    const Eigen::Index n = g.rows();
    if (n == 0) {
        out.vectors = Matrix(0, 0);
        out.values = RealVector(0);
        out.null_vectors = Matrix(0, 0);
        return out;
    }
    const Matrix sym = 0.5 * (g + g.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    const RealVector &ev = es.eigenvalues();  // ascending
    const double top = std::max(0.0, ev(n - 1));
    const double cut = rel * top;
    Eigen::Index first = n;
    if (top > 0.0) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (ev(i) > cut) {
                first = i;
                break;
            }
        }
    }
    const Eigen::Index r = n - first;
    out.vectors = es.eigenvectors().rightCols(r);
    out.values = ev.tail(r);
    out.null_vectors = es.eigenvectors().leftCols(first);
    return out;
}

}  // namespace linalg

/// A complex-linear subspace of C^d held as an orthonormal column basis.
class Subspace {
 public:
    Subspace() = default;

    /// Zero subspace of C^ambient.
    explicit Subspace(Eigen::Index ambient) : basis_(ambient, 0) {}

    /// Span of the columns of `vectors` (any spanning set, not necessarily independent).
    /// `scale` sets the reference size for the rank cut (see numerical_rank).
    static Subspace span(const Matrix &vectors, double scale = 0.0) {
        Subspace s;
        s.basis_ = linalg::range_basis(vectors, tol::rank_rel, scale);
        return s;
    }

    /// Wraps columns that are already orthonormal.
    static Subspace from_orthonormal(Matrix basis) {
        Subspace s;
        s.basis_ = std::move(basis);
        return s;
    }

    static Subspace whole(Eigen::Index ambient) {
        return from_orthonormal(Matrix::Identity(ambient, ambient));
    }

    /// Kernel of a linear map given by its matrix.
    static Subspace kernel(const Matrix &map, double scale = 0.0) {
        return from_orthonormal(linalg::null_basis(map, tol::rank_rel, scale));
    }

    Eigen::Index ambient_dim() const { return basis_.rows(); }
    Eigen::Index dim() const { return basis_.cols(); }
    const Matrix &basis() const { return basis_; }

    Matrix projector() const { return basis_ * basis_.adjoint(); }

    Vector project(const Vector &v) const { return basis_ * (basis_.adjoint() * v); }

    /// Norm of the component of v orthogonal to this subspace.
    double distance(const Vector &v) const { return (v - project(v)).norm(); }

    Subspace complement() const {
        const Eigen::Index d = ambient_dim();
        if (dim() == 0) return whole(d);
        return kernel(basis_.adjoint());
    }

    /// Intersection via the kernel of [Q1, -Q2].
    Subspace intersect(const Subspace &other) const {
        require(ambient_dim() == other.ambient_dim(), ErrorKind::shape, "subspace ambient mismatch");
        if (dim() == 0 || other.dim() == 0) return Subspace(ambient_dim());
        Matrix stacked(ambient_dim(), dim() + other.dim());
        stacked << basis_, -other.basis_;
        const Matrix ker = linalg::null_basis(stacked);
        if (ker.cols() == 0) return Subspace(ambient_dim());
        return span(basis_ * ker.topRows(dim()));
    }

    Subspace sum(const Subspace &other) const {
        require(ambient_dim() == other.ambient_dim(), ErrorKind::shape, "subspace ambient mismatch");
        Matrix stacked(ambient_dim(), dim() + other.dim());
        stacked << basis_, other.basis_;
        return span(stacked);
    }

    /// Image under a linear map; ranks are cut relative to the size of the map.
    Subspace image(const Matrix &map) const {
        require(map.cols() == ambient_dim(), ErrorKind::shape, "map does not act on this subspace");
        if (dim() == 0) return Subspace(map.rows());
        return span(map * basis_, linalg::spectral_norm(map));
    }

    /// Frobenius distance between orthogonal projectors.
    double projector_distance(const Subspace &other) const {
        require(ambient_dim() == other.ambient_dim(), ErrorKind::shape, "subspace ambient mismatch");
        return (projector() - other.projector()).norm();
    }

    bool equals(const Subspace &other, double frob = tol::subspace_frobenius) const {
        return projector_distance(other) <= frob;
    }

    /// Largest residual of other's basis vectors against this subspace.
    double containment_residual(const Subspace &other) const {
        if (other.dim() == 0) return 0.0;
        const Matrix resid = other.basis_ - basis_ * (basis_.adjoint() * other.basis_);
        return resid.colwise().norm().maxCoeff();
    }

    bool contains(const Subspace &other, double t = tol::subspace_frobenius) const {
        return containment_residual(other) <= t;
    }

 private:
    Matrix basis_;
};

}  // namespace cstarloc
