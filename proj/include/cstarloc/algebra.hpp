#pragma once

// Finite-dimensional C*-algebras realised as direct sums of full matrix
// blocks M_{n_1} + ... + M_{n_k}, and their (block-diagonal) elements.
//
// Coordinates: an element is flattened block by block, each block row-major.
// That is also the order of the matrix-unit basis returned by basis(), so the
// flattening is the coordinate vector in that basis and the Euclidean inner
// product on coordinates is the trace pairing tr(a* b).

#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "cstarloc/linalg.hpp"

namespace cstarloc {

class Algebra {
 public:
    Algebra() : Algebra(std::vector<int>{1}) {}

    explicit Algebra(std::vector<int> block_dims) : dims_(std::move(block_dims)) {
        require(!dims_.empty(), ErrorKind::invalid_argument, "algebra needs at least one block");
        offsets_.reserve(dims_.size());
        unit_offsets_.reserve(dims_.size());
        int total = 0;
        int units = 0;
        for (int n : dims_) {
            require(n >= 1, ErrorKind::invalid_argument, "block dimension must be >= 1, got " + std::to_string(n));
            offsets_.push_back(total);
            unit_offsets_.push_back(units);
            total += n * n;
            units += n;
        }
        total_dim_ = total;
        rep_dim_ = units;
    }

    const std::vector<int> &block_dims() const { return dims_; }
    int num_blocks() const { return static_cast<int>(dims_.size()); }
    int block_dim(int k) const { return dims_[static_cast<std::size_t>(k)]; }

    /// Complex dimension sum n_i^2.
    int total_dim() const { return total_dim_; }

    /// Dimension of the defining representation on C^{n_1} + ... + C^{n_k}.
    int rep_dim() const { return rep_dim_; }

    /// Offset of block k inside the flattened coordinate vector.
    int block_offset(int k) const { return offsets_[static_cast<std::size_t>(k)]; }

    /// Offset of block k inside C^{n_1} + ... + C^{n_k}.
    int rep_offset(int k) const { return unit_offsets_[static_cast<std::size_t>(k)]; }

    friend bool operator==(const Algebra &a, const Algebra &b) { return a.dims_ == b.dims_; }
    friend bool operator!=(const Algebra &a, const Algebra &b) { return !(a == b); }

 private:
    std::vector<int> dims_;
    std::vector<int> offsets_;
    std::vector<int> unit_offsets_;
    int total_dim_ = 0;
    int rep_dim_ = 0;
};

inline Algebra algebra_new(std::vector<int> block_dims) { return Algebra(std::move(block_dims)); }

class Element {
 public:
    Element() = default;

    Element(Algebra algebra, std::vector<Matrix> blocks) : algebra_(std::move(algebra)), blocks_(std::move(blocks)) {
        require(static_cast<int>(blocks_.size()) == algebra_.num_blocks(), ErrorKind::shape,
                "expected " + std::to_string(algebra_.num_blocks()) + " blocks, got " + std::to_string(blocks_.size()));
        for (int k = 0; k < algebra_.num_blocks(); ++k) {
            const auto &b = blocks_[static_cast<std::size_t>(k)];
            const int n = algebra_.block_dim(k);
            require(b.rows() == n && b.cols() == n, ErrorKind::shape,
                    "block " + std::to_string(k) + " must be " + std::to_string(n) + "x" + std::to_string(n));
        }
    }

    static Element zero(const Algebra &algebra) {
        std::vector<Matrix> blocks;
        for (int n : algebra.block_dims()) blocks.push_back(Matrix::Zero(n, n));
        return Element(algebra, std::move(blocks));
    }

    static Element identity(const Algebra &algebra) {
        std::vector<Matrix> blocks;
        for (int n : algebra.block_dims()) blocks.push_back(Matrix::Identity(n, n));
        return Element(algebra, std::move(blocks));
    }

    /// Matrix unit e_{rs} of block k.
    static Element unit(const Algebra &algebra, int k, int r, int s) {
        Element e = zero(algebra);
        e.blocks_[static_cast<std::size_t>(k)](r, s) = 1.0;
        return e;
    }

    static Element from_coords(const Algebra &algebra, const Vector &coords) {
        require(coords.size() == algebra.total_dim(), ErrorKind::shape, "coordinate vector has wrong length");
        std::vector<Matrix> blocks;
        for (int k = 0; k < algebra.num_blocks(); ++k) {
            const int n = algebra.block_dim(k);
            Matrix b(n, n);
            const int off = algebra.block_offset(k);
            for (int r = 0; r < n; ++r)
                for (int s = 0; s < n; ++s) b(r, s) = coords(off + r * n + s);
            blocks.push_back(std::move(b));
        }
        return Element(algebra, std::move(blocks));
    }

    const Algebra &algebra() const { return algebra_; }
    const std::vector<Matrix> &blocks() const { return blocks_; }
    const Matrix &block(int k) const { return blocks_[static_cast<std::size_t>(k)]; }
    Matrix &block(int k) { return blocks_[static_cast<std::size_t>(k)]; }

    Vector coords() const {
        Vector v(algebra_.total_dim());
        for (int k = 0; k < algebra_.num_blocks(); ++k) {
            const int n = algebra_.block_dim(k);
            const int off = algebra_.block_offset(k);
            const Matrix &b = block(k);
            for (int r = 0; r < n; ++r)
                for (int s = 0; s < n; ++s) v(off + r * n + s) = b(r, s);
        }
        return v;
    }

    Element adjoint() const {
        std::vector<Matrix> out;
        out.reserve(blocks_.size());
        for (const auto &b : blocks_) out.push_back(b.adjoint());
        return Element(algebra_, std::move(out));
    }

    /// Action on C^{n_1} + ... + C^{n_k}.
    Vector apply(const Vector &h) const {
        require(h.size() == algebra_.rep_dim(), ErrorKind::shape, "vector has wrong length for this algebra");
        Vector out(h.size());
        for (int k = 0; k < algebra_.num_blocks(); ++k) {
            const int n = algebra_.block_dim(k);
            const int off = algebra_.rep_offset(k);
            out.segment(off, n) = block(k) * h.segment(off, n);
        }
        return out;
    }

    Element &operator+=(const Element &o) {
        check_same(o);
        for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] += o.blocks_[k];
        return *this;
    }
    Element &operator-=(const Element &o) {
        check_same(o);
        for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] -= o.blocks_[k];
        return *this;
    }
    Element &operator*=(cplx c) {
        for (auto &b : blocks_) b *= c;
        return *this;
    }

    friend Element operator+(Element a, const Element &b) { return a += b; }
    friend Element operator-(Element a, const Element &b) { return a -= b; }
    friend Element operator-(Element a) { return a *= -1.0; }
    friend Element operator*(cplx c, Element a) { return a *= c; }
    friend Element operator*(Element a, cplx c) { return a *= c; }

    friend Element operator*(const Element &a, const Element &b) {
        a.check_same(b);
        std::vector<Matrix> out;
        out.reserve(a.blocks_.size());
        for (std::size_t k = 0; k < a.blocks_.size(); ++k) out.push_back(a.blocks_[k] * b.blocks_[k]);
        return Element(a.algebra_, std::move(out));
    }

    void check_same(const Element &o) const {
        require(algebra_ == o.algebra_, ErrorKind::shape, "elements belong to different algebras");
    }

 private:
    Algebra algebra_;
    std::vector<Matrix> blocks_;
};

inline Element mul(const Element &a, const Element &b) { return a * b; }

inline Element adjoint(const Element &a) { return a.adjoint(); }

/// C*-norm: largest singular value over all blocks.
inline double operator_norm(const Element &a) {
    double best = 0.0;
    for (const auto &b : a.blocks()) best = std::max(best, linalg::spectral_norm(b));
    return best;
}

/// Sum of block traces (unnormalised).
inline cplx trace(const Element &a) {
    cplx t = 0.0;
    for (const auto &b : a.blocks()) t += b.trace();
    return t;
}

/// tr(a* b), the Hilbert-Schmidt pairing; equals the coordinate inner product.
inline cplx trace_pairing(const Element &a, const Element &b) {
    a.check_same(b);
    cplx t = 0.0;
    for (int k = 0; k < a.algebra().num_blocks(); ++k) t += (a.block(k).adjoint() * b.block(k)).trace();
    return t;
}

/// Every block Hermitian and with smallest eigenvalue >= -tol, both relative to max(1, ||a||).
inline bool is_positive(const Element &a, double t) {
    require(t >= 0.0, ErrorKind::invalid_argument, "tolerance must be non-negative");
    const double scale = std::max(1.0, operator_norm(a));
    for (const auto &b : a.blocks()) {
        if ((b - b.adjoint()).norm() > t * scale) return false;
        const Matrix h = 0.5 * (b + b.adjoint());
        Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
        if (es.eigenvalues()(0) < -t * scale) return false;
    }
    return true;
}

/// Matrix units, ordered by block, then row-major (e_11, e_12, ..., e_nn).
inline std::vector<Element> basis(const Algebra &algebra) {
    std::vector<Element> out;
    out.reserve(static_cast<std::size_t>(algebra.total_dim()));
    for (int k = 0; k < algebra.num_blocks(); ++k) {
        const int n = algebra.block_dim(k);
        for (int r = 0; r < n; ++r)
            for (int s = 0; s < n; ++s) out.push_back(Element::unit(algebra, k, r, s));
    }
    return out;
}

/// (block, row, col) of the i-th basis element.
struct UnitIndex {
    int block;
    int row;
    int col;
};

inline UnitIndex unit_index(const Algebra &algebra, int i) {
    for (int k = algebra.num_blocks() - 1; k >= 0; --k) {
        if (i >= algebra.block_offset(k)) {
            const int n = algebra.block_dim(k);
            const int local = i - algebra.block_offset(k);
            return {k, local / n, local % n};
        }
    }
    fail(ErrorKind::invalid_argument, "basis index out of range");
}

/// Matrix of x -> a x on coordinates.
inline Matrix left_multiplication(const Element &a) {
    const Algebra &alg = a.algebra();
    Matrix m = Matrix::Zero(alg.total_dim(), alg.total_dim());
    for (int k = 0; k < alg.num_blocks(); ++k) {
        const int n = alg.block_dim(k);
        const int off = alg.block_offset(k);
        const Matrix &b = a.block(k);
        // (a x)_{rs} = sum_t a_{rt} x_{ts}
        for (int r = 0; r < n; ++r)
            for (int s = 0; s < n; ++s)
                for (int t = 0; t < n; ++t) m(off + r * n + s, off + t * n + s) = b(r, t);
    }
    return m;
}

/// Matrix of x -> x a on coordinates.
inline Matrix right_multiplication(const Element &a) {
    const Algebra &alg = a.algebra();
    Matrix m = Matrix::Zero(alg.total_dim(), alg.total_dim());
    for (int k = 0; k < alg.num_blocks(); ++k) {
        const int n = alg.block_dim(k);
        const int off = alg.block_offset(k);
        const Matrix &b = a.block(k);
        // (x a)_{rs} = sum_t x_{rt} a_{ts}
        for (int r = 0; r < n; ++r)
            for (int s = 0; s < n; ++s)
                for (int t = 0; t < n; ++t) m(off + r * n + s, off + r * n + t) = b(t, s);
    }
    return m;
}

}  // namespace cstarloc
