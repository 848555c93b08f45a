#pragma once

// Linear functionals on a block algebra, represented by density blocks
// through the trace pairing  omega(a) = sum_k tr(rho_k a_k).
//
// Every functional on a finite-dimensional algebra is normal, so "normal
// state" and "state" are the same thing here.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cstarloc/algebra.hpp"

namespace cstarloc {

/// An arbitrary (not necessarily positive) linear functional.
class Functional {
 public:
    Functional() = default;

    Functional(Algebra algebra, std::vector<Matrix> density) {
        Element shape_check(algebra, density);
        algebra_ = std::move(algebra);
        density_ = std::move(density);
    }

    const Algebra &algebra() const { return algebra_; }
    const std::vector<Matrix> &density() const { return density_; }

    cplx operator()(const Element &a) const {
        require(a.algebra() == algebra_, ErrorKind::shape, "functional and element live on different algebras");
        cplx v = 0.0;
        for (int k = 0; k < algebra_.num_blocks(); ++k)
            v += (density_[static_cast<std::size_t>(k)] * a.block(k)).trace();
        return v;
    }

    /// Functional norm = trace norm of the density.
    double norm() const {
        double n = 0.0;
        for (const auto &d : density_) {
            Eigen::JacobiSVD<Matrix> svd(d);
            n += svd.singularValues().sum();
        }
        return n;
    }

 private:
    Algebra algebra_;
    std::vector<Matrix> density_;
};

/// A positive functional; a state when its mass is 1.
class PositiveFunctional {
 public:
    PositiveFunctional() = default;

    /// Validates shapes and positivity (Hermitian PSD within tol::density), then symmetrises.
    PositiveFunctional(Algebra algebra, std::vector<Matrix> density) {
        Element shape_check(algebra, density);
        mass_ = 0.0;
        for (std::size_t k = 0; k < density.size(); ++k) {
            Matrix &d = density[k];
            const double scale = std::max(1.0, linalg::spectral_norm(d));
            require((d - d.adjoint()).norm() <= tol::density * scale, ErrorKind::positivity,
                    "density block " + std::to_string(k) + " is not Hermitian");
            d = 0.5 * (d + d.adjoint());
            if (d.rows() > 0) {
                Eigen::SelfAdjointEigenSolver<Matrix> es(d, Eigen::EigenvaluesOnly);
                require(es.eigenvalues()(0) >= -tol::density * scale, ErrorKind::positivity,
                        "density block " + std::to_string(k) + " has a negative eigenvalue");
            }
            mass_ += d.trace().real();
        }
        algebra_ = std::move(algebra);
        density_ = std::move(density);
    }

    const Algebra &algebra() const { return algebra_; }
    const std::vector<Matrix> &density() const { return density_; }
    const Matrix &density(int k) const { return density_[static_cast<std::size_t>(k)]; }

    /// omega(1) = sum of traces; also the functional norm.
    double mass() const { return mass_; }

    bool is_state(double t = 1e-9) const { return std::abs(mass_ - 1.0) <= t; }

    cplx operator()(const Element &a) const {
        require(a.algebra() == algebra_, ErrorKind::shape, "functional and element live on different algebras");
        cplx v = 0.0;
        for (int k = 0; k < algebra_.num_blocks(); ++k) v += (density(k) * a.block(k)).trace();
        return v;
    }

    Functional as_functional() const { return Functional(algebra_, density_); }

    Element density_element() const { return Element(algebra_, density_); }

 private:
    Algebra algebra_;
    std::vector<Matrix> density_;
    double mass_ = 0.0;
};

using State = PositiveFunctional;

inline PositiveFunctional functional_from_density(const Algebra &algebra, std::vector<Matrix> density) {
    return PositiveFunctional(algebra, std::move(density));
}

inline cplx evaluate(const PositiveFunctional &omega, const Element &a) { return omega(a); }
inline cplx evaluate(const Functional &tau, const Element &a) { return tau(a); }

/// Normalised trace: rho_k = I / (n_1 + ... + n_k). Faithful, mass 1.
inline PositiveFunctional trace_state(const Algebra &algebra) {
    std::vector<Matrix> d;
    const double scale = 1.0 / algebra.rep_dim();
    for (int n : algebra.block_dims()) d.push_back(Matrix::Identity(n, n) * scale);
    return PositiveFunctional(algebra, std::move(d));
}

/// omega = sum_j weights[j] parts[j], possibly the truncation of a countable
/// combination; then tail_bound bounds the weight mass left out.
struct ConvexDecomposition {
    std::vector<double> weights;
    std::vector<PositiveFunctional> parts;
    double tail_bound = 0.0;

    std::size_t size() const { return weights.size(); }

    double weight_sum() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }
};

namespace detail {
inline void validate_decomposition(const ConvexDecomposition &d) {
    require(!d.parts.empty(), ErrorKind::invalid_argument, "decomposition has no parts");
    require(d.weights.size() == d.parts.size(), ErrorKind::invalid_argument, "weights and parts differ in length");
    require(d.tail_bound >= 0.0, ErrorKind::invalid_argument, "tail bound must be non-negative");
    for (double w : d.weights)
        require(w > 0.0, ErrorKind::invalid_argument, "decomposition weights must be strictly positive");
    for (const auto &p : d.parts)
        require(p.algebra() == d.parts.front().algebra(), ErrorKind::shape, "parts live on different algebras");
}
}  // namespace detail

/// sum_j lambda_j omega_j over the retained terms, without looking at the tail.
inline PositiveFunctional partial_sum(const ConvexDecomposition &d) {
    detail::validate_decomposition(d);
    const Algebra &alg = d.parts.front().algebra();
    std::vector<Matrix> rho;
    for (int n : alg.block_dims()) rho.push_back(Matrix::Zero(n, n));
    for (std::size_t j = 0; j < d.size(); ++j)
        for (int k = 0; k < alg.num_blocks(); ++k) rho[static_cast<std::size_t>(k)] += d.weights[j] * d.parts[j].density(k);
    return PositiveFunctional(alg, std::move(rho));
}

/// Density of sum_j lambda_j omega_j; requires an exact (finite) decomposition.
inline PositiveFunctional convex_combine(const ConvexDecomposition &d) {
    require(d.tail_bound == 0.0, ErrorKind::invalid_argument,
            "convex_combine needs a finite decomposition (tail_bound = 0); use partial_sum for truncations");
    return partial_sum(d);
}

/// Weight sequence j -> lambda_j (j >= 1) of a countable convex combination.
/// Only rules whose tail 1 - sum_{j<=N} lambda_j is known in closed form can be truncated.
class WeightRule {
 public:
    enum class Kind { geometric, finite, custom };

    /// lambda_j = (1 - r) r^{j-1}; tail after N terms is r^N.
    static WeightRule geometric(double ratio) {
        require(ratio > 0.0 && ratio < 1.0, ErrorKind::invalid_argument, "geometric ratio must lie in (0, 1)");
        WeightRule w;
        w.kind_ = Kind::geometric;
        w.ratio_ = ratio;
        return w;
    }

    /// Finitely many weights summing to 1; weights past the end are zero.
    static WeightRule finite(std::vector<double> weights) {
        require(!weights.empty(), ErrorKind::invalid_argument, "finite rule needs weights");
        double s = 0.0;
        for (double x : weights) {
            require(x > 0.0, ErrorKind::invalid_argument, "finite rule weights must be positive");
            s += x;
        }
        require(std::abs(s - 1.0) <= 1e-12, ErrorKind::invalid_argument, "finite rule weights must sum to 1");
        WeightRule w;
        w.kind_ = Kind::finite;
        w.weights_ = std::move(weights);
        return w;
    }

    /// Arbitrary weights; `tail(N)` must return 1 - sum_{j<=N} lambda_j if the rule is to be truncated.
    static WeightRule custom(std::function<double(std::size_t)> weight,
                             std::function<double(std::size_t)> tail = {}) {
        WeightRule w;
        w.kind_ = Kind::custom;
        w.weight_ = std::move(weight);
        w.tail_ = std::move(tail);
        return w;
    }

    Kind kind() const { return kind_; }
    double ratio() const { return ratio_; }
    const std::vector<double> &finite_weights() const { return weights_; }

    double weight(std::size_t j) const {
        switch (kind_) {
            case Kind::geometric: return (1.0 - ratio_) * std::pow(ratio_, static_cast<double>(j) - 1.0);
            case Kind::finite: return j >= 1 && j <= weights_.size() ? weights_[j - 1] : 0.0;
            case Kind::custom: return weight_(j);
        }
        return 0.0;
    }

    std::optional<double> tail_after(std::size_t n) const {
        switch (kind_) {
            case Kind::geometric: return std::pow(ratio_, static_cast<double>(n));
            case Kind::finite: {
                double s = 0.0;
                for (std::size_t j = n; j < weights_.size(); ++j) s += weights_[j];
                return s;
            }
            case Kind::custom:
                if (tail_) return tail_(n);
                return std::nullopt;
        }
        return std::nullopt;
    }

 private:
    Kind kind_ = Kind::finite;
    double ratio_ = 0.0;
    std::vector<double> weights_;
    std::function<double(std::size_t)> weight_;
    std::function<double(std::size_t)> tail_;
};

/// First N terms of sum_j lambda_j omega_j with a certified tail bound.
inline ConvexDecomposition sigma_convex_truncate(const WeightRule &rule,
                                                 const std::function<PositiveFunctional(std::size_t)> &parts_rule,
                                                 std::size_t n) {
    const auto tail = rule.tail_after(n);
    require(tail.has_value(), ErrorKind::unsupported_rule, "weight rule has no closed-form tail");
    require(n >= 1, ErrorKind::invalid_argument, "truncation needs at least one term");
    ConvexDecomposition d;
    for (std::size_t j = 1; j <= n; ++j) {
        const double w = rule.weight(j);
        if (rule.kind() == WeightRule::Kind::finite && w == 0.0) break;
        require(w > 0.0, ErrorKind::invalid_argument, "weight rule produced a non-positive weight");
        PositiveFunctional part = parts_rule(j);
        require(part.is_state(), ErrorKind::invalid_argument, "sigma-convex parts must be states");
        d.weights.push_back(w);
        d.parts.push_back(std::move(part));
    }
    d.tail_bound = std::max(0.0, *tail);
    return d;
}

/// Gram matrix G_ab = omega(e_a^* e_b) over the matrix-unit basis.
/// With e_a = e_rs and e_b = e_tu in one block, e_sr e_tu = delta_rt e_su, so G_ab = delta_rt rho(u, s).
inline Matrix gram_matrix(const PositiveFunctional &omega) {
    const Algebra &alg = omega.algebra();
    Matrix g = Matrix::Zero(alg.total_dim(), alg.total_dim());
    for (int k = 0; k < alg.num_blocks(); ++k) {
        const int n = alg.block_dim(k);
        const int off = alg.block_offset(k);
        const Matrix &rho = omega.density(k);
        for (int r = 0; r < n; ++r)
            for (int s = 0; s < n; ++s)
                for (int u = 0; u < n; ++u) g(off + r * n + s, off + r * n + u) = rho(u, s);
    }
    return g;
}

/// GNS triple for a positive functional, realised on C^dim.
struct GnsRepresentation {
    Algebra algebra;
    int dim = 0;
    std::vector<Matrix> rep_matrices;  // pi(e_i) for the matrix units, in basis() order
    Vector cyclic_vector;              // class of the unit
    Matrix embedding;                  // dim x total_dim: coordinates of a -> class of a

    Matrix represent(const Element &a) const {
        require(a.algebra() == algebra, ErrorKind::shape, "element is not in the represented algebra");
        const Vector c = a.coords();
        Matrix m = Matrix::Zero(dim, dim);
        for (Eigen::Index i = 0; i < c.size(); ++i)
            if (c(i) != cplx(0.0)) m += c(i) * rep_matrices[static_cast<std::size_t>(i)];
        return m;
    }
};

/// Quotient of A by the left kernel {a : omega(a* a) = 0}, via the Gram eigendecomposition.
inline GnsRepresentation gns(const PositiveFunctional &omega) {
    require(omega.mass() > 0.0, ErrorKind::degenerate_input, "GNS needs a nonzero positive functional");
    const Algebra &alg = omega.algebra();
    const linalg::PsdFactor f = linalg::psd_factor(gram_matrix(omega));
    require(f.values.size() > 0, ErrorKind::degenerate_input, "functional vanishes on A");

    GnsRepresentation out;
    out.algebra = alg;
    out.dim = static_cast<int>(f.values.size());
    const RealVector root = f.values.cwiseSqrt();
    out.embedding = root.asDiagonal() * f.vectors.adjoint();
    const Matrix pseudo_inverse = f.vectors * root.cwiseInverse().asDiagonal();
    for (const auto &e : basis(alg)) out.rep_matrices.push_back(out.embedding * left_multiplication(e) * pseudo_inverse);
    out.cyclic_vector = out.embedding * Element::identity(alg).coords();
    return out;
}

/// omega(v) = <v h, h> for a unit vector h in C^{n_1} + ... + C^{n_k}.
inline State vector_state(const Algebra &algebra, const Vector &h) {
    require(h.size() == algebra.rep_dim(), ErrorKind::shape, "vector has wrong length for this algebra");
    require(std::abs(h.norm() - 1.0) <= 1e-12, ErrorKind::invalid_argument, "vector state needs a unit vector");
    std::vector<Matrix> d;
    for (int k = 0; k < algebra.num_blocks(); ++k) {
        const Vector hk = h.segment(algebra.rep_offset(k), algebra.block_dim(k));
        d.push_back(hk * hk.adjoint());
    }
    return State(algebra, std::move(d));
}

/// Spectral decomposition of a density into vector states of its eigenvectors.
/// Eigenvalues at or below 1e-12 of the largest are rounding noise and dropped.
/// Under degenerate eigenvalues the eigenbasis is whatever the solver returns.
inline ConvexDecomposition decompose_into_vector_states(const State &omega) {
    require(omega.is_state(), ErrorKind::invalid_argument, "decomposition into vector states needs a state");
    const Algebra &alg = omega.algebra();
    std::vector<std::pair<RealVector, Matrix>> spectra;
    double top = 0.0;
    for (int k = 0; k < alg.num_blocks(); ++k) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(omega.density(k));
        top = std::max(top, es.eigenvalues().maxCoeff());
        spectra.emplace_back(es.eigenvalues(), es.eigenvectors());
    }
    ConvexDecomposition d;
    for (int k = 0; k < alg.num_blocks(); ++k) {
        const auto &[values, vectors] = spectra[static_cast<std::size_t>(k)];
        for (Eigen::Index i = values.size() - 1; i >= 0; --i) {
            if (values(i) <= 1e-12 * top) continue;
            Vector h = Vector::Zero(alg.rep_dim());
            h.segment(alg.rep_offset(k), alg.block_dim(k)) = vectors.col(i).normalized();
            d.weights.push_back(values(i));
            d.parts.push_back(vector_state(alg, h));
        }
    }
    return d;
}

struct BoundedValue {
    cplx value;
    double error_bound;
};

/// sum_{j<=N} lambda_j omega_j(a_j) for a bounded tuple (a_j), with the
/// truncation error m * tail_bound * sup_j ||a_j||.
inline BoundedValue linf_sum_evaluate(const ConvexDecomposition &d, const std::vector<Element> &tuple, double m) {
    detail::validate_decomposition(d);
    require(tuple.size() >= d.size(), ErrorKind::invalid_argument, "tuple shorter than the retained weights");
    double sup = 0.0;
    for (const auto &a : tuple) sup = std::max(sup, operator_norm(a));
    cplx v = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) {
        require(d.parts[j].mass() <= m * (1.0 + 1e-12), ErrorKind::invalid_argument,
                "part " + std::to_string(j) + " exceeds the norm bound m");
        v += d.weights[j] * d.parts[j](tuple[j]);
    }
    return {v, m * d.tail_bound * sup};
}

}  // namespace cstarloc
