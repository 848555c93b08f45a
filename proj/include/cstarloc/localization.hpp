#pragma once

// Localisation of E = A^n at a positive functional omega:
//   N_omega = {x : omega<x, x> = 0},  E_omega = E / N_omega,
//   (x + N, y + N)_omega = omega<x, y>.
//
// In finite dimension E / N_omega is already complete, so E_omega is the
// quotient itself and closures of images are the images. E_omega is realised
// as C^dim through iota = Lambda^{1/2} V^*, where G = V Lambda V^* is the
// retained part of the ambient Gram matrix G_ab = omega<e_a, e_b>. Any other
// orthonormal basis of E_omega would do: every check below is basis free.

#include <optional>
#include <utility>
#include <vector>

#include "cstarloc/module.hpp"
#include "cstarloc/states.hpp"

namespace cstarloc {

/// G_ab = omega<e_a, e_b> on the ambient basis; equals I_n (x) gram_matrix(omega).
inline Matrix module_gram(const HilbertModule &module, const PositiveFunctional &omega) {
    require(module.algebra() == omega.algebra(), ErrorKind::shape, "functional is not on the module's algebra");
    const Matrix g = gram_matrix(omega);
    const int t = module.algebra().total_dim();
    Matrix out = Matrix::Zero(module.ambient_dim(), module.ambient_dim());
    for (int i = 0; i < module.rank(); ++i) out.block(i * t, i * t, t, t) = g;
    return out;
}

class LocalizedSpace {
 public:
    LocalizedSpace(HilbertModule module, PositiveFunctional omega, std::optional<ConvexDecomposition> decomposition)
        : module_(std::move(module)), omega_(std::move(omega)), decomposition_(std::move(decomposition)) {
        gram_ = module_gram(module_, omega_);
        linalg::PsdFactor f = linalg::psd_factor(gram_);
        values_ = std::move(f.values);
        vectors_ = std::move(f.vectors);
        null_ = std::move(f.null_vectors);
        const RealVector root = values_.cwiseSqrt();
        iota_ = root.asDiagonal() * vectors_.adjoint();
        section_ = vectors_ * root.cwiseInverse().asDiagonal();
    }

    const HilbertModule &module() const { return module_; }
    const PositiveFunctional &functional() const { return omega_; }
    const std::optional<ConvexDecomposition> &decomposition() const { return decomposition_; }

    int dim() const { return static_cast<int>(values_.size()); }
    int null_dim() const { return module_.ambient_dim() - dim(); }

    /// dim x ambient_dim matrix of iota_omega.
    const Matrix &iota_matrix() const { return iota_; }

    /// Right inverse of iota on N_omega^perp: iota * section = I.
    const Matrix &section() const { return section_; }

    const Matrix &gram() const { return gram_; }

    /// N_omega as a subspace of the ambient coordinates.
    Subspace null_space() const { return Subspace::from_orthonormal(null_); }

    Vector iota(const ModuleElement &x) const {
        require(x.module() == module_, ErrorKind::module_mismatch, "element from a different module");
        return iota_ * x.coords();
    }

    /// (iota x, iota y)_omega, computed in E_omega.
    cplx inner(const ModuleElement &x, const ModuleElement &y) const { return iota(x).dot(iota(y)); }

 private:
    HilbertModule module_;
    PositiveFunctional omega_;
    std::optional<ConvexDecomposition> decomposition_;
    Matrix gram_;
    RealVector values_;
    Matrix vectors_;
    Matrix null_;
    Matrix iota_;
    Matrix section_;
};

inline LocalizedSpace localize(const HilbertModule &module, const PositiveFunctional &omega) {
    return LocalizedSpace(module, omega, std::nullopt);
}

/// Localisation at omega = sum_j lambda_j omega_j, remembering the decomposition.
/// A truncated sigma-decomposition localises at its partial sum.
inline LocalizedSpace localize(const HilbertModule &module, const ConvexDecomposition &decomposition) {
    return LocalizedSpace(module, partial_sum(decomposition), decomposition);
}

inline Subspace null_space(const HilbertModule &module, const PositiveFunctional &omega) {
    return localize(module, omega).null_space();
}

/// phi_j : E_omega -> E_{omega_j},  x + N_omega -> x + N_{omega_j}.
struct ComparisonMap {
    std::size_t index = 0;
    double weight = 0.0;
    LocalizedSpace target;
    Matrix matrix;                    // target.dim x source.dim
    double well_defined_residual = 0; // ||iota_j restricted to N_omega||
    double intertwining_residual = 0; // ||phi_j iota_omega - iota_j||

    double norm() const { return linalg::spectral_norm(matrix); }
    double norm_bound() const { return 1.0 / std::sqrt(weight); }
};

inline ComparisonMap comparison_map(const LocalizedSpace &loc, std::size_t j) {
    require(loc.decomposition().has_value(), ErrorKind::invalid_argument, "localisation carries no decomposition");
    const ConvexDecomposition &d = *loc.decomposition();
    require(j < d.size(), ErrorKind::invalid_argument, "part index out of range");
    require(d.weights[j] > 0.0, ErrorKind::invalid_argument, "comparison map needs a positive weight");
    LocalizedSpace target = localize(loc.module(), d.parts[j]);
    Matrix phi = target.iota_matrix() * loc.section();
    const double scale = std::max(1.0, target.iota_matrix().norm());
    const Matrix null = loc.null_space().basis();
    const double well_defined = null.cols() == 0 ? 0.0 : (target.iota_matrix() * null).norm() / scale;
    const double intertwining = (phi * loc.iota_matrix() - target.iota_matrix()).norm() / scale;
    return ComparisonMap{j, d.weights[j], std::move(target), std::move(phi), well_defined, intertwining};
}

inline std::vector<ComparisonMap> comparison_maps(const LocalizedSpace &loc) {
    require(loc.decomposition().has_value(), ErrorKind::invalid_argument, "localisation carries no decomposition");
    std::vector<ComparisonMap> out;
    for (std::size_t j = 0; j < loc.decomposition()->size(); ++j) out.push_back(comparison_map(loc, j));
    return out;
}

/// Psi : E_omega -> (+)_j E_{omega_j},  Psi = (sqrt(lambda_j) phi_j)_j.
struct DirectSumEmbedding {
    std::vector<ComparisonMap> maps;
    Matrix matrix;
    double tail_bound = 0.0;

    /// ||Psi^* Psi - I||_F
    double isometry_defect() const {
        return (matrix.adjoint() * matrix - Matrix::Identity(matrix.cols(), matrix.cols())).norm();
    }
};

/// A truncated sigma-decomposition (tail_bound > 0) is refused unless the
/// caller acknowledges that Psi is then built for the partial sum only.
inline DirectSumEmbedding direct_sum_embedding(const LocalizedSpace &loc, bool acknowledge_truncation = false) {
    require(loc.decomposition().has_value(), ErrorKind::invalid_argument, "localisation carries no decomposition");
    const double tail = loc.decomposition()->tail_bound;
    require(tail == 0.0 || acknowledge_truncation, ErrorKind::invalid_argument,
            "decomposition is truncated; pass acknowledge_truncation to embed the partial sum");
    DirectSumEmbedding psi;
    psi.maps = comparison_maps(loc);
    psi.tail_bound = tail;
    Eigen::Index rows = 0;
    for (const auto &m : psi.maps) rows += m.matrix.rows();
    psi.matrix = Matrix::Zero(rows, loc.dim());
    Eigen::Index r = 0;
    for (const auto &m : psi.maps) {
        psi.matrix.middleRows(r, m.matrix.rows()) = std::sqrt(m.weight) * m.matrix;
        r += m.matrix.rows();
    }
    return psi;
}

/// iota_omega(L) inside E_omega (already closed).
inline Subspace localized_submodule(const LocalizedSpace &loc, const ModuleSubspace &l) {
    require(l.module() == loc.module(), ErrorKind::module_mismatch, "subspace of a different module");
    return l.span().image(loc.iota_matrix());
}

/// iota_omega(L)^perp inside E_omega.
inline Subspace localized_complement(const LocalizedSpace &loc, const ModuleSubspace &l) {
    return localized_submodule(loc, l).complement();
}

/// L_omega computed by localising L on its own: rank of the Gram matrix restricted to L.
inline Eigen::Index intrinsic_localized_dim(const PositiveFunctional &omega, const ModuleSubspace &l) {
    if (l.dim() == 0) return 0;
    const Matrix b = l.span().basis();
    const Matrix g = b.adjoint() * module_gram(l.module(), omega) * b;
    return linalg::psd_factor(g).values.size();
}

struct CheckResult {
    bool holds = false;
    double residual = 0.0;
    double tolerance = 0.0;
    explicit operator bool() const { return holds; }
};

/// (L_omega)^perp == (L^perp)_omega.
inline CheckResult mesland_check(const HilbertModule &module, const Submodule &l, const State &omega) {
    require(l.module() == module, ErrorKind::module_mismatch, "submodule of a different module");
    const LocalizedSpace loc = localize(module, omega);
    const Subspace lhs = localized_complement(loc, l);
    const Subspace rhs = localized_submodule(loc, orthogonal_complement(l));
    const double d = lhs.projector_distance(rhs);
    return {d <= tol::subspace_frobenius, d, tol::subspace_frobenius};
}

struct ClosureResult : CheckResult {
    Eigen::Index closure_dim = 0;         // dim iota_omega(L)
    Eigen::Index preimage_dim = 0;        // dim of the joint-image preimage
    Eigen::Index componentwise_dim = 0;   // dim {z : phi_j z in iota_j(L) for every j}
};

namespace detail {
/// {z : M z in S} for a subspace S of the codomain.
inline Subspace preimage(const Matrix &map, const Subspace &s) {
    const Matrix off = map - s.basis() * (s.basis().adjoint() * map);
    return Subspace::kernel(off, linalg::spectral_norm(map));
}
}  // namespace detail

/// iota_omega(L) equals the preimage, under z -> (phi_j z)_j, of the joint
/// image {(iota_j x)_j : x in L}. The joint image is computed from the parts
/// directly, never through phi. Also measures the (generally larger) set of z
/// whose every phi_j z lies in iota_j(L) separately.
inline ClosureResult closure_characterization_check(const LocalizedSpace &loc, const ModuleSubspace &l) {
    const std::vector<ComparisonMap> maps = comparison_maps(loc);
    Eigen::Index rows = 0;
    for (const auto &m : maps) rows += m.matrix.rows();
    Matrix joint_map(rows, loc.dim());
    Matrix joint_image(rows, l.dim());
    Matrix part_iotas(rows, l.module().ambient_dim());
    Matrix componentwise(rows, loc.dim());
    Eigen::Index r = 0;
    for (const auto &m : maps) {
        const Eigen::Index h = m.matrix.rows();
        joint_map.middleRows(r, h) = m.matrix;
        part_iotas.middleRows(r, h) = m.target.iota_matrix();
        joint_image.middleRows(r, h) = m.target.iota_matrix() * l.span().basis();
        const Subspace part_image = localized_submodule(m.target, l);
        componentwise.middleRows(r, h) = m.matrix - part_image.basis() * (part_image.basis().adjoint() * m.matrix);
        r += h;
    }
    const Subspace closure = localized_submodule(loc, l);
    const Subspace pre = detail::preimage(joint_map, Subspace::span(joint_image, linalg::spectral_norm(part_iotas)));
    const Subspace comp = Subspace::kernel(componentwise, linalg::spectral_norm(joint_map));
    ClosureResult out;
    out.residual = closure.projector_distance(pre);
    out.tolerance = tol::subspace_frobenius;
    out.holds = out.residual <= out.tolerance;
    out.closure_dim = closure.dim();
    out.preimage_dim = pre.dim();
    out.componentwise_dim = comp.dim();
    return out;
}

enum class IntersectionStatus { holds, hypothesis_failure, conclusion_failure };

struct IntersectionResult {
    IntersectionStatus status = IntersectionStatus::hypothesis_failure;
    double residual = 0.0;          // conclusion projector distance (or the failing hypothesis one)
    double tolerance = tol::subspace_frobenius;
    std::optional<std::size_t> failing_part;  // set when a per-part hypothesis fails
    bool complemented = false;
    Eigen::Index lhs_dim = 0;
    Eigen::Index rhs_dim = 0;
};

namespace detail {
inline double intersection_defect(const LocalizedSpace &loc, const Submodule &hk, const Submodule &h,
                                  const Submodule &k, Eigen::Index *lhs_dim = nullptr,
                                  Eigen::Index *rhs_dim = nullptr) {
    const Subspace lhs = localized_submodule(loc, hk);
    const Subspace rhs = localized_submodule(loc, h).intersect(localized_submodule(loc, k));
    if (lhs_dim) *lhs_dim = lhs.dim();
    if (rhs_dim) *rhs_dim = rhs.dim();
    return lhs.projector_distance(rhs);
}
}  // namespace detail

/// (H cap K)_omega == H_omega cap K_omega for omega = sum_j lambda_j omega_j,
/// provided H cap K is complemented and the same identity holds at every omega_j.
/// Hypothesis failures are reported apart from conclusion failures.
inline IntersectionResult intersection_localization_check(const Submodule &h, const Submodule &k,
                                                          const ConvexDecomposition &decomposition) {
    require(h.module() == k.module(), ErrorKind::module_mismatch, "submodules of different modules");
    const HilbertModule &module = h.module();
    IntersectionResult out;
    const Submodule hk = intersect(h, k);
    out.complemented = is_orthogonally_complemented(hk);
    if (!out.complemented) return out;
    for (std::size_t j = 0; j < decomposition.size(); ++j) {
        const LocalizedSpace part = localize(module, decomposition.parts[j]);
        const double d = detail::intersection_defect(part, hk, h, k);
        if (d > out.tolerance) {
            out.failing_part = j;
            out.residual = d;
            return out;
        }
    }
    const LocalizedSpace loc = localize(module, decomposition);
    out.residual = detail::intersection_defect(loc, hk, h, k, &out.lhs_dim, &out.rhs_dim);
    out.status = out.residual <= out.tolerance ? IntersectionStatus::holds : IntersectionStatus::conclusion_failure;
    return out;
}

/// E (x)_A H_pi realised as the quotient of E (x) H_pi by the null space of
/// <x (x) h, x' (x) h'> = <h, pi(<x, x'>) h'>, with the unitary onto E_omega.
struct TensorLocalization {
    int tensor_dim = 0;
    int localized_dim = 0;
    Matrix unitary;                  // localized_dim x tensor_dim, U(x (x) xi) = iota(x)
    double inner_product_residual = 0.0;  // max |<x (x) xi, y (x) xi> - omega<x, y>| over the ambient basis
    double intertwining_residual = 0.0;   // ||U X - iota||_F
    double unitarity_residual = 0.0;      // ||U^* U - I||_F + ||U U^* - I||_F
    double balancing_residual = 0.0;      // max ||[x a (x) h] - [x (x) pi(a) h]|| on the sweep
};

inline TensorLocalization gns_tensor_localization(const HilbertModule &module, const State &omega) {
    const GnsRepresentation pi = gns(omega);
    const Algebra &alg = module.algebra();
    const int t = alg.total_dim();
    const int r = pi.dim;
    const int block = t * r;

    // One component's block of the tensor Gram; E (x) H is n copies of it.
    // <e_u (x) f_p, e_v (x) f_q> = pi(e_u^* e_v)_{pq}, and e_rs^* e_tw = delta_rt e_sw.
    Matrix b = Matrix::Zero(block, block);
    for (int u = 0; u < t; ++u) {
        const UnitIndex iu = unit_index(alg, u);
        for (int v = 0; v < t; ++v) {
            const UnitIndex iv = unit_index(alg, v);
            if (iu.block != iv.block || iu.row != iv.row) continue;
            const int n = alg.block_dim(iu.block);
            const Matrix &rep = pi.rep_matrices[static_cast<std::size_t>(alg.block_offset(iu.block) + iu.col * n + iv.col)];
            b.block(u * r, v * r, r, r) = rep;
        }
    }
    const linalg::PsdFactor f = linalg::psd_factor(b);
    const Matrix q = f.values.cwiseSqrt().asDiagonal() * f.vectors.adjoint();  // d_B x block
    const auto d_b = q.rows();

    TensorLocalization out;
    out.tensor_dim = static_cast<int>(d_b) * module.rank();

    // Classes of e_a (x) xi for the ambient basis.
    Matrix x = Matrix::Zero(out.tensor_dim, module.ambient_dim());
    for (int i = 0; i < module.rank(); ++i)
        for (int u = 0; u < t; ++u) {
            Vector v = Vector::Zero(block);
            v.segment(u * r, r) = pi.cyclic_vector;
            x.block(i * d_b, i * t + u, d_b, 1) = q * v;
        }

    const LocalizedSpace loc = localize(module, omega);
    out.localized_dim = loc.dim();
    const Matrix &y = loc.iota_matrix();

    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(x);
    out.unitary = y * cod.pseudoInverse();
    out.intertwining_residual = (out.unitary * x - y).norm();
    if (out.tensor_dim == out.localized_dim) {
        const Matrix eye = Matrix::Identity(out.tensor_dim, out.tensor_dim);
        out.unitarity_residual =
            (out.unitary.adjoint() * out.unitary - eye).norm() + (out.unitary * out.unitary.adjoint() - eye).norm();
    } else {
        out.unitarity_residual = std::numeric_limits<double>::infinity();
    }
    out.inner_product_residual = (x.adjoint() * x - loc.gram()).cwiseAbs().maxCoeff();

    // Balancing x a (x) h = x (x) pi(a) h, checked in one component (all are alike).
    // The full sweep over matrix units is cubic in t r; past 256 only the units e_{k,0,0}, e_{k,0,1} are swept.
    std::vector<int> sweep;
    for (int u = 0; u < t; ++u) {
        const UnitIndex iu = unit_index(alg, u);
        if (block <= 256 || (iu.row == 0 && iu.col <= 1)) sweep.push_back(u);
    }
    const auto units = basis(alg);
    for (int u : sweep) {
        const Element &a = units[static_cast<std::size_t>(u)];
        Matrix lhs = Matrix::Zero(block, block);  // (x a) (x) h
        const Matrix ra = right_multiplication(a);
        for (int w = 0; w < t; ++w)
            for (int w2 = 0; w2 < t; ++w2)
                if (ra(w2, w) != cplx(0.0)) lhs.block(w2 * r, w * r, r, r) += ra(w2, w) * Matrix::Identity(r, r);
        Matrix rhs = Matrix::Zero(block, block);  // x (x) pi(a) h
        for (int w = 0; w < t; ++w) rhs.block(w * r, w * r, r, r) = pi.rep_matrices[static_cast<std::size_t>(u)];
        out.balancing_residual = std::max(out.balancing_residual, (q * (lhs - rhs)).norm());
    }
    return out;
}

/// Convexity of the A-valued semi-inner products sigma_y(u, v) = <y, u><v, y>:
/// sum_i lambda_i sigma(z_i - x0, z_i - x0) - sigma(zbar - x0, zbar - x0) >= 0,
/// zbar = sum_i lambda_i z_i, checked for every parameter y of the family.
struct ConvexityResult {
    bool holds = false;
    double min_margin = 0.0;  // smallest eigenvalue of the difference, relative to max(1, ||diff||)
};

inline ConvexityResult semi_inner_convexity_check(const std::vector<ModuleElement> &family,
                                                  const std::vector<ModuleElement> &z, const ModuleElement &x0,
                                                  const std::vector<double> &weights, double t = 1e-9) {
    require(!z.empty() && z.size() == weights.size(), ErrorKind::invalid_argument, "need one weight per point");
    double s = 0.0;
    for (double w : weights) {
        require(w > 0.0, ErrorKind::invalid_argument, "weights must be positive");
        s += w;
    }
    require(std::abs(s - 1.0) <= 1e-12, ErrorKind::invalid_argument, "weights must sum to 1");

    ModuleElement zbar = ModuleElement::zero(x0.module());
    for (std::size_t i = 0; i < z.size(); ++i) zbar += cplx(weights[i]) * z[i];
    const ModuleElement dbar = zbar - x0;

    ConvexityResult out{true, std::numeric_limits<double>::infinity()};
    for (const auto &y : family) {
        auto sigma = [&y](const ModuleElement &u) {
            const Element a = module_inner(y, u);
            return a * a.adjoint();  // <y, u><u, y>
        };
        Element diff = -sigma(dbar);
        for (std::size_t i = 0; i < z.size(); ++i) diff += cplx(weights[i]) * sigma(z[i] - x0);
        const double scale = std::max(1.0, operator_norm(diff));
        for (const auto &blk : diff.blocks()) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (blk + blk.adjoint()), Eigen::EigenvaluesOnly);
            out.min_margin = std::min(out.min_margin, es.eigenvalues()(0) / scale);
        }
        if (!is_positive(diff, t)) out.holds = false;
    }
    if (family.empty()) out.min_margin = 0.0;
    return out;
}

}  // namespace cstarloc
