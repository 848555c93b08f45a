#pragma once

// The standard Hilbert A-module E = A^n with <x, y> = sum_i x_i^* y_i.
//
// Convention: the A-valued inner product is conjugate-linear in the first
// slot and A-linear in the second, <x, y a> = <x, y> a.
//
// Coordinates on E are component-major: component i occupies the slice
// [i * total_dim, (i + 1) * total_dim) and inside it the algebra coordinates.
// The Euclidean inner product on those coordinates is tr<x, y>, for which
// right submodules and their A-orthogonal complements are also complex
// orthogonal complements.

#include <string>
#include <utility>
#include <vector>

#include "cstarloc/algebra.hpp"
#include "cstarloc/states.hpp"

namespace cstarloc {

class HilbertModule {
 public:
    HilbertModule() = default;
    HilbertModule(Algebra algebra, int rank) : algebra_(std::move(algebra)), rank_(rank) {
        require(rank_ >= 1, ErrorKind::invalid_argument, "module rank must be >= 1");
    }

    const Algebra &algebra() const { return algebra_; }
    int rank() const { return rank_; }
    int ambient_dim() const { return rank_ * algebra_.total_dim(); }

    friend bool operator==(const HilbertModule &a, const HilbertModule &b) {
        return a.rank_ == b.rank_ && a.algebra_ == b.algebra_;
    }
    friend bool operator!=(const HilbertModule &a, const HilbertModule &b) { return !(a == b); }

 private:
    Algebra algebra_;
    int rank_ = 1;
};

inline HilbertModule standard_module(const Algebra &algebra, int n) { return HilbertModule(algebra, n); }

class ModuleElement {
 public:
    ModuleElement() = default;

    ModuleElement(HilbertModule module, std::vector<Element> components)
        : module_(std::move(module)), components_(std::move(components)) {
        require(static_cast<int>(components_.size()) == module_.rank(), ErrorKind::shape,
                "module element needs " + std::to_string(module_.rank()) + " components");
        for (const auto &c : components_)
            require(c.algebra() == module_.algebra(), ErrorKind::shape, "component from a different algebra");
    }

    static ModuleElement zero(const HilbertModule &module) {
        return ModuleElement(module, std::vector<Element>(static_cast<std::size_t>(module.rank()),
                                                          Element::zero(module.algebra())));
    }

    static ModuleElement from_coords(const HilbertModule &module, const Vector &coords) {
        require(coords.size() == module.ambient_dim(), ErrorKind::shape, "coordinate vector has wrong length");
        const int t = module.algebra().total_dim();
        std::vector<Element> comps;
        for (int i = 0; i < module.rank(); ++i)
            comps.push_back(Element::from_coords(module.algebra(), coords.segment(i * t, t)));
        return ModuleElement(module, std::move(comps));
    }

    /// The element with `a` in component i and zeros elsewhere.
    static ModuleElement single(const HilbertModule &module, int i, const Element &a) {
        ModuleElement x = zero(module);
        x.components_[static_cast<std::size_t>(i)] = a;
        return x;
    }

    const HilbertModule &module() const { return module_; }
    const std::vector<Element> &components() const { return components_; }
    const Element &component(int i) const { return components_[static_cast<std::size_t>(i)]; }

    Vector coords() const {
        const int t = module_.algebra().total_dim();
        Vector v(module_.ambient_dim());
        for (int i = 0; i < module_.rank(); ++i) v.segment(i * t, t) = component(i).coords();
        return v;
    }

    /// Right action x . a, componentwise.
    ModuleElement operator*(const Element &a) const {
        std::vector<Element> out;
        for (const auto &c : components_) out.push_back(c * a);
        return ModuleElement(module_, std::move(out));
    }

    ModuleElement &operator+=(const ModuleElement &o) {
        check_same(o);
        for (std::size_t i = 0; i < components_.size(); ++i) components_[i] += o.components_[i];
        return *this;
    }
    ModuleElement &operator-=(const ModuleElement &o) {
        check_same(o);
        for (std::size_t i = 0; i < components_.size(); ++i) components_[i] -= o.components_[i];
        return *this;
    }
    ModuleElement &operator*=(cplx c) {
        for (auto &x : components_) x *= c;
        return *this;
    }
    friend ModuleElement operator+(ModuleElement a, const ModuleElement &b) { return a += b; }
    friend ModuleElement operator-(ModuleElement a, const ModuleElement &b) { return a -= b; }
    friend ModuleElement operator*(cplx c, ModuleElement a) { return a *= c; }

    void check_same(const ModuleElement &o) const {
        require(module_ == o.module_, ErrorKind::module_mismatch, "elements belong to different modules");
    }

 private:
    HilbertModule module_;
    std::vector<Element> components_;
};

/// <x, y> = sum_i x_i^* y_i.
inline Element module_inner(const ModuleElement &x, const ModuleElement &y) {
    x.check_same(y);
    Element acc = Element::zero(x.module().algebra());
    for (int i = 0; i < x.module().rank(); ++i) acc += x.component(i).adjoint() * y.component(i);
    return acc;
}

/// ||x|| = ||<x, x>||^{1/2}.
inline double module_norm(const ModuleElement &x) { return std::sqrt(operator_norm(module_inner(x, x))); }

/// Matrix (total_dim x ambient_dim) of y -> <g, y> on coordinates.
inline Matrix inner_product_map(const ModuleElement &g) {
    const int t = g.module().algebra().total_dim();
    Matrix m(t, g.module().ambient_dim());
    for (int i = 0; i < g.module().rank(); ++i) m.middleCols(i * t, t) = left_multiplication(g.component(i).adjoint());
    return m;
}

/// Matrix of x -> x . a on module coordinates.
inline Matrix module_right_action(const HilbertModule &module, const Element &a) {
    const int t = module.algebra().total_dim();
    const Matrix r = right_multiplication(a);
    Matrix m = Matrix::Zero(module.ambient_dim(), module.ambient_dim());
    for (int i = 0; i < module.rank(); ++i) m.block(i * t, i * t, t, t) = r;
    return m;
}

/// Matrix of x -> a . x (left multiplication on every component); commutes with the right action.
inline Matrix module_left_action(const HilbertModule &module, const Element &a) {
    const int t = module.algebra().total_dim();
    const Matrix l = left_multiplication(a);
    Matrix m = Matrix::Zero(module.ambient_dim(), module.ambient_dim());
    for (int i = 0; i < module.rank(); ++i) m.block(i * t, i * t, t, t) = l;
    return m;
}

/// Ambient basis of E, in coordinate order.
inline std::vector<ModuleElement> module_basis(const HilbertModule &module) {
    std::vector<ModuleElement> out;
    for (int i = 0; i < module.rank(); ++i)
        for (const auto &e : basis(module.algebra())) out.push_back(ModuleElement::single(module, i, e));
    return out;
}

/// A complex-linear (closed, convex) subspace of E; not necessarily invariant under the right action.
class ModuleSubspace {
 public:
    ModuleSubspace() = default;
    ModuleSubspace(HilbertModule module, Subspace span) : module_(std::move(module)), span_(std::move(span)) {
        require(span_.ambient_dim() == module_.ambient_dim(), ErrorKind::shape, "subspace does not live in this module");
    }

    const HilbertModule &module() const { return module_; }
    const Subspace &span() const { return span_; }
    Eigen::Index dim() const { return span_.dim(); }

    bool contains(const ModuleElement &x, double t = 1e-9) const {
        require(x.module() == module_, ErrorKind::module_mismatch, "element from a different module");
        const Vector v = x.coords();
        return span_.distance(v) <= t * std::max(1.0, v.norm());
    }

    /// Basis vectors as module elements.
    std::vector<ModuleElement> basis_elements() const {
        std::vector<ModuleElement> out;
        for (Eigen::Index c = 0; c < span_.dim(); ++c)
            out.push_back(ModuleElement::from_coords(module_, span_.basis().col(c)));
        return out;
    }

    /// max over basis vectors v and matrix units b of dist(v . b, span).
    double right_closure_residual() const {
        double worst = 0.0;
        if (span_.dim() == 0) return 0.0;
        for (const auto &b : basis(module_.algebra())) {
            const Matrix moved = module_right_action(module_, b) * span_.basis();
            const Matrix resid = moved - span_.basis() * (span_.basis().adjoint() * moved);
            worst = std::max(worst, resid.colwise().norm().maxCoeff());
        }
        return worst;
    }

 protected:
    HilbertModule module_;
    Subspace span_;
};

/// Complex span of the given elements (no right-action closure).
inline ModuleSubspace linear_span(const HilbertModule &module, const std::vector<ModuleElement> &elements) {
    Matrix m(module.ambient_dim(), static_cast<Eigen::Index>(elements.size()));
    for (std::size_t c = 0; c < elements.size(); ++c) {
        require(elements[c].module() == module, ErrorKind::module_mismatch, "element from a different module");
        m.col(static_cast<Eigen::Index>(c)) = elements[c].coords();
    }
    return ModuleSubspace(module, Subspace::span(m));
}

/// A finitely generated (hence closed) right submodule.
class Submodule : public ModuleSubspace {
 public:
    Submodule() = default;

    const std::vector<ModuleElement> &generators() const { return generators_; }

    /// Wraps a subspace already known to be invariant; generators become its basis vectors.
    static Submodule from_invariant_subspace(const HilbertModule &module, Subspace span) {
        Submodule s;
        s.module_ = module;
        s.span_ = std::move(span);
        s.generators_ = s.basis_elements();
        require(s.right_closure_residual() <= 1e-9, ErrorKind::invalid_argument,
                "subspace is not closed under the right action");
        return s;
    }

    /// Orthonormalisation of {g . b : g a generator, b a matrix unit}.
    static Submodule generate(const HilbertModule &module, const std::vector<ModuleElement> &gens) {
        require(!gens.empty(), ErrorKind::invalid_argument, "submodule needs at least one generator");
        const auto units = basis(module.algebra());
        Matrix m(module.ambient_dim(), static_cast<Eigen::Index>(gens.size() * units.size()));
        Eigen::Index c = 0;
        for (const auto &g : gens) {
            require(g.module() == module, ErrorKind::module_mismatch, "generator from a different module");
            const Vector gc = g.coords();
            for (const auto &b : units) m.col(c++) = module_right_action(module, b) * gc;
        }
        Submodule s;
        s.module_ = module;
        s.span_ = Subspace::span(m);
        s.generators_ = gens;
        return s;
    }

 private:
    std::vector<ModuleElement> generators_;
};

inline Submodule submodule_from_generators(const HilbertModule &module, const std::vector<ModuleElement> &gens) {
    return Submodule::generate(module, gens);
}

inline Submodule submodule_from_generators(const std::vector<ModuleElement> &gens) {
    require(!gens.empty(), ErrorKind::invalid_argument, "submodule needs at least one generator");
    return submodule_from_generators(gens.front().module(), gens);
}

inline Submodule whole_module(const HilbertModule &module) {
    return Submodule::from_invariant_subspace(module, Subspace::whole(module.ambient_dim()));
}

inline Submodule zero_submodule(const HilbertModule &module) {
    return submodule_from_generators(module, {ModuleElement::zero(module)});
}

/// {y : <g, y> = 0 for every generator g}, the kernel of the stacked maps y -> <g, y>.
inline Submodule orthogonal_complement(const Submodule &l) {
    const HilbertModule &module = l.module();
    const int t = module.algebra().total_dim();
    Matrix stacked(static_cast<Eigen::Index>(l.generators().size()) * t, module.ambient_dim());
    Eigen::Index row = 0;
    for (const auto &g : l.generators()) {
        stacked.middleRows(row, t) = inner_product_map(g);
        row += t;
    }
    return Submodule::from_invariant_subspace(module, Subspace::kernel(stacked));
}

inline Submodule intersect(const Submodule &h, const Submodule &k) {
    require(h.module() == k.module(), ErrorKind::module_mismatch, "submodules of different modules");
    return Submodule::from_invariant_subspace(h.module(), h.span().intersect(k.span()));
}

/// dim L + dim L^perp = dim E and L meets L^perp only in 0.
inline bool is_orthogonally_complemented(const Submodule &l, double t = tol::subspace_frobenius) {
    const Submodule perp = orthogonal_complement(l);
    if (l.dim() + perp.dim() != l.module().ambient_dim()) return false;
    const Subspace meet = l.span().intersect(perp.span());
    if (meet.dim() != 0) return false;
    // the two spans must also be complex-orthogonal for the sum to be orthogonal
    if (l.dim() > 0 && perp.dim() > 0 && (l.span().basis().adjoint() * perp.span().basis()).norm() > t) return false;
    return true;
}

/// Given tau on the ambient basis (values[a] = tau(e_a)), returns the unique y
/// with tau(x) = <y, x>. tau must be A-linear: tau(x a) = tau(x) a.
inline ModuleElement riesz_representation(const HilbertModule &module, const std::vector<Element> &values) {
    const Algebra &alg = module.algebra();
    const int t = alg.total_dim();
    require(static_cast<int>(values.size()) == module.ambient_dim(), ErrorKind::shape,
            "need one value per ambient basis element");
    Matrix tau(t, module.ambient_dim());
    for (std::size_t a = 0; a < values.size(); ++a) {
        require(values[a].algebra() == alg, ErrorKind::shape, "value from a different algebra");
        tau.col(static_cast<Eigen::Index>(a)) = values[a].coords();
    }
    const double scale = std::max(1.0, tau.norm());
    for (const auto &b : basis(alg)) {
        const double defect = (tau * module_right_action(module, b) - right_multiplication(b) * tau).norm();
        require(defect <= 1e-9 * scale, ErrorKind::invalid_functional, "map is not A-linear");
    }
    // <y, e_{i,k,r,r}> = y_i^* e_rr, so y_i^* restricted to block k is sum_r tau(e_{i,k,r,r}).
    std::vector<Element> comps;
    for (int i = 0; i < module.rank(); ++i) {
        std::vector<Matrix> ystar;
        for (int k = 0; k < alg.num_blocks(); ++k) {
            const int n = alg.block_dim(k);
            Matrix acc = Matrix::Zero(n, n);
            for (int r = 0; r < n; ++r) {
                const auto a = static_cast<std::size_t>(i * t + alg.block_offset(k) + r * n + r);
                acc += values[a].block(k);
            }
            ystar.push_back(std::move(acc));
        }
        comps.push_back(Element(alg, std::move(ystar)).adjoint());
    }
    ModuleElement y(module, std::move(comps));
    const Matrix reproduced = inner_product_map(y);
    require((reproduced - tau).norm() <= 1e-8 * scale, ErrorKind::invalid_functional,
            "map is not of the form <y, .>");
    return y;
}

}  // namespace cstarloc
