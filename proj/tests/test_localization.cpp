#include <catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"

using namespace cstarloc;
using Catch::Matchers::WithinAbs;

namespace {

struct TwoPoint {
    Algebra alg{std::vector<int>{1, 1}};
    HilbertModule e{alg, 1};
    ModuleElement p1 = ModuleElement::single(e, 0, Element::unit(alg, 0, 0, 0));
    ModuleElement p2 = ModuleElement::single(e, 0, Element::unit(alg, 1, 0, 0));
    State w1{alg, {Matrix::Ones(1, 1), Matrix::Zero(1, 1)}};
    State w2{alg, {Matrix::Zero(1, 1), Matrix::Ones(1, 1)}};
    ConvexDecomposition half{{0.5, 0.5}, {w1, w2}, 0.0};
    ModuleSubspace line = linear_span(e, {p1 + p2});
};

ConvexDecomposition random_decomposition(oracle::Rng &rng, const Algebra &alg, int parts) {
    ConvexDecomposition d;
    double t = 0.0;
    for (int j = 0; j < parts; ++j) {
        d.weights.push_back(rng.uniform(0.1, 1.0));
        t += d.weights.back();
        d.parts.push_back(State(alg, rng.density(alg)));
    }
    for (double &w : d.weights) w /= t;
    return d;
}

Submodule random_submodule(oracle::Rng &rng, const HilbertModule &e) {
    const Algebra &alg = e.algebra();
    std::vector<Matrix> q;
    for (int n : alg.block_dims()) {
        const int r = rng.integer(0, n - 1);
        const Matrix basis = linalg::range_basis(rng.mat(n, std::max(r, 1)));
        q.push_back(r == 0 ? Matrix(Matrix::Zero(n, n)) : Matrix(basis * basis.adjoint()));
    }
    return submodule_from_generators({rng.module_element(e) * Element(alg, q)});
}

}  // namespace

TEST_CASE("null spaces", "[localization]") {
    TwoPoint c;
    CHECK(null_space(c.e, convex_combine(c.half)).dim() == 0);
    const Subspace n1 = null_space(c.e, c.w1);
    REQUIRE(n1.dim() == 1);
    CHECK(n1.distance(c.p2.coords()) < 1e-15);

    const Algebra m2({2});
    const HilbertModule e(m2, 1);
    Vector e1 = Vector::Zero(2);
    e1(0) = 1.0;
    const Subspace n = null_space(e, vector_state(m2, e1));
    REQUIRE(n.dim() == 2);
    // zero first column: units e_12 and e_22
    CHECK(n.distance(ModuleElement::single(e, 0, Element::unit(m2, 0, 0, 1)).coords()) < 1e-14);
    CHECK(n.distance(ModuleElement::single(e, 0, Element::unit(m2, 0, 1, 1)).coords()) < 1e-14);
}

TEST_CASE("localize on the two-point example", "[localization]") {
    TwoPoint c;
    const LocalizedSpace loc = localize(c.e, c.half);
    CHECK(loc.dim() == 2);
    CHECK(loc.null_dim() == 0);
    CHECK(localize(c.e, c.w1).dim() == 1);
    CHECK_THAT(loc.iota(c.p1 - c.p2).squaredNorm(), WithinAbs(1.0, 1e-12));
    const LocalizedSpace zero = localize(c.e, PositiveFunctional(c.alg, {Matrix::Zero(1, 1), Matrix::Zero(1, 1)}));
    CHECK(zero.dim() == 0);
}

TEST_CASE("localization against independent oracles", "[localization]") {
    oracle::Rng rng(21);
    for (int it = 0; it < 60; ++it) {
        const Algebra alg(it % 2 ? std::vector<int>{2, 1} : std::vector<int>{3});
        const HilbertModule e(alg, 1 + it % 2);
        const auto rho = rng.density(alg);
        const State w(alg, rho);
        const LocalizedSpace loc = localize(e, w);
        CHECK(loc.dim() == oracle::localized_dim(e, rho));
        CHECK(loc.dim() + loc.null_dim() == e.ambient_dim());
        const Matrix g = oracle::gram(e, rho);
        CHECK((loc.gram() - g).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((loc.iota_matrix().adjoint() * loc.iota_matrix() - g).cwiseAbs().maxCoeff() <= 1e-9);
        const ModuleElement x = rng.module_element(e);
        CHECK(std::abs(loc.iota(x).squaredNorm() - oracle::localized_inner(rho, x, x).real()) <=
              1e-9 * std::max(1.0, x.coords().squaredNorm()));
        // null space: omega<x, x> vanishes exactly there
        const Subspace n = loc.null_space();
        for (Eigen::Index j = 0; j < n.dim(); ++j) {
            const ModuleElement z = ModuleElement::from_coords(e, n.basis().col(j));
            CHECK(std::abs(oracle::localized_inner(rho, z, z)) <= 1e-9);
        }
    }
}

TEST_CASE("null space of a convex combination is the intersection", "[localization]") {
    oracle::Rng rng(22);
    for (int it = 0; it < 40; ++it) {
        const Algebra alg({2, 2});
        const HilbertModule e(alg, 2);
        const ConvexDecomposition d = random_decomposition(rng, alg, 2 + it % 3);
        Subspace meet = Subspace::whole(e.ambient_dim());
        for (const auto &p : d.parts) meet = meet.intersect(null_space(e, p));
        CHECK(localize(e, d).null_space().projector_distance(meet) <= 1e-8);
    }
}

TEST_CASE("comparison maps", "[localization]") {
    TwoPoint c;
    const LocalizedSpace loc = localize(c.e, c.half);
    const ComparisonMap phi1 = comparison_map(loc, 0);
    const ComparisonMap phi2 = comparison_map(loc, 1);
    const Vector d = loc.iota(c.p1 - c.p2);
    CHECK((phi1.matrix * d - phi1.target.iota(c.p1)).norm() < 1e-12);
    CHECK((phi2.matrix * d + phi2.target.iota(c.p2)).norm() < 1e-12);
    CHECK(phi1.norm() <= phi1.norm_bound() + 1e-9);
    CHECK(phi1.well_defined_residual <= 1e-12);
    CHECK(phi1.intertwining_residual <= 1e-9);

    ErrorKind k = ErrorKind::input;
    try {
        comparison_map(loc, 2);
    } catch (const Error &e) {
        k = e.kind();
    }
    CHECK(k == ErrorKind::invalid_argument);
    k = ErrorKind::input;
    try {
        comparison_map(localize(c.e, c.w1), 0);
    } catch (const Error &e) {
        k = e.kind();
    }
    CHECK(k == ErrorKind::invalid_argument);

    // single part: phi is unitary
    const LocalizedSpace single = localize(c.e, ConvexDecomposition{{1.0}, {convex_combine(c.half)}, 0.0});
    const Matrix u = comparison_map(single, 0).matrix;
    CHECK((u.adjoint() * u - Matrix::Identity(u.cols(), u.cols())).norm() < 1e-12);

    oracle::Rng rng(23);
    for (int it = 0; it < 50; ++it) {
        const Algebra alg({2, 1});
        const HilbertModule e(alg, 2);
        const LocalizedSpace l = localize(e, random_decomposition(rng, alg, 3));
        for (const auto &m : comparison_maps(l)) {
            CHECK(m.norm() <= m.norm_bound() + 1e-9);
            CHECK(m.well_defined_residual <= 1e-9);
            CHECK(m.intertwining_residual <= 1e-9);
        }
    }
}

TEST_CASE("direct-sum embedding", "[localization]") {
    TwoPoint c;
    const LocalizedSpace loc = localize(c.e, c.half);
    const DirectSumEmbedding psi = direct_sum_embedding(loc);
    const Vector v = psi.matrix * loc.iota(c.p1);
    REQUIRE(v.size() == 2);
    CHECK(std::abs(std::abs(v(0)) - std::sqrt(0.5)) < 1e-12);
    CHECK(std::abs(v(1)) < 1e-12);
    CHECK_THAT(v.squaredNorm(), WithinAbs(0.5, 1e-12));
    CHECK(psi.isometry_defect() <= 1e-9);

    oracle::Rng rng(24);
    const Algebra m2({2});
    const HilbertModule e(m2, 2);
    for (int it = 0; it < 30; ++it) {
        const LocalizedSpace l = localize(e, random_decomposition(rng, m2, 3));
        const DirectSumEmbedding p = direct_sum_embedding(l);
        CHECK(p.isometry_defect() <= 1e-9);
        int total = 0;
        for (const auto &m : p.maps) total += m.target.dim();
        CHECK(l.dim() <= total);
    }

    std::vector<State> pool;
    for (int i = 0; i < 5; ++i) pool.push_back(State(m2, rng.density(m2)));
    const auto sigma = sigma_convex_truncate(WeightRule::geometric(0.5), [&](std::size_t j) { return pool[j - 1]; }, 5);
    const LocalizedSpace sl = localize(e, sigma);
    ErrorKind k = ErrorKind::input;
    try {
        direct_sum_embedding(sl);
    } catch (const Error &ex) {
        k = ex.kind();
    }
    CHECK(k == ErrorKind::invalid_argument);
    const DirectSumEmbedding sp = direct_sum_embedding(sl, true);
    CHECK(sp.tail_bound == std::pow(0.5, 5));
    CHECK(sp.isometry_defect() <= 1e-9);
}

TEST_CASE("localized submodules and complements", "[localization]") {
    TwoPoint c;
    const LocalizedSpace l1 = localize(c.e, c.w1);
    CHECK(localized_submodule(l1, c.line).dim() == l1.dim());
    CHECK(localized_submodule(l1, zero_submodule(c.e)).dim() == 0);

    const LocalizedSpace loc = localize(c.e, c.half);
    const Submodule cp1 = submodule_from_generators({c.p1});
    const Subspace img = localized_submodule(loc, cp1);
    REQUIRE(img.dim() == 1);
    CHECK(img.distance(loc.iota(c.p1)) < 1e-12);
    CHECK(img.distance(loc.iota(c.p2)) > 0.5);

    const Subspace perp = localized_complement(loc, c.line);
    CHECK(perp.distance(loc.iota(c.p1 - c.p2)) < 1e-12);
    CHECK(perp.dim() == 1);
    CHECK(localized_complement(loc, whole_module(c.e)).dim() == 0);

    oracle::Rng rng(25);
    for (int it = 0; it < 40; ++it) {
        const Algebra alg({2, 1});
        const HilbertModule e(alg, 2);
        const auto rho = rng.density(alg);
        const State w(alg, rho);
        const LocalizedSpace l = localize(e, w);
        const Submodule s = random_submodule(rng, e);
        const auto dim = localized_submodule(l, s).dim();
        CHECK(dim == oracle::localized_image_dim(e, rho, s.span().basis()));
        CHECK(dim == intrinsic_localized_dim(w, s));
        CHECK(dim + localized_complement(l, s).dim() == l.dim());
        CHECK(dim <= std::min<Eigen::Index>(s.dim(), l.dim()));
    }
}

TEST_CASE("complement criterion", "[localization]") {
    TwoPoint c;
    const Submodule cp1 = submodule_from_generators({c.p1});
    const CheckResult r = mesland_check(c.e, cp1, c.w1);
    CHECK(r.holds);
    CHECK(localized_complement(localize(c.e, c.w1), cp1).dim() == 0);
    CHECK(mesland_check(c.e, whole_module(c.e), c.w2).holds);

    oracle::Rng rng(26);
    const Algebra m2({2});
    const HilbertModule e(m2, 2);
    for (int i = 0; i < 50; ++i) {
        const Submodule l = random_submodule(rng, e);
        REQUIRE(is_orthogonally_complemented(l));
        for (int j = 0; j < 20; ++j) CHECK(mesland_check(e, l, State(m2, rng.density(m2))).holds);
    }
}

TEST_CASE("closure characterization", "[localization]") {
    TwoPoint c;
    const ClosureResult r = closure_characterization_check(localize(c.e, c.half), c.line);
    CHECK(r.holds);
    CHECK(r.closure_dim == 1);
    CHECK(r.preimage_dim == 1);
    CHECK(r.componentwise_dim == 2);

    const ClosureResult single =
        closure_characterization_check(localize(c.e, ConvexDecomposition{{1.0}, {c.w1}, 0.0}), c.line);
    CHECK(single.holds);

    oracle::Rng rng(27);
    for (int it = 0; it < 100; ++it) {
        const Algebra alg({2, 1});
        const HilbertModule e(alg, 1 + it % 2);
        const LocalizedSpace loc = localize(e, random_decomposition(rng, alg, 2 + it % 3));
        const Submodule s = random_submodule(rng, e);
        const ClosureResult cr = closure_characterization_check(loc, s);
        CHECK(cr.holds);
        CHECK(cr.componentwise_dim >= cr.closure_dim);
        // a plain complex span obeys the same characterization
        const ModuleSubspace span = linear_span(e, {rng.module_element(e), rng.module_element(e)});
        CHECK(closure_characterization_check(loc, span).holds);
    }
}

TEST_CASE("intersection localization", "[localization]") {
    TwoPoint c;
    const Submodule h = submodule_from_generators({c.p1});
    const Submodule k = submodule_from_generators({c.p2});
    const IntersectionResult r = intersection_localization_check(h, k, c.half);
    CHECK(r.status == IntersectionStatus::holds);
    CHECK(r.lhs_dim == 0);
    CHECK(r.rhs_dim == 0);
    CHECK(intersection_localization_check(h, h, c.half).status == IntersectionStatus::holds);

    // H, K sharing a core with orthogonal extras satisfy the per-part hypothesis
    oracle::Rng rng(28);
    int held = 0;
    for (int it = 0; it < 100; ++it) {
        const Algebra alg({2, 1});
        const HilbertModule e(alg, 2);
        const Submodule core = random_submodule(rng, e);
        const Subspace cp = orthogonal_complement(core).span();
        const ModuleElement hx = ModuleElement::from_coords(e, cp.project(rng.module_element(e).coords()));
        auto hg = core.generators();
        hg.push_back(hx);
        const Submodule hh = submodule_from_generators(e, hg);
        const Subspace hp = orthogonal_complement(hh).span();
        auto kg = core.generators();
        kg.push_back(ModuleElement::from_coords(e, hp.project(rng.module_element(e).coords())));
        const Submodule kk = submodule_from_generators(e, kg);
        const IntersectionResult ir = intersection_localization_check(hh, kk, random_decomposition(rng, alg, 3));
        CHECK(ir.status != IntersectionStatus::conclusion_failure);
        held += ir.status == IntersectionStatus::holds;
    }
    CHECK(held == 100);
}

TEST_CASE("tensor product with the GNS space", "[localization]") {
    TwoPoint c;
    const TensorLocalization t = gns_tensor_localization(c.e, convex_combine(c.half));
    CHECK(t.tensor_dim == 2);
    CHECK(t.localized_dim == 2);
    CHECK(t.unitarity_residual <= 1e-8);

    const Algebra scalar({1});
    const HilbertModule e3(scalar, 3);
    const TensorLocalization ts = gns_tensor_localization(e3, State(scalar, {Matrix::Ones(1, 1)}));
    CHECK(ts.tensor_dim == 3);
    CHECK(ts.localized_dim == 3);
    CHECK(ts.unitarity_residual <= 1e-12);
    CHECK(ts.intertwining_residual <= 1e-12);

    const Algebra m2({2});
    const HilbertModule m(m2, 1);
    Vector e1 = Vector::Zero(2);
    e1(0) = 1.0;
    const TensorLocalization tv = gns_tensor_localization(m, vector_state(m2, e1));
    CHECK(tv.tensor_dim == 2);
    CHECK(tv.localized_dim == 2);
    CHECK(tv.inner_product_residual <= 1e-8);
    CHECK(tv.balancing_residual <= 1e-8);

    oracle::Rng rng(29);
    for (int it = 0; it < 40; ++it) {
        const Algebra alg({2, 1});
        const HilbertModule e(alg, 1 + it % 2);
        const auto rho = rng.density(alg);
        const TensorLocalization tr = gns_tensor_localization(e, State(alg, rho));
        CHECK(tr.tensor_dim == oracle::localized_dim(e, rho));
        CHECK(tr.tensor_dim == tr.localized_dim);
        CHECK(tr.inner_product_residual <= 1e-8);
        CHECK(tr.unitarity_residual <= 1e-8);
        CHECK(tr.intertwining_residual <= 1e-8);
        CHECK(tr.balancing_residual <= 1e-8);
    }
}

TEST_CASE("semi-inner product convexity", "[localization]") {
    oracle::Rng rng(30);
    const Algebra m2({2});
    const HilbertModule e(m2, 2);
    const ModuleElement z = rng.module_element(e);
    const ModuleElement x0 = rng.module_element(e);
    const std::vector<ModuleElement> fam{rng.module_element(e)};
    const ConvexityResult eq = semi_inner_convexity_check(fam, {z, z, z}, x0, {0.2, 0.3, 0.5});
    CHECK(eq.holds);
    CHECK(std::abs(eq.min_margin) <= 1e-12);
    CHECK(std::abs(semi_inner_convexity_check(fam, {z}, x0, {1.0}).min_margin) <= 1e-12);

    ErrorKind k = ErrorKind::input;
    try {
        semi_inner_convexity_check(fam, {z, x0}, x0, {0.5, 0.6});
    } catch (const Error &ex) {
        k = ex.kind();
    }
    CHECK(k == ErrorKind::invalid_argument);

    for (int it = 0; it < 200; ++it) {
        std::vector<ModuleElement> ys{rng.module_element(e)}, zs;
        std::vector<double> w;
        double t = 0.0;
        const int n = rng.integer(1, 4);
        for (int i = 0; i < n; ++i) {
            zs.push_back(rng.module_element(e));
            w.push_back(rng.uniform(0.05, 1.0));
            t += w.back();
        }
        for (double &x : w) x /= t;
        const ConvexityResult r = semi_inner_convexity_check(ys, zs, rng.module_element(e), w);
        CHECK(r.holds);
        CHECK(r.min_margin >= -1e-9);
    }
}

TEST_CASE("degenerate localizations keep numerical zeros at zero", "[localization]") {
    const Algebra alg({2, 1});
    const HilbertModule e(alg, 1);
    const ModuleElement p = ModuleElement::single(e, 0, Element::unit(alg, 0, 0, 0));
    const Submodule l = submodule_from_generators({p});
    // a state supported on the other block kills L entirely
    const State far(alg, {Matrix::Zero(2, 2), Matrix::Ones(1, 1)});
    const LocalizedSpace loc = localize(e, far);
    CHECK(localized_submodule(loc, l).dim() == 0);
    CHECK(mesland_check(e, l, far).holds);

    // L localizing onto everything: the closure is the whole space
    const State mixed(alg, {Matrix::Identity(2, 2) * 0.25, Matrix::Constant(1, 1, 0.5)});
    const ConvexDecomposition d{{0.5, 0.5}, {mixed, far}, 0.0};
    const LocalizedSpace whole = localize(e, d);
    const ClosureResult c = closure_characterization_check(whole, whole_module(e));
    CHECK(c.holds);
    CHECK(c.closure_dim == whole.dim());
    CHECK(c.preimage_dim == whole.dim());

    CHECK(Subspace::span(Matrix::Constant(3, 2, 1e-17), 1.0).dim() == 0);
    CHECK(Subspace::span(Matrix::Constant(3, 2, 1e-17)).dim() == 1);
}
