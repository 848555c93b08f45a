#include <catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"

using namespace cstarloc;
using Catch::Matchers::WithinAbs;

namespace {

Algebra c2() { return Algebra({1, 1}); }
Element p(int k) { return Element::unit(c2(), k, 0, 0); }

bool close(const Element &a, const Element &b, double t) {
    for (int k = 0; k < a.algebra().num_blocks(); ++k)
        if ((a.block(k) - b.block(k)).norm() > t) return false;
    return true;
}

ErrorKind kind_of(const std::function<void()> &f) {
    try {
        f();
    } catch (const Error &e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::input;
}

}  // namespace

TEST_CASE("algebra descriptors", "[algebra]") {
    CHECK(algebra_new({1, 1}).total_dim() == 2);
    CHECK(algebra_new({1}).total_dim() == 1);
    CHECK(algebra_new({2, 3}).total_dim() == 13);
    CHECK(algebra_new({2, 3}).rep_dim() == 5);
    CHECK(kind_of([] { algebra_new({}); }) == ErrorKind::invalid_argument);
    CHECK(kind_of([] { algebra_new({2, 0}); }) == ErrorKind::invalid_argument);
    CHECK(kind_of([] { Element(Algebra({2}), {Matrix::Zero(3, 3)}); }) == ErrorKind::shape);
}

TEST_CASE("multiplication and adjoint", "[algebra]") {
    CHECK(close(p(0) * p(1), Element::zero(c2()), 0.0));
    oracle::Rng rng(1);
    const Algebra m2({2});
    const Element a = rng.element(m2), b = rng.element(m2);
    CHECK(close(Element::identity(m2) * a, a, 0.0));
    // dense 2x2 product written out
    Matrix ref(2, 2);
    for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s) ref(r, s) = a.block(0)(r, 0) * b.block(0)(0, s) + a.block(0)(r, 1) * b.block(0)(1, s);
    CHECK((mul(a, b).block(0) - ref).norm() < 1e-13);
    CHECK(kind_of([&] { (void)(a * p(0)); }) == ErrorKind::shape);

    Element herm(m2, {Matrix(RealVector(RealVector::LinSpaced(2, 1, 2)).cast<cplx>().asDiagonal())});
    CHECK(close(adjoint(herm), herm, 0.0));
    Element nil(m2, {Matrix::Zero(2, 2)});
    nil.block(0)(0, 1) = 1.0;
    CHECK(adjoint(nil).block(0)(1, 0) == cplx(1.0));
    CHECK(adjoint(nil).block(0)(0, 1) == cplx(0.0));
    CHECK(close(adjoint(adjoint(a)), a, 0.0));
    CHECK(close(adjoint(a * b), adjoint(b) * adjoint(a), 1e-12));
}

TEST_CASE("C*-norm", "[algebra]") {
    CHECK_THAT(operator_norm(p(0) + p(1)), WithinAbs(1.0, 1e-15));
    const Algebra m2({2});
    Element d(m2, {Matrix::Zero(2, 2)});
    d.block(0)(0, 0) = 3.0;
    d.block(0)(1, 1) = -4.0;
    CHECK_THAT(operator_norm(d), WithinAbs(4.0, 1e-12));
    oracle::Rng rng(2);
    const Algebra alg({2, 3, 1});
    for (int i = 0; i < 200; ++i) {
        const Element a = rng.element(alg);
        const double n = operator_norm(a);
        CHECK(std::abs(operator_norm(adjoint(a) * a) - n * n) <= 1e-10 * (1 + n * n));
    }
}

TEST_CASE("positivity", "[algebra]") {
    CHECK(is_positive(p(0), 1e-12));
    CHECK_FALSE(is_positive(-Element::identity(c2()), 1e-12));
    oracle::Rng rng(3);
    const Algebra alg({3, 2});
    for (int i = 0; i < 100; ++i) {
        const Element b = rng.element(alg);
        CHECK(is_positive(adjoint(b) * b, 1e-12));
    }
    Element skew(Algebra({2}), {Matrix::Zero(2, 2)});
    skew.block(0)(0, 1) = 1.0;
    CHECK_FALSE(is_positive(skew, 1e-9));
}

TEST_CASE("matrix-unit basis", "[algebra]") {
    const auto b2 = basis(c2());
    REQUIRE(b2.size() == 2);
    CHECK(close(b2[0], p(0), 0.0));
    CHECK(close(b2[1], p(1), 0.0));
    CHECK(basis(Algebra({2})).size() == 4);
    const Algebra alg({2, 1});
    const auto b = basis(alg);
    REQUIRE(b.size() == 5);
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) CHECK(trace_pairing(b[i], b[j]) == cplx(i == j ? 1.0 : 0.0));
    oracle::Rng rng(4);
    const Element a = rng.element(alg);
    Element rebuilt = Element::zero(alg);
    for (const auto &e : b) rebuilt += trace_pairing(e, a) * e;
    CHECK(close(rebuilt, a, 0.0));
    CHECK((Element::from_coords(alg, a.coords()).coords() - a.coords()).norm() == 0.0);
}

TEST_CASE("multiplication matrices", "[algebra]") {
    oracle::Rng rng(5);
    const Algebra alg({2, 3});
    const Element a = rng.element(alg), x = rng.element(alg);
    CHECK((left_multiplication(a) * x.coords() - (a * x).coords()).norm() < 1e-12);
    CHECK((right_multiplication(a) * x.coords() - (x * a).coords()).norm() < 1e-12);
}

TEST_CASE("functionals from densities", "[states]") {
    const State w1 = functional_from_density(c2(), {Matrix::Ones(1, 1), Matrix::Zero(1, 1)});
    CHECK(w1(p(0)) == cplx(1.0));
    CHECK(w1(p(1)) == cplx(0.0));
    const Algebra m2({2});
    const State tr = trace_state(m2);
    CHECK(tr.is_state());
    CHECK_THAT(tr(Element::unit(m2, 0, 0, 1)).real(), WithinAbs(0.0, 0.0));
    Matrix bad = Matrix::Identity(2, 2);
    bad(1, 1) = -0.5;
    CHECK(kind_of([&] { State(m2, {bad}); }) == ErrorKind::positivity);
    Matrix nonherm = Matrix::Identity(2, 2);
    nonherm(0, 1) = 1.0;
    CHECK(kind_of([&] { State(m2, {nonherm}); }) == ErrorKind::positivity);
    CHECK(kind_of([&] { State(m2, {Matrix::Identity(3, 3)}); }) == ErrorKind::shape);

    oracle::Rng rng(6);
    const Algebra alg({2, 3});
    for (int i = 0; i < 100; ++i) {
        const auto rho = rng.density(alg);
        const State w(alg, rho);
        const Element a = rng.element(alg), b = rng.element(alg);
        CHECK(std::abs(w(a) - oracle::state_value(rho, a.blocks())) < 1e-12);
        CHECK(std::abs(w(adjoint(a)) - std::conj(w(a))) < 1e-12);
        CHECK_THAT(w(Element::identity(alg)).real(), WithinAbs(w.mass(), 1e-12));
        const double lhs = std::norm(w(adjoint(a) * b));
        const double rhs = w(adjoint(a) * a).real() * w(adjoint(b) * b).real();
        CHECK(lhs <= rhs * (1 + 1e-10) + 1e-12);
    }
}

TEST_CASE("convex combinations", "[states]") {
    const State w1(c2(), {Matrix::Ones(1, 1), Matrix::Zero(1, 1)});
    const State w2(c2(), {Matrix::Zero(1, 1), Matrix::Ones(1, 1)});
    const State half = convex_combine({{0.5, 0.5}, {w1, w2}, 0.0});
    CHECK(half.density(0)(0, 0) == cplx(0.5));
    CHECK(half.density(1)(0, 0) == cplx(0.5));
    const State same = convex_combine({{1.0}, {w1}, 0.0});
    CHECK(same.density(0)(0, 0) == cplx(1.0));
    CHECK(kind_of([&] { convex_combine({{0.0, 1.0}, {w1, w2}, 0.0}); }) == ErrorKind::invalid_argument);
    CHECK(kind_of([&] { convex_combine({{1.0}, {w1}, 0.1}); }) == ErrorKind::invalid_argument);

    oracle::Rng rng(7);
    const Algebra alg({2, 1});
    const State a(alg, rng.density(alg)), b(alg, rng.density(alg));
    const State c = convex_combine({{0.3, 0.7}, {a, b}, 0.0});
    for (const auto &e : basis(alg)) CHECK(std::abs(c(e) - (0.3 * a(e) + 0.7 * b(e))) < 1e-12);
}

TEST_CASE("sigma-convex truncation", "[states]") {
    const Algebra alg({2});
    oracle::Rng rng(8);
    std::vector<State> pool;
    for (int i = 0; i < 7; ++i) pool.push_back(State(alg, rng.density(alg)));
    auto parts = [&](std::size_t j) { return pool[(j - 1) % pool.size()]; };

    const auto d = sigma_convex_truncate(WeightRule::geometric(0.5), parts, 20);
    CHECK(d.size() == 20);
    CHECK_THAT(d.tail_bound, WithinAbs(std::pow(2.0, -20), 1e-18));
    CHECK_THAT(d.weights[0], WithinAbs(0.5, 1e-15));

    const auto f = sigma_convex_truncate(WeightRule::finite({0.25, 0.75}), parts, 5);
    CHECK(f.size() == 2);
    CHECK(f.tail_bound == 0.0);

    const auto no_tail = WeightRule::custom([](std::size_t j) { return 6.0 / (M_PI * M_PI * double(j * j)); });
    CHECK(kind_of([&] { sigma_convex_truncate(no_tail, parts, 5); }) == ErrorKind::unsupported_rule);

    // truncation error against a 1000-term reference sum
    const auto ref = sigma_convex_truncate(WeightRule::geometric(0.5), parts, 1000);
    const auto short_d = sigma_convex_truncate(WeightRule::geometric(0.5), parts, 6);
    for (int i = 0; i < 20; ++i) {
        Element a = rng.element(alg);
        a *= 1.0 / operator_norm(a);
        cplx full = 0.0, cut = 0.0;
        for (std::size_t j = 0; j < ref.size(); ++j) full += ref.weights[j] * ref.parts[j](a);
        for (std::size_t j = 0; j < short_d.size(); ++j) cut += short_d.weights[j] * short_d.parts[j](a);
        CHECK(std::abs(full - cut) <= short_d.tail_bound + 1e-12);
    }
}

TEST_CASE("l-infinity sum functional", "[states]") {
    const Algebra alg({1});
    const State one(alg, {Matrix::Ones(1, 1)});
    auto parts = [&](std::size_t) { return one; };
    const auto d = sigma_convex_truncate(WeightRule::geometric(0.5), parts, 30);
    std::vector<Element> alt, unit;
    for (std::size_t j = 1; j <= 30; ++j) {
        alt.push_back((j % 2 == 0 ? 1.0 : -1.0) * Element::identity(alg));
        unit.push_back(Element::identity(alg));
    }
    // sum_j 2^{-j} (-1)^j = -1/3
    const BoundedValue v = linf_sum_evaluate(d, alt, 1.0);
    CHECK(std::abs(v.value - cplx(-1.0 / 3.0)) <= v.error_bound + 1e-15);
    CHECK(linf_sum_evaluate(d, unit, 1.0).value.real() <= 1.0);
    CHECK(kind_of([&] { linf_sum_evaluate(d, {Element::identity(alg)}, 1.0); }) == ErrorKind::invalid_argument);

    oracle::Rng rng(9);
    const Algebra m2({2});
    std::vector<State> pool;
    for (int i = 0; i < 10; ++i) pool.push_back(State(m2, rng.density(m2)));
    const auto dm = sigma_convex_truncate(WeightRule::geometric(0.4), [&](std::size_t j) { return pool[j - 1]; }, 10);
    std::vector<Element> tuple;
    double sup = 0.0;
    for (int i = 0; i < 10; ++i) {
        tuple.push_back(rng.element(m2));
        sup = std::max(sup, operator_norm(tuple.back()));
    }
    CHECK(std::abs(linf_sum_evaluate(dm, tuple, 1.0).value) <= sup + 1e-12);
}

TEST_CASE("GNS construction", "[states]") {
    const State w1(c2(), {Matrix::Ones(1, 1), Matrix::Zero(1, 1)});
    CHECK(gns(w1).dim == 1);
    const Algebra m2({2});
    CHECK(gns(trace_state(m2)).dim == 4);
    Vector e1 = Vector::Zero(2);
    e1(0) = 1.0;
    CHECK(gns(vector_state(m2, e1)).dim == 2);
    CHECK(kind_of([&] { gns(PositiveFunctional(m2, {Matrix::Zero(2, 2)})); }) == ErrorKind::degenerate_input);

    oracle::Rng rng(10);
    const Algebra alg({2, 2, 1});
    const auto units = basis(alg);
    for (int it = 0; it < 100; ++it) {
        const auto rho = rng.density(alg);
        const State w(alg, rho);
        const GnsRepresentation g = gns(w);
        // dim against the rank of the entrywise Gram oracle
        const HilbertModule a1(alg, 1);
        CHECK(g.dim == oracle::rank(oracle::gram(a1, rho)));
        double hom = 0.0, inner = 0.0;
        for (std::size_t a = 0; a < units.size(); ++a) {
            const Matrix pa = g.represent(units[a]);
            hom = std::max(hom, (g.represent(adjoint(units[a])) - pa.adjoint()).norm());
            for (std::size_t b = 0; b < units.size(); ++b) {
                const Matrix pb = g.represent(units[b]);
                hom = std::max(hom, (g.represent(units[a] * units[b]) - pa * pb).norm());
                const cplx lhs = (pa * g.cyclic_vector).dot(pb * g.cyclic_vector);
                inner = std::max(inner, std::abs(lhs - oracle::state_value(rho, (adjoint(units[a]) * units[b]).blocks())));
            }
        }
        CHECK(hom <= 1e-9);
        CHECK(inner <= 1e-9);
    }
}

TEST_CASE("vector states and their decomposition", "[states]") {
    Vector e1 = Vector::Zero(2);
    e1(0) = 1.0;
    const State v = vector_state(c2(), e1);
    CHECK(v.density(0)(0, 0) == cplx(1.0));
    CHECK(v.density(1)(0, 0) == cplx(0.0));
    const Algebra m2({2});
    oracle::Rng rng(11);
    const Element a = rng.element(m2);
    CHECK(std::abs(vector_state(m2, e1)(a) - a.block(0)(0, 0)) < 1e-15);
    CHECK(kind_of([&] { vector_state(m2, 2.0 * e1); }) == ErrorKind::invalid_argument);

    const Algebra alg({2, 3});
    for (int i = 0; i < 50; ++i) {
        Vector h = rng.mat(5, 1);
        h.normalize();
        const State w = vector_state(alg, h);
        const Element x = rng.element(alg);
        CHECK(std::abs(w(x) - h.dot(x.apply(h))) < 1e-12);
    }

    const State half(c2(), {Matrix::Constant(1, 1, 0.5), Matrix::Constant(1, 1, 0.5)});
    const auto d = decompose_into_vector_states(half);
    REQUIRE(d.size() == 2);
    CHECK_THAT(d.weights[0], WithinAbs(0.5, 1e-15));
    CHECK_THAT(d.weights[1], WithinAbs(0.5, 1e-15));
    CHECK(std::abs(d.parts[0].density(0)(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(d.parts[1].density(1)(0, 0) - 1.0) < 1e-15);
    CHECK(decompose_into_vector_states(v).size() == 1);

    const Algebra m3({3});
    for (int i = 0; i < 20; ++i) {
        const State w(m3, rng.density(m3, {3}));
        const State back = convex_combine(decompose_into_vector_states(w));
        for (const auto &e : basis(m3)) CHECK(std::abs(back(e) - w(e)) <= 1e-9);
    }
}

TEST_CASE("module inner product", "[module]") {
    const HilbertModule e = standard_module(c2(), 1);
    CHECK(e.ambient_dim() == 2);
    CHECK(standard_module(Algebra({1}), 3).ambient_dim() == 3);
    CHECK(standard_module(Algebra({2}), 2).ambient_dim() == 8);
    CHECK(kind_of([] { standard_module(Algebra({1}), 0); }) == ErrorKind::invalid_argument);

    const ModuleElement x = ModuleElement::single(e, 0, p(0) - p(1));
    CHECK(close(module_inner(x, x), p(0) + p(1), 0.0));
    CHECK(close(module_inner(x, ModuleElement::zero(e)), Element::zero(c2()), 0.0));

    oracle::Rng rng(12);
    const Algebra alg({2, 1});
    const HilbertModule f(alg, 2);
    for (int i = 0; i < 50; ++i) {
        const ModuleElement a = rng.module_element(f), b = rng.module_element(f);
        const Element c = rng.element(alg);
        CHECK(close(module_inner(a, b * c), module_inner(a, b) * c, 1e-10));
        CHECK(close(adjoint(module_inner(a, b)), module_inner(b, a), 1e-10));
        CHECK(is_positive(module_inner(a, a), 1e-10));
        const Element ba = module_inner(b, a);
        const double lhs = operator_norm(ba * adjoint(ba));
        const double bn = module_norm(b);
        CHECK(lhs <= bn * bn * operator_norm(module_inner(a, a)) * (1 + 1e-10) + 1e-12);
    }
    const HilbertModule other(alg, 1);
    CHECK(kind_of([&] { module_inner(rng.module_element(f), rng.module_element(other)); }) == ErrorKind::module_mismatch);
}

TEST_CASE("submodules", "[module]") {
    const HilbertModule e(c2(), 1);
    const ModuleElement p1 = ModuleElement::single(e, 0, p(0));
    const ModuleElement p2 = ModuleElement::single(e, 0, p(1));
    const Submodule l = submodule_from_generators({p1});
    CHECK(l.dim() == 1);
    CHECK(l.contains(p1));
    CHECK_FALSE(l.contains(p2));
    CHECK(submodule_from_generators({ModuleElement::single(e, 0, Element::identity(c2()))}).dim() == 2);
    CHECK(submodule_from_generators({ModuleElement::zero(e)}).dim() == 0);

    const Submodule perp = orthogonal_complement(l);
    CHECK(perp.dim() == 1);
    CHECK(perp.contains(p2));
    CHECK(orthogonal_complement(whole_module(e)).dim() == 0);
    CHECK(orthogonal_complement(zero_submodule(e)).dim() == 2);
    CHECK(intersect(l, perp).dim() == 0);
    CHECK(intersect(l, l).span().equals(l.span()));
    CHECK(is_orthogonally_complemented(l));
    CHECK(is_orthogonally_complemented(whole_module(e)));

    // (C p1 + C p2) is a line, not a submodule
    const ModuleSubspace line = linear_span(e, {p1 + p2});
    CHECK(line.right_closure_residual() > 0.1);
    CHECK(kind_of([&] { Submodule::from_invariant_subspace(e, line.span()); }) == ErrorKind::invalid_argument);

    oracle::Rng rng(13);
    const Algebra m2({2});
    const HilbertModule f(m2, 2);
    Matrix proj = Matrix::Zero(2, 2);
    proj(0, 0) = 1.0;
    const Element q(m2, {proj});
    for (int i = 0; i < 30; ++i) {
        const Submodule h = submodule_from_generators({rng.module_element(f) * q});
        const Submodule k = submodule_from_generators({rng.module_element(f) * q, rng.module_element(f) * q});
        CHECK(h.right_closure_residual() <= 1e-9);
        Matrix both(f.ambient_dim(), h.dim() + k.dim());
        both << h.span().basis(), k.span().basis();
        CHECK(intersect(h, k).dim() == h.dim() + k.dim() - oracle::rank(both));
        CHECK(is_orthogonally_complemented(h));
        const Submodule hpp = orthogonal_complement(orthogonal_complement(h));
        CHECK(hpp.span().equals(h.span()));
        CHECK(orthogonal_complement(h).right_closure_residual() <= 1e-9);
    }
}

TEST_CASE("Riesz representation", "[module]") {
    const HilbertModule e(c2(), 1);
    const ModuleElement p1 = ModuleElement::single(e, 0, p(0));
    auto values_of = [](const ModuleElement &y) {
        std::vector<Element> v;
        for (const auto &b : module_basis(y.module())) v.push_back(module_inner(y, b));
        return v;
    };
    const ModuleElement y = riesz_representation(e, values_of(p1));
    CHECK((y.coords() - p1.coords()).norm() < 1e-12);
    CHECK(riesz_representation(e, values_of(ModuleElement::zero(e))).coords().norm() < 1e-12);

    oracle::Rng rng(14);
    const HilbertModule f(Algebra({2, 1}), 2);
    for (int i = 0; i < 20; ++i) {
        const ModuleElement y0 = rng.module_element(f);
        CHECK((riesz_representation(f, values_of(y0)).coords() - y0.coords()).norm() <= 1e-9 * y0.coords().norm());
    }
    // x -> <y0, x>^* is conjugate-linear and not A-linear
    std::vector<Element> bad;
    const ModuleElement y0 = rng.module_element(f);
    for (const auto &b : module_basis(f)) bad.push_back(adjoint(module_inner(y0, b)));
    CHECK(kind_of([&] { riesz_representation(f, bad); }) == ErrorKind::invalid_functional);
}
