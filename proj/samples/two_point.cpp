// Localize C^2 at the midpoint state, look at the line through p1 + p2,
// and separate p1 - p2 from it.

#include <iostream>

#include "cstarloc/cstarloc.hpp"

int main() {
    using namespace cstarloc;

    const Algebra a({1, 1});
    const HilbertModule e(a, 1);
    const ModuleElement p1 = ModuleElement::single(e, 0, Element::unit(a, 0, 0, 0));
    const ModuleElement p2 = ModuleElement::single(e, 0, Element::unit(a, 1, 0, 0));

    const State w1(a, {Matrix::Ones(1, 1), Matrix::Zero(1, 1)});
    const State w2(a, {Matrix::Zero(1, 1), Matrix::Ones(1, 1)});
    const ConvexDecomposition half{{0.5, 0.5}, {w1, w2}, 0.0};
    const LocalizedSpace loc = localize(e, half);
    const ModuleSubspace line = linear_span(e, {p1 + p2});

    const ClosureResult closure = closure_characterization_check(loc, line);
    const VectorSearchResult search = find_separating_vector_state(e, line, p1 - p2);

    std::cout << "dim E_omega              " << loc.dim() << '\n'
              << "|iota(p1 - p2)|^2        " << loc.iota(p1 - p2).squaredNorm() << '\n'
              << "closure / componentwise  " << closure.closure_dim << " / " << closure.componentwise_dim << '\n'
              << "Psi isometry defect      " << direct_sum_embedding(loc).isometry_defect() << '\n';
    if (search.witness)
        std::cout << "vector-state witness     " << to_string(search.witness->kind) << ", distance "
                  << search.witness->distance << '\n';
    return closure.holds && search.witness ? 0 : 1;
}
