#pragma once

// The two-point fixture: A = C + C, E = A, omega = (omega_1 + omega_2) / 2,
// L = C (p1 + p2). L is a complex line, not a submodule.

#include <cmath>

#include "cstarloc/harness/instance.hpp"
#include "cstarloc/harness/json_io.hpp"
#include "cstarloc/localization.hpp"
#include "cstarloc/separation.hpp"

namespace cstarloc::harness {

struct C2Example {
    int dim_localized = 0;
    int dim_part1 = 0;
    int dim_part2 = 0;
    int null_dim = 0;
    double difference_norm_sq = 0.0;        // ||iota(p1 - p2)||^2
    bool part_images_full = false;          // iota_j(L) = E_{omega_j}, j = 1, 2
    double complement_residual = 0.0;       // distance of iota(p1 - p2) from iota(L)^perp
    double difference_norm_in_complement = 0.0;
    ClosureResult closure;
    double separation_distance = 0.0;       // x0 = p1 - p2
    double faithful_distance = 0.0;         // x0 = p1, normalised trace state
    double ambient_distance = 0.0;          // x0 = p1, Hilbert-Schmidt distance in E
    double seconds = 0.0;

    bool golden() const {
        return dim_localized == 2 && dim_part1 == 1 && dim_part2 == 1 && null_dim == 0 &&
               std::abs(difference_norm_sq - 1.0) <= 1e-12 && part_images_full && complement_residual <= 1e-12 &&
               difference_norm_in_complement > 0.5 && closure.holds && closure.closure_dim == 1 &&
               closure.componentwise_dim == 2;
    }
};

inline C2Example run_c2_example() {
    const auto t0 = std::chrono::steady_clock::now();
    const InstanceSpec in = c2_example_instance();
    const HilbertModule e = in.module();
    const ModuleSubspace l = in.subspace("L");
    const ModuleElement p1 = ModuleElement::single(e, 0, Element::unit(in.algebra, 0, 0, 0));
    const ModuleElement p2 = ModuleElement::single(e, 0, Element::unit(in.algebra, 1, 0, 0));
    const LocalizedSpace loc = localize(e, in.decomposition);

    C2Example out;
    out.dim_localized = loc.dim();
    out.null_dim = loc.null_dim();
    const LocalizedSpace l1 = localize(e, in.decomposition.parts[0]);
    const LocalizedSpace l2 = localize(e, in.decomposition.parts[1]);
    out.dim_part1 = l1.dim();
    out.dim_part2 = l2.dim();
    const Vector diff = loc.iota(p1 - p2);
    out.difference_norm_sq = diff.squaredNorm();
    out.part_images_full =
        localized_submodule(l1, l).dim() == l1.dim() && localized_submodule(l2, l).dim() == l2.dim();
    const Subspace perp = localized_complement(loc, l);
    out.complement_residual = perp.distance(diff);
    out.difference_norm_in_complement = perp.project(diff).norm();
    out.closure = closure_characterization_check(loc, l);
    out.separation_distance = separation_certificate(in.state(), l, p1 - p2);
    out.faithful_distance = separating_state_faithful(e, l, p1).distance;
    out.ambient_distance = l.span().distance(p1.coords());
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

inline json to_json(const C2Example &c) {
    return json{{"dim_localized", c.dim_localized},
                {"dim_parts", {c.dim_part1, c.dim_part2}},
                {"null_dim", c.null_dim},
                {"difference_norm_sq", c.difference_norm_sq},
                {"part_images_full", c.part_images_full},
                {"difference_in_complement_residual", c.complement_residual},
                {"closure",
                 {{"holds", c.closure.holds},
                  {"closure_dim", c.closure.closure_dim},
                  {"preimage_dim", c.closure.preimage_dim},
                  {"componentwise_dim", c.closure.componentwise_dim}}},
                {"separation_distance", c.separation_distance},
                {"faithful_distance", c.faithful_distance},
                {"ambient_distance", c.ambient_distance},
                {"golden", c.golden()}};
}

}  // namespace cstarloc::harness
