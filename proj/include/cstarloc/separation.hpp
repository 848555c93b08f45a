#pragma once

// Separation: given a subspace L of E and x0 outside it, find a state omega
// with iota_omega(x0) outside iota_omega(L), and certify the distance.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cstarloc/localization.hpp"

namespace cstarloc {

namespace tol {
/// Certified distances must exceed separation_factor * separation.
inline constexpr double separation = 1e-8;
inline constexpr double separation_factor = 10.0;
}  // namespace tol

enum class WitnessKind { faithful, vector, pure, convex_of_vector, hahn_banach };

inline std::string to_string(WitnessKind k) {
    switch (k) {
        case WitnessKind::faithful: return "faithful";
        case WitnessKind::vector: return "vector";
        case WitnessKind::pure: return "pure";
        case WitnessKind::convex_of_vector: return "convex-of-vector";
        case WitnessKind::hahn_banach: return "hahn-banach";
    }
    return "unknown";
}

struct SeparationWitness {
    State state;
    WitnessKind kind = WitnessKind::faithful;
    double distance = 0.0;
    ModuleElement x0;
    std::optional<std::uint64_t> seed;
};

/// dist(iota_omega(x0), iota_omega(L)) in E_omega.
inline double separation_certificate(const PositiveFunctional &omega, const ModuleSubspace &l, const ModuleElement &x0) {
    require(x0.module() == l.module(), ErrorKind::module_mismatch, "x0 is not in the module of L");
    const LocalizedSpace loc = localize(l.module(), omega);
    return localized_submodule(loc, l).distance(loc.iota(x0));
}

/// Re-certifies a witness: recomputed distance within 1e-9 of the stored one and above the noise floor.
inline bool verify_witness(const SeparationWitness &w, const ModuleSubspace &l) {
    const double d = separation_certificate(w.state, l, w.x0);
    return std::abs(d - w.distance) <= 1e-9 && d > tol::separation_factor * tol::separation;
}

namespace detail {
inline void require_outside(const ModuleSubspace &l, const ModuleElement &x0) {
    require(x0.module() == l.module(), ErrorKind::module_mismatch, "x0 is not in the module of L");
    const Vector c = x0.coords();
    const double resid = l.span().distance(c);
    require(resid > 1e-9 * std::max(1.0, c.norm()), ErrorKind::no_separation, "x0 lies in L; nothing to separate");
}
}  // namespace detail

/// The normalised trace state is faithful, so N_omega = 0 and any x0 outside L separates.
inline SeparationWitness separating_state_faithful(const HilbertModule &module, const ModuleSubspace &l,
                                                   const ModuleElement &x0) {
    require(l.module() == module, ErrorKind::module_mismatch, "L is not a subspace of this module");
    detail::require_outside(l, x0);
    State omega = trace_state(module.algebra());
    const double d = separation_certificate(omega, l, x0);
    require(d > tol::separation_factor * tol::separation, ErrorKind::no_separation,
            "x0 is within numerical noise of L");
    return {std::move(omega), WitnessKind::faithful, d, x0, std::nullopt};
}

struct VectorSearchOptions {
    int budget = 200;            // objective evaluations
    std::uint64_t seed = 0x5eed;
    int mixture_candidates = 4;  // top candidates combined when no single vector state certifies
};

struct VectorSearchResult {
    std::optional<SeparationWitness> witness;  // empty: budget exhausted, inconclusive
    int evaluations = 0;
    double best_distance = 0.0;
};

namespace detail {

/// Matrix of x -> (x_i h)_i, realising E_{omega_h} for the vector state of h (up to its norm).
inline Matrix vector_realisation(const HilbertModule &module, const Vector &h) {
    const Algebra &alg = module.algebra();
    const int t = alg.total_dim();
    const int rep = alg.rep_dim();
    Matrix m = Matrix::Zero(module.rank() * rep, module.ambient_dim());
    for (int i = 0; i < module.rank(); ++i)
        for (int k = 0; k < alg.num_blocks(); ++k) {
            const int n = alg.block_dim(k);
            for (int r = 0; r < n; ++r)
                for (int s = 0; s < n; ++s)
                    m(i * rep + alg.rep_offset(k) + r, i * t + alg.block_offset(k) + r * n + s) = h(alg.rep_offset(k) + s);
        }
    return m;
}

/// Distance of x0 h from L h, equal to the E_{omega_h} distance for a unit h.
inline double vector_objective(const HilbertModule &module, const Matrix &l_basis, const Vector &x0, const Vector &h) {
    const Matrix m = vector_realisation(module, h);
    const Vector v = m * x0;
    if (l_basis.cols() == 0) return v.norm();
    return Subspace::span(m * l_basis).distance(v);
}

inline bool single_block(const Algebra &alg, const Vector &h) {
    int support = 0;
    for (int k = 0; k < alg.num_blocks(); ++k)
        if (h.segment(alg.rep_offset(k), alg.block_dim(k)).norm() > 1e-14) ++support;
    return support == 1;
}

}  // namespace detail

/// Multi-start search over unit vectors h for the vector state <. h, h>:
/// block-supported (pure) starts first, then arbitrary ones, then random
/// local refinement of the best point. Every success is certified through
/// separation_certificate. If no single vector state clears the noise floor,
/// equal-weight mixtures of the best candidates are tried.
inline VectorSearchResult find_separating_vector_state(const HilbertModule &module, const ModuleSubspace &l,
                                                       const ModuleElement &x0, const VectorSearchOptions &opt = {}) {
    require(l.module() == module, ErrorKind::module_mismatch, "L is not a subspace of this module");
    require(opt.budget >= 1, ErrorKind::invalid_argument, "budget must be positive");
    detail::require_outside(l, x0);
    const Algebra &alg = module.algebra();
    const int rep = alg.rep_dim();
    const Vector x = x0.coords();
    const Matrix &lb = l.span().basis();
    const double floor = tol::separation_factor * tol::separation;

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss;
    auto random_vector = [&](int offset, int len) {
        Vector h = Vector::Zero(rep);
        for (int i = 0; i < len; ++i) h(offset + i) = cplx(gauss(rng), gauss(rng));
        return Vector(h.normalized());
    };

    struct Candidate {
        double value;
        Vector h;
    };
    std::vector<Candidate> seen;
    VectorSearchResult out;
    auto evaluate = [&](const Vector &h) {
        const double v = detail::vector_objective(module, lb, x, h);
        ++out.evaluations;
        seen.push_back({v, h});
        return v;
    };

    const int starts = std::max(1, opt.budget / 2);
    for (int s = 0; s < starts && out.evaluations < opt.budget; ++s) {
        if (s < 2 * alg.num_blocks()) {
            const int k = s % alg.num_blocks();
            evaluate(random_vector(alg.rep_offset(k), alg.block_dim(k)));
        } else {
            evaluate(random_vector(0, rep));
        }
    }
    auto best = std::max_element(seen.begin(), seen.end(), [](auto &a, auto &b) { return a.value < b.value; });
    Candidate current = *best;
    double step = 0.5;
    while (out.evaluations < opt.budget) {
        Vector trial = current.h + step * random_vector(0, rep);
        trial.normalize();
        const double v = evaluate(trial);
        if (v > current.value) {
            current = {v, trial};
        } else {
            step = std::max(1e-3, 0.7 * step);
        }
    }

    std::stable_sort(seen.begin(), seen.end(), [](auto &a, auto &b) { return a.value > b.value; });
    out.best_distance = seen.front().value;
    for (const auto &c : seen) {
        if (c.value <= floor) break;
        State omega = vector_state(alg, c.h);
        const double d = separation_certificate(omega, l, x0);
        if (d > floor) {
            const WitnessKind kind = detail::single_block(alg, c.h) ? WitnessKind::pure : WitnessKind::vector;
            out.witness = SeparationWitness{std::move(omega), kind, d, x0, opt.seed};
            return out;
        }
        if (&c - seen.data() >= opt.mixture_candidates) break;
    }

    const std::size_t m = std::min<std::size_t>(seen.size(), static_cast<std::size_t>(std::max(1, opt.mixture_candidates)));
    if (m >= 2) {
        ConvexDecomposition mix;
        for (std::size_t j = 0; j < m; ++j) {
            mix.weights.push_back(1.0 / static_cast<double>(m));
            mix.parts.push_back(vector_state(alg, seen[j].h));
        }
        State omega = convex_combine(mix);
        const double d = separation_certificate(omega, l, x0);
        if (d > floor) out.witness = SeparationWitness{std::move(omega), WitnessKind::convex_of_vector, d, x0, opt.seed};
    }
    return out;
}

/// tau = tau_1 - tau_2 + i (tau_3 - tau_4) with every tau_i positive.
struct JordanParts {
    PositiveFunctional real_positive;
    PositiveFunctional real_negative;
    PositiveFunctional imag_positive;
    PositiveFunctional imag_negative;
};

inline JordanParts jordan_decomposition(const Functional &tau) {
    const Algebra &alg = tau.algebra();
    std::vector<Matrix> rp, rn, ip, in;
    auto split = [](const Matrix &h, std::vector<Matrix> &pos, std::vector<Matrix> &neg) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
        const RealVector ev = es.eigenvalues();
        const Matrix &v = es.eigenvectors();
        pos.push_back(v * ev.cwiseMax(0.0).asDiagonal() * v.adjoint());
        neg.push_back(v * (-ev).cwiseMax(0.0).asDiagonal() * v.adjoint());
    };
    for (const auto &d : tau.density()) {
        split(0.5 * (d + d.adjoint()), rp, rn);
        split((d - d.adjoint()) / cplx(0.0, 2.0), ip, in);
    }
    return {PositiveFunctional(alg, rp), PositiveFunctional(alg, rn), PositiveFunctional(alg, ip),
            PositiveFunctional(alg, in)};
}

struct HahnBanachPair {
    double weight;
    Functional functional;
    ModuleElement y;
};

/// sum_j lambda_j tau_j<x0 - l, y_j> = 1 for every l in L.
struct HahnBanachCertificate {
    std::vector<HahnBanachPair> pairs;
    PositiveFunctional positive_part;  // sum_j lambda_j (tau_j)_{real, positive}

    cplx evaluate(const ModuleElement &x) const {
        cplx s = 0.0;
        for (const auto &p : pairs) s += p.weight * p.functional(module_inner(x, p.y));
        return s;
    }
};

struct HahnBanachResult {
    HahnBanachCertificate certificate;
    SeparationWitness witness;
    bool candidate_certified = false;  // false: the witness is the faithful fallback
    double candidate_distance = 0.0;
};

/// Constructive finite-dimensional version of the duality argument:
///   1. f linear, f|_L = 0, f(x0) = 1, from the residual of x0 against L;
///   2. conj f = sum_j lambda_j tau_j<., y_j>, one pair per matrix unit, lambda_j uniform;
///   3. Jordan parts of each tau_j;
///   4. the normalised sum of lambda_j (tau_j)_{real, positive} is the candidate state.
/// A candidate that does not certify is replaced by the faithful witness.
inline HahnBanachResult hahn_banach_witness(const HilbertModule &module, const ModuleSubspace &l,
                                            const ModuleElement &x0) {
    require(l.module() == module, ErrorKind::module_mismatch, "L is not a subspace of this module");
    detail::require_outside(l, x0);
    const Algebra &alg = module.algebra();
    const int t = alg.total_dim();
    const Vector x = x0.coords();
    const Vector r = x - l.span().project(x);
    const Vector w = r / r.squaredNorm();  // f(v) = w^H v

    // conj f(v) = sum_{i,u} w_{iu} conj(v_{iu}); for u = e_rs in block k,
    // sum_i w_{iu} conj(v_{i,rs}) = tau_u<v, y_u> with tau_u = tr(e_rs .), y_u = (w_{iu} 1_k)_i.
    std::vector<int> units;
    for (int u = 0; u < t; ++u)
        for (int i = 0; i < module.rank(); ++i)
            if (std::abs(w(i * t + u)) > 0.0) {
                units.push_back(u);
                break;
            }
    const double m = static_cast<double>(units.size());

    HahnBanachCertificate cert{{}, PositiveFunctional(alg, Element::zero(alg).blocks())};
    std::vector<Matrix> positive = Element::zero(alg).blocks();
    for (int u : units) {
        const UnitIndex iu = unit_index(alg, u);
        Element density = Element::zero(alg);
        density.block(iu.block)(iu.row, iu.col) = m;
        std::vector<Element> comps;
        for (int i = 0; i < module.rank(); ++i) {
            Element c = Element::zero(alg);
            c.block(iu.block) = w(i * t + u) * Matrix::Identity(alg.block_dim(iu.block), alg.block_dim(iu.block));
            comps.push_back(std::move(c));
        }
        Functional tau(alg, density.blocks());
        const JordanParts parts = jordan_decomposition(tau);
        for (int k = 0; k < alg.num_blocks(); ++k) positive[static_cast<std::size_t>(k)] += parts.real_positive.density(k) / m;
        cert.pairs.push_back({1.0 / m, std::move(tau), ModuleElement(module, std::move(comps))});
    }
    cert.positive_part = PositiveFunctional(alg, positive);

    HahnBanachResult out{std::move(cert), {}, false, 0.0};
    const double mass = out.certificate.positive_part.mass();
    require(mass > 0.0, ErrorKind::degenerate_input, "positive part vanished");
    std::vector<Matrix> normalised = out.certificate.positive_part.density();
    for (auto &b : normalised) b /= mass;
    State candidate(alg, std::move(normalised));
    out.candidate_distance = separation_certificate(candidate, l, x0);
    if (out.candidate_distance > tol::separation_factor * tol::separation) {
        out.candidate_certified = true;
        out.witness = {std::move(candidate), WitnessKind::hahn_banach, out.candidate_distance, x0, std::nullopt};
    } else {
        out.witness = separating_state_faithful(module, l, x0);
    }
    return out;
}

}  // namespace cstarloc
