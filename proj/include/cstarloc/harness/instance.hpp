#pragma once

// Size profiles and seeded random instances for the verification suites.

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cstarloc/module.hpp"
#include "cstarloc/states.hpp"

namespace cstarloc::harness {

/// Caps on generated instances. All bounds must stay inside the desk-scale envelope.
struct Profile {
    std::string name;
    int max_block_dim = 3;
    int max_blocks = 2;
    int max_rank = 2;
    int min_parts = 2;
    int max_parts = 3;
    int sigma_terms = 8;

    static constexpr int cap_block_dim = 4;
    static constexpr int cap_blocks = 3;
    static constexpr int cap_rank = 3;
    static constexpr int cap_parts = 4;

    void validate() const {
        auto in = [](int v, int lo, int hi) { return v >= lo && v <= hi; };
        require(in(max_block_dim, 1, cap_block_dim) && in(max_blocks, 1, cap_blocks) && in(max_rank, 1, cap_rank) &&
                    in(min_parts, 1, cap_parts) && in(max_parts, min_parts, cap_parts) && in(sigma_terms, 1, 64),
                ErrorKind::invalid_argument, "profile '" + name + "' is outside the desk-scale bounds");
    }
};

inline const std::string c2_profile = "c2-example";

/// Built-in profiles: tiny, small (default), desk (the full envelope), c2-example.
inline Profile builtin_profile(const std::string &name) {
    Profile p;
    p.name = name;
    if (name == "tiny") {
        p.max_block_dim = 2;
        p.max_blocks = 2;
        p.max_rank = 1;
        p.max_parts = 2;
    } else if (name == "small" || name == c2_profile) {
        // defaults
    } else if (name == "desk") {
        p.max_block_dim = 4;
        p.max_blocks = 3;
        p.max_rank = 3;
        p.max_parts = 4;
    } else {
        fail(ErrorKind::invalid_argument, "unknown profile '" + name + "'");
    }
    p.validate();
    return p;
}

/// Random content of one instance. Subspaces are stored by their generators;
/// kind "submodule" means the A-submodule they generate, "span" the complex span.
struct SubspaceSpec {
    std::string kind = "submodule";
    std::vector<ModuleElement> generators;
};

struct SigmaSpec {
    double ratio = 0.5;
    std::vector<State> parts;  // the first `parts.size()` terms of the countable combination
};

struct InstanceSpec {
    std::uint64_t seed = 0;
    std::string profile;
    Algebra algebra;
    int module_rank = 1;
    std::map<std::string, SubspaceSpec> subspaces;  // L, H, K
    ConvexDecomposition decomposition;
    std::optional<SigmaSpec> sigma;
    std::optional<ModuleElement> x0;

    HilbertModule module() const { return HilbertModule(algebra, module_rank); }

    const SubspaceSpec &spec(const std::string &name) const {
        const auto it = subspaces.find(name);
        require(it != subspaces.end(), ErrorKind::input, "instance has no subspace '" + name + "'");
        return it->second;
    }

    /// The submodule generated by the named generators, whatever their kind.
    Submodule submodule(const std::string &name) const { return submodule_from_generators(module(), spec(name).generators); }

    ModuleSubspace subspace(const std::string &name) const {
        const SubspaceSpec &s = spec(name);
        if (s.kind == "span") return linear_span(module(), s.generators);
        return submodule(name);
    }

    State state() const { return convex_combine(decomposition); }

    /// Truncated sigma-convex decomposition; tail bound r^N.
    std::optional<ConvexDecomposition> sigma_decomposition() const {
        if (!sigma) return std::nullopt;
        const auto &parts = sigma->parts;
        return sigma_convex_truncate(
            WeightRule::geometric(sigma->ratio), [&parts](std::size_t j) { return parts[j - 1]; }, parts.size());
    }
};

/// splitmix64 step, used to derive per-instance seeds from a corpus seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Sampler {
 public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    cplx gaussian() { return {normal_(rng_), normal_(rng_)}; }

    Matrix ginibre(int rows, int cols) {
        Matrix m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(i, j) = gaussian();
        return m;
    }

    Element element(const Algebra &alg) {
        std::vector<Matrix> blocks;
        for (int n : alg.block_dims()) blocks.push_back(ginibre(n, n));
        return Element(alg, std::move(blocks));
    }

    ModuleElement module_element(const HilbertModule &module) {
        std::vector<Element> comps;
        for (int i = 0; i < module.rank(); ++i) comps.push_back(element(module.algebra()));
        return ModuleElement(module, std::move(comps));
    }

    /// Block-diagonal orthogonal projection with random ranks, never the identity.
    Element proper_projection(const Algebra &alg) {
        std::vector<int> ranks;
        bool full = true;
        for (int n : alg.block_dims()) {
            ranks.push_back(uniform_int(0, n));
            full = full && ranks.back() == n;
        }
        if (full) {
            const int k = uniform_int(0, alg.num_blocks() - 1);
            ranks[static_cast<std::size_t>(k)] = uniform_int(0, alg.block_dim(k) - 1);
        }
        std::vector<Matrix> blocks;
        for (int k = 0; k < alg.num_blocks(); ++k) {
            const int n = alg.block_dim(k);
            const int r = ranks[static_cast<std::size_t>(k)];
            if (r == 0) {
                blocks.push_back(Matrix::Zero(n, n));
                continue;
            }
            const Matrix q = linalg::range_basis(ginibre(n, r));
            blocks.push_back(q * q.adjoint());
        }
        return Element(alg, std::move(blocks));
    }

    /// Random state: each block gets a Wishart density of random rank (possibly 0), scaled to mass 1.
    State state(const Algebra &alg) {
        for (;;) {
            std::vector<Matrix> blocks;
            double mass = 0.0;
            for (int n : alg.block_dims()) {
                const int r = uniform_int(0, n);
                const Matrix g = ginibre(n, r);
                blocks.push_back(r == 0 ? Matrix(Matrix::Zero(n, n)) : Matrix(g * g.adjoint()));
                mass += blocks.back().trace().real();
            }
            if (mass <= 0.0) continue;
            for (auto &b : blocks) b /= mass;
            return State(alg, std::move(blocks));
        }
    }

    std::mt19937_64 &engine() { return rng_; }

 private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_;
};

namespace detail {

/// Generators g q with q a proper projection; at most `count` of them, dropping any that would fill E.
inline std::vector<ModuleElement> proper_generators(Sampler &s, const HilbertModule &module, int count,
                                                    const Subspace *inside = nullptr) {
    std::vector<ModuleElement> gens;
    for (int c = 0; c < count; ++c) {
        ModuleElement g = s.module_element(module) * s.proper_projection(module.algebra());
        if (inside) g = ModuleElement::from_coords(module, inside->project(g.coords()));
        std::vector<ModuleElement> trial = gens;
        trial.push_back(g);
        if (submodule_from_generators(module, trial).dim() < module.ambient_dim()) gens = std::move(trial);
    }
    if (gens.empty()) gens.push_back(ModuleElement::zero(module));
    return gens;
}

}  // namespace detail

/// Deterministic for a fixed (seed, profile).
///   L: proper random submodule; x0 outside L.
///   H = C + H', K = C + K' with H', K' inside C^perp and K' orthogonal to H',
///   which makes every intersection hypothesis hold by construction.
///   decomposition: min_parts..max_parts random states with random weights.
///   sigma: geometric weights over sigma_terms random states.
inline InstanceSpec generate_instance(std::uint64_t seed, const Profile &profile);

inline InstanceSpec c2_example_instance(std::uint64_t seed = 0) {
    InstanceSpec in;
    in.seed = seed;
    in.profile = c2_profile;
    in.algebra = Algebra({1, 1});
    in.module_rank = 1;
    const HilbertModule e = in.module();
    const ModuleElement p1 = ModuleElement::single(e, 0, Element::unit(in.algebra, 0, 0, 0));
    const ModuleElement p2 = ModuleElement::single(e, 0, Element::unit(in.algebra, 1, 0, 0));
    in.subspaces["L"] = {"span", {p1 + p2}};
    in.subspaces["H"] = {"submodule", {p1}};
    in.subspaces["K"] = {"submodule", {p2}};
    const State w1(in.algebra, {Matrix::Ones(1, 1), Matrix::Zero(1, 1)});
    const State w2(in.algebra, {Matrix::Zero(1, 1), Matrix::Ones(1, 1)});
    in.decomposition.weights = {0.5, 0.5};
    in.decomposition.parts = {w1, w2};
    in.x0 = p1 - p2;
    return in;
}

inline InstanceSpec generate_instance(std::uint64_t seed, const Profile &profile) {
    profile.validate();
    if (profile.name == c2_profile) return c2_example_instance(seed);
    Sampler s(seed);
    InstanceSpec in;
    in.seed = seed;
    in.profile = profile.name;
    const int blocks = s.uniform_int(1, profile.max_blocks);
    std::vector<int> dims;
    for (int k = 0; k < blocks; ++k) dims.push_back(s.uniform_int(1, profile.max_block_dim));
    in.algebra = Algebra(dims);
    in.module_rank = s.uniform_int(1, profile.max_rank);
    const HilbertModule e = in.module();

    in.subspaces["L"] = {"submodule", detail::proper_generators(s, e, s.uniform_int(1, 2))};

    const Submodule core = submodule_from_generators(e, detail::proper_generators(s, e, 1));
    const Subspace core_perp = orthogonal_complement(core).span();
    std::vector<ModuleElement> h_extra = detail::proper_generators(s, e, 1, &core_perp);
    Submodule h_sum = submodule_from_generators(e, [&] {
        auto g = core.generators();
        g.insert(g.end(), h_extra.begin(), h_extra.end());
        return g;
    }());
    const Subspace h_perp = orthogonal_complement(h_sum).span();
    std::vector<ModuleElement> k_extra = detail::proper_generators(s, e, 1, &h_perp);
    auto h_gens = core.generators();
    h_gens.insert(h_gens.end(), h_extra.begin(), h_extra.end());
    auto k_gens = core.generators();
    k_gens.insert(k_gens.end(), k_extra.begin(), k_extra.end());
    in.subspaces["H"] = {"submodule", h_gens};
    in.subspaces["K"] = {"submodule", k_gens};

    const int parts = s.uniform_int(profile.min_parts, profile.max_parts);
    double total = 0.0;
    for (int j = 0; j < parts; ++j) {
        in.decomposition.weights.push_back(s.uniform(0.1, 1.0));
        total += in.decomposition.weights.back();
        in.decomposition.parts.push_back(s.state(in.algebra));
    }
    for (double &w : in.decomposition.weights) w /= total;

    SigmaSpec sigma;
    sigma.ratio = s.uniform(0.3, 0.7);
    for (int j = 0; j < profile.sigma_terms; ++j) sigma.parts.push_back(s.state(in.algebra));
    in.sigma = std::move(sigma);

    const Subspace l_span = in.subspace("L").span();
    for (;;) {
        ModuleElement x = s.module_element(e);
        if (l_span.distance(x.coords()) > 1e-3 * x.coords().norm()) {
            in.x0 = std::move(x);
            break;
        }
    }
    return in;
}

/// Generic H = C + H', K = C + K' with H', K' independent inside C^perp.
/// The per-part intersection hypothesis may fail here; such instances are reported, not counted.
inline std::pair<std::vector<ModuleElement>, std::vector<ModuleElement>> generic_intersection_pair(std::uint64_t seed,
                                                                                                 const InstanceSpec &in) {
    Sampler s(mix_seed(seed, 0x1e5));
    const HilbertModule e = in.module();
    const Submodule core = submodule_from_generators(e, detail::proper_generators(s, e, 1));
    const Subspace core_perp = orthogonal_complement(core).span();
    auto h = core.generators();
    auto k = core.generators();
    for (auto &g : detail::proper_generators(s, e, 1, &core_perp)) h.push_back(g);
    for (auto &g : detail::proper_generators(s, e, 1, &core_perp)) k.push_back(g);
    return {h, k};
}

}  // namespace cstarloc::harness
