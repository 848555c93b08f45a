#pragma once

// Property suites over a corpus of instances, and the report they produce.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "cstarloc/harness/instance.hpp"
#include "cstarloc/harness/json_io.hpp"
#include "cstarloc/localization.hpp"
#include "cstarloc/separation.hpp"

namespace cstarloc::harness {

enum class Verdict { pass, fail, inconclusive, hypothesis_failure };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
        case Verdict::hypothesis_failure: return "hypothesis-failure";
    }
    return "unknown";
}

struct CheckRecord {
    std::string name;
    std::string digest;
    Verdict verdict = Verdict::pass;
    double residual = 0.0;
    double tolerance = 0.0;
    double tail_bound = 0.0;
};

struct CheckSummary {
    std::string name;
    std::string anchor;
    double tolerance = 0.0;
    int instances = 0;
    int passed = 0;
    int failures = 0;
    int inconclusive = 0;
    int hypothesis_failures = 0;
    double max_residual = 0.0;  // over records that were not hypothesis failures
    double max_tail_bound = 0.0;
    std::map<std::string, double> stats;
    double runtime_seconds = 0.0;
};

struct CheckReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::string profile;
    int instances = 0;
    std::vector<CheckSummary> checks;
    std::vector<CheckRecord> records;
    std::map<std::string, double> suite_seconds;
    double runtime_seconds = 0.0;

    int failures() const { return count(&CheckSummary::failures); }
    int inconclusive() const { return count(&CheckSummary::inconclusive); }
    int hypothesis_failures() const { return count(&CheckSummary::hypothesis_failures); }

    Verdict verdict() const {
        if (failures() > 0) return Verdict::fail;
        if (inconclusive() > 0) return Verdict::inconclusive;
        return Verdict::pass;
    }

    /// 0 all pass, 1 any failure, 2 inconclusive only.
    int exit_code() const {
        switch (verdict()) {
            case Verdict::fail: return 1;
            case Verdict::inconclusive: return 2;
            default: return 0;
        }
    }

    const CheckSummary *find(const std::string &name) const {
        for (const auto &c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }

 private:
    int count(int CheckSummary::*field) const {
        int n = 0;
        for (const auto &c : checks) n += c.*field;
        return n;
    }
};

/// Collects records and keeps per-check summaries in first-seen order.
class Recorder {
 public:
    explicit Recorder(CheckReport &report) : report_(report) {}

    void add(const std::string &name, const std::string &anchor, const std::string &digest, Verdict v, double residual,
             double tolerance, double tail_bound = 0.0) {
        CheckSummary &s = summary(name, anchor, tolerance);
        ++s.instances;
        switch (v) {
            case Verdict::pass: ++s.passed; break;
            case Verdict::fail: ++s.failures; break;
            case Verdict::inconclusive: ++s.inconclusive; break;
            case Verdict::hypothesis_failure: ++s.hypothesis_failures; break;
        }
        if (v != Verdict::hypothesis_failure) s.max_residual = std::max(s.max_residual, residual);
        s.max_tail_bound = std::max(s.max_tail_bound, tail_bound);
        report_.records.push_back({name, digest, v, residual, tolerance, tail_bound});
    }

    /// Pass iff residual <= tolerance (NaN fails).
    void bound(const std::string &name, const std::string &anchor, const std::string &digest, double residual,
               double tolerance, double tail_bound = 0.0) {
        add(name, anchor, digest, residual <= tolerance ? Verdict::pass : Verdict::fail, residual, tolerance, tail_bound);
    }

    void stat(const std::string &name, const std::string &key, double increment) {
        for (auto &c : report_.checks)
            if (c.name == name) c.stats[key] += increment;
    }

    /// Attributes elapsed time to a suite and to every check it recorded.
    void time(const std::string &suite, std::size_t first_record, double seconds) {
        report_.suite_seconds[suite] += seconds;
        std::map<std::string, int> seen;
        for (std::size_t i = first_record; i < report_.records.size(); ++i) ++seen[report_.records[i].name];
        const double share = seen.empty() ? 0.0 : seconds / static_cast<double>(seen.size());
        for (auto &c : report_.checks)
            if (seen.count(c.name)) c.runtime_seconds += share;
    }

 private:
    CheckSummary &summary(const std::string &name, const std::string &anchor, double tolerance) {
        for (auto &c : report_.checks)
            if (c.name == name) return c;
        CheckSummary s;
        s.name = name;
        s.anchor = anchor;
        s.tolerance = tolerance;
        report_.checks.push_back(std::move(s));
        return report_.checks.back();
    }

    CheckReport &report_;
};

inline const std::vector<std::string> &suite_names() {
    static const std::vector<std::string> names{"axioms",     "localization", "closure",    "intersection",
                                                "mesland",    "gns-tensor",   "separation", "vector-states"};
    return names;
}

struct SuiteOptions {
    int search_budget = 200;   // vector-state search evaluations per instance
    int mesland_states = 20;   // states per submodule in the complement check
    int convexity_points = 4;  // at most this many points z_i
};

namespace checks {

using Clock = std::chrono::steady_clock;
constexpr double inf = std::numeric_limits<double>::infinity();

inline void axioms(const InstanceSpec &in, const std::string &dg, Recorder &rec, const SuiteOptions &opt) {
    const HilbertModule e = in.module();
    const State omega = in.state();
    const LocalizedSpace loc = localize(e, in.decomposition);

    // (iota x, iota y) against omega<x, y> evaluated directly on the ambient basis.
    const auto basis_e = module_basis(e);
    std::vector<Vector> images;
    for (const auto &x : basis_e) images.push_back(loc.iota(x));
    double polar = 0.0;
    for (std::size_t a = 0; a < basis_e.size(); ++a)
        for (std::size_t b = 0; b < basis_e.size(); ++b)
            polar = std::max(polar, std::abs(images[a].dot(images[b]) - omega(module_inner(basis_e[a], basis_e[b]))));
    rec.bound("polarization", "quotient inner product", dg, polar, 1e-9);

    Subspace meet = Subspace::whole(e.ambient_dim());
    for (const auto &p : in.decomposition.parts) meet = meet.intersect(null_space(e, p));
    rec.bound("null-space-intersection", "null space of a convex combination", dg,
              loc.null_space().projector_distance(meet), tol::subspace_frobenius);

    Sampler s(mix_seed(in.seed, 0xc0));
    std::vector<ModuleElement> family;
    for (int i = 0; i < 3; ++i) family.push_back(s.module_element(e));
    const int npts = s.uniform_int(1, opt.convexity_points);
    std::vector<ModuleElement> z;
    std::vector<double> w;
    double total = 0.0;
    for (int i = 0; i < npts; ++i) {
        z.push_back(s.module_element(e));
        w.push_back(s.uniform(0.05, 1.0));
        total += w.back();
    }
    for (double &x : w) x /= total;
    const ModuleElement x0 = s.module_element(e);
    const ConvexityResult cvx = semi_inner_convexity_check(family, z, x0, w, 1e-9);
    rec.add("semi-inner-convexity", "convexity of module semi-inner products", dg,
            cvx.holds ? Verdict::pass : Verdict::fail, std::max(0.0, -cvx.min_margin), 1e-9);

    if (const auto sigma = in.sigma_decomposition(); sigma && sigma->size() > 2) {
        // Truncating two terms earlier must stay within the earlier bound.
        ConvexDecomposition shorter = *sigma;
        shorter.weights.resize(sigma->size() - 2);
        shorter.parts.resize(sigma->size() - 2);
        shorter.tail_bound = WeightRule::geometric(in.sigma->ratio).tail_after(shorter.size()).value();
        std::vector<Element> tuple;
        for (std::size_t j = 0; j < sigma->size(); ++j) {
            Element a = s.element(e.algebra());
            tuple.push_back((1.0 / std::max(1.0, operator_norm(a))) * a);
        }
        const BoundedValue full = linf_sum_evaluate(*sigma, tuple, 1.0);
        const BoundedValue cut = linf_sum_evaluate(shorter, tuple, 1.0);
        const double excess = std::abs(full.value - cut.value) - cut.error_bound;
        rec.bound("linf-sum-bound", "bounded functional on the l-infinity sum", dg, std::max(0.0, excess), 1e-12,
                  cut.error_bound);
    }
}

inline void localization(const InstanceSpec &in, const std::string &dg, Recorder &rec, const SuiteOptions &) {
    const HilbertModule e = in.module();
    const LocalizedSpace loc = localize(e, in.decomposition);
    const DirectSumEmbedding psi = direct_sum_embedding(loc);

    double excess = 0.0, well = 0.0, inter = 0.0;
    int parts_dim = 0;
    for (const auto &m : psi.maps) {
        excess = std::max(excess, m.norm() - m.norm_bound());
        well = std::max(well, m.well_defined_residual);
        inter = std::max(inter, m.intertwining_residual);
        parts_dim += m.target.dim();
    }
    rec.bound("comparison-norm-bound", "comparison map norm bound", dg, std::max(0.0, excess), 1e-9);
    rec.bound("comparison-well-defined", "comparison map vanishes on the null space", dg, std::max(well, inter), 1e-9);
    rec.bound("direct-sum-isometry", "direct-sum embedding is an isometry", dg, psi.isometry_defect(),
              tol::subspace_frobenius);
    rec.add("monotone-dimension", "dimension bound from the embedding", dg,
            loc.dim() <= parts_dim ? Verdict::pass : Verdict::fail, std::max(0, loc.dim() - parts_dim), 0.0);

    for (const std::string name : {"L", "H", "K"}) {
        const Submodule l = in.submodule(name);
        const auto via_iota = localized_submodule(loc, l).dim();
        const auto intrinsic = intrinsic_localized_dim(loc.functional(), l);
        rec.add("localized-dim-two-ways", "localized submodule as a localized module", dg,
                via_iota == intrinsic ? Verdict::pass : Verdict::fail,
                static_cast<double>(std::abs(via_iota - intrinsic)), 0.0);
        const auto dims = via_iota + localized_complement(loc, l).dim();
        rec.add("complement-dims", "localized complement dimension count", dg,
                dims == loc.dim() ? Verdict::pass : Verdict::fail, static_cast<double>(std::abs(dims - loc.dim())), 0.0);
    }

    if (const auto sigma = in.sigma_decomposition()) {
        const LocalizedSpace sl = localize(e, *sigma);
        bool refused = false;
        try {
            (void)direct_sum_embedding(sl);
        } catch (const Error &) {
            refused = true;
        }
        const DirectSumEmbedding sp = direct_sum_embedding(sl, true);
        rec.bound("sigma-direct-sum-isometry", "truncated sigma-convex embedding", dg,
                  refused ? sp.isometry_defect() : inf, tol::subspace_frobenius, sp.tail_bound);
    }
}

inline void closure(const InstanceSpec &in, const std::string &dg, Recorder &rec, const SuiteOptions &) {
    const HilbertModule e = in.module();
    const ModuleSubspace l = in.subspace("L");
    const ClosureResult r = closure_characterization_check(localize(e, in.decomposition), l);
    rec.bound("closure-characterization", "closure as preimage of the joint image", dg, r.residual, r.tolerance);
    if (r.componentwise_dim > r.closure_dim) {
        rec.stat("closure-characterization", "componentwise_strictly_larger", 1);
        rec.stat("closure-characterization", "total_dimension_gap",
                 static_cast<double>(r.componentwise_dim - r.closure_dim));
    }
    if (const auto sigma = in.sigma_decomposition()) {
        const ClosureResult rs = closure_characterization_check(localize(e, *sigma), l);
        rec.bound("closure-characterization-sigma", "closure for a truncated sigma-convex state", dg, rs.residual,
                  rs.tolerance, sigma->tail_bound);
    }
}

inline Verdict intersection_verdict(const IntersectionResult &r) {
    switch (r.status) {
        case IntersectionStatus::holds: return Verdict::pass;
        case IntersectionStatus::conclusion_failure: return Verdict::fail;
        default: return Verdict::hypothesis_failure;
    }
}

inline void intersection(const InstanceSpec &in, const std::string &dg, Recorder &rec, const SuiteOptions &) {
    const HilbertModule e = in.module();
    const Submodule h = in.submodule("H");
    const Submodule k = in.submodule("K");
    const IntersectionResult r = intersection_localization_check(h, k, in.decomposition);
    rec.add("intersection-localization", "localization of an intersection", dg, intersection_verdict(r), r.residual,
            r.tolerance);
    if (const auto sigma = in.sigma_decomposition()) {
        const IntersectionResult rs = intersection_localization_check(h, k, *sigma);
        rec.add("intersection-localization-sigma", "intersection for a truncated sigma-convex state", dg,
                intersection_verdict(rs), rs.residual, rs.tolerance, sigma->tail_bound);
    }
    if (in.profile != c2_profile) {
        const auto [hg, kg] = generic_intersection_pair(in.seed, in);
        const IntersectionResult rg = intersection_localization_check(submodule_from_generators(e, hg),
                                                                      submodule_from_generators(e, kg), in.decomposition);
        rec.add("intersection-localization-generic", "intersection with unconstrained submodules", dg,
                intersection_verdict(rg), rg.residual, rg.tolerance);
    }
}

inline void mesland(const InstanceSpec &in, const std::string &dg, Recorder &rec, const SuiteOptions &opt) {
    const HilbertModule e = in.module();
    const Submodule l = in.submodule("L");
    Sampler s(mix_seed(in.seed, 0x3e5));
    const bool complemented = is_orthogonally_complemented(l);
    rec.add("complemented", "submodules are complemented", dg, complemented ? Verdict::pass : Verdict::fail, 0.0, 0.0);
    double worst = 0.0;
    for (int i = 0; i < opt.mesland_states; ++i) {
        const State omega = i == 0 ? in.state() : s.state(e.algebra());
        worst = std::max(worst, mesland_check(e, l, omega).residual);
    }
    rec.bound("mesland", "localized complement equals localized orthogonal complement", dg, worst,
              tol::subspace_frobenius);
    rec.stat("mesland", "states_checked", opt.mesland_states);
}

inline void gns_tensor(const InstanceSpec &in, const std::string &dg, Recorder &rec, const SuiteOptions &) {
    const TensorLocalization t = gns_tensor_localization(in.module(), in.state());
    rec.add("gns-tensor-dim", "tensor product with the GNS space", dg,
            t.tensor_dim == t.localized_dim ? Verdict::pass : Verdict::fail,
            static_cast<double>(std::abs(t.tensor_dim - t.localized_dim)), 0.0);
    rec.bound("gns-tensor-inner-products", "tensor inner products on a spanning set", dg, t.inner_product_residual, 1e-8);
    rec.bound("gns-tensor-unitary", "unitary onto the localization", dg,
              std::max(t.unitarity_residual, t.intertwining_residual), 1e-8);
    rec.bound("gns-tensor-balancing", "balanced tensor relation", dg, t.balancing_residual, 1e-8);
}

inline std::vector<ModuleElement> sample_subspace(Sampler &s, const ModuleSubspace &l, int count) {
    std::vector<ModuleElement> out;
    const Matrix &b = l.span().basis();
    for (int i = 0; i < count; ++i) {
        Vector c = Vector::Zero(b.rows());
        for (Eigen::Index j = 0; j < b.cols(); ++j) c += s.gaussian() * b.col(j);
        out.push_back(ModuleElement::from_coords(l.module(), c));
    }
    return out;
}

inline void separation(const InstanceSpec &in, const std::string &dg, Recorder &rec, const SuiteOptions &) {
    if (!in.x0) return;
    const HilbertModule e = in.module();
    const ModuleSubspace l = in.subspace("L");
    const ModuleElement &x0 = *in.x0;

    const SeparationWitness fw = separating_state_faithful(e, l, x0);
    rec.add("separation-faithful", "faithful state separates", dg,
            fw.distance > 1e-6 && verify_witness(fw, l) ? Verdict::pass : Verdict::fail, fw.distance, 1e-6);

    const HahnBanachResult hb = hahn_banach_witness(e, l, x0);
    Sampler s(mix_seed(in.seed, 0x4b));
    double identity = std::abs(hb.certificate.evaluate(x0) - 1.0);
    for (const auto &p : sample_subspace(s, l, 10)) identity = std::max(identity, std::abs(hb.certificate.evaluate(x0 - p) - 1.0));
    rec.bound("hahn-banach-identity", "functional equal to one on x0 minus L", dg, identity, 1e-8);
    rec.add("hahn-banach-path", "positive-part candidate state", dg,
            verify_witness(hb.witness, l) ? Verdict::pass : Verdict::fail, hb.witness.distance, 1e-7);
    rec.stat("hahn-banach-path", "candidate_certified", hb.candidate_certified ? 1 : 0);
}

inline void vector_states(const InstanceSpec &in, const std::string &dg, Recorder &rec, const SuiteOptions &opt) {
    const HilbertModule e = in.module();
    const State omega = in.state();
    const ConvexDecomposition d = decompose_into_vector_states(omega);
    const State back = convex_combine(d);
    double resid = std::abs(d.weight_sum() - 1.0);
    for (int k = 0; k < e.algebra().num_blocks(); ++k)
        resid = std::max(resid, (back.density(k) - omega.density(k)).cwiseAbs().maxCoeff());
    // each part must itself be a vector state: rank one, mass one
    for (const auto &p : d.parts) {
        resid = std::max(resid, std::abs(p.mass() - 1.0));
        double second = 0.0;
        for (const auto &b : p.density()) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(b, Eigen::EigenvaluesOnly);
            if (b.rows() > 1) second = std::max(second, es.eigenvalues()(b.rows() - 2));
        }
        int support = 0;
        for (const auto &b : p.density()) support += b.trace().real() > 1e-12 ? 1 : 0;
        resid = std::max({resid, second, support == 1 ? 0.0 : 1.0});
    }
    rec.bound("vector-state-decomposition", "state as a convex combination of vector states", dg, resid, 1e-9);

    if (!in.x0) return;
    const ModuleSubspace l = in.subspace("L");
    VectorSearchOptions vo;
    vo.budget = opt.search_budget;
    vo.seed = mix_seed(in.seed, 0x7e);
    const VectorSearchResult r = find_separating_vector_state(e, l, *in.x0, vo);
    if (r.witness) {
        rec.add("vector-state-search", "vector states separate", dg,
                verify_witness(*r.witness, l) ? Verdict::pass : Verdict::fail, r.witness->distance, 1e-7);
        rec.stat("vector-state-search", "kind_" + cstarloc::to_string(r.witness->kind), 1);
    } else {
        rec.add("vector-state-search", "vector states separate", dg, Verdict::inconclusive, r.best_distance, 1e-7);
    }
}

}  // namespace checks

using SuiteFn = void (*)(const InstanceSpec &, const std::string &, Recorder &, const SuiteOptions &);

inline SuiteFn suite_function(const std::string &name) {
    static const std::map<std::string, SuiteFn> table{
        {"axioms", checks::axioms},         {"localization", checks::localization},
        {"closure", checks::closure},       {"intersection", checks::intersection},
        {"mesland", checks::mesland},       {"gns-tensor", checks::gns_tensor},
        {"separation", checks::separation}, {"vector-states", checks::vector_states},
    };
    const auto it = table.find(name);
    require(it != table.end(), ErrorKind::invalid_argument, "unknown suite '" + name + "'");
    return it->second;
}

inline std::vector<InstanceSpec> generate_corpus(std::uint64_t seed, int count, const Profile &profile) {
    require(count >= 0, ErrorKind::invalid_argument, "count must be non-negative");
    std::vector<InstanceSpec> corpus;
    corpus.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) corpus.push_back(generate_instance(mix_seed(seed, static_cast<std::uint64_t>(i)), profile));
    return corpus;
}

/// Runs one suite (or "all") over the corpus. A check that throws is recorded as a failure.
inline CheckReport run_suite(const std::string &suite, const std::vector<InstanceSpec> &corpus,
                             const SuiteOptions &opt = {}) {
    std::vector<std::string> names;
    if (suite == "all") {
        names = suite_names();
    } else {
        suite_function(suite);
        names = {suite};
    }
    CheckReport report;
    report.suite = suite;
    report.instances = static_cast<int>(corpus.size());
    Recorder rec(report);
    const auto start = checks::Clock::now();
    for (const auto &name : names) {
        const SuiteFn fn = suite_function(name);
        for (const auto &in : corpus) {
            const std::string dg = digest(in);
            const auto t0 = checks::Clock::now();
            const std::size_t first = report.records.size();
            try {
                fn(in, dg, rec, opt);
            } catch (const std::exception &ex) {
                rec.add(name + "-exception", ex.what(), dg, Verdict::fail, checks::inf, 0.0);
            }
            rec.time(name, first, std::chrono::duration<double>(checks::Clock::now() - t0).count());
        }
    }
    report.runtime_seconds = std::chrono::duration<double>(checks::Clock::now() - start).count();
    return report;
}

/// Report JSON; runtimes only when asked, so equal seeds give byte-identical files.
inline json to_json(const CheckReport &r, bool timings = false) {
    json j;
    j["schema"] = "cstarloc.report/1";
    j["suite"] = r.suite;
    j["seed"] = r.seed;
    j["profile"] = r.profile;
    j["count"] = r.instances;
    json checks = json::array();
    for (const auto &c : r.checks) {
        json cj{{"name", c.name},
                {"anchor", c.anchor},
                {"instances", c.instances},
                {"passed", c.passed},
                {"failures", c.failures},
                {"inconclusive", c.inconclusive},
                {"hypothesis_failures", c.hypothesis_failures},
                {"max_residual", c.max_residual},
                {"tolerance", c.tolerance},
                {"max_tail_bound", c.max_tail_bound}};
        if (!c.stats.empty()) cj["stats"] = c.stats;
        if (timings) cj["runtime_seconds"] = c.runtime_seconds;
        checks.push_back(std::move(cj));
    }
    j["checks"] = checks;
    json records = json::array();
    for (const auto &rec : r.records)
        records.push_back({{"name", rec.name},
                           {"instance", rec.digest},
                           {"verdict", to_string(rec.verdict)},
                           {"residual", rec.residual},
                           {"tolerance", rec.tolerance},
                           {"tail_bound", rec.tail_bound}});
    j["records"] = records;
    j["summary"] = {{"instances", r.instances},
                    {"checks", r.records.size()},
                    {"failures", r.failures()},
                    {"inconclusive", r.inconclusive()},
                    {"hypothesis_failures", r.hypothesis_failures()}};
    j["verdict"] = to_string(r.verdict());
    if (timings) {
        j["runtime_seconds"] = r.runtime_seconds;
        j["suite_seconds"] = r.suite_seconds;
    }
    return j;
}

}  // namespace cstarloc::harness
