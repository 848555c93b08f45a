#pragma once

// JSON formats. Complex numbers are [re, im]; a matrix is a list of rows;
// an algebra element is a list of blocks; a module element a list of components.
//
//   instance  {"schema": "cstarloc.instance/1", seed, profile, algebra: {block_dims},
//              module_rank, subspaces: {name: {kind, generators}}, decomposition: {weights, parts},
//              sigma?: {rule: {name: "geometric", ratio}, parts}, x0?}
//   witness   {"schema": "cstarloc.witness/1", kind, distance, seed?, state: {density, mass}, x0, certified}
//   profile   {"name", "max_block_dim", "max_blocks", "max_rank", "min_parts", "max_parts", "sigma_terms"}

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cstarloc/harness/instance.hpp"
#include "cstarloc/separation.hpp"

namespace cstarloc::harness {

using json = nlohmann::json;

inline const char *instance_schema = "cstarloc.instance/1";
inline const char *witness_schema = "cstarloc.witness/1";

namespace detail {
inline void expect(bool ok, const std::string &what) { require(ok, ErrorKind::input, what); }
}  // namespace detail

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json &j) {
    detail::expect(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(),
                   "complex number must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(const Matrix &m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const json &j, int n) {
    detail::expect(j.is_array() && static_cast<int>(j.size()) == n, "block must have " + std::to_string(n) + " rows");
    Matrix m(n, n);
    for (int r = 0; r < n; ++r) {
        const json &row = j[static_cast<std::size_t>(r)];
        detail::expect(row.is_array() && static_cast<int>(row.size()) == n,
                       "block rows must have " + std::to_string(n) + " entries");
        for (int c = 0; c < n; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
    }
    return m;
}

inline json blocks_to_json(const std::vector<Matrix> &blocks) {
    json out = json::array();
    for (const auto &b : blocks) out.push_back(to_json(b));
    return out;
}

inline std::vector<Matrix> blocks_from_json(const Algebra &alg, const json &j) {
    detail::expect(j.is_array() && static_cast<int>(j.size()) == alg.num_blocks(),
                   "expected " + std::to_string(alg.num_blocks()) + " blocks");
    std::vector<Matrix> out;
    for (int k = 0; k < alg.num_blocks(); ++k) out.push_back(matrix_from_json(j[static_cast<std::size_t>(k)], alg.block_dim(k)));
    return out;
}

inline json to_json(const Element &a) { return blocks_to_json(a.blocks()); }

inline Element element_from_json(const Algebra &alg, const json &j) { return Element(alg, blocks_from_json(alg, j)); }

inline json to_json(const ModuleElement &x) {
    json out = json::array();
    for (const auto &c : x.components()) out.push_back(to_json(c));
    return out;
}

inline ModuleElement module_element_from_json(const HilbertModule &module, const json &j) {
    detail::expect(j.is_array() && static_cast<int>(j.size()) == module.rank(),
                   "module element needs " + std::to_string(module.rank()) + " components");
    std::vector<Element> comps;
    for (const auto &c : j) comps.push_back(element_from_json(module.algebra(), c));
    return ModuleElement(module, std::move(comps));
}

inline json to_json(const PositiveFunctional &omega) {
    return json{{"density", blocks_to_json(omega.density())}, {"mass", omega.mass()}};
}

inline PositiveFunctional functional_from_json(const Algebra &alg, const json &j) {
    detail::expect(j.is_object() && j.contains("density"), "functional needs a density");
    return PositiveFunctional(alg, blocks_from_json(alg, j.at("density")));
}

inline json to_json(const InstanceSpec &in) {
    json j;
    j["schema"] = instance_schema;
    j["seed"] = in.seed;
    j["profile"] = in.profile;
    j["algebra"] = {{"block_dims", in.algebra.block_dims()}};
    j["module_rank"] = in.module_rank;
    json subs = json::object();
    for (const auto &[name, s] : in.subspaces) {
        json gens = json::array();
        for (const auto &g : s.generators) gens.push_back(to_json(g));
        subs[name] = {{"kind", s.kind}, {"generators", gens}};
    }
    j["subspaces"] = subs;
    json parts = json::array();
    for (const auto &p : in.decomposition.parts) parts.push_back(to_json(p));
    j["decomposition"] = {{"weights", in.decomposition.weights}, {"parts", parts}};
    if (in.sigma) {
        json sp = json::array();
        for (const auto &p : in.sigma->parts) sp.push_back(to_json(p));
        j["sigma"] = {{"rule", {{"name", "geometric"}, {"ratio", in.sigma->ratio}}}, {"parts", sp}};
    }
    if (in.x0) j["x0"] = to_json(*in.x0);
    return j;
}

inline InstanceSpec instance_from_json(const json &j) {
    try {
        detail::expect(j.is_object(), "instance must be a JSON object");
        detail::expect(j.value("schema", "") == instance_schema, std::string("schema must be ") + instance_schema);
        InstanceSpec in;
        in.seed = j.value("seed", std::uint64_t{0});
        in.profile = j.value("profile", "");
        in.algebra = Algebra(j.at("algebra").at("block_dims").get<std::vector<int>>());
        in.module_rank = j.at("module_rank").get<int>();
        const HilbertModule e = in.module();
        if (j.contains("subspaces")) {
            for (const auto &[name, s] : j.at("subspaces").items()) {
                SubspaceSpec spec;
                spec.kind = s.value("kind", "submodule");
                detail::expect(spec.kind == "submodule" || spec.kind == "span", "subspace kind must be submodule or span");
                for (const auto &g : s.at("generators")) spec.generators.push_back(module_element_from_json(e, g));
                detail::expect(!spec.generators.empty(), "subspace '" + name + "' has no generators");
                in.subspaces[name] = std::move(spec);
            }
        }
        if (j.contains("decomposition")) {
            const json &d = j.at("decomposition");
            in.decomposition.weights = d.at("weights").get<std::vector<double>>();
            for (const auto &p : d.at("parts")) in.decomposition.parts.push_back(functional_from_json(in.algebra, p));
            cstarloc::detail::validate_decomposition(in.decomposition);
        }
        if (j.contains("sigma")) {
            const json &s = j.at("sigma");
            detail::expect(s.at("rule").value("name", "") == "geometric", "only the geometric sigma rule is supported");
            SigmaSpec sigma;
            sigma.ratio = s.at("rule").at("ratio").get<double>();
            for (const auto &p : s.at("parts")) sigma.parts.push_back(functional_from_json(in.algebra, p));
            in.sigma = std::move(sigma);
        }
        if (j.contains("x0")) in.x0 = module_element_from_json(e, j.at("x0"));
        return in;
    } catch (const json::exception &ex) {
        fail(ErrorKind::input, std::string("malformed instance: ") + ex.what());
    }
}

inline json read_json_file(const std::string &path) {
    std::ifstream f(path);
    require(f.good(), ErrorKind::input, "cannot open " + path);
    try {
        return json::parse(f);
    } catch (const json::exception &ex) {
        fail(ErrorKind::input, path + ": " + ex.what());
    }
}

inline void write_json_file(const std::string &path, const json &j) {
    std::ofstream f(path);
    require(f.good(), ErrorKind::input, "cannot write " + path);
    f << j.dump(2) << '\n';
}

inline InstanceSpec load_instance(const std::string &path) { return instance_from_json(read_json_file(path)); }

/// A built-in profile name, or a path to a JSON profile file.
inline Profile load_profile(const std::string &name_or_path) {
    if (name_or_path.size() < 5 || name_or_path.substr(name_or_path.size() - 5) != ".json")
        return builtin_profile(name_or_path);
    const json j = read_json_file(name_or_path);
    Profile p;
    try {
        p.name = j.value("name", name_or_path);
        p.max_block_dim = j.value("max_block_dim", p.max_block_dim);
        p.max_blocks = j.value("max_blocks", p.max_blocks);
        p.max_rank = j.value("max_rank", p.max_rank);
        p.min_parts = j.value("min_parts", p.min_parts);
        p.max_parts = j.value("max_parts", p.max_parts);
        p.sigma_terms = j.value("sigma_terms", p.sigma_terms);
    } catch (const json::exception &ex) {
        fail(ErrorKind::input, name_or_path + ": " + ex.what());
    }
    p.validate();
    return p;
}

/// FNV-1a 64 of the compact instance serialisation, as 16 hex digits.
inline std::string digest(const InstanceSpec &in) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : to_json(in).dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

inline json to_json(const SeparationWitness &w, bool certified) {
    json j;
    j["schema"] = witness_schema;
    j["kind"] = to_string(w.kind);
    j["distance"] = w.distance;
    if (w.seed) j["seed"] = *w.seed;
    j["state"] = to_json(w.state);
    j["x0"] = to_json(w.x0);
    j["certified"] = certified;
    return j;
}

}  // namespace cstarloc::harness
