// cstarloc: verification suites, the two-point fixture, instance generation,
// separation witnesses and the GNS tensor check from the command line.
//
// Exit codes: 0 pass, 1 a check failed, 2 inconclusive only, 3 input error.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cstarloc/cstarloc.hpp"
#include "cstarloc/harness/golden.hpp"
#include "cstarloc/harness/json_io.hpp"
#include "cstarloc/harness/suites.hpp"

namespace {

using namespace cstarloc;
using namespace cstarloc::harness;

constexpr int exit_input = 3;

void emit(const json &j, const std::string &out) {
    if (out.empty() || out == "-")
        std::cout << j.dump(2) << '\n';
    else
        write_json_file(out, j);
}

int cmd_verify(const std::string &suite, std::uint64_t seed, int count, const std::string &profile_name,
               const std::string &out, bool timings, int budget) {
    const Profile profile = load_profile(profile_name);
    SuiteOptions opt;
    opt.search_budget = budget;
    CheckReport report = run_suite(suite, generate_corpus(seed, count, profile), opt);
    report.seed = seed;
    report.profile = profile.name;
    if (!out.empty()) write_json_file(out, to_json(report, timings));
    for (const auto &c : report.checks) {
        std::cout << (c.failures ? "FAIL " : c.inconclusive ? "INC  " : "ok   ") << c.name << "  n=" << c.instances
                  << " max_residual=" << c.max_residual << " tol=" << c.tolerance;
        if (c.inconclusive) std::cout << " inconclusive=" << c.inconclusive;
        if (c.hypothesis_failures) std::cout << " hypothesis_failures=" << c.hypothesis_failures;
        std::cout << '\n';
    }
    std::cout << "verdict: " << to_string(report.verdict()) << " (" << report.records.size() << " checks, "
              << report.instances << " instances)\n";
    return report.exit_code();
}

int cmd_example(const std::string &name, const std::string &out) {
    require(name == "c2", ErrorKind::input, "unknown example '" + name + "' (available: c2)");
    const C2Example c = run_c2_example();
    emit(to_json(c), out);
    return c.golden() ? 0 : 1;
}

int cmd_generate(std::uint64_t seed, const std::string &profile_name, const std::string &out) {
    emit(to_json(generate_instance(seed, load_profile(profile_name))), out);
    return 0;
}

int cmd_separate(const std::string &path, const std::string &out, int budget, const std::string &subspace,
                 const std::string &method) {
    const InstanceSpec in = load_instance(path);
    require(in.x0.has_value(), ErrorKind::input, "instance has no x0");
    const HilbertModule e = in.module();
    const ModuleSubspace l = in.subspace(subspace);
    const ModuleElement &x0 = *in.x0;

    json extra = json::object();
    SeparationWitness w;
    if (method == "faithful") {
        w = separating_state_faithful(e, l, x0);
    } else if (method == "hahn-banach") {
        const HahnBanachResult hb = hahn_banach_witness(e, l, x0);
        w = hb.witness;
        extra["candidate_certified"] = hb.candidate_certified;
        extra["candidate_distance"] = hb.candidate_distance;
        extra["pairs"] = hb.certificate.pairs.size();
        extra["identity_value"] = to_json(hb.certificate.evaluate(x0));
    } else if (method == "vector") {
        VectorSearchOptions opt;
        opt.budget = budget;
        opt.seed = mix_seed(in.seed, 0x7e);
        const VectorSearchResult r = find_separating_vector_state(e, l, x0, opt);
        extra["evaluations"] = r.evaluations;
        extra["best_distance"] = r.best_distance;
        if (r.witness) {
            w = *r.witness;
        } else {
            std::cerr << "vector-state search inconclusive after " << r.evaluations
                      << " evaluations; using the faithful state\n";
            w = separating_state_faithful(e, l, x0);
            extra["vector_search"] = "inconclusive";
        }
    } else {
        fail(ErrorKind::input, "unknown method '" + method + "'");
    }
    json j = to_json(w, verify_witness(w, l));
    j["method"] = method;
    j["details"] = extra;
    emit(j, out);
    return j["certified"].get<bool>() ? (extra.contains("vector_search") ? 2 : 0) : 1;
}

int cmd_gns(const std::string &path, const std::string &out) {
    const InstanceSpec in = load_instance(path);
    const TensorLocalization t = gns_tensor_localization(in.module(), in.state());
    const bool ok = t.tensor_dim == t.localized_dim && t.inner_product_residual <= 1e-8 &&
                    t.unitarity_residual <= 1e-8 && t.intertwining_residual <= 1e-8 && t.balancing_residual <= 1e-8;
    emit(json{{"tensor_dim", t.tensor_dim},
              {"localized_dim", t.localized_dim},
              {"inner_product_residual", t.inner_product_residual},
              {"unitarity_residual", t.unitarity_residual},
              {"intertwining_residual", t.intertwining_residual},
              {"balancing_residual", t.balancing_residual},
              {"unitary", to_json(t.unitary)},
              {"verdict", ok ? "pass" : "fail"}},
         out);
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Localization of Hilbert modules over finite-dimensional C*-algebras"};
    app.require_subcommand(1);

    std::string suite = "all", profile = "small", out, instance, example_name, subspace = "L", method = "vector";
    std::uint64_t seed = 42;
    int count = 200;
    int budget = 200;
    bool timings = false;

    auto *verify = app.add_subcommand("verify", "run a property suite over a seeded random corpus");
    verify->add_option("--suite", suite, "axioms, localization, closure, intersection, mesland, gns-tensor, "
                                         "separation, vector-states or all")
        ->capture_default_str();
    verify->add_option("--seed", seed, "corpus seed")->capture_default_str();
    verify->add_option("--count", count, "number of instances")->capture_default_str()->check(CLI::NonNegativeNumber);
    verify->add_option("--profile", profile, "tiny, small, desk, c2-example, or a JSON profile file")
        ->capture_default_str();
    verify->add_option("--out", out, "write the JSON report here");
    verify->add_option("--budget", budget, "vector-state search evaluations per instance")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    verify->add_flag("--timings", timings, "include runtimes in the report (breaks byte-identical reruns)");

    auto *example = app.add_subcommand("example", "run a built-in fixture");
    example->add_option("name", example_name, "fixture name (c2)")->required();
    example->add_option("--out", out, "write the JSON result here");

    auto *generate = app.add_subcommand("generate", "write a random instance");
    generate->add_option("--seed", seed, "instance seed")->capture_default_str();
    generate->add_option("--profile", profile, "size profile")->capture_default_str();
    generate->add_option("--out", out, "output file (stdout if omitted)");

    auto *separate = app.add_subcommand("separate", "find and certify a separating state");
    separate->add_option("--instance", instance, "instance JSON")->required();
    separate->add_option("--out", out, "witness JSON (stdout if omitted)");
    separate->add_option("--budget", budget, "vector-state search evaluations")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    separate->add_option("--subspace", subspace, "which instance subspace to separate from")->capture_default_str();
    separate->add_option("--method", method, "vector, faithful or hahn-banach")->capture_default_str();

    auto *gns_cmd = app.add_subcommand("gns", "build E (x) H_pi and its unitary onto the localization");
    gns_cmd->add_option("--instance", instance, "instance JSON")->required();
    gns_cmd->add_option("--out", out, "result JSON (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_input;
    }

    try {
        if (*verify) return cmd_verify(suite, seed, count, profile, out, timings, budget);
        if (*example) return cmd_example(example_name, out);
        if (*generate) return cmd_generate(seed, profile, out);
        if (*separate) return cmd_separate(instance, out, budget, subspace, method);
        if (*gns_cmd) return cmd_gns(instance, out);
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
