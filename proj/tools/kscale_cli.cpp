#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "kscale/anomalous.hpp"
#include "kscale/datagen.hpp"
#include "kscale/dataset.hpp"
#include "kscale/error.hpp"
#include "kscale/evaluate.hpp"
#include "kscale/experiment.hpp"
#include "kscale/json_io.hpp"
#include "kscale/mwk.hpp"
#include "kscale/partition.hpp"
#include "kscale/seed.hpp"
#include "kscale/validity.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace kscale;

namespace {

LabeledData load(const fs::path& path) { return read_labeled_csv(path, csv_has_header(path)); }

std::vector<CviIndex> parse_indexes(const std::string& list) {
    if (list == "all") return {std::begin(all_indexes), std::end(all_indexes)};
    std::vector<CviIndex> out;
    std::stringstream ss(list);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_index(item));
    return out;
}

int cmd_generate(const fs::path& spec_path, const fs::path& out) {
    const json j = read_json_file(spec_path);
    const ScenarioSpec base = scenario_from_json(j);
    const std::size_t replicates = j.value("replicates", std::size_t{1});
    if (replicates < 1) throw usage_error("replicates must be >= 1");
    fs::create_directories(out);
    for (std::size_t r = 0; r < replicates; ++r) {
        ScenarioSpec spec = base;
        spec.seed = derive_seed(base.seed, {r});
        const GeneratedData gen = generate(spec);
        const std::string stem = "replicate_" + std::to_string(r);
        write_csv(gen.raw, out / (stem + ".csv"), &gen.labels);
        json sidecar = scenario_to_json(spec);
        sidecar["replicate"] = r;
        sidecar["master_seed"] = base.seed;
        write_json_file(sidecar, out / (stem + ".json"));
    }
    return 0;
}

int cmd_cluster(const fs::path& in, const std::string& method, std::size_t k, double p, std::size_t restarts,
                std::uint64_t seed, const fs::path& out) {
    const DataMatrix data = ensure_standardized(load(in).data);
    Clustering result;
    if (method == "kmeans" || method == "kmedians") {
        if (method == "kmedians") p = 1.0;
        validate_exponent(p);
        result = kmeans_multistart(data, k, p, RestartPolicy{restarts, seed});
    } else if (method == "mwk") {
        MwkConfig cfg;
        cfg.minkowski.p = weighted_exponent(p);
        bool have = false;
        for (std::size_t r = 0; r < restarts; ++r) {
            Clustering c = mwk_means(data, k, random_initial_centroids(data, k, restart_seed(seed, r)), cfg);
            if (!have || c.criterion < result.criterion) result = std::move(c);
            have = true;
        }
        p = cfg.minkowski.p;
    } else if (method == "imwk") {
        MwkConfig cfg;
        cfg.minkowski.p = weighted_exponent(p);
        result = imwk_means(data, k, cfg);
        p = cfg.minkowski.p;
    } else {
        throw usage_error("unknown clustering method '" + method + "'");
    }
    write_json_file(clustering_to_json(result, p, method, seed), out);
    return 0;
}

int cmd_estimate(const fs::path& in, const std::string& method_name_arg, double p, const std::string& index_list,
                 std::size_t kmax, std::size_t restarts, std::uint64_t seed, const fs::path& out) {
    const DataMatrix data = ensure_standardized(load(in).data);
    const auto indexes = parse_indexes(index_list);
    EstimateOptions opt;
    opt.k_range = KRange{2, kmax};
    opt.restarts = restarts;
    opt.seed = seed;
    const MethodOutcome o = estimate_k(data, parse_method(method_name_arg), p, indexes, opt);

    json reports = json::object(), failures = json::object();
    for (const auto& [idx, outcome] : o.by_index) reports[std::string(index_name(idx))] = report_to_json(outcome.report);
    for (const auto& [idx, why] : o.failures) failures[std::string(index_name(idx))] = why;
    json j{{"method", method_name(o.method)},
           {"p", o.p},
           {"k_min", o.k_range.min},
           {"k_max", o.k_range.max},
           {"n_anomalous", o.n_anomalous},
           {"reports", reports},
           {"failures", failures}};
    write_json_file(j, out);
    if (o.by_index.empty()) throw numerical_error("no index produced a selection");
    return 0;
}

int cmd_evaluate(const fs::path& clustering_path, const fs::path& labels_path, const fs::path& out) {
    const Clustering c = clustering_from_json(read_json_file(clustering_path));
    const LabeledData labeled = load(labels_path);
    if (!labeled.labels) throw data_error(labels_path.string() + " has no label column");
    const auto& truth = *labeled.labels;
    if (truth.size() != c.assignments.size()) throw data_error("label count differs from clustering size");
    const std::size_t true_k = std::set<int>(truth.begin(), truth.end()).size();
    std::size_t used_k = std::set<std::size_t>(c.assignments.begin(), c.assignments.end()).size();
    json j{{"ari", adjusted_rand(truth, c.assignments)},
           {"k", c.k},
           {"nonempty_clusters", used_k},
           {"true_k", true_k},
           {"relative_error", relative_error(true_k, c.k)},
           {"hit", c.k == true_k}};
    write_json_file(j, out);
    return 0;
}

int cmd_experiment(const fs::path& config, const fs::path& out, bool quiet) {
    const ExperimentConfig cfg = experiment_config_from_json(read_json_file(config));
    const ExperimentResult result = run_experiment(cfg, [quiet](std::size_t done, std::size_t total) {
        if (!quiet) std::fprintf(stderr, "\r%zu/%zu datasets", done, total);
        if (!quiet && done == total) std::fputc('\n', stderr);
    });
    write_experiment(result, out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Feature-weighted Minkowski clustering and K estimation"};
    app.require_subcommand(1);

    fs::path spec, out, in, clustering, labels, config;
    std::string method, index = "sil_eucl";
    std::size_t k = 2, restarts = 100, kmax = 20;
    double p = 2.0;
    std::uint64_t seed = 0;
    bool quiet = false;

    auto* gen = app.add_subcommand("generate", "Draw synthetic replicates of a scenario");
    gen->add_option("--spec", spec, "scenario JSON")->required();
    gen->add_option("--out", out, "output directory")->required();

    auto* clu = app.add_subcommand("cluster", "Cluster a CSV at a fixed K");
    clu->add_option("--in", in, "data CSV")->required();
    clu->add_option("--method", method, "kmeans | kmedians | mwk | imwk")->required();
    clu->add_option("--k", k)->required();
    clu->add_option("--p", p, "Minkowski exponent");
    clu->add_option("--restarts", restarts);
    clu->add_option("--seed", seed);
    clu->add_option("--out", out, "clustering JSON")->required();

    auto* est = app.add_subcommand("estimate-k", "Select K with validity indexes");
    est->add_option("--in", in, "data CSV")->required();
    est->add_option("--method", method, "baseline_kmeans | imwk | imwk_rescaled | imwk_rescaled_kmeans")->required();
    est->add_option("--p", p, "Minkowski exponent");
    est->add_option("--index", index, "index name, comma list, or 'all'");
    est->add_option("--kmax", kmax);
    est->add_option("--restarts", restarts);
    est->add_option("--seed", seed);
    est->add_option("--out", out, "report JSON")->required();

    auto* ev = app.add_subcommand("evaluate", "Score a clustering against labels");
    ev->add_option("--clustering", clustering)->required();
    ev->add_option("--labels", labels, "CSV with a label column")->required();
    ev->add_option("--out", out, "metrics JSON")->required();

    auto* exp = app.add_subcommand("experiment", "Run a simulation study");
    exp->add_option("--config", config, "experiment JSON")->required();
    exp->add_option("--out", out, "output directory")->required();
    exp->add_flag("--quiet", quiet);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*gen) return cmd_generate(spec, out);
        if (*clu) return cmd_cluster(in, method, k, p, restarts, seed, out);
        if (*est) return cmd_estimate(in, method, p, index, kmax, restarts, seed, out);
        if (*ev) return cmd_evaluate(clustering, labels, out);
        if (*exp) return cmd_experiment(config, out, quiet);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 1;
}
