#include "kscale/json_io.hpp"

#include <cmath>
#include <fstream>

#include "kscale/error.hpp"

namespace kscale {

using nlohmann::json;

namespace {

json grid_to_json(const Grid& g) {
    json rows = json::array();
    for (std::size_t r = 0; r < g.rows(); ++r) rows.push_back(std::vector<double>(g.row(r).begin(), g.row(r).end()));
    return rows;
}

Grid grid_from_json(const json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw data_error(std::string(what) + " must be a non-empty matrix");
    const std::size_t cols = j.front().size();
    std::vector<double> values;
    for (const json& row : j) {
        if (!row.is_array() || row.size() != cols) throw data_error(std::string(what) + " rows differ in length");
        for (const json& x : row) values.push_back(x.get<double>());
    }
    return Grid(j.size(), cols, std::move(values));
}

template <class T>
T field(const json& j, const char* key, T fallback) {
    const auto it = j.find(key);
    return it == j.end() || it->is_null() ? fallback : it->get<T>();
}

CenterSolverConfig centers_from_json(const json& j) {
    CenterSolverConfig cfg;
    if (!j.is_object()) return cfg;
    cfg.abs_tolerance = field(j, "abs_tolerance", cfg.abs_tolerance);
    cfg.descent_step = field(j, "step", cfg.descent_step);
    cfg.max_iterations = field(j, "max_iterations", cfg.max_iterations);
    const std::string method = field<std::string>(j, "method", "bracketing");
    if (method == "bracketing") cfg.method = CenterMethod::bracketing;
    else if (method == "fixed_step") cfg.method = CenterMethod::fixed_step;
    else throw usage_error("unknown center solver '" + method + "'");
    return cfg;
}

}  // namespace

json clustering_to_json(const Clustering& c, double p, const std::string& method, std::uint64_t seed) {
    json j;
    j["assignments"] = c.assignments;
    j["centroids"] = grid_to_json(c.centroids);
    j["weights"] = c.weights ? grid_to_json(c.weights->grid()) : json(nullptr);
    j["criterion"] = c.criterion;
    j["k"] = c.k;
    j["p"] = p;
    j["method"] = method;
    j["seed"] = seed;
    j["iterations"] = c.iterations;
    return j;
}

Clustering clustering_from_json(const json& j) {
    try {
        Clustering c;
        c.assignments = j.at("assignments").get<std::vector<std::size_t>>();
        c.centroids = grid_from_json(j.at("centroids"), "centroids");
        if (j.contains("weights") && !j["weights"].is_null()) c.weights = WeightMatrix(grid_from_json(j["weights"], "weights"));
        c.criterion = field(j, "criterion", 0.0);
        c.k = field(j, "k", c.centroids.rows());
        c.iterations = field<std::size_t>(j, "iterations", 0);
        for (const std::size_t a : c.assignments)
            if (a >= c.k) throw data_error("assignment outside [0, k)");
        return c;
    } catch (const json::exception& e) {
        throw data_error(std::string("malformed clustering: ") + e.what());
    }
}

json scenario_to_json(const ScenarioSpec& s) {
    return json{{"name", s.name},
                {"id", s.id()},
                {"n_entities", s.n_entities},
                {"n_informative", s.n_informative},
                {"k_true", s.k_true},
                {"noise_fraction", s.noise_fraction},
                {"family", family_name(s.family)},
                {"cluster_proportions", s.proportions()},
                {"correlation", s.correlation},
                {"sigma2", s.sigma2},
                {"seed", s.seed}};
}

ScenarioSpec scenario_from_json(const json& j) {
    try {
        ScenarioSpec s;
        s.name = field<std::string>(j, "name", "");
        s.n_entities = field(j, "n_entities", s.n_entities);
        s.n_informative = field(j, "n_informative", s.n_informative);
        s.k_true = field(j, "k_true", s.k_true);
        s.noise_fraction = field(j, "noise_fraction", s.noise_fraction);
        s.family = parse_family(field<std::string>(j, "family", "gaussian"));
        s.cluster_proportions = field(j, "cluster_proportions", s.cluster_proportions);
        s.correlation = field(j, "correlation", s.correlation);
        s.sigma2 = field(j, "sigma2", s.sigma2);
        s.seed = field(j, "seed", s.seed);
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw usage_error(std::string("malformed scenario: ") + e.what());
    }
}

ExperimentConfig experiment_config_from_json(const json& j) {
    try {
        ExperimentConfig cfg;
        for (const json& s : j.at("scenarios")) cfg.scenarios.push_back(scenario_from_json(s));
        cfg.replicates = field(j, "replicates", cfg.replicates);
        if (j.contains("methods")) {
            cfg.methods.clear();
            for (const json& m : j["methods"]) cfg.methods.push_back(parse_method(m.get<std::string>()));
        }
        if (j.contains("p_grid")) cfg.p_grid = j["p_grid"].get<std::vector<double>>();
        if (j.contains("indexes")) {
            cfg.indexes.clear();
            for (const json& i : j["indexes"]) cfg.indexes.push_back(parse_index(i.get<std::string>()));
        }
        cfg.k_min = field(j, "k_min", cfg.k_min);
        cfg.k_max = field(j, "k_max", cfg.k_max);
        cfg.restarts = field(j, "restarts", cfg.restarts);
        cfg.master_seed = field(j, "master_seed", cfg.master_seed);
        cfg.threads = field(j, "threads", cfg.threads);
        if (j.contains("center_solver")) cfg.centers = centers_from_json(j["center_solver"]);
        cfg.validate();
        return cfg;
    } catch (const json::exception& e) {
        throw usage_error(std::string("malformed experiment config: ") + e.what());
    }
}

json report_to_json(const KSelectionReport& r) {
    json values = json::object();
    for (const auto& [k, v] : r.per_k_values) values[std::to_string(k)] = std::isnan(v) ? json(nullptr) : json(v);
    return json{{"index", r.index_name},
                {"selected_k", r.selected_k},
                {"rule", r.rule == SelectionRule::maximize ? "maximize" : "hartigan_threshold"},
                {"per_k_values", values}};
}

std::string record_to_json_line(const ExperimentRecord& r) {
    auto opt = [](const auto& o) { return o ? json(*o) : json(nullptr); };
    json j{{"scenario", r.scenario_id},     {"scenario_index", r.scenario_index},
           {"replicate", r.replicate},      {"method", method_name(r.method)},
           {"p", opt(r.p)},                 {"index", index_name(r.index)},
           {"selected_k", opt(r.selected_k)}, {"true_k", r.true_k},
           {"relative_error", opt(r.relative_error)}, {"ari", opt(r.ari)},
           {"failed", r.failed}};
    if (r.failed) j["error"] = r.error;
    return j.dump();
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw data_error(path.string() + ": " + e.what());
    }
}

void write_json_file(const json& j, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace kscale
