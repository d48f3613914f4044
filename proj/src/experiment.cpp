#include "kscale/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "kscale/anomalous.hpp"
#include "kscale/error.hpp"
#include "kscale/evaluate.hpp"
#include "kscale/json_io.hpp"
#include "kscale/rescale.hpp"

namespace kscale {

std::string_view method_name(Method method) {
    switch (method) {
        case Method::baseline_kmeans: return "baseline_kmeans";
        case Method::imwk: return "imwk";
        case Method::imwk_rescaled: return "imwk_rescaled";
        case Method::imwk_rescaled_kmeans: return "imwk_rescaled_kmeans";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    for (const Method m : all_methods)
        if (method_name(m) == name) return m;
    if (name == "baseline" || name == "kmeans") return Method::baseline_kmeans;
    throw usage_error("unknown method '" + std::string(name) + "'");
}

std::vector<double> default_p_grid() {
    std::vector<double> grid{1.0};
    for (int tenth = 11; tenth <= 20; ++tenth) grid.push_back(tenth / 10.0);
    grid.push_back(2.5);
    grid.push_back(3.0);
    return grid;
}

std::uint64_t exponent_key(double p) { return static_cast<std::uint64_t>(std::llround(p * 1e6)); }

namespace {

using Entries = std::vector<PipelineEntry>;

bool wants(std::span<const CviIndex> indexes, CviIndex idx) {
    return std::find(indexes.begin(), indexes.end(), idx) != indexes.end();
}

// Scores every index over a pipeline's candidates and selects K. `select`
// is the K range the maximizing indexes choose from; Hartigan may also read
// the entry just above it.
void score_entries(const Entries& entries, KRange select, std::span<const CviIndex> indexes, double method_p,
                   MethodOutcome& outcome) {
    if (entries.empty()) return;
    const std::size_t n = entries.front().cvi_data->n_entities();

    std::map<CviIndex, std::map<std::size_t, double>> values;
    std::map<double, std::pair<const DataMatrix*, std::unique_ptr<PairwiseDistances>>> pairwise;
    std::pair<const DataMatrix*, double> scatter{nullptr, 0.0};

    for (const PipelineEntry& e : entries) {
        if (!select.contains(e.k)) continue;
        for (const CviIndex idx : indexes) {
            if (idx == CviIndex::hartigan) continue;
            double value = std::nan("");
            try {
                if (idx == CviIndex::ch) {
                    if (scatter.first != e.cvi_data.get()) scatter = {e.cvi_data.get(), total_scatter(*e.cvi_data)};
                    value = calinski_harabasz(scatter.second, e.euclidean_wk, n, e.k);
                } else {
                    const double q = *index_exponent(idx, method_p);
                    auto& slot = pairwise[q];
                    if (slot.first != e.cvi_data.get()) {
                        slot.second.reset();  // release before building the replacement
                        slot.second = std::make_unique<PairwiseDistances>(*e.cvi_data, q);
                        slot.first = e.cvi_data.get();
                    }
                    const bool is_sil = idx == CviIndex::sil_eucl || idx == CviIndex::sil_manh || idx == CviIndex::sil_mink;
                    value = is_sil ? silhouette(*slot.second, e.clustering.assignments, e.k)
                                   : dunn(*slot.second, e.clustering.assignments, e.k);
                }
            } catch (const Error&) {
                // Undefined at this K (e.g. zero within-cluster scatter); NaN never wins.
            }
            values[idx][e.k] = value;
        }
    }

    auto assignments_at = [&](std::size_t k) -> const std::vector<std::size_t>& {
        for (const PipelineEntry& e : entries)
            if (e.k == k) return e.clustering.assignments;
        throw numerical_error("no clustering for K = " + std::to_string(k));
    };

    for (const CviIndex idx : indexes) {
        try {
            KSelectionReport report;
            if (idx == CviIndex::hartigan) {
                std::map<std::size_t, double> trace;
                for (const PipelineEntry& e : entries) trace[e.k] = e.euclidean_wk;
                const std::size_t top = entries.back().k;
                if (top <= select.min) throw numerical_error("hartigan: K range too short for W_{K+1}");
                report = hartigan_select(trace, n, KRange{select.min, std::min(select.max, top - 1)});
            } else {
                report = select_k(values[idx], std::string(index_name(idx)));
            }
            report.index_name = std::string(index_name(idx));
            const auto& assign = assignments_at(report.selected_k);
            outcome.by_index[idx] = IndexOutcome{std::move(report), assign};
        } catch (const Error& err) {
            outcome.failures[idx] = err.what();
        }
    }
}

Entries baseline_entries(const std::shared_ptr<const DataMatrix>& data, std::size_t k_lo, std::size_t k_hi, double p,
                         const EstimateOptions& opt, std::uint64_t stream) {
    Entries out;
    for (std::size_t k = k_lo; k <= k_hi; ++k) {
        const RestartPolicy policy{opt.restarts, derive_seed(opt.seed, {stream, k})};
        Clustering c = kmeans_multistart(*data, k, p, policy, opt.centers);
        const double wk = euclidean_wk(*data, c);
        out.push_back({k, std::move(c), data, wk});
    }
    return out;
}

MethodOutcome run_baseline(const std::shared_ptr<const DataMatrix>& data, std::span<const CviIndex> indexes,
                           const EstimateOptions& opt) {
    MethodOutcome out;
    out.method = Method::baseline_kmeans;
    out.p = 2.0;
    const std::size_t n = data->n_entities();
    const KRange select{opt.k_range.min, std::min(opt.k_range.max, n - 1)};
    out.k_range = select;
    const std::size_t top = wants(indexes, CviIndex::hartigan) ? std::min(select.max + 1, n) : select.max;

    std::vector<CviIndex> euclid, manhattan;
    for (const CviIndex idx : indexes) (idx == CviIndex::sil_manh ? manhattan : euclid).push_back(idx);
    if (!euclid.empty()) score_entries(baseline_entries(data, select.min, top, 2.0, opt, 0), select, euclid, 2.0, out);
    if (!manhattan.empty()) {
        score_entries(baseline_entries(data, select.min, select.max, 1.0, opt, 1), select, manhattan, 2.0, out);
    }
    return out;
}

// Runs every requested iMWK-based method at one exponent on a shared series.
std::vector<MethodOutcome> run_imwk_methods(const DataMatrix& data, double p, std::span<const Method> methods,
                                            std::span<const CviIndex> indexes, const EstimateOptions& opt,
                                            std::vector<double>* seconds = nullptr) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const double pw = weighted_exponent(p);
    MwkConfig cfg;
    cfg.minkowski.p = pw;
    cfg.centers = opt.centers;

    std::vector<MethodOutcome> out;
    for (const Method m : methods) {
        MethodOutcome o;
        o.method = m;
        o.p = pw;
        out.push_back(std::move(o));
    }
    auto fail_all = [&](const std::string& why) {
        for (MethodOutcome& o : out)
            for (const CviIndex idx : indexes) o.failures[idx] = why;
    };

    std::optional<ImwkSeries> series;
    KRange select;
    try {
        const AnomalousInit init = extract_anomalous(data, pw, 1, true, cfg);
        for (MethodOutcome& o : out) o.n_anomalous = init.size();
        const std::size_t cap = k_search_cap(init, opt.k_range.max);
        if (cap < opt.k_range.min) throw numerical_error("anomalous clusters fewer than k_min");
        select = KRange{opt.k_range.min, cap};
        const std::size_t top =
            wants(indexes, CviIndex::hartigan) ? std::min(init.size(), opt.k_range.max + 1) : cap;
        series = imwk_series(data, init, KRange{select.min, top}, cfg);
    } catch (const Error& err) {
        fail_all(err.what());
        if (seconds) seconds->assign(out.size(), std::chrono::duration<double>(clock::now() - t0).count());
        return out;
    }
    const double shared = std::chrono::duration<double>(clock::now() - t0).count();
    if (seconds) seconds->assign(out.size(), shared);

    for (std::size_t mi = 0; mi < out.size(); ++mi) {
        const auto t1 = clock::now();
        MethodOutcome& o = out[mi];
        o.k_range = select;
        try {
            Entries entries;
            switch (o.method) {
                case Method::imwk: entries = pipeline_imwk(data, *series); break;
                case Method::imwk_rescaled: entries = pipeline_imwk_rescaled(data, *series); break;
                case Method::imwk_rescaled_kmeans: {
                    const RestartPolicy policy{opt.restarts, derive_seed(opt.seed, {3})};
                    entries = pipeline_rescale_kmeans(data, *series, policy, opt.centers);
                    break;
                }
                case Method::baseline_kmeans: throw usage_error("baseline is not an iMWK method");
            }
            score_entries(entries, select, indexes, pw, o);
        } catch (const Error& err) {
            for (const CviIndex idx : indexes) o.failures[idx] = err.what();
        }
        if (seconds) (*seconds)[mi] += std::chrono::duration<double>(clock::now() - t1).count();
    }
    return out;
}

}  // namespace

MethodOutcome estimate_k(const DataMatrix& data_in, Method method, double p, std::span<const CviIndex> indexes,
                         const EstimateOptions& options) {
    if (options.k_range.min < 2 || options.k_range.max < options.k_range.min)
        throw usage_error("K range must satisfy 2 <= k_min <= k_max");
    if (indexes.empty()) throw usage_error("no validity index requested");
    const auto data = std::make_shared<const DataMatrix>(ensure_standardized(data_in));
    if (method == Method::baseline_kmeans) return run_baseline(data, indexes, options);
    const Method single[] = {method};
    return std::move(run_imwk_methods(*data, p, single, indexes, options).front());
}

void ExperimentConfig::validate() const {
    if (scenarios.empty()) throw usage_error("experiment has no scenarios");
    for (const ScenarioSpec& s : scenarios) s.validate();
    if (replicates < 1) throw usage_error("replicates must be >= 1");
    if (methods.empty()) throw usage_error("experiment has no methods");
    if (indexes.empty()) throw usage_error("experiment has no indexes");
    if (k_min < 2 || k_max < k_min) throw usage_error("K range must satisfy 2 <= k_min <= k_max");
    if (restarts < 1) throw usage_error("restarts must be >= 1");
    const bool needs_p = std::any_of(methods.begin(), methods.end(), [](Method m) { return m != Method::baseline_kmeans; });
    if (needs_p && p_grid.empty()) throw usage_error("p_grid is empty");
    for (const double p : p_grid) validate_exponent(p);
}

namespace {

std::vector<ExperimentRecord> run_replicate(const ExperimentConfig& cfg, std::size_t sc, std::size_t rep) {
    ScenarioSpec spec = cfg.scenarios[sc];
    spec.seed = derive_seed(cfg.master_seed, {sc, rep});
    const GeneratedData gen = generate(spec);
    const auto data = std::make_shared<const DataMatrix>(standardize_range(gen.raw));

    std::vector<ExperimentRecord> records;
    auto emit = [&](const MethodOutcome& o, std::optional<double> p, double seconds) {
        for (const CviIndex idx : cfg.indexes) {
            ExperimentRecord r;
            r.scenario_index = sc;
            r.scenario_id = spec.id();
            r.replicate = rep;
            r.method = o.method;
            r.p = p;
            r.index = idx;
            r.true_k = spec.k_true;
            r.wall_time = seconds;
            if (const auto it = o.by_index.find(idx); it != o.by_index.end()) {
                r.selected_k = it->second.report.selected_k;
                r.relative_error = relative_error(spec.k_true, *r.selected_k);
                r.ari = adjusted_rand(gen.labels, it->second.assignments);
            } else {
                r.failed = true;
                const auto f = o.failures.find(idx);
                r.error = f != o.failures.end() ? f->second : "no result";
            }
            records.push_back(std::move(r));
        }
    };

    EstimateOptions opt;
    opt.k_range = KRange{cfg.k_min, cfg.k_max};
    opt.restarts = cfg.restarts;
    opt.centers = cfg.centers;

    std::vector<Method> imwk_methods;
    for (const Method m : cfg.methods) {
        if (m != Method::baseline_kmeans) {
            imwk_methods.push_back(m);
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        opt.seed = derive_seed(cfg.master_seed, {sc, rep, static_cast<std::uint64_t>(m)});
        MethodOutcome o;
        try {
            o = run_baseline(data, cfg.indexes, opt);
        } catch (const Error& err) {
            o.method = m;
            for (const CviIndex idx : cfg.indexes) o.failures[idx] = err.what();
        }
        emit(o, std::nullopt, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    for (const double p : cfg.p_grid) {
        if (imwk_methods.empty()) break;
        opt.seed = derive_seed(cfg.master_seed, {sc, rep, exponent_key(p)});
        std::vector<double> seconds;
        const auto outcomes = run_imwk_methods(*data, p, imwk_methods, cfg.indexes, opt, &seconds);
        for (std::size_t i = 0; i < outcomes.size(); ++i) emit(outcomes[i], outcomes[i].p, seconds[i]);
    }

    // Records follow the configured method order regardless of how the work was grouped.
    std::stable_sort(records.begin(), records.end(), [&](const ExperimentRecord& a, const ExperimentRecord& b) {
        auto pos = [&](Method m) { return std::find(cfg.methods.begin(), cfg.methods.end(), m) - cfg.methods.begin(); };
        return pos(a.method) < pos(b.method);
    });
    return records;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ProgressCallback& progress) {
    cfg.validate();
    const std::size_t total = cfg.scenarios.size() * cfg.replicates;
    std::vector<std::vector<ExperimentRecord>> slots(total);
    std::atomic<std::size_t> next{0}, done{0};
    std::mutex progress_mutex;
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        while (true) {
            const std::size_t task = next.fetch_add(1);
            if (task >= total) return;
            try {
                slots[task] = run_replicate(cfg, task / cfg.replicates, task % cfg.replicates);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
            const std::size_t finished = ++done;
            if (progress) {
                std::lock_guard lock(progress_mutex);
                progress(finished, total);
            }
        }
    };

    std::size_t threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, total);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    ExperimentResult result;
    for (auto& slot : slots)
        for (auto& r : slot) result.records.push_back(std::move(r));
    result.aggregates = aggregate(result.records);
    return result;
}

namespace {

struct GroupKey {
    std::string scenario;
    Method method;
    std::optional<double> p;
    CviIndex index;

    auto tie() const { return std::tuple(scenario, method, p.value_or(-1.0), index); }
    bool operator<(const GroupKey& o) const { return tie() < o.tie(); }
};

}  // namespace

std::vector<AggregateRow> aggregate(std::span<const ExperimentRecord> records) {
    std::vector<GroupKey> order;
    std::map<GroupKey, std::vector<const ExperimentRecord*>> groups;
    std::set<std::string> scenarios;
    for (const ExperimentRecord& r : records) scenarios.insert(r.scenario_id);
    const bool add_all = scenarios.size() > 1;

    for (const ExperimentRecord& r : records) {
        std::vector<GroupKey> keys{{r.scenario_id, r.method, r.p, r.index}};
        if (add_all) keys.push_back({"all", r.method, r.p, r.index});
        for (const GroupKey& key : keys) {
            auto [it, inserted] = groups.try_emplace(key);
            if (inserted) order.push_back(key);
            it->second.push_back(&r);
        }
    }
    std::stable_sort(order.begin(), order.end(),
                     [](const GroupKey& a, const GroupKey& b) { return a.scenario == "all" ? false : b.scenario == "all"; });

    std::vector<AggregateRow> rows;
    for (const GroupKey& key : order) {
        AggregateRow row;
        row.scenario = key.scenario;
        row.method = key.method;
        row.p = key.p;
        row.index = key.index;
        std::vector<double> re, ari, hit;
        for (const ExperimentRecord* r : groups[key]) {
            if (r->failed) {
                ++row.n_failed;
                continue;
            }
            re.push_back(*r->relative_error);
            ari.push_back(*r->ari);
            hit.push_back(r->hit() ? 1.0 : 0.0);
        }
        row.n = re.size();
        row.relative_error = {mean(re), standard_error(re)};
        row.ari = {mean(ari), standard_error(ari)};
        row.hit_rate = {mean(hit), standard_error(hit)};
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

std::string slug(const std::string& s) {
    std::string out;
    for (const char ch : s) {
        if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-') out += ch;
        else if (!out.empty() && out.back() != '_') out += '_';
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out.empty() ? "scenario" : out;
}

std::string p_label(Method method, std::optional<double> p) {
    if (method == Method::baseline_kmeans || !p) return "-";
    if (*p == MinkowskiConfig::p_near_one) return "p->1";
    std::ostringstream os;
    os << "p=" << *p;
    return os.str();
}

std::string fixed(double x, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << x;
    return os.str();
}

void write_tables(const std::vector<AggregateRow>& rows, const std::filesystem::path& dir) {
    std::vector<std::string> scenarios;
    for (const AggregateRow& r : rows)
        if (std::find(scenarios.begin(), scenarios.end(), r.scenario) == scenarios.end()) scenarios.push_back(r.scenario);

    struct Metric {
        const char* name;
        const char* title;
        Summary AggregateRow::*field;
        bool percent;
    };
    const Metric metrics[] = {{"re", "Relative error (mean/se)", &AggregateRow::relative_error, false},
                              {"ari", "Adjusted Rand index (mean/se)", &AggregateRow::ari, false},
                              {"hit", "Percentage of true K found", &AggregateRow::hit_rate, true}};

    for (const std::string& sc : scenarios) {
        std::vector<std::pair<Method, std::optional<double>>> row_keys;
        std::vector<CviIndex> cols;
        std::map<std::tuple<Method, double, CviIndex>, const AggregateRow*> cell;
        for (const AggregateRow& r : rows) {
            if (r.scenario != sc) continue;
            const auto key = std::pair(r.method, r.p);
            if (std::find(row_keys.begin(), row_keys.end(), key) == row_keys.end()) row_keys.push_back(key);
            if (std::find(cols.begin(), cols.end(), r.index) == cols.end()) cols.push_back(r.index);
            cell[{r.method, r.p.value_or(-1.0), r.index}] = &r;
        }
        for (const Metric& m : metrics) {
            const auto base = dir / (std::string(m.name) + "_" + slug(sc));
            std::ofstream csv(base.string() + ".csv", std::ios::binary);
            std::ofstream md(base.string() + ".md", std::ios::binary);
            csv << "method,p";
            md << "### " << m.title << ": " << sc << "\n\n| method | p |";
            for (const CviIndex c : cols) {
                csv << ',' << index_name(c) << "_mean," << index_name(c) << "_se";
                md << ' ' << index_name(c) << " |";
            }
            csv << ",n\n";
            md << "\n|---|---|";
            for (std::size_t i = 0; i < cols.size(); ++i) md << "---|";
            md << '\n';
            for (const auto& [method, p] : row_keys) {
                csv << method_name(method) << ',' << (p ? fixed(*p, 5) : std::string());
                md << "| " << method_name(method) << " | " << p_label(method, p) << " |";
                std::size_t n = 0;
                for (const CviIndex c : cols) {
                    const auto it = cell.find({method, p.value_or(-1.0), c});
                    if (it == cell.end()) {
                        csv << ",,";
                        md << " |";
                        continue;
                    }
                    const Summary s = it->second->*m.field;
                    n = std::max(n, it->second->n);
                    const double scale = m.percent ? 100.0 : 1.0;
                    csv << ',' << fixed(s.mean * scale, 6) << ',' << fixed(s.se * scale, 6);
                    if (m.percent) md << ' ' << fixed(s.mean * 100.0, 3) << " |";
                    else md << ' ' << fixed(s.mean, 3) << '/' << fixed(s.se, 3) << " |";
                }
                csv << ',' << n << '\n';
                md << '\n';
            }
        }
    }
}

}  // namespace

void write_experiment(const ExperimentResult& result, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir / "tables");
    {
        std::ofstream out(out_dir / "records.ndjson", std::ios::binary);
        if (!out) throw data_error("cannot write " + (out_dir / "records.ndjson").string());
        for (const ExperimentRecord& r : result.records) out << record_to_json_line(r) << '\n';
    }
    {
        std::ofstream out(out_dir / "timings.ndjson", std::ios::binary);
        for (const ExperimentRecord& r : result.records) {
            nlohmann::json j{{"scenario", r.scenario_id}, {"replicate", r.replicate},
                             {"method", method_name(r.method)}, {"index", index_name(r.index)},
                             {"wall_time", r.wall_time}};
            j["p"] = r.p ? nlohmann::json(*r.p) : nlohmann::json(nullptr);
            out << j.dump() << '\n';
        }
    }
    write_tables(result.aggregates, out_dir / "tables");
}

}  // namespace kscale
