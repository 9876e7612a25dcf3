// hypersweep: expand hyperparameter grids into experiment specs, render them
// as batch-job manifests, simulate the campaign on a cluster model, run the
// imagery preprocessing pipeline, and audit the compute ledger.
//
// Exit codes: 0 success, 2 config/parse error, 3 scheduling error,
// 4 pipeline stage failure.

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hypersweep/cluster.hpp"
#include "hypersweep/fsutil.hpp"
#include "hypersweep/geo/metrics.hpp"
#include "hypersweep/geo/pipeline.hpp"
#include "hypersweep/geo/split.hpp"
#include "hypersweep/gridlab.hpp"
#include "hypersweep/jobspec.hpp"
#include "hypersweep/ledger.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitScheduling = 3;
constexpr int kExitPipeline = 4;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PipeSettings {
    int scenes = 2;
    int scene_width = 1024;
    int scene_height = 1024;
    int scenes_per_batch = 1;
    int chip_size = 256;
    double overlap_frac = 0.25;
    double min_class_frac = 0.10;
    int polygon_count = 3;
    int polls_until_online = 2;
    std::vector<std::string> empty_scenes;
    std::array<double, 3> split_fractions{0.7, 0.2, 0.1};
};

struct SimSettings {
    hypersweep::cluster::WorkProfile work{1, 3600, 1.0};
    double failure_rate = 0.0;
    int retry_limit = 2;
    hypersweep::cluster::BatchSizePolicy batch_policy{3.0, 0.5, 1, 256};
};

struct CampaignConfig {
    std::string campaign = "campaign";
    fs::path grid_path;
    fs::path template_path;
    fs::path topology_path;
    hypersweep::jobspec::ResourceRequest resources{4, 16.0, 1, std::nullopt};
    std::string backend = "sim";
    std::uint64_t seed = 0;
    fs::path out = "out";
    SimSettings sim;
    PipeSettings pipe;
};

double get_number(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key))
        return fallback;
    if (!obj.at(key).is_number())
        throw ConfigError(std::string("config key '") + key + "' must be a number");
    return obj.at(key).get<double>();
}

int get_int(const json& obj, const char* key, int fallback) {
    if (!obj.contains(key))
        return fallback;
    if (!obj.at(key).is_number_integer())
        throw ConfigError(std::string("config key '") + key + "' must be an integer");
    return obj.at(key).get<int>();
}

CampaignConfig load_config(const fs::path& path) {
    json doc;
    try {
        doc = json::parse(hypersweep::read_file(path));
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path.string() + ": " + e.what());
    }
    const fs::path base = path.parent_path();
    const auto resolve = [&](const std::string& rel) {
        fs::path p(rel);
        return p.is_absolute() ? p : base / p;
    };

    CampaignConfig cfg;
    try {
        if (doc.contains("campaign"))
            cfg.campaign = doc.at("campaign").get<std::string>();
        if (doc.contains("grid"))
            cfg.grid_path = resolve(doc.at("grid").get<std::string>());
        if (doc.contains("template"))
            cfg.template_path = resolve(doc.at("template").get<std::string>());
        if (doc.contains("topology"))
            cfg.topology_path = resolve(doc.at("topology").get<std::string>());
        if (doc.contains("backend"))
            cfg.backend = doc.at("backend").get<std::string>();
        if (doc.contains("seed"))
            cfg.seed = doc.at("seed").get<std::uint64_t>();
        if (doc.contains("out"))
            cfg.out = resolve(doc.at("out").get<std::string>());

        if (doc.contains("resources")) {
            const json& r = doc.at("resources");
            cfg.resources.cpu_cores = get_int(r, "cpu_cores", cfg.resources.cpu_cores);
            cfg.resources.memory_gb =
                get_number(r, "memory_gb", cfg.resources.memory_gb);
            cfg.resources.gpu_count = get_int(r, "gpu_count", cfg.resources.gpu_count);
            if (r.contains("min_gpu_vram_gb"))
                cfg.resources.min_gpu_vram_gb = r.at("min_gpu_vram_gb").get<double>();
        }

        if (doc.contains("sim")) {
            const json& s = doc.at("sim");
            cfg.sim.work.epochs = get_int(s, "epochs", 1);
            cfg.sim.work.samples_per_epoch = get_int(s, "samples_per_epoch", 3600);
            cfg.sim.work.per_sample_cost_gpu_s =
                get_number(s, "per_sample_cost_gpu_s", 1.0);
            cfg.sim.failure_rate = get_number(s, "failure_rate", 0.0);
            cfg.sim.retry_limit = get_int(s, "retry_limit", 2);
            if (s.contains("batch_policy")) {
                const json& b = s.at("batch_policy");
                cfg.sim.batch_policy.overhead_gb = get_number(b, "overhead_gb", 3.0);
                cfg.sim.batch_policy.per_sample_gb =
                    get_number(b, "per_sample_gb", 0.5);
                cfg.sim.batch_policy.min_bs = get_int(b, "min_bs", 1);
                cfg.sim.batch_policy.max_bs = get_int(b, "max_bs", 256);
            }
        }

        if (doc.contains("pipe")) {
            const json& p = doc.at("pipe");
            cfg.pipe.scenes = get_int(p, "scenes", cfg.pipe.scenes);
            cfg.pipe.scene_width = get_int(p, "scene_width", cfg.pipe.scene_width);
            cfg.pipe.scene_height = get_int(p, "scene_height", cfg.pipe.scene_height);
            cfg.pipe.scenes_per_batch =
                get_int(p, "scenes_per_batch", cfg.pipe.scenes_per_batch);
            cfg.pipe.chip_size = get_int(p, "chip_size", cfg.pipe.chip_size);
            cfg.pipe.overlap_frac = get_number(p, "overlap", cfg.pipe.overlap_frac);
            cfg.pipe.min_class_frac =
                get_number(p, "min_class_frac", cfg.pipe.min_class_frac);
            cfg.pipe.polygon_count = get_int(p, "polygons", cfg.pipe.polygon_count);
            cfg.pipe.polls_until_online =
                get_int(p, "polls_until_online", cfg.pipe.polls_until_online);
            if (p.contains("empty_scenes"))
                cfg.pipe.empty_scenes =
                    p.at("empty_scenes").get<std::vector<std::string>>();
            if (p.contains("split")) {
                const json& f = p.at("split");
                if (!f.is_array() || f.size() != 3)
                    throw ConfigError("config key 'split' must hold three fractions");
                for (std::size_t i = 0; i < 3; ++i)
                    cfg.pipe.split_fractions[i] = f[i].get<double>();
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path.string() + ": " + e.what());
    }

    if (const char* env = std::getenv("HYPERSWEEP_BACKEND"))
        cfg.backend = env;
    if (cfg.backend != "sim" && cfg.backend != "local-dir")
        throw ConfigError("config key 'backend' must be 'sim' or 'local-dir', got '" +
                          cfg.backend + "'");
    return cfg;
}

fs::path specs_path(const CampaignConfig& cfg) { return cfg.out / "specs.json"; }

std::vector<hypersweep::gridlab::ExperimentSpec> load_specs(const CampaignConfig& cfg) {
    const fs::path path = specs_path(cfg);
    if (!fs::exists(path))
        throw ConfigError("spec listing " + path.string() +
                          " not found; run `hypersweep expand` first");
    return hypersweep::gridlab::specs_from_json(hypersweep::read_file(path));
}

int cmd_expand(const CampaignConfig& cfg) {
    if (cfg.grid_path.empty())
        throw ConfigError("config key 'grid' is required for expand");
    auto axes = hypersweep::gridlab::parse_grid(hypersweep::read_file(cfg.grid_path));
    auto specs = hypersweep::gridlab::expand(axes);
    fs::create_directories(cfg.out);
    hypersweep::write_file_atomic(specs_path(cfg),
                                  hypersweep::gridlab::specs_to_json(specs));
    std::printf("%zu experiments\n", specs.size());
    return kExitOk;
}

int cmd_render(const CampaignConfig& cfg) {
    if (cfg.template_path.empty())
        throw ConfigError("config key 'template' is required for render");
    auto specs = load_specs(cfg);
    auto tmpl = hypersweep::jobspec::parse_template(
        hypersweep::read_file(cfg.template_path));
    const fs::path dir = cfg.out / "manifests";
    fs::create_directories(dir);
    std::size_t written = 0;
    for (const auto& spec : specs) {
        for (const auto& manifest :
             hypersweep::jobspec::render_pair(spec, tmpl, cfg.resources)) {
            hypersweep::write_file_atomic(dir / (manifest.name + ".json"),
                                          hypersweep::jobspec::serialize(manifest));
            ++written;
        }
    }
    std::printf("%zu manifests\n", written);
    return kExitOk;
}

int cmd_sim(const CampaignConfig& cfg) {
    namespace hc = hypersweep::cluster;
    if (cfg.topology_path.empty())
        throw ConfigError("config key 'topology' is required for sim");
    auto topo =
        hc::parse_topology(hypersweep::read_file(cfg.topology_path));
    auto specs = load_specs(cfg);
    if (cfg.resources.gpu_count < 1)
        throw ConfigError("config key 'gpu_count' must be at least 1 for sim");

    std::vector<hc::JobRequest> jobs;
    jobs.reserve(specs.size());
    for (const auto& spec : specs) {
        hc::JobRequest job;
        job.name = spec.id;
        job.gpu_count = cfg.resources.gpu_count;
        job.cpu_cores = cfg.resources.cpu_cores;
        job.memory_gb = cfg.resources.memory_gb;
        job.min_vram_gb = cfg.resources.min_gpu_vram_gb;
        job.work = cfg.sim.work;
        job.batch = cfg.sim.batch_policy;
        jobs.push_back(std::move(job));
    }

    const hc::SimParams params{cfg.seed, cfg.sim.failure_rate, cfg.sim.retry_limit};
    const hc::SimTrace trace = hc::simulate(jobs, topo, params);

    fs::create_directories(cfg.out);
    hypersweep::write_file_atomic(cfg.out / "trace.csv", hc::export_trace(trace));

    std::vector<hypersweep::ledger::LedgerRow> rows;
    for (const auto& spec : specs) {
        const auto& outcome = trace.jobs.at(spec.id);
        hypersweep::ledger::LedgerRow row;
        row.application = cfg.campaign;
        if (auto it = spec.bindings.find("network"); it != spec.bindings.end())
            row.network = it->second;
        if (auto it = spec.bindings.find("dataset"); it != spec.bindings.end())
            row.dataset = it->second;
        else if (auto it2 = spec.bindings.find("data"); it2 != spec.bindings.end())
            row.dataset = it2->second;
        row.models = 1.0;
        row.epochs = static_cast<double>(cfg.sim.work.epochs);
        row.gpu_hours = outcome.gpu_hours;
        row.wall_hours = outcome.gpu_hours / cfg.resources.gpu_count;
        rows.push_back(std::move(row));
    }
    // Deterministic content per (inputs, seed): the campaign ledger is
    // rewritten whole, so re-running leaves identical bytes.
    hypersweep::write_file_atomic(cfg.out / "ledger.csv",
                                  hypersweep::ledger::to_csv(rows));

    std::printf("makespan %.2f h\n", trace.makespan_h);
    std::printf("total %.2f gpu-h\n", trace.total_gpu_hours());

    std::size_t unschedulable = 0;
    for (const auto& [name, outcome] : trace.jobs) {
        if (outcome.state == hc::JobState::Unschedulable) {
            std::printf("unschedulable: %s\n", name.c_str());
            ++unschedulable;
        }
    }
    return unschedulable ? kExitScheduling : kExitOk;
}

int cmd_pipe(const CampaignConfig& cfg) {
    namespace geo = hypersweep::geo;
    const PipeSettings& ps = cfg.pipe;
    if (ps.scenes < 0 || ps.scenes_per_batch < 1)
        throw ConfigError("config keys 'scenes'/'scenes_per_batch' are invalid");

    geo::SyntheticParams params;
    params.width = ps.scene_width;
    params.height = ps.scene_height;
    params.polygon_count = ps.polygon_count;
    params.seed = cfg.seed;
    geo::SyntheticArchive archive(params, ps.polls_until_online);
    for (const auto& id : ps.empty_scenes)
        archive.set_polygon_count(id, 0);

    std::vector<geo::Batch> batches;
    for (int i = 0; i < ps.scenes; ++i) {
        char scene_id[32];
        std::snprintf(scene_id, sizeof scene_id, "scene-%03d", i);
        if (i % ps.scenes_per_batch == 0) {
            char batch_id[32];
            std::snprintf(batch_id, sizeof batch_id, "batch-%03zu", batches.size());
            batches.push_back(geo::Batch{batch_id, {}});
        }
        batches.back().scene_ids.push_back(scene_id);
    }

    geo::LocalBackendOptions options;
    options.work_dir = cfg.out / "stage";
    options.chip_size = ps.chip_size;
    options.overlap_frac = ps.overlap_frac;
    options.min_class_frac = ps.min_class_frac;
    geo::LocalBackend backend(archive, options);

    const geo::PipelineResult result = geo::run_pipeline(batches, backend);

    fs::create_directories(cfg.out);
    std::string stats_table = "stage     jobs  bytes\n";
    nlohmann::ordered_json stats_doc = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < geo::kStages.size(); ++i) {
        const auto& st = result.stats[i];
        const std::string token = geo::stage_token(geo::kStages[i]);
        char line[96];
        std::snprintf(line, sizeof line, "%-9s %-5zu %llu\n", token.c_str(), st.jobs,
                      static_cast<unsigned long long>(st.bytes));
        stats_table += line;
        stats_doc.push_back(
            {{"stage", token}, {"jobs", st.jobs}, {"bytes", st.bytes}});
    }
    char total_line[96];
    std::snprintf(total_line, sizeof total_line, "%-9s %-5zu\n", "total",
                  result.total_jobs());
    stats_table += total_line;
    std::fputs(stats_table.c_str(), stdout);
    hypersweep::write_file_atomic(cfg.out / "stage_stats.json",
                                  stats_doc.dump(2) + "\n");

    std::string manifest = "scene_id,row0,col0,size,split\n";
    if (!result.chips.empty()) {
        std::map<std::string, std::size_t> counts;
        for (const auto& chip : result.chips)
            ++counts[chip.scene_id];
        const geo::SplitAssignment split =
            geo::split_by_raster(counts, ps.split_fractions);
        for (const auto& chip : result.chips) {
            manifest += chip.scene_id + ',' + std::to_string(chip.window.row0) +
                        ',' + std::to_string(chip.window.col0) + ',' +
                        std::to_string(chip.window.size) + ',' +
                        geo::split_token(split.by_scene.at(chip.scene_id)) + '\n';
        }
        if (split.starved)
            std::printf("warning: too few scenes to populate val/test\n");
    }
    hypersweep::write_file_atomic(cfg.out / "chips.csv", manifest);
    std::printf("%zu chips\n", result.chips.size());

    for (const auto& failure : result.failures)
        std::printf("failed: batch %s stage %s: %s\n", failure.batch_id.c_str(),
                    geo::stage_token(failure.stage).c_str(), failure.reason.c_str());
    return result.failures.empty() ? kExitOk : kExitPipeline;
}

int cmd_report(const fs::path& ledger_path) {
    auto rows = hypersweep::ledger::load_csv(ledger_path);
    std::fputs(hypersweep::ledger::report(rows).c_str(), stdout);
    return kExitOk;
}

int cmd_verify(const fs::path& ledger_path, const fs::path& totals_path) {
    namespace hl = hypersweep::ledger;
    auto rows = hl::load_csv(ledger_path);
    auto checks = hl::parse_stated_totals(hypersweep::read_file(totals_path));
    std::size_t total_discrepancies = 0;
    for (const auto& check : checks) {
        auto subset = hl::filter_rows(rows, check.where);
        auto discrepancies = hl::verify(subset, check.totals, 0.05, check.table_id);
        if (discrepancies.empty()) {
            std::printf("%s: OK\n", check.table_id.c_str());
            continue;
        }
        for (const auto& d : discrepancies)
            std::printf("%s: %s stated %.6g computed %.6g delta %.6g\n",
                        d.table_id.c_str(), d.column.c_str(), d.stated, d.computed,
                        d.delta);
        total_discrepancies += discrepancies.size();
    }
    std::printf("%zu discrepancies\n", total_discrepancies);
    return total_discrepancies == 0 ? kExitOk : kExitVerifyFailed;
}

int cmd_metrics(const fs::path& predicted, const fs::path& truth) {
    namespace geo = hypersweep::geo;
    const auto load = [](const fs::path& sidecar) {
        return geo::read_mask(sidecar.parent_path(), sidecar.stem().string());
    };
    const geo::SegMetrics m = geo::seg_metrics(load(predicted), load(truth));
    std::printf("tp %llu fp %llu fn %llu tn %llu\n",
                static_cast<unsigned long long>(m.tp),
                static_cast<unsigned long long>(m.fp),
                static_cast<unsigned long long>(m.fn),
                static_cast<unsigned long long>(m.tn));
    const auto show = [](const char* name, const std::optional<double>& v) {
        if (v)
            std::printf("%s %.4f\n", name, *v);
        else
            std::printf("%s n/a\n", name);
    };
    show("precision", m.precision);
    show("recall", m.recall);
    show("f1", m.f1);
    show("iou", m.iou);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hyperparameter campaign toolkit"};
    app.fallthrough();

    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    std::string out_override;
    app.add_option("--config", config_path, "campaign configuration file");
    app.add_option("--seed", seed_override, "override the configured seed");
    app.add_option("--out", out_override, "override the configured output directory");

    auto* expand = app.add_subcommand("expand", "expand the grid into specs");
    auto* render = app.add_subcommand("render", "render manifests from specs");
    auto* sim = app.add_subcommand("sim", "simulate the campaign on the topology");
    auto* pipe = app.add_subcommand("pipe", "run the imagery pipeline");

    auto* report = app.add_subcommand("report", "print the campaign summary table");
    std::string report_ledger;
    report->add_option("ledger", report_ledger, "ledger CSV")->required();

    auto* verify = app.add_subcommand("verify", "audit a ledger against stated totals");
    std::string verify_ledger, verify_totals;
    verify->add_option("ledger", verify_ledger, "ledger CSV")->required();
    verify->add_option("totals", verify_totals, "stated totals JSON")->required();

    auto* metrics = app.add_subcommand("metrics", "segmentation scores for two masks");
    std::string metrics_pred, metrics_truth;
    metrics->add_option("predicted", metrics_pred, "predicted mask sidecar")->required();
    metrics->add_option("truth", metrics_truth, "truth mask sidecar")->required();

    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (report->parsed())
            return cmd_report(report_ledger);
        if (verify->parsed())
            return cmd_verify(verify_ledger, verify_totals);
        if (metrics->parsed())
            return cmd_metrics(metrics_pred, metrics_truth);

        if (config_path.empty())
            throw ConfigError("--config is required for this command");
        CampaignConfig cfg = load_config(config_path);
        if (seed_override)
            cfg.seed = *seed_override;
        if (!out_override.empty())
            cfg.out = out_override;

        if (expand->parsed())
            return cmd_expand(cfg);
        if (render->parsed())
            return cmd_render(cfg);
        if (sim->parsed())
            return cmd_sim(cfg);
        if (pipe->parsed())
            return cmd_pipe(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
    return kExitConfig;
}
