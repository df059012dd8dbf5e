#include "cli.hpp"

#include "roam/env.hpp"
#include "roam/errors.hpp"
#include "roam/eval.hpp"
#include "roam/geo.hpp"
#include "roam/image.hpp"
#include "roam/panograph.hpp"
#include "roam/projection.hpp"
#include "roam/roadnet.hpp"
#include "roam/seqgen.hpp"
#include "roam/tokenize.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace roam::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << content;
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    for (double v : parse_double_list(csv)) out.push_back(static_cast<int>(v));
    return out;
}

geo::BBox parse_bbox(const std::string& csv) {
    const auto v = parse_double_list(csv);
    if (v.size() != 4)
        throw DataError("--bbox expects lat_min,lon_min,lat_max,lon_max");
    geo::BBox b{{v[0], v[1]}, {v[2], v[3]}};
    geo::validate(b);
    return b;
}

std::pair<uint32_t, uint32_t> parse_shard(const std::string& s) {
    const auto slash = s.find('/');
    if (slash == std::string::npos) throw DataError("--shard expects i/N");
    const uint32_t i = static_cast<uint32_t>(std::stoul(s.substr(0, slash)));
    const uint32_t n = static_cast<uint32_t>(std::stoul(s.substr(slash + 1)));
    if (n == 0 || i >= n) throw DataError("--shard requires 0 <= i < N");
    return {i, n};
}

// Config-file support: flags beat the config file, the config file beats
// defaults. The file is a flat JSON object keyed by long option names
// (without the leading dashes), e.g. {"max-move-m": 40, "seed": 7}.
class ConfigFile {
public:
    void load(const std::string& path) { j_ = json::parse(read_file(path)); }

    void apply(CLI::App& app) {
        if (j_.is_null()) return;
        for (auto& [key, value] : j_.items()) {
            CLI::Option* opt = app.get_option_no_throw("--" + key);
            if (!opt || opt->count() > 0) continue;
            std::string text =
                value.is_string() ? value.get<std::string>() : value.dump();
            opt->add_result(text);
            opt->run_callback();
        }
    }

private:
    json j_;
};

// Renders a view from the node's equirect image and tokenizes it. Panoramas
// are cached per node id since samples arrive grouped by node.
class RenderedViewTokenProvider final : public seqgen::ViewTokenProvider {
public:
    RenderedViewTokenProvider(std::string images_root, int view_size)
        : root_(std::move(images_root)), view_size_(view_size) {}

    std::vector<int32_t> view_tokens(const panograph::PanoNode& node,
                                     double heading_deg) const override {
        std::lock_guard lock(mu_);
        if (!cached_ || cached_id_ != node.id) {
            if (node.image_ref.empty())
                throw DataError("node " + std::to_string(node.id) + " has no image_ref");
            const fs::path p = root_.empty() ? fs::path(node.image_ref)
                                             : fs::path(root_) / node.image_ref;
            cached_ = proj::Equirect{img::load_image(p.string()), node.base_heading};
            cached_->validate();
            cached_id_ = node.id;
        }
        proj::ViewSpec spec;
        spec.heading_deg = heading_deg;
        spec.out_size = view_size_;
        return tokenizer_.tokenize(proj::project_view(*cached_, spec));
    }

private:
    std::string root_;
    int view_size_;
    tok::StubImageTokenizer tokenizer_;
    mutable std::mutex mu_;
    mutable std::optional<proj::Equirect> cached_;
    mutable uint64_t cached_id_ = 0;
};

// ---------------------------------------------------------------------- //

int cmd_build_graph(const std::string& metadata_path, const std::string& osm_path,
                    const std::string& out_path, const std::string& drop_report_path,
                    const std::string& bbox_csv, double max_move_m,
                    double temporal_link_radius_m, double snap_tol_m,
                    const std::string& holdout_years_csv, double spatial_frac,
                    unsigned threads) {
    roadnet::RoadNetConfig net_cfg;
    panograph::GraphConfig cfg;
    cfg.bbox = parse_bbox(bbox_csv);
    net_cfg.bbox = cfg.bbox;
    cfg.max_move_m = max_move_m;
    cfg.temporal_link_radius_m = temporal_link_radius_m;
    cfg.snap_tol_m = snap_tol_m;
    cfg.threads = threads;

    const auto net = roadnet::RoadNetwork::parse(read_file(osm_path), net_cfg);
    auto nodes = panograph::parse_metadata(read_file(metadata_path));

    panograph::DropReport report;
    auto graph = panograph::build_graph(std::move(nodes), net, cfg, &report);
    panograph::split_graph(graph, parse_int_list(holdout_years_csv), spatial_frac);

    write_file(out_path, graph.to_json());

    if (!drop_report_path.empty()) {
        ordered_json dr;
        dr["input_count"] = report.input_count;
        dr["outside_bbox"] = report.outside_bbox;
        dr["unsnapped"] = report.unsnapped;
        dr["dropped"] = ordered_json::array();
        for (const auto& e : report.entries)
            dr["dropped"].push_back({{"id", e.id}, {"reason", e.reason}});
        write_file(drop_report_path, dr.dump(2) + "\n");
    }

    std::map<std::string, std::size_t> split_counts;
    for (uint32_t i = 0; i < graph.size(); ++i)
        ++split_counts[panograph::to_string(graph.split(i))];
    std::cout << "graph: " << graph.size() << " nodes, " << graph.spatial_edges().size()
              << " spatial edges, " << graph.temporal_edges().size() << " temporal edges\n";
    std::cout << "dropped: " << report.outside_bbox << " outside bbox, " << report.unsnapped
              << " unsnapped (of " << report.input_count << " inputs)\n";
    for (const auto& [name, count] : split_counts)
        std::cout << "split " << name << ": " << count << " nodes\n";
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int cmd_gen(const std::string& graph_path, const std::string& out_dir,
            uint32_t max_paths, uint32_t max_samples, uint32_t lookaround_perms,
            uint64_t seed, const std::string& shard_spec, const std::string& images_root,
            bool synthetic_images, int view_size) {
    const auto graph = panograph::NavGraph::from_json(read_file(graph_path));
    const auto [shard_i, shard_n] = parse_shard(shard_spec);

    seqgen::GenConfig cfg;
    cfg.dfs.max_paths_per_node = max_paths;
    cfg.dfs.max_samples_per_seq = max_samples;
    cfg.lookaround_perms = lookaround_perms;
    cfg.seed = seed;
    cfg.shard_index = shard_i;
    cfg.shard_count = shard_n;

    std::unique_ptr<seqgen::ViewTokenProvider> provider;
    if (synthetic_images || (images_root.empty() && graph.node(0).image_ref.empty()))
        provider = std::make_unique<seqgen::HashViewTokenProvider>();
    else
        provider = std::make_unique<RenderedViewTokenProvider>(images_root, view_size);

    const auto vocab = tok::TokenVocab::build();

    fs::create_directories(out_dir);
    const std::string suffix =
        shard_n > 1 ? "_shard" + std::to_string(shard_i) + "of" + std::to_string(shard_n) : "";
    auto open_out = [&](const std::string& stem) {
        auto path = fs::path(out_dir) / (stem + suffix + ".jsonl");
        auto out = std::make_unique<std::ofstream>(path, std::ios::binary);
        if (!*out) throw DataError("cannot write " + path.string());
        return out;
    };
    std::map<panograph::Split, std::unique_ptr<std::ofstream>> outs;
    outs[panograph::Split::train] = open_out("train");
    outs[panograph::Split::test_temporal] = open_out("test_temporal");
    outs[panograph::Split::test_spatiotemporal] = open_out("test_spatiotemporal");

    struct Stats {
        uint64_t sentences = 0, samples = 0, tokens = 0;
    };
    std::map<panograph::Split, Stats> stats;

    seqgen::generate_sentences(
        graph, *provider, cfg, [&](const seqgen::VisualSentence& s, panograph::Split split) {
            const auto tokens = tok::encode_sentence(s, vocab);
            tok::write_jsonl_line(tokens, *outs[split]);
            auto& st = stats[split];
            ++st.sentences;
            st.samples += s.samples.size();
            st.tokens += tokens.size();
        });

    // Panoramas are graph nodes owned by this shard, per split.
    std::map<panograph::Split, uint64_t> panoramas;
    for (uint32_t i = 0; i < graph.size(); ++i)
        if (graph.node(i).id % shard_n == shard_i) ++panoramas[graph.split(i)];

    ordered_json manifest;
    manifest["seed"] = seed;
    manifest["shard"] = std::to_string(shard_i) + "/" + std::to_string(shard_n);
    manifest["max_paths_per_node"] = max_paths;
    manifest["max_samples_per_seq"] = max_samples;
    manifest["lookaround_perms"] = lookaround_perms;
    uint64_t total_samples = 0, total_panoramas = 0;
    for (auto split : {panograph::Split::train, panograph::Split::test_temporal,
                       panograph::Split::test_spatiotemporal}) {
        const auto& st = stats[split];
        ordered_json e;
        e["sentences"] = st.sentences;
        e["samples"] = st.samples;
        e["tokens"] = st.tokens;
        e["panoramas"] = panoramas[split];
        e["projected_images"] = st.samples; // one view per emitted sample
        manifest["splits"][panograph::to_string(split)] = std::move(e);
        total_samples += st.samples;
        total_panoramas += panoramas[split];
    }
    manifest["augmentation_factor"] =
        total_panoramas ? static_cast<double>(total_samples) / total_panoramas : 0.0;
    write_file((fs::path(out_dir) / ("manifest" + suffix + ".json")).string(),
               manifest.dump(2) + "\n");

    for (auto& [split, st] : stats)
        std::cout << panograph::to_string(split) << ": " << st.sentences << " sentences, "
                  << st.samples << " samples, " << st.tokens << " tokens\n";
    std::cout << "augmentation factor: " << manifest["augmentation_factor"] << "\n";
    return 0;
}

int cmd_project(const std::string& input, const std::string& output, double base_heading,
                double heading, double pitch, double fov, int out_size, bool lookaround) {
    proj::Equirect pano{img::load_image(input), base_heading};
    pano.validate();
    if (lookaround) {
        const auto views = proj::project_lookaround(pano, out_size);
        const fs::path base(output);
        const std::string stem = base.stem().string();
        const fs::path dir = base.parent_path();
        for (int k = 0; k < 4; ++k) {
            char name[64];
            std::snprintf(name, sizeof(name), "%s_h%03d.png", stem.c_str(), 90 * k);
            img::save_png(views[k], (dir / name).string());
            std::cout << "wrote " << (dir / name).string() << "\n";
        }
        return 0;
    }
    proj::ViewSpec spec;
    spec.heading_deg = heading;
    spec.pitch_deg = pitch;
    spec.fov_deg = fov;
    spec.out_size = out_size;
    img::save_png(proj::project_view(pano, spec), output);
    std::cout << "wrote " << output << "\n";
    return 0;
}

int cmd_tokenize_check(const std::string& manifest_out, const std::string& jsonl_path) {
    const auto vocab = tok::TokenVocab::build();
    std::cout << "vocabulary total: " << vocab.total() << "\n";
    for (auto m : {tok::Modality::image, tok::Modality::latitude, tok::Modality::longitude,
                   tok::Modality::month, tok::Modality::year, tok::Modality::distance,
                   tok::Modality::heading, tok::Modality::d_month, tok::Modality::d_year})
        std::cout << "  " << tok::to_string(m) << ": offset " << vocab.offset(m) << ", "
                  << vocab.count(m) << " ids\n";
    std::cout << "  special: offset 0, " << vocab.count(tok::Modality::special) << " ids\n";

    if (!manifest_out.empty()) {
        write_file(manifest_out, vocab.manifest_json());
        std::cout << "wrote " << manifest_out << "\n";
    }
    if (!jsonl_path.empty()) {
        std::ifstream in(jsonl_path, std::ios::binary);
        if (!in) throw DataError("cannot read " + jsonl_path);
        const auto sentences = tok::read_jsonl(in, &vocab);
        uint64_t samples = 0;
        for (std::size_t i = 0; i < sentences.size(); ++i) {
            try {
                samples += tok::decode_sentence(sentences[i], vocab).size();
            } catch (const DataError& e) {
                throw DataError("sentence on line " + std::to_string(i + 1) + ": " + e.what());
            }
        }
        std::cout << jsonl_path << ": " << sentences.size() << " sentences, " << samples
                  << " samples, all ids in vocabulary\n";
    }
    return 0;
}

int cmd_eval(const std::string& metric, const std::string& input, const std::string& out_path,
             const std::string& osm_path, const std::string& thresholds_csv,
             const std::string& widths_csv, const std::string& bucket_key,
             const std::string& width_convention, double distance_bin_m,
             const std::string& bbox_csv) {
    std::ifstream in(input, std::ios::binary);
    if (!in) throw DataError("cannot read " + input);

    std::ostringstream csv;
    if (metric == "georef-cdf") {
        const auto records = eval::read_georef_jsonl(in);
        auto thresholds = parse_double_list(thresholds_csv);
        const auto fractions = eval::error_cdf(records, thresholds);
        eval::write_cdf_csv(thresholds, fractions, csv);
        std::cout << records.size() << " georef records\n";
    } else if (metric == "road-adherence") {
        if (osm_path.empty()) throw DataError("road-adherence requires --osm");
        roadnet::RoadNetConfig net_cfg;
        if (!bbox_csv.empty()) net_cfg.bbox = parse_bbox(bbox_csv);
        const auto net = roadnet::RoadNetwork::parse(read_file(osm_path), net_cfg);
        const auto records = eval::read_adherence_jsonl(in);
        const auto convention = width_convention == "full" ? eval::WidthConvention::full
                                                           : eval::WidthConvention::half;
        const auto rows =
            eval::road_adherence(records, net, parse_double_list(widths_csv), convention);
        eval::write_adherence_csv(rows, csv);
        for (const auto& r : rows)
            std::cout << "width " << r.width_m << " m: " << r.all_valid_pct << "% all, "
                      << r.nonzero_valid_pct << "% nonzero\n";
    } else if (metric == "perplexity") {
        const auto records = eval::read_nll_jsonl(in);
        const auto rows = eval::perplexity_by_bucket(
            records, eval::bucket_key_from_string(bucket_key), distance_bin_m);
        eval::write_bucket_csv(rows, csv);
        std::cout << rows.size() << " buckets over " << records.size() << " records\n";
    } else if (metric == "action-cdf") {
        // Input: env-trace JSONL; the realized action distances are measured.
        std::vector<seqgen::Action> actions;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            try {
                const json j = json::parse(line);
                seqgen::Action a;
                a.distance_m = j.at("realized").at("distance_m").get<double>();
                actions.push_back(a);
            } catch (const json::exception& e) {
                throw ParseError(std::string("trace record: ") + e.what(), line_no);
            }
        }
        auto thresholds = parse_double_list(thresholds_csv);
        const auto fractions = eval::action_magnitude_cdf(actions, thresholds);
        eval::write_cdf_csv(thresholds, fractions, csv);
        std::cout << actions.size() << " actions\n";
    } else {
        // Unknown metric is a usage error, handled by the caller via CLI11's
        // check; double-checked here for programmatic calls.
        std::cerr << "unknown metric: " << metric << "\n";
        return 1;
    }

    write_file(out_path, csv.str());
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int cmd_env_trace(const std::string& graph_path, uint64_t steps, uint64_t seed,
                  const std::string& start, double snap_radius_m, const std::string& out_path,
                  const std::string& adherence_out) {
    const auto graph = panograph::NavGraph::from_json(read_file(graph_path));
    env::StepConfig cfg;
    cfg.snap_radius_m = snap_radius_m;
    env::EnvSession session(graph, cfg);
    if (start.empty() || start == "random")
        session.reset_random(seed);
    else
        session.reset(std::stoull(start), seed);

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw DataError("cannot write " + out_path);
    std::unique_ptr<std::ofstream> adh;
    if (!adherence_out.empty()) {
        adh = std::make_unique<std::ofstream>(adherence_out, std::ios::binary);
        if (!*adh) throw DataError("cannot write " + adherence_out);
    }

    std::size_t valid = 0;
    for (uint64_t i = 0; i < steps; ++i) {
        const auto action = session.oracle_action();
        const auto r = session.step(action);
        out << env::trace_json(r, i) << "\n";
        if (r.valid) ++valid;
        if (adh) {
            const auto& n = graph.node(r.next_index);
            ordered_json rec;
            rec["state"] = {n.pos.lat, n.pos.lon};
            rec["action_distance"] = r.realized.distance_m;
            *adh << rec.dump() << "\n";
        }
    }
    std::cout << steps << " steps, " << valid << " valid\n";
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"street-view navigation graph dataset compiler and simulator"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (flags override it)");

    // build-graph ----------------------------------------------------------
    auto* build = app.add_subcommand("build-graph",
                                     "build the navigation graph from metadata + OSM");
    std::string metadata_path, osm_path, graph_out, drop_report_path;
    std::string bbox_csv = "37.50555,-122.34916,37.57277,-122.249168";
    double max_move_m = 50.0, temporal_link_radius_m = 5.0, snap_tol_m = 15.0;
    std::string holdout_years = "2023,2024";
    double spatial_frac = 0.10;
    unsigned threads = 0;
    build->add_option("--metadata", metadata_path, "panorama metadata (JSONL or CSV)")
        ->required();
    build->add_option("--osm", osm_path, "road network (OSM XML or GeoJSON)")->required();
    build->add_option("--out", graph_out, "output graph JSON")->required();
    build->add_option("--drop-report", drop_report_path, "write drop diagnostics JSON");
    build->add_option("--bbox", bbox_csv, "lat_min,lon_min,lat_max,lon_max");
    build->add_option("--max-move-m", max_move_m, "spatial edge cap (default 50)");
    build->add_option("--temporal-link-radius-m", temporal_link_radius_m,
                      "temporal edge radius (default 5)");
    build->add_option("--snap-tol-m", snap_tol_m, "road snap tolerance (default 15)");
    build->add_option("--holdout-years", holdout_years, "temporal holdout years");
    build->add_option("--spatial-holdout-frac", spatial_frac,
                      "bottom fraction of the bbox held out (default 0.10)");
    build->add_option("--threads", threads, "0 = hardware concurrency");

    // gen -------------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "emit token sequence shards from a graph");
    std::string gen_graph, out_dir, shard_spec = "0/1", images_root;
    uint32_t max_paths = 32, max_samples = 13, lookaround_perms = 4;
    uint64_t seed = 0;
    bool synthetic_images = false;
    int view_size = 512;
    gen->add_option("--graph", gen_graph, "graph JSON from build-graph")->required();
    gen->add_option("--out-dir", out_dir, "output directory")->required();
    gen->add_option("--max-paths-per-node", max_paths, "DFS path cap per origin (default 32)");
    gen->add_option("--max-samples-per-seq", max_samples, "samples per sentence (default 13)");
    gen->add_option("--lookaround-perms", lookaround_perms,
                    "look-around orderings per node, 24 = all (default 4)");
    gen->add_option("--seed", seed, "rng seed");
    gen->add_option("--shard", shard_spec, "i/N origin-id modulo shard (default 0/1)");
    gen->add_option("--images-root", images_root, "directory with equirect panoramas");
    gen->add_flag("--synthetic-images", synthetic_images,
                  "hash-based view tokens, no pixel rendering");
    gen->add_option("--view-size", view_size, "rendered view size (default 512)");

    // project ----------------------------------------------------------------
    auto* project = app.add_subcommand("project", "render perspective views from an equirect");
    std::string proj_in, proj_out;
    double base_heading = 0.0, heading = 0.0, pitch = 0.0, fov = 90.0;
    int out_size = 512;
    bool lookaround = false;
    project->add_option("--input", proj_in, "equirect PNG/JPEG")->required();
    project->add_option("--output", proj_out, "output PNG")->required();
    project->add_option("--base-heading", base_heading, "equirect center heading");
    project->add_option("--heading", heading, "view heading (absolute)");
    project->add_option("--pitch", pitch, "view pitch");
    project->add_option("--fov", fov, "horizontal field of view (default 90)");
    project->add_option("--out-size", out_size, "square output size (default 512)");
    project->add_flag("--lookaround", lookaround, "emit 4 views at 90 degree spacing");

    // tokenize-check ----------------------------------------------------------
    auto* tok_check = app.add_subcommand("tokenize-check",
                                         "print the vocabulary layout; validate shards");
    std::string manifest_out, check_jsonl;
    tok_check->add_option("--dump-manifest", manifest_out, "write the vocab manifest JSON");
    tok_check->add_option("--jsonl", check_jsonl, "validate a token shard file");

    // eval ---------------------------------------------------------------------
    auto* eval_cmd = app.add_subcommand("eval", "compute evaluation CSVs");
    std::string metric, eval_in, eval_out, eval_osm, bucket_key = "year";
    std::string thresholds_csv =
        "1,2,3,4,5,6,7,8,9,10,12,14,16,18,20,25,30,35,40,45,50";
    std::string widths_csv = "1,2,3,4,5,6,7,8,10";
    std::string width_convention = "half";
    std::string eval_bbox;
    double distance_bin_m = 1.0;
    eval_cmd
        ->add_option("--metric", metric,
                     "georef-cdf | road-adherence | perplexity | action-cdf")
        ->required()
        ->check(CLI::IsMember({"georef-cdf", "road-adherence", "perplexity", "action-cdf"}));
    eval_cmd->add_option("--input", eval_in, "records JSONL")->required();
    eval_cmd->add_option("--out", eval_out, "output CSV")->required();
    eval_cmd->add_option("--osm", eval_osm, "road network (road-adherence)");
    eval_cmd->add_option("--bbox", eval_bbox, "clip bbox for --osm");
    eval_cmd->add_option("--thresholds", thresholds_csv, "CDF thresholds in meters");
    eval_cmd->add_option("--widths", widths_csv, "lane widths in meters");
    eval_cmd->add_option("--bucket-key", bucket_key,
                         "year | month | action_distance | d_month | d_year");
    eval_cmd->add_option("--width-convention", width_convention, "half | full")
        ->check(CLI::IsMember({"half", "full"}));
    eval_cmd->add_option("--distance-bin-m", distance_bin_m,
                         "bucket size for action_distance (default 1)");

    // env-trace -----------------------------------------------------------------
    auto* trace = app.add_subcommand("env-trace", "closed-loop oracle rollout");
    std::string trace_graph, trace_out, trace_start = "random", adherence_out;
    uint64_t trace_steps = 1000, trace_seed = 0;
    double snap_radius_m = 7.5;
    trace->add_option("--graph", trace_graph, "graph JSON")->required();
    trace->add_option("--out", trace_out, "trace JSONL")->required();
    trace->add_option("--steps", trace_steps, "steps to roll (default 1000)");
    trace->add_option("--seed", trace_seed, "rng seed");
    trace->add_option("--start", trace_start, "start node id or 'random'");
    trace->add_option("--snap-radius-m", snap_radius_m, "step snap radius (default 7.5)");
    trace->add_option("--adherence-out", adherence_out,
                      "also write adherence records for eval");

    std::vector<const char*> argv;
    argv.push_back("roam");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e); // prints the usage message
        return code == 0 ? 0 : 1;     // stable contract: 1 for usage errors
    }

    try {
        if (!config_path.empty()) {
            ConfigFile cf;
            cf.load(config_path);
            for (auto* sub : app.get_subcommands()) cf.apply(*sub);
        }

        if (build->parsed())
            return cmd_build_graph(metadata_path, osm_path, graph_out, drop_report_path,
                                   bbox_csv, max_move_m, temporal_link_radius_m, snap_tol_m,
                                   holdout_years, spatial_frac, threads);
        if (gen->parsed())
            return cmd_gen(gen_graph, out_dir, max_paths, max_samples, lookaround_perms,
                           seed, shard_spec, images_root, synthetic_images, view_size);
        if (project->parsed())
            return cmd_project(proj_in, proj_out, base_heading, heading, pitch, fov,
                               out_size, lookaround);
        if (tok_check->parsed()) return cmd_tokenize_check(manifest_out, check_jsonl);
        if (eval_cmd->parsed())
            return cmd_eval(metric, eval_in, eval_out, eval_osm, thresholds_csv, widths_csv,
                            bucket_key, width_convention, distance_bin_m, eval_bbox);
        if (trace->parsed())
            return cmd_env_trace(trace_graph, trace_steps, trace_seed, trace_start,
                                 snap_radius_m, trace_out, adherence_out);
        std::cerr << "no subcommand\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

} // namespace roam::cli
