#include "roam/seqgen.hpp"

#include "roam/errors.hpp"
#include "roam/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace roam::seqgen {

namespace {

double round_tenth(double x) { return std::round(x * 10.0) / 10.0; }

double wrap_heading(double deg) {
    double h = std::fmod(deg, 360.0);
    if (h < 0.0) h += 360.0;
    double r = round_tenth(h);
    if (r >= 360.0) r = 0.0;
    return r;
}

int floor_div(int a, int b) {
    int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

// All 4! orderings of the four look-around views, lexicographic.
std::vector<std::array<int, 4>> all_view_orderings() {
    std::array<int, 4> p{0, 1, 2, 3};
    std::vector<std::array<int, 4>> out;
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

} // namespace

std::vector<int32_t> HashViewTokenProvider::view_tokens(const panograph::PanoNode& node,
                                                        double heading_deg) const {
    const uint64_t hbin = static_cast<uint64_t>(
        std::llround(wrap_heading(heading_deg) * 10.0));
    const uint64_t base = rng::splitmix64(node.id * 0x9e3779b97f4a7c15ULL ^ hbin);
    std::vector<int32_t> out(1024);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<int32_t>(rng::splitmix64(base + i) % vocab_);
    return out;
}

std::vector<std::vector<uint32_t>> enumerate_paths(const panograph::NavGraph& g,
                                                   uint64_t origin_id,
                                                   const PathConfig& cfg) {
    if (cfg.max_paths_per_node < 1 || cfg.max_samples_per_seq < 2)
        throw DataError("PathConfig requires P >= 1 and L >= 2");
    const uint32_t origin = g.index_of(origin_id); // throws on unknown origin

    const auto origin_split = g.split(origin);
    auto admissible = [&](uint32_t v) {
        return !cfg.same_split_only || g.split(v) == origin_split;
    };

    std::vector<std::vector<uint32_t>> paths;
    std::vector<uint32_t> path{origin};
    std::vector<bool> on_path(g.size(), false);
    on_path[origin] = true;

    struct Frame {
        uint32_t node;
        std::size_t next;
    };
    std::vector<Frame> stack{{origin, 0}};

    while (!stack.empty() && paths.size() < cfg.max_paths_per_node) {
        Frame& f = stack.back();
        const auto& nbrs = g.neighbors(f.node);

        std::size_t i = f.next;
        while (i < nbrs.size() && (on_path[nbrs[i]] || !admissible(nbrs[i]))) ++i;

        if (i >= nbrs.size()) {
            stack.pop_back();
            on_path[path.back()] = false;
            path.pop_back();
            continue;
        }

        f.next = i + 1;
        const uint32_t v = nbrs[i];
        path.push_back(v);
        on_path[v] = true;
        paths.push_back(path);

        if (path.size() < cfg.max_samples_per_seq) {
            stack.push_back({v, 0});
        } else {
            on_path[v] = false;
            path.pop_back();
        }
    }
    return paths;
}

Action derive_action(const panograph::PanoNode& from, const panograph::PanoNode& to) {
    Action a;
    a.distance_m = round_tenth(geo::haversine_m(from.pos, to.pos));
    if (a.distance_m > 50.0)
        throw DataError("derive_action: distance " + std::to_string(a.distance_m) +
                        " m exceeds the 50 m action cap (nodes " + std::to_string(from.id) +
                        " -> " + std::to_string(to.id) + ")");
    a.heading_deg = a.distance_m == 0.0
                        ? 0.0
                        : wrap_heading(geo::initial_bearing_deg(from.pos, to.pos));

    const int total = (to.year - from.year) * 12 + (to.month - from.month);
    a.d_year = floor_div(total, 12);
    a.d_month = total - 12 * a.d_year;
    if (a.d_year < -30 || a.d_year > 30)
        throw DataError("derive_action: temporal delta outside tokenizable range");
    return a;
}

std::pair<int, int> apply_temporal(int month, int year, const Action& a) {
    const int m0 = (month - 1) + a.total_months();
    const int y = year + floor_div(m0, 12);
    const int m = m0 - 12 * floor_div(m0, 12) + 1;
    return {m, y};
}

std::vector<VisualSentence> gen_lookaround(const panograph::PanoNode& node,
                                           const ViewTokenProvider& views,
                                           const LookaroundConfig& cfg) {
    static const auto orderings = all_view_orderings();

    std::array<double, 4> headings;
    for (int k = 0; k < 4; ++k) headings[k] = wrap_heading(node.base_heading + 90.0 * k);

    std::array<std::vector<int32_t>, 4> tokens;
    for (int k = 0; k < 4; ++k) tokens[k] = views.view_tokens(node, headings[k]);

    // Choice of orderings: all 24, or a per-node deterministic subsample.
    std::vector<std::size_t> chosen(orderings.size());
    std::iota(chosen.begin(), chosen.end(), 0);
    if (cfg.perms < orderings.size()) {
        auto gen = rng::stream(cfg.seed, node.id);
        for (std::size_t i = 0; i < cfg.perms; ++i) {
            const std::size_t j = i + rng::bounded(gen, chosen.size() - i);
            std::swap(chosen[i], chosen[j]);
        }
        chosen.resize(cfg.perms);
        std::sort(chosen.begin(), chosen.end());
    }

    std::vector<VisualSentence> out;
    out.reserve(chosen.size());
    for (std::size_t oi : chosen) {
        const auto& order = orderings[oi];
        VisualSentence s;
        s.kind = SentenceKind::lookaround;
        s.origin_id = node.id;
        s.path_ids.assign(4, node.id);
        for (int i = 0; i < 4; ++i) {
            Sample smp;
            smp.image_tokens = tokens[order[i]];
            smp.pos = node.pos;
            smp.month = node.month;
            smp.year = node.year;
            smp.action.distance_m = 0.0;
            smp.action.heading_deg = headings[order[i < 3 ? i + 1 : 3]];
            s.samples.push_back(std::move(smp));
        }
        out.push_back(std::move(s));
    }
    return out;
}

VisualSentence assemble_sentence(const std::vector<uint32_t>& path,
                                 const panograph::NavGraph& g,
                                 const ViewTokenProvider& views) {
    if (path.empty()) throw DataError("assemble_sentence: empty path");
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        if (!g.has_edge(path[i], path[i + 1]))
            throw DataError("assemble_sentence: path step " + std::to_string(i) +
                            " is not a graph edge");

    VisualSentence s;
    s.kind = SentenceKind::dfs;
    s.origin_id = g.node(path.front()).id;

    double prev_heading = 0.0;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const auto& node = g.node(path[i]);
        s.path_ids.push_back(node.id);

        Sample smp;
        smp.pos = node.pos;
        smp.month = node.month;
        smp.year = node.year;
        if (i + 1 < path.size()) {
            smp.action = derive_action(node, g.node(path[i + 1]));
            prev_heading = smp.action.heading_deg;
        } else {
            smp.action = Action{0.0, prev_heading, 0, 0};
        }
        const double view_heading = i + 1 < path.size() ? smp.action.heading_deg : prev_heading;
        try {
            smp.image_tokens = views.view_tokens(node, view_heading);
        } catch (const std::exception& e) {
            throw DataError("assemble_sentence: view for node " + std::to_string(node.id) +
                            " (step " + std::to_string(i) + "): " + e.what());
        }
        s.samples.push_back(std::move(smp));
    }
    return s;
}

void generate_sentences(const panograph::NavGraph& g, const ViewTokenProvider& views,
                        const GenConfig& cfg, const SentenceSink& sink) {
    if (cfg.shard_count == 0 || cfg.shard_index >= cfg.shard_count)
        throw DataError("invalid shard spec");

    PathConfig dfs = cfg.dfs;
    dfs.same_split_only = cfg.same_split_only;

    for (uint32_t idx = 0; idx < g.size(); ++idx) {
        const auto& node = g.node(idx);
        if (node.id % cfg.shard_count != cfg.shard_index) continue;
        const auto origin_split = g.split(idx);

        LookaroundConfig la{cfg.lookaround_perms, cfg.seed};
        for (auto& sentence : gen_lookaround(node, views, la)) sink(sentence, origin_split);

        for (const auto& path : enumerate_paths(g, node.id, dfs))
            sink(assemble_sentence(path, g, views), origin_split);
    }
}

} // namespace roam::seqgen
