#include "roam/panograph.hpp"

#include "roam/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <future>
#include <set>
#include <sstream>
#include <thread>

namespace roam::panograph {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr double kPi = 3.14159265358979323846;
constexpr double kNodeCellM = 50.0;

uint64_t cell_key(int32_t i, int32_t j) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(i)) << 32) |
           static_cast<uint32_t>(j);
}

void validate_date(uint64_t id, int month, int year) {
    if (month < 1 || month > 12)
        throw DataError("node " + std::to_string(id) + ": month out of range 1..12");
    if (year < 2000 || year > 2030)
        throw DataError("node " + std::to_string(id) + ": year out of range 2000..2030");
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

const char* to_string(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::test_temporal: return "test_temporal";
        case Split::test_spatiotemporal: return "test_spatiotemporal";
    }
    return "train";
}

Split split_from_string(std::string_view s) {
    if (s == "train") return Split::train;
    if (s == "test_temporal") return Split::test_temporal;
    if (s == "test_spatiotemporal") return Split::test_spatiotemporal;
    throw DataError("unknown split tag: " + std::string(s));
}

NavGraph::NavGraph(std::vector<PanoNode> nodes, std::vector<Edge> spatial_edges,
                   std::vector<Edge> temporal_edges, geo::BBox bbox)
    : nodes_(std::move(nodes)),
      spatial_edges_(std::move(spatial_edges)),
      temporal_edges_(std::move(temporal_edges)),
      bbox_(bbox) {
    if (nodes_.empty()) throw DataError("empty graph: no panorama nodes");

    std::sort(nodes_.begin(), nodes_.end(),
              [](const PanoNode& a, const PanoNode& b) { return a.id < b.id; });
    by_id_.reserve(nodes_.size());
    for (uint32_t i = 0; i < nodes_.size(); ++i) {
        if (!by_id_.emplace(nodes_[i].id, i).second)
            throw DataError("duplicate node id " + std::to_string(nodes_[i].id));
    }
    splits_.assign(nodes_.size(), Split::train);

    auto canonicalize = [&](std::vector<Edge>& edges) {
        for (auto& [u, v] : edges) {
            if (u == v) throw DataError("self edge on node index " + std::to_string(u));
            if (u > v) std::swap(u, v);
            if (v >= nodes_.size()) throw DataError("edge references unknown node index");
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    };
    canonicalize(spatial_edges_);
    canonicalize(temporal_edges_);

    build_adjacency();
    build_grid();
}

void NavGraph::build_adjacency() {
    spatial_nbrs_.assign(nodes_.size(), {});
    temporal_nbrs_.assign(nodes_.size(), {});
    all_nbrs_.assign(nodes_.size(), {});
    for (const auto& [u, v] : spatial_edges_) {
        spatial_nbrs_[u].push_back(v);
        spatial_nbrs_[v].push_back(u);
    }
    for (const auto& [u, v] : temporal_edges_) {
        temporal_nbrs_[u].push_back(v);
        temporal_nbrs_[v].push_back(u);
    }
    for (uint32_t i = 0; i < nodes_.size(); ++i) {
        std::sort(spatial_nbrs_[i].begin(), spatial_nbrs_[i].end());
        std::sort(temporal_nbrs_[i].begin(), temporal_nbrs_[i].end());
        std::set_union(spatial_nbrs_[i].begin(), spatial_nbrs_[i].end(),
                       temporal_nbrs_[i].begin(), temporal_nbrs_[i].end(),
                       std::back_inserter(all_nbrs_[i]));
    }
}

void NavGraph::build_grid() {
    double center_lat = (bbox_.min.lat + bbox_.max.lat) / 2.0;
    cell_lat_deg_ = kNodeCellM / geo::kMetersPerDegLat;
    cell_lon_deg_ = kNodeCellM / (geo::kMetersPerDegLat *
                                  std::max(0.01, std::cos(center_lat * kPi / 180.0)));
    for (uint32_t i = 0; i < nodes_.size(); ++i) {
        const auto& p = nodes_[i].pos;
        const int32_t ci = static_cast<int32_t>(std::floor(p.lat / cell_lat_deg_));
        const int32_t cj = static_cast<int32_t>(std::floor(p.lon / cell_lon_deg_));
        grid_[cell_key(ci, cj)].push_back(i);
    }
}

uint32_t NavGraph::index_of(uint64_t id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) throw DataError("unknown node id " + std::to_string(id));
    return it->second;
}

bool NavGraph::has_edge(uint32_t u, uint32_t v) const {
    if (u >= nodes_.size() || v >= nodes_.size()) return false;
    const auto& nbrs = all_nbrs_[u];
    return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

std::vector<uint32_t> NavGraph::nodes_within(const geo::GeoPoint& p, double radius_m) const {
    std::vector<uint32_t> out;
    // The candidate box is padded: the lon conversion uses cos at p, which
    // differs slightly from cos at a node's latitude. Membership itself is
    // the exact haversine test below.
    const double pad = radius_m * 1.001 + 1e-9;
    const double rlat = pad / geo::kMetersPerDegLat;
    const double rlon = pad / (geo::kMetersPerDegLat *
                               std::max(0.01, std::cos(p.lat * kPi / 180.0)));
    const int32_t i0 = static_cast<int32_t>(std::floor((p.lat - rlat) / cell_lat_deg_));
    const int32_t i1 = static_cast<int32_t>(std::floor((p.lat + rlat) / cell_lat_deg_));
    const int32_t j0 = static_cast<int32_t>(std::floor((p.lon - rlon) / cell_lon_deg_));
    const int32_t j1 = static_cast<int32_t>(std::floor((p.lon + rlon) / cell_lon_deg_));
    for (int32_t i = i0; i <= i1; ++i)
        for (int32_t j = j0; j <= j1; ++j) {
            auto it = grid_.find(cell_key(i, j));
            if (it == grid_.end()) continue;
            for (uint32_t idx : it->second)
                if (geo::haversine_m(p, nodes_[idx].pos) <= radius_m) out.push_back(idx);
        }
    std::sort(out.begin(), out.end());
    return out;
}

NavGraph build_graph(std::vector<PanoNode> nodes, const roadnet::RoadNetwork& net,
                     const GraphConfig& cfg, DropReport* report) {
    geo::validate(cfg.bbox);
    DropReport local;
    DropReport& rep = report ? *report : local;
    rep.input_count = nodes.size();

    std::vector<PanoNode> kept;
    kept.reserve(nodes.size());
    for (auto& n : nodes) {
        geo::validate(n.pos);
        validate_date(n.id, n.month, n.year);
        if (!cfg.bbox.contains(n.pos)) {
            ++rep.outside_bbox;
            rep.entries.push_back({n.id, "outside_bbox"});
            continue;
        }
        if (net.nearest_centerline(n.pos).distance_m > cfg.snap_tol_m) {
            ++rep.unsnapped;
            rep.entries.push_back({n.id, "unsnapped"});
            continue;
        }
        kept.push_back(std::move(n));
    }
    if (kept.empty()) throw DataError("empty graph: all nodes dropped");

    std::sort(kept.begin(), kept.end(),
              [](const PanoNode& a, const PanoNode& b) { return a.id < b.id; });

    // Candidate generation on a 50 m grid; with cells at least as wide as
    // both radii everywhere in the bbox, the 3x3 neighborhood around a node
    // covers every possible partner. The lon cell width uses the smallest
    // cosine in the box so it never shrinks below the radius.
    const double extreme_lat = std::max(std::abs(cfg.bbox.min.lat), std::abs(cfg.bbox.max.lat));
    const double cell_lat_deg = kNodeCellM / geo::kMetersPerDegLat;
    const double cell_lon_deg =
        kNodeCellM / (geo::kMetersPerDegLat * std::max(0.01, std::cos(extreme_lat * kPi / 180.0)));
    std::unordered_map<uint64_t, std::vector<uint32_t>> grid;
    for (uint32_t i = 0; i < kept.size(); ++i) {
        const int32_t ci = static_cast<int32_t>(std::floor(kept[i].pos.lat / cell_lat_deg));
        const int32_t cj = static_cast<int32_t>(std::floor(kept[i].pos.lon / cell_lon_deg));
        grid[cell_key(ci, cj)].push_back(i);
    }
    if (cfg.max_move_m > kNodeCellM || cfg.temporal_link_radius_m > kNodeCellM)
        throw DataError("GraphConfig radii larger than the 50 m candidate cell");

    struct EdgePair {
        std::vector<NavGraph::Edge> spatial;
        std::vector<NavGraph::Edge> temporal;
    };

    auto link_range = [&](uint32_t begin, uint32_t end) {
        EdgePair out;
        for (uint32_t u = begin; u < end; ++u) {
            const auto& pu = kept[u];
            const int32_t ci = static_cast<int32_t>(std::floor(pu.pos.lat / cell_lat_deg));
            const int32_t cj = static_cast<int32_t>(std::floor(pu.pos.lon / cell_lon_deg));
            for (int32_t i = ci - 1; i <= ci + 1; ++i)
                for (int32_t j = cj - 1; j <= cj + 1; ++j) {
                    auto it = grid.find(cell_key(i, j));
                    if (it == grid.end()) continue;
                    for (uint32_t v : it->second) {
                        if (v <= u) continue;
                        const auto& pv = kept[v];
                        const double d = geo::haversine_m(pu.pos, pv.pos);
                        if (d <= cfg.max_move_m &&
                            net.road_path_exists(pu.pos, pv.pos, cfg.max_move_m,
                                                 cfg.snap_tol_m))
                            out.spatial.push_back({u, v});
                        if (d <= cfg.temporal_link_radius_m &&
                            (pu.month != pv.month || pu.year != pv.year))
                            out.temporal.push_back({u, v});
                    }
                }
        }
        return out;
    };

    unsigned threads = cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
    threads = std::max(1u, std::min<unsigned>(threads, 16));

    std::vector<NavGraph::Edge> spatial, temporal;
    if (threads <= 1 || kept.size() < 256) {
        auto all = link_range(0, static_cast<uint32_t>(kept.size()));
        spatial = std::move(all.spatial);
        temporal = std::move(all.temporal);
    } else {
        const uint32_t n = static_cast<uint32_t>(kept.size());
        const uint32_t chunk = (n + threads - 1) / threads;
        std::vector<std::future<EdgePair>> futs;
        for (uint32_t begin = 0; begin < n; begin += chunk)
            futs.push_back(std::async(std::launch::async, link_range, begin,
                                      std::min(begin + chunk, n)));
        for (auto& f : futs) {
            auto part = f.get();
            spatial.insert(spatial.end(), part.spatial.begin(), part.spatial.end());
            temporal.insert(temporal.end(), part.temporal.begin(), part.temporal.end());
        }
    }

    return NavGraph(std::move(kept), std::move(spatial), std::move(temporal), cfg.bbox);
}

void split_graph(NavGraph& g, const std::vector<int>& holdout_years, double spatial_frac) {
    if (spatial_frac <= 0.0 || spatial_frac >= 1.0)
        throw DataError("spatial_frac must be in (0, 1)");
    const std::set<int> held(holdout_years.begin(), holdout_years.end());
    const double lat_cut = g.bbox().min.lat + spatial_frac * g.bbox().height_deg();
    for (uint32_t i = 0; i < g.size(); ++i) {
        const auto& n = g.node(i);
        if (held.contains(n.year))
            g.set_split(i, Split::test_temporal);
        else if (n.pos.lat < lat_cut)
            g.set_split(i, Split::test_spatiotemporal);
        else
            g.set_split(i, Split::train);
    }
}

std::string NavGraph::to_json() const {
    ordered_json j;
    j["format"] = "roam-navgraph";
    j["version"] = 1;
    j["bbox"] = {bbox_.min.lat, bbox_.min.lon, bbox_.max.lat, bbox_.max.lon};
    j["nodes"] = ordered_json::array();
    for (uint32_t i = 0; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        ordered_json e;
        e["id"] = n.id;
        e["lat"] = n.pos.lat;
        e["lon"] = n.pos.lon;
        e["month"] = n.month;
        e["year"] = n.year;
        e["heading"] = n.base_heading;
        e["image"] = n.image_ref;
        e["split"] = to_string(splits_[i]);
        j["nodes"].push_back(std::move(e));
    }
    auto edges_json = [&](const std::vector<Edge>& edges) {
        ordered_json arr = ordered_json::array();
        for (const auto& [u, v] : edges) arr.push_back({nodes_[u].id, nodes_[v].id});
        return arr;
    };
    j["spatial_edges"] = edges_json(spatial_edges_);
    j["temporal_edges"] = edges_json(temporal_edges_);
    return j.dump(2) + "\n";
}

NavGraph NavGraph::from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
    if (j.value("format", "") != "roam-navgraph")
        throw ParseError("not a roam-navgraph document");

    const auto& bb = j.at("bbox");
    geo::BBox bbox{{bb[0].get<double>(), bb[1].get<double>()},
                   {bb[2].get<double>(), bb[3].get<double>()}};

    std::vector<PanoNode> nodes;
    std::vector<Split> splits;
    for (const auto& e : j.at("nodes")) {
        PanoNode n;
        n.id = e.at("id").get<uint64_t>();
        n.pos = {e.at("lat").get<double>(), e.at("lon").get<double>()};
        n.month = e.at("month").get<int>();
        n.year = e.at("year").get<int>();
        n.base_heading = e.value("heading", 0.0);
        n.image_ref = e.value("image", "");
        validate_date(n.id, n.month, n.year);
        nodes.push_back(std::move(n));
        splits.push_back(split_from_string(e.value("split", "train")));
    }

    // Ids may arrive in any order; map id -> eventual index for the edges.
    std::unordered_map<uint64_t, uint32_t> index_of;
    {
        std::vector<uint64_t> ids;
        ids.reserve(nodes.size());
        for (const auto& n : nodes) ids.push_back(n.id);
        std::sort(ids.begin(), ids.end());
        for (uint32_t i = 0; i < ids.size(); ++i) index_of[ids[i]] = i;
    }
    auto read_edges = [&](const char* key) {
        std::vector<Edge> out;
        for (const auto& e : j.at(key)) {
            const auto u = index_of.find(e[0].get<uint64_t>());
            const auto v = index_of.find(e[1].get<uint64_t>());
            if (u == index_of.end() || v == index_of.end())
                throw ParseError(std::string(key) + " references unknown node id");
            out.push_back({u->second, v->second});
        }
        return out;
    };

    NavGraph g(std::move(nodes), read_edges("spatial_edges"), read_edges("temporal_edges"),
               bbox);
    // Nodes were sorted by id inside the constructor; splits follow that order.
    std::vector<std::pair<uint64_t, Split>> tagged;
    tagged.reserve(splits.size());
    for (std::size_t i = 0; i < splits.size(); ++i)
        tagged.push_back({j.at("nodes")[i].at("id").get<uint64_t>(), splits[i]});
    for (const auto& [id, s] : tagged) g.set_split(g.index_of(id), s);
    return g;
}

std::vector<PanoNode> parse_metadata(std::string_view text) {
    std::vector<PanoNode> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;

    // Peek at the first non-empty line to detect JSONL vs CSV.
    std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) throw ParseError("empty metadata document", 1);
    const bool jsonl = text[first] == '{';

    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

        if (jsonl) {
            json e;
            try {
                e = json::parse(line);
            } catch (const json::parse_error& err) {
                throw ParseError(err.what(), line_no);
            }
            try {
                PanoNode n;
                n.id = e.at("id").get<uint64_t>();
                n.pos = {e.at("lat").get<double>(), e.at("lon").get<double>()};
                n.month = e.at("month").get<int>();
                n.year = e.at("year").get<int>();
                n.base_heading = e.value("heading", 0.0);
                n.image_ref = e.value("image_path", "");
                validate_date(n.id, n.month, n.year);
                out.push_back(std::move(n));
            } catch (const json::exception& err) {
                throw ParseError(std::string("metadata record: ") + err.what(), line_no);
            } catch (const DataError& err) {
                throw ParseError(err.what(), line_no);
            }
        } else {
            auto fields = split_csv_line(line);
            if (header.empty()) {
                header = fields;
                continue;
            }
            if (fields.size() != header.size())
                throw ParseError("CSV row has " + std::to_string(fields.size()) +
                                     " fields, header has " + std::to_string(header.size()),
                                 line_no);
            PanoNode n;
            bool has_id = false, has_lat = false, has_lon = false, has_month = false,
                 has_year = false;
            try {
                for (std::size_t i = 0; i < header.size(); ++i) {
                    const std::string& key = header[i];
                    const std::string& val = fields[i];
                    if (key == "id") { n.id = std::stoull(val); has_id = true; }
                    else if (key == "lat") { n.pos.lat = std::stod(val); has_lat = true; }
                    else if (key == "lon") { n.pos.lon = std::stod(val); has_lon = true; }
                    else if (key == "month") { n.month = std::stoi(val); has_month = true; }
                    else if (key == "year") { n.year = std::stoi(val); has_year = true; }
                    else if (key == "heading") { n.base_heading = std::stod(val); }
                    else if (key == "image_path") { n.image_ref = val; }
                }
            } catch (const std::exception&) {
                throw ParseError("CSV row has a malformed numeric field", line_no);
            }
            if (!has_id || !has_lat || !has_lon || !has_month || !has_year)
                throw ParseError("CSV header must include id, lat, lon, month, year", line_no);
            try {
                validate_date(n.id, n.month, n.year);
            } catch (const DataError& err) {
                throw ParseError(err.what(), line_no);
            }
            out.push_back(std::move(n));
        }
    }
    return out;
}

} // namespace panograph
