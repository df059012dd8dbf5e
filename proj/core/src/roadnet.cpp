#include "roam/roadnet.hpp"

#include "osm_xml.hpp"
#include "roam/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <unordered_set>

namespace roam::roadnet {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr double kPi = 3.14159265358979323846;

uint64_t cell_key(int32_t i, int32_t j) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(i)) << 32) |
           static_cast<uint32_t>(j);
}

int64_t quantize_e7(double deg) { return std::llround(deg * 1e7); }

// Liang-Barsky clip of segment (a, b) against the box; returns false when the
// segment lies fully outside.
bool clip_to_bbox(const geo::BBox& box, geo::GeoPoint& a, geo::GeoPoint& b) {
    const double dx = b.lon - a.lon;
    const double dy = b.lat - a.lat;
    double t0 = 0.0, t1 = 1.0;

    auto clip_edge = [&](double p, double q) {
        if (p == 0.0) return q >= 0.0;
        const double r = q / p;
        if (p < 0.0) {
            if (r > t1) return false;
            if (r > t0) t0 = r;
        } else {
            if (r < t0) return false;
            if (r < t1) t1 = r;
        }
        return true;
    };

    if (!clip_edge(-dx, a.lon - box.min.lon)) return false;
    if (!clip_edge(dx, box.max.lon - a.lon)) return false;
    if (!clip_edge(-dy, a.lat - box.min.lat)) return false;
    if (!clip_edge(dy, box.max.lat - a.lat)) return false;

    const geo::GeoPoint na{a.lat + t1 * dy, a.lon + t1 * dx};
    if (t0 > 0.0) a = {a.lat + t0 * dy, a.lon + t0 * dx};
    if (t1 < 1.0) b = na;
    return true;
}

std::size_t line_of_byte(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

json parse_json_doc(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), line_of_byte(text, e.byte));
    }
}

std::vector<RoadSegment> segments_from_osm_xml(std::string_view text,
                                               const RoadNetConfig& cfg) {
    const auto doc = osmxml::parse_osm_xml(text);
    std::unordered_map<int64_t, geo::GeoPoint> node_pos;
    node_pos.reserve(doc.nodes.size());
    for (const auto& n : doc.nodes) node_pos[n.id] = {n.lat, n.lon};

    const std::set<std::string> allow(cfg.drivable_allowlist.begin(),
                                      cfg.drivable_allowlist.end());
    std::vector<RoadSegment> out;
    for (const auto& way : doc.ways) {
        auto hw = way.tags.find("highway");
        if (hw == way.tags.end() || !allow.contains(hw->second)) continue;
        for (std::size_t i = 0; i + 1 < way.node_refs.size(); ++i) {
            auto ita = node_pos.find(way.node_refs[i]);
            auto itb = node_pos.find(way.node_refs[i + 1]);
            // Ways clipped by the extract may reference nodes that are not
            // present; the chain simply breaks there.
            if (ita == node_pos.end() || itb == node_pos.end()) continue;
            out.push_back({0, ita->second, itb->second, way.id, hw->second});
        }
    }
    return out;
}

std::vector<RoadSegment> segments_from_geojson(const json& doc, const RoadNetConfig& cfg) {
    const std::set<std::string> allow(cfg.drivable_allowlist.begin(),
                                      cfg.drivable_allowlist.end());
    std::vector<RoadSegment> out;
    const auto& features = doc.at("features");
    if (!features.is_array()) throw ParseError("GeoJSON 'features' is not an array");

    int64_t fallback_id = 0;
    for (const auto& feature : features) {
        const int64_t feature_index = fallback_id++;
        if (!feature.contains("geometry") || feature["geometry"].is_null()) continue;
        const auto& geom = feature["geometry"];
        if (geom.value("type", "") != "LineString") continue;

        std::string highway;
        int64_t way_id = feature_index;
        if (feature.contains("properties") && feature["properties"].is_object()) {
            const auto& props = feature["properties"];
            highway = props.value("highway", "");
            if (props.contains("id") && props["id"].is_number_integer())
                way_id = props["id"].get<int64_t>();
            else if (props.contains("osm_id") && props["osm_id"].is_number_integer())
                way_id = props["osm_id"].get<int64_t>();
        }
        if (!allow.contains(highway)) continue;

        const auto& coords = geom.at("coordinates");
        for (std::size_t i = 0; i + 1 < coords.size(); ++i) {
            const auto& ca = coords[i];
            const auto& cb = coords[i + 1];
            if (ca.size() < 2 || cb.size() < 2)
                throw ParseError("LineString coordinate with fewer than 2 values");
            geo::GeoPoint a{ca[1].get<double>(), ca[0].get<double>()};
            geo::GeoPoint b{cb[1].get<double>(), cb[0].get<double>()};
            out.push_back({0, a, b, way_id, highway});
        }
    }
    return out;
}

std::vector<RoadSegment> segments_from_reserialized(const json& doc,
                                                    const RoadNetConfig& cfg) {
    const std::set<std::string> allow(cfg.drivable_allowlist.begin(),
                                      cfg.drivable_allowlist.end());
    std::vector<RoadSegment> out;
    for (const auto& s : doc.at("segments")) {
        RoadSegment seg;
        seg.way_id = s.at("way_id").get<int64_t>();
        seg.highway_class = s.at("highway").get<std::string>();
        seg.a = {s.at("a")[0].get<double>(), s.at("a")[1].get<double>()};
        seg.b = {s.at("b")[0].get<double>(), s.at("b")[1].get<double>()};
        if (!allow.contains(seg.highway_class)) continue;
        out.push_back(std::move(seg));
    }
    return out;
}

} // namespace

const std::vector<std::string>& default_drivable_allowlist() {
    static const std::vector<std::string> allow = {
        "motorway",      "trunk",         "primary",        "secondary",
        "tertiary",      "residential",   "unclassified",   "service",
        "living_street", "motorway_link", "trunk_link",     "primary_link",
        "secondary_link", "tertiary_link",
    };
    return allow;
}

RoadNetwork RoadNetwork::parse(std::string_view doc, const RoadNetConfig& cfg) {
    std::size_t first = doc.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) throw ParseError("empty document", 1);

    std::vector<RoadSegment> raw;
    if (doc[first] == '<') {
        raw = segments_from_osm_xml(doc, cfg);
    } else if (doc[first] == '{') {
        const json j = parse_json_doc(doc);
        if (j.value("type", "") == "FeatureCollection")
            raw = segments_from_geojson(j, cfg);
        else if (j.contains("segments"))
            raw = segments_from_reserialized(j, cfg);
        else
            throw ParseError("JSON document is neither GeoJSON nor a serialized road network");
    } else {
        throw ParseError("unrecognized document format", line_of_byte(doc, first));
    }

    std::vector<RoadSegment> kept;
    kept.reserve(raw.size());
    for (auto& seg : raw) {
        if (cfg.bbox && !clip_to_bbox(*cfg.bbox, seg.a, seg.b)) continue;
        if (quantize_e7(seg.a.lat) == quantize_e7(seg.b.lat) &&
            quantize_e7(seg.a.lon) == quantize_e7(seg.b.lon))
            continue; // degenerate, possibly after clipping
        seg.id = static_cast<uint32_t>(kept.size());
        kept.push_back(std::move(seg));
    }

    if (kept.empty())
        throw DataError("empty road network: no drivable ways remain after filtering");
    return RoadNetwork(std::move(kept));
}

RoadNetwork::RoadNetwork(std::vector<RoadSegment> segments)
    : segments_(std::move(segments)) {
    if (segments_.empty()) throw DataError("empty road network");
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        segments_[i].id = static_cast<uint32_t>(i);
        if (segments_[i].a == segments_[i].b)
            throw DataError("degenerate road segment " + std::to_string(i));
    }
    build_index();
}

void RoadNetwork::build_index() {
    seg_len_.resize(segments_.size());
    seg_junctions_.resize(segments_.size());

    std::unordered_map<uint64_t, uint32_t> junction_of;
    auto junction_id = [&](const geo::GeoPoint& p) {
        const uint64_t key =
            (static_cast<uint64_t>(static_cast<uint32_t>(quantize_e7(p.lat))) << 32) |
            static_cast<uint32_t>(static_cast<int32_t>(quantize_e7(p.lon)));
        auto [it, inserted] = junction_of.try_emplace(key, junction_pos_.size());
        if (inserted) junction_pos_.push_back(p);
        return it->second;
    };

    double lat_lo = 90.0, lat_hi = -90.0, lon_lo = 180.0, lon_hi = -180.0;
    for (auto& seg : segments_) {
        seg_len_[seg.id] = geo::haversine_m(seg.a, seg.b);
        seg_junctions_[seg.id] = {junction_id(seg.a), junction_id(seg.b)};
        lat_lo = std::min({lat_lo, seg.a.lat, seg.b.lat});
        lat_hi = std::max({lat_hi, seg.a.lat, seg.b.lat});
        lon_lo = std::min({lon_lo, seg.a.lon, seg.b.lon});
        lon_hi = std::max({lon_hi, seg.a.lon, seg.b.lon});
    }

    junction_adj_.resize(junction_pos_.size());
    for (const auto& seg : segments_) {
        const auto [ja, jb] = seg_junctions_[seg.id];
        junction_adj_[ja].push_back({jb, seg.id});
        junction_adj_[jb].push_back({ja, seg.id});
    }

    const double center_lat = (lat_lo + lat_hi) / 2.0;
    cell_lat_deg_ = kGridCellM / geo::kMetersPerDegLat;
    cell_lon_deg_ =
        kGridCellM / (geo::kMetersPerDegLat * std::max(0.01, std::cos(center_lat * kPi / 180.0)));

    cell_i_min_ = cell_j_min_ = std::numeric_limits<int32_t>::max();
    cell_i_max_ = cell_j_max_ = std::numeric_limits<int32_t>::min();
    for (const auto& seg : segments_) {
        const auto [ia, ja] = cell_of(seg.a);
        const auto [ib, jb] = cell_of(seg.b);
        const int32_t i0 = std::min(ia, ib), i1 = std::max(ia, ib);
        const int32_t j0 = std::min(ja, jb), j1 = std::max(ja, jb);
        for (int32_t i = i0; i <= i1; ++i)
            for (int32_t j = j0; j <= j1; ++j)
                grid_[cell_key(i, j)].push_back(seg.id);
        cell_i_min_ = std::min(cell_i_min_, i0);
        cell_i_max_ = std::max(cell_i_max_, i1);
        cell_j_min_ = std::min(cell_j_min_, j0);
        cell_j_max_ = std::max(cell_j_max_, j1);
    }
}

std::pair<int32_t, int32_t> RoadNetwork::cell_of(const geo::GeoPoint& p) const {
    return {static_cast<int32_t>(std::floor(p.lat / cell_lat_deg_)),
            static_cast<int32_t>(std::floor(p.lon / cell_lon_deg_))};
}

const std::vector<uint32_t>* RoadNetwork::cell_segments(int32_t ci, int32_t cj) const {
    auto it = grid_.find(cell_key(ci, cj));
    return it == grid_.end() ? nullptr : &it->second;
}

RoadNetwork::NearestHit RoadNetwork::nearest_centerline(const geo::GeoPoint& p) const {
    const auto hit = snap_point(p);
    return {hit.distance_m, hit.segment_id};
}

RoadNetwork::Snap RoadNetwork::snap_point(const geo::GeoPoint& p) const {
    const auto [ci, cj] = cell_of(p);

    double best = std::numeric_limits<double>::infinity();
    uint32_t best_id = 0;

    auto consider = [&](uint32_t sid) {
        const double d = geo::point_to_segment_m(p, segments_[sid].a, segments_[sid].b);
        if (d < best || (d == best && sid < best_id)) {
            best = d;
            best_id = sid;
        }
    };

    // Conservative meters-per-cell-step lower bound at this query latitude.
    const double cos_p = std::max(0.01, std::cos(p.lat * kPi / 180.0));
    const double cell_floor_m =
        0.999 * std::min(cell_lat_deg_ * geo::kMetersPerDegLat,
                         cell_lon_deg_ * geo::kMetersPerDegLat * cos_p);

    const int32_t k_max = std::max(
        {std::abs(ci - cell_i_min_), std::abs(ci - cell_i_max_),
         std::abs(cj - cell_j_min_), std::abs(cj - cell_j_max_)});

    for (int32_t k = 0; k <= k_max; ++k) {
        if (std::isfinite(best) && static_cast<double>(k - 1) * cell_floor_m > best + 1e-6)
            break;
        // Ring at Chebyshev distance k, clamped to the populated extent.
        for (int32_t i = ci - k; i <= ci + k; ++i) {
            if (i < cell_i_min_ || i > cell_i_max_) continue;
            const bool edge_row = (i == ci - k || i == ci + k);
            const int32_t step = edge_row ? 1 : 2 * k;
            for (int32_t j = cj - k; j <= cj + k; j += std::max(step, 1)) {
                if (j < cell_j_min_ || j > cell_j_max_) continue;
                if (const auto* cell = cell_segments(i, j))
                    for (uint32_t sid : *cell) consider(sid);
            }
        }
    }

    // t along the best segment, for path queries.
    const auto& seg = segments_[best_id];
    const auto [ax, ay] = geo::local_offset_m(p, seg.a);
    const auto [bx, by] = geo::local_offset_m(p, seg.b);
    const double dx = bx - ax, dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? -(ax * dx + ay * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return {best, best_id, t};
}

bool RoadNetwork::road_path_exists(const geo::GeoPoint& a, const geo::GeoPoint& b,
                                   double max_len_m, double snap_tol_m) const {
    if (max_len_m <= 0.0) throw DataError("road_path_exists: max_len_m must be positive");

    const Snap sa = snap_point(a);
    if (sa.distance_m > snap_tol_m) return false;
    const Snap sb = snap_point(b);
    if (sb.distance_m > snap_tol_m) return false;

    if (sa.segment_id == sb.segment_id &&
        std::abs(sa.t - sb.t) * seg_len_[sa.segment_id] <= max_len_m)
        return true;

    // Dijkstra over junctions, seeded with the along-segment costs from the
    // two snap points, cut off at max_len_m.
    const auto [ja0, ja1] = seg_junctions_[sa.segment_id];
    const auto [jb0, jb1] = seg_junctions_[sb.segment_id];
    const double la = seg_len_[sa.segment_id];
    const double lb = seg_len_[sb.segment_id];

    std::unordered_map<uint32_t, double> dist;
    using QE = std::pair<double, uint32_t>;
    std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;

    auto relax = [&](uint32_t j, double d) {
        if (d > max_len_m) return;
        auto it = dist.find(j);
        if (it == dist.end() || d < it->second) {
            dist[j] = d;
            pq.push({d, j});
        }
    };
    relax(ja0, sa.t * la);
    relax(ja1, (1.0 - sa.t) * la);

    auto goal_cost = [&](uint32_t j) {
        double g = std::numeric_limits<double>::infinity();
        if (j == jb0) g = sb.t * lb;
        if (j == jb1) g = std::min(g, (1.0 - sb.t) * lb);
        return g;
    };

    while (!pq.empty()) {
        const auto [d, j] = pq.top();
        pq.pop();
        if (d > max_len_m) break;
        auto it = dist.find(j);
        if (it != dist.end() && d > it->second) continue;
        if (d + goal_cost(j) <= max_len_m) return true;
        for (const auto& [nj, sid] : junction_adj_[j]) relax(nj, d + seg_len_[sid]);
    }
    return false;
}

std::string RoadNetwork::to_json() const {
    ordered_json j;
    j["format"] = "roam-roadnet";
    j["version"] = 1;
    j["segments"] = ordered_json::array();
    for (const auto& seg : segments_) {
        ordered_json s;
        s["id"] = seg.id;
        s["way_id"] = seg.way_id;
        s["highway"] = seg.highway_class;
        s["a"] = {seg.a.lat, seg.a.lon};
        s["b"] = {seg.b.lat, seg.b.lon};
        j["segments"].push_back(std::move(s));
    }
    return j.dump(2) + "\n";
}

} // namespace roam::roadnet
