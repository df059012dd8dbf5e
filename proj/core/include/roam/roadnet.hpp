#pragma once

#include "roam/geo.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace roam::roadnet {

struct RoadSegment {
    uint32_t id = 0; // dense, assigned in parse order
    geo::GeoPoint a;
    geo::GeoPoint b;
    int64_t way_id = 0;
    std::string highway_class;
};

// Highway classes kept when filtering an OSM extract. Everything else
// (footways, cycleways, paths, ...) is discarded.
const std::vector<std::string>& default_drivable_allowlist();

struct RoadNetConfig {
    std::vector<std::string> drivable_allowlist = default_drivable_allowlist();
    std::optional<geo::BBox> bbox; // segments clipped to this box when set
};

// Immutable drivable road network with a uniform spatial grid over segments.
// All queries are const and safe for unrestricted parallel use.
class RoadNetwork {
public:
    // Accepts three formats, detected from content:
    //  - OSM XML subset: <node id lat lon>, <way id> + <nd ref> + <tag k v>
    //  - GeoJSON FeatureCollection of LineStrings with a "highway" property
    //  - this class's own to_json() output
    // Throws ParseError on malformed input, DataError when nothing drivable
    // remains after filtering.
    static RoadNetwork parse(std::string_view doc, const RoadNetConfig& cfg = {});

    explicit RoadNetwork(std::vector<RoadSegment> segments);

    const std::vector<RoadSegment>& segments() const { return segments_; }
    double segment_length_m(uint32_t segment_id) const { return seg_len_[segment_id]; }

    struct NearestHit {
        double distance_m = 0.0;
        uint32_t segment_id = 0;
    };
    // Globally minimal point-to-segment distance; ties broken by lowest
    // segment id. Matches an exhaustive scan exactly.
    NearestHit nearest_centerline(const geo::GeoPoint& p) const;

    // True iff both points snap to segments within snap_tol_m and a walk along
    // connected segments of total length <= max_len_m joins the snap points.
    // Symmetric in (a, b). Unsnappable points yield false, not an error.
    bool road_path_exists(const geo::GeoPoint& a, const geo::GeoPoint& b,
                          double max_len_m, double snap_tol_m) const;

    // Documented JSON re-serialization (fixtures, debugging). Parsing the
    // output with the same config reproduces an identical network.
    std::string to_json() const;

private:
    struct Snap {
        double distance_m;
        uint32_t segment_id;
        double t; // position along the segment, 0 at a, 1 at b
    };
    Snap snap_point(const geo::GeoPoint& p) const;
    void build_index();

    std::vector<RoadSegment> segments_;
    std::vector<double> seg_len_;

    // Junction graph: segment endpoints merged on quantized coordinates.
    std::vector<geo::GeoPoint> junction_pos_;
    std::vector<std::pair<uint32_t, uint32_t>> seg_junctions_; // per segment (at a, at b)
    std::vector<std::vector<std::pair<uint32_t, uint32_t>>> junction_adj_; // (neighbor junction, segment id)

    // Uniform grid over segment bounding boxes, cell edge kGridCellM. The
    // cell size matches the 50 m maximum move, so a move-radius query touches
    // at most 9 cells.
    static constexpr double kGridCellM = 50.0;
    double cell_lat_deg_ = 0.0;
    double cell_lon_deg_ = 0.0;
    int32_t cell_i_min_ = 0, cell_i_max_ = 0, cell_j_min_ = 0, cell_j_max_ = 0;
    std::unordered_map<uint64_t, std::vector<uint32_t>> grid_;

    std::pair<int32_t, int32_t> cell_of(const geo::GeoPoint& p) const;
    const std::vector<uint32_t>* cell_segments(int32_t ci, int32_t cj) const;
};

} // namespace roam::roadnet
