#pragma once

#include "roam/geo.hpp"
#include "roam/roadnet.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace roam::panograph {

// One panorama capture. Metadata ids are nonnegative integers; they drive
// neighbor ordering, shard assignment and all deterministic tie-breaks.
struct PanoNode {
    uint64_t id = 0;
    geo::GeoPoint pos;
    int month = 1;             // 1..12
    int year = 2000;           // 2000..2030
    double base_heading = 0.0; // true-north heading of the equirect center column
    std::string image_ref;
};

enum class Split : uint8_t { train = 0, test_temporal = 1, test_spatiotemporal = 2 };

const char* to_string(Split s);
Split split_from_string(std::string_view s);

struct GraphConfig {
    geo::BBox bbox;
    double max_move_m = 50.0;           // action-vocabulary distance cap
    double temporal_link_radius_m = 5.0;
    double snap_tol_m = 15.0;
    unsigned threads = 0;               // 0 = hardware concurrency
};

struct DropReport {
    struct Entry {
        uint64_t id;
        std::string reason;
    };
    std::size_t input_count = 0;
    std::size_t outside_bbox = 0;
    std::size_t unsnapped = 0;
    std::vector<Entry> entries;
};

// Undirected spatial + temporal edges over panorama nodes. Immutable after
// construction apart from split tagging; safe for parallel reads.
class NavGraph {
public:
    using Edge = std::pair<uint32_t, uint32_t>; // node indices, first < second

    NavGraph(std::vector<PanoNode> nodes, std::vector<Edge> spatial_edges,
             std::vector<Edge> temporal_edges, geo::BBox bbox);

    std::size_t size() const { return nodes_.size(); }
    const PanoNode& node(uint32_t index) const { return nodes_[index]; }
    const std::vector<PanoNode>& nodes() const { return nodes_; }
    const geo::BBox& bbox() const { return bbox_; }

    // Index of the node with this id, or throws DataError.
    uint32_t index_of(uint64_t id) const;
    bool contains(uint64_t id) const { return by_id_.contains(id); }

    const std::vector<uint32_t>& spatial_neighbors(uint32_t index) const {
        return spatial_nbrs_[index];
    }
    const std::vector<uint32_t>& temporal_neighbors(uint32_t index) const {
        return temporal_nbrs_[index];
    }
    // Union of spatial and temporal neighbors, ascending, deduplicated.
    const std::vector<uint32_t>& neighbors(uint32_t index) const { return all_nbrs_[index]; }

    bool has_edge(uint32_t u, uint32_t v) const;

    const std::vector<Edge>& spatial_edges() const { return spatial_edges_; }
    const std::vector<Edge>& temporal_edges() const { return temporal_edges_; }

    Split split(uint32_t index) const { return splits_[index]; }
    void set_split(uint32_t index, Split s) { splits_[index] = s; }

    // All node indices within radius_m of p, ascending.
    std::vector<uint32_t> nodes_within(const geo::GeoPoint& p, double radius_m) const;

    std::string to_json() const;
    static NavGraph from_json(std::string_view text);

private:
    void build_adjacency();
    void build_grid();

    std::vector<PanoNode> nodes_; // ascending id
    std::vector<Edge> spatial_edges_;
    std::vector<Edge> temporal_edges_;
    std::vector<Split> splits_;
    geo::BBox bbox_;

    std::unordered_map<uint64_t, uint32_t> by_id_;
    std::vector<std::vector<uint32_t>> spatial_nbrs_;
    std::vector<std::vector<uint32_t>> temporal_nbrs_;
    std::vector<std::vector<uint32_t>> all_nbrs_;

    double cell_lat_deg_ = 0.0;
    double cell_lon_deg_ = 0.0;
    std::unordered_map<uint64_t, std::vector<uint32_t>> grid_;
};

// Builds the graph: drops nodes outside the bbox or farther than snap_tol_m
// from the road network (reported), then links
//   spatial:  haversine <= max_move_m AND a road path of length <= max_move_m
//   temporal: haversine <= temporal_link_radius_m AND different capture date.
// Throws DataError when no nodes survive.
NavGraph build_graph(std::vector<PanoNode> nodes, const roadnet::RoadNetwork& net,
                     const GraphConfig& cfg, DropReport* report = nullptr);

// Tags every node: test_temporal when year is held out (any location),
// else test_spatiotemporal when below the latitude line cutting off the
// bottom spatial_frac of the bbox height, else train.
void split_graph(NavGraph& g, const std::vector<int>& holdout_years, double spatial_frac);

// Panorama metadata: JSONL objects or CSV with header. Columns: id, lat, lon,
// month, year, image_path; optional heading. Throws ParseError with the
// offending line.
std::vector<PanoNode> parse_metadata(std::string_view text);

} // namespace roam::panograph
