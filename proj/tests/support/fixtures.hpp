#pragma once

#include "roam/geo.hpp"
#include "roam/panograph.hpp"
#include "roam/roadnet.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace roam::fixtures {

// ---------------------------------------------------------------------------
// Coordinates frozen from an independent spherical-geometry oracle
// (R = 6,371,000 m). Inputs only; expected values live in the tests.
// ---------------------------------------------------------------------------

// Three panoramas due east of each other, 7.5 m apart, on one road.
inline constexpr geo::GeoPoint kCollinearP0{37.54, -122.30};
inline constexpr geo::GeoPoint kCollinearP1{37.53999999996949, -122.29991493665557};
inline constexpr geo::GeoPoint kCollinearP2{37.539999999938985, -122.29982987331113};

// Perpendicular ways meeting at J; a is 20 m west on the EW way, b is 22 m
// north on the NS way: road path a->J->b is 42 m, straight line ~29.7 m.
inline constexpr geo::GeoPoint kJunction{37.54, -122.30};
inline constexpr geo::GeoPoint kJunctionA{37.53999999978305, -122.30022683558514};
inline constexpr geo::GeoPoint kJunctionB{37.5401978507533, -122.30000000000001};
inline constexpr geo::GeoPoint kJunctionWestEnd{37.53999999804751, -122.30068050675538};
inline constexpr geo::GeoPoint kJunctionEastEnd{37.53999999804751, -122.29931949324458};
inline constexpr geo::GeoPoint kJunctionNorthEnd{37.54053959296355, -122.30000000000001};
inline constexpr geo::GeoPoint kJunctionSouthEnd{37.53946040703645, -122.30000000000001};

// Pairs on one east-west road through (37.541, -122.301).
inline constexpr geo::GeoPoint kPairBase{37.541, -122.301};
inline constexpr geo::GeoPoint kPairEast7_5{37.540999999969486, -122.3009149355147};
inline constexpr geo::GeoPoint kPairEast60{37.54099999804743, -122.30031948411761};
// 2 m northeast of kPairBase (temporal twin position).
inline constexpr geo::GeoPoint kPairTwin2m{37.541012718327025, -122.30098396008412};

// OSM XML fixtures --------------------------------------------------------

// One residential way with 3 nodes (2 segments) plus one footway (filtered).
std::string osm_two_ways();

// 5x5 intersection grid, 10 residential ways, 4 segments each: 40 segments.
std::string osm_ten_way_grid();

// The perpendicular-ways fixture around kJunction.
std::string osm_junction_cross();

// A single 140 m east-west residential way through kPairBase and its pairs.
std::string osm_single_road();

// Synthetic city ----------------------------------------------------------

struct City {
    std::string osm_xml;
    std::string metadata_jsonl;
    std::vector<panograph::PanoNode> nodes;
    geo::BBox bbox;
    panograph::GraphConfig graph_config() const;
};

// Full-size fixture: a 6x6-street district in the training band plus a small
// district below the 10% spatiotemporal cut; >= 1000 panorama nodes with
// temporal twins and 2023/2024 holdout captures.
City make_city();

// Small deterministic town (a crossing, ~15 nodes) for golden-file tests.
City make_town();

} // namespace roam::fixtures
