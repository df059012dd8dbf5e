#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

// Minimal parser for the OSM XML subset this project consumes:
// <node id lat lon>, <way id> with <nd ref> children and <tag k v> children.
// Unknown elements (bounds, relations, ...) are skipped. Tracks line numbers
// for error reporting.

namespace roam::osmxml {

struct OsmNode {
    int64_t id = 0;
    double lat = 0.0;
    double lon = 0.0;
};

struct OsmWay {
    int64_t id = 0;
    std::vector<int64_t> node_refs;
    std::map<std::string, std::string> tags;
};

struct OsmDocument {
    std::vector<OsmNode> nodes;
    std::vector<OsmWay> ways;
};

// Throws roam::ParseError with a line number on malformed input.
OsmDocument parse_osm_xml(std::string_view text);

} // namespace roam::osmxml
