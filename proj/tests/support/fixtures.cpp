#include "fixtures.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace roam::fixtures {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9f", v);
    return buf;
}

struct XmlBuilder {
    std::ostringstream out;
    XmlBuilder() { out << "<?xml version=\"1.0\"?>\n<osm version=\"0.6\">\n"; }
    void node(int64_t id, double lat, double lon) {
        out << "  <node id=\"" << id << "\" lat=\"" << fmt_coord(lat) << "\" lon=\""
            << fmt_coord(lon) << "\"/>\n";
    }
    void way(int64_t id, const std::vector<int64_t>& refs, const std::string& highway) {
        out << "  <way id=\"" << id << "\">\n";
        for (int64_t r : refs) out << "    <nd ref=\"" << r << "\"/>\n";
        out << "    <tag k=\"highway\" v=\"" << highway << "\"/>\n  </way>\n";
    }
    std::string finish() {
        out << "</osm>\n";
        return out.str();
    }
};

double lat_plus_m(double lat, double meters) { return lat + meters / geo::kMetersPerDegLat; }
double lon_plus_m(double lat, double lon, double meters) {
    return lon + meters / (geo::kMetersPerDegLat * std::cos(lat * kPi / 180.0));
}

} // namespace

std::string osm_two_ways() {
    XmlBuilder x;
    x.node(1, 37.5410, -122.3010);
    x.node(2, 37.5410, -122.3005);
    x.node(3, 37.5410, -122.3000);
    x.node(4, 37.5415, -122.3010);
    x.node(5, 37.5415, -122.3000);
    x.way(100, {1, 2, 3}, "residential");
    x.way(101, {4, 5}, "footway");
    return x.finish();
}

std::string osm_ten_way_grid() {
    XmlBuilder x;
    const double lat0 = 37.5400, lon0 = -122.3100;
    auto id_of = [](int i, int j) { return static_cast<int64_t>(10 + i * 10 + j); };
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            x.node(id_of(i, j), lat_plus_m(lat0, 100.0 * i),
                   lon_plus_m(lat0, lon0, 100.0 * j));
    for (int i = 0; i < 5; ++i) {
        std::vector<int64_t> refs;
        for (int j = 0; j < 5; ++j) refs.push_back(id_of(i, j));
        x.way(200 + i, refs, "residential");
    }
    for (int j = 0; j < 5; ++j) {
        std::vector<int64_t> refs;
        for (int i = 0; i < 5; ++i) refs.push_back(id_of(i, j));
        x.way(300 + j, refs, "residential");
    }
    return x.finish();
}

std::string osm_junction_cross() {
    XmlBuilder x;
    x.node(1, kJunctionWestEnd.lat, kJunctionWestEnd.lon);
    x.node(2, kJunction.lat, kJunction.lon);
    x.node(3, kJunctionEastEnd.lat, kJunctionEastEnd.lon);
    x.node(4, kJunctionNorthEnd.lat, kJunctionNorthEnd.lon);
    x.node(5, kJunctionSouthEnd.lat, kJunctionSouthEnd.lon);
    x.way(100, {1, 2, 3}, "residential");
    x.way(101, {4, 2, 5}, "residential");
    return x.finish();
}

std::string osm_single_road() {
    XmlBuilder x;
    const double lat = kPairBase.lat;
    x.node(1, lat, lon_plus_m(lat, kPairBase.lon, -40.0));
    x.node(2, lat, lon_plus_m(lat, kPairBase.lon, 100.0));
    x.way(100, {1, 2}, "residential");
    return x.finish();
}

panograph::GraphConfig City::graph_config() const {
    panograph::GraphConfig cfg;
    cfg.bbox = bbox;
    return cfg;
}

namespace {

std::string metadata_from_nodes(const std::vector<panograph::PanoNode>& nodes) {
    std::ostringstream out;
    for (const auto& n : nodes) {
        out << "{\"id\":" << n.id << ",\"lat\":" << fmt_coord(n.pos.lat)
            << ",\"lon\":" << fmt_coord(n.pos.lon) << ",\"month\":" << n.month
            << ",\"year\":" << n.year << ",\"heading\":" << n.base_heading
            << ",\"image_path\":\"\"}\n";
    }
    return out.str();
}

// One rectangular street district. EW streets indexed i, NS streets j;
// intersections carry OSM ids base + i*100 + j. Panoramas run along every
// street at pano_step_m; NS panoramas start half a step in to avoid exact
// duplicates at intersections.
void add_district(XmlBuilder& xml, std::vector<panograph::PanoNode>& nodes,
                  int64_t osm_base, uint64_t pano_base, double lat0, double lon0,
                  int n_ew, int n_ns, double gap_m, double pano_step_m,
                  bool with_holdout_years) {
    auto inter_id = [&](int i, int j) { return osm_base + i * 100 + j; };
    const double width_m = gap_m * (n_ns - 1);
    const double height_m = gap_m * (n_ew - 1);

    for (int i = 0; i < n_ew; ++i)
        for (int j = 0; j < n_ns; ++j)
            xml.node(inter_id(i, j), lat_plus_m(lat0, gap_m * i),
                     lon_plus_m(lat0, lon0, gap_m * j));
    for (int i = 0; i < n_ew; ++i) {
        std::vector<int64_t> refs;
        for (int j = 0; j < n_ns; ++j) refs.push_back(inter_id(i, j));
        xml.way(osm_base + 9000 + i, refs, "residential");
    }
    for (int j = 0; j < n_ns; ++j) {
        std::vector<int64_t> refs;
        for (int i = 0; i < n_ew; ++i) refs.push_back(inter_id(i, j));
        xml.way(osm_base + 9500 + j, refs, "residential");
    }

    uint64_t next_id = pano_base;
    auto push_pano = [&](geo::GeoPoint pos) {
        panograph::PanoNode n;
        n.id = next_id++;
        n.pos = pos;
        n.month = 1 + static_cast<int>(n.id % 12);
        n.year = 2008 + static_cast<int>(n.id % 13); // 2008..2020
        if (with_holdout_years && n.id % 37 == 0) n.year = 2023 + static_cast<int>(n.id % 2);
        nodes.push_back(n);

        // Temporal twin ~1.5 m away, one year later, for every 10th panorama.
        if (n.id % 10 == 0) {
            panograph::PanoNode t = n;
            t.id = n.id + 500000;
            t.pos = geo::destination_point(n.pos, 45.0, 1.5);
            t.year = std::min(n.year + 1, 2022);
            t.month = 1 + static_cast<int>((n.id + 5) % 12);
            nodes.push_back(t);
        }
    };

    for (int i = 0; i < n_ew; ++i) {
        const double lat = lat_plus_m(lat0, gap_m * i);
        for (double d = 0.0; d <= width_m; d += pano_step_m)
            push_pano({lat, lon_plus_m(lat0, lon0, d)});
    }
    for (int j = 0; j < n_ns; ++j) {
        const double lon = lon_plus_m(lat0, lon0, gap_m * j);
        for (double d = pano_step_m / 2.0; d <= height_m; d += pano_step_m)
            push_pano({lat_plus_m(lat0, d), lon});
    }
}

} // namespace

City make_city() {
    City city;
    city.bbox = {{37.50555, -122.34916}, {37.57277, -122.249168}};

    XmlBuilder xml;
    std::vector<panograph::PanoNode> nodes;
    // Training district: well above the 10% latitude cut (37.512272).
    add_district(xml, nodes, 1000, 1, 37.545, -122.310, 6, 6, 200.0, 12.0, true);
    // Spatiotemporal district: below the cut, holdout years suppressed so the
    // split is decided purely by latitude.
    add_district(xml, nodes, 500000, 700000, 37.5060, -122.300, 3, 3, 150.0, 12.0, false);

    city.osm_xml = xml.finish();
    city.nodes = nodes;
    city.metadata_jsonl = metadata_from_nodes(nodes);
    return city;
}

City make_town() {
    City town;
    town.bbox = {{37.5200, -122.3100}, {37.5300, -122.3000}};

    XmlBuilder xml;
    std::vector<panograph::PanoNode> nodes;

    // One crossing at (37.525, -122.305) with 4 arms of 100 m.
    const double clat = 37.5250, clon = -122.3050;
    xml.node(1, clat, clon);
    xml.node(2, clat, lon_plus_m(clat, clon, -100.0));
    xml.node(3, clat, lon_plus_m(clat, clon, 100.0));
    xml.node(4, lat_plus_m(clat, 100.0), clon);
    xml.node(5, lat_plus_m(clat, -100.0), clon);
    xml.way(10, {2, 1, 3}, "residential");
    xml.way(11, {4, 1, 5}, "residential");
    // A short street in the spatiotemporal band (below 37.5210).
    xml.node(6, 37.5205, lon_plus_m(37.5205, clon, -30.0));
    xml.node(7, 37.5205, lon_plus_m(37.5205, clon, 30.0));
    xml.way(12, {6, 7}, "residential");

    uint64_t id = 100;
    auto pano = [&](geo::GeoPoint pos, int month, int year) {
        panograph::PanoNode n;
        n.id = id++;
        n.pos = pos;
        n.month = month;
        n.year = year;
        nodes.push_back(n);
    };
    for (int k = -3; k <= 3; ++k)
        pano({clat, lon_plus_m(clat, clon, 10.0 * k)}, 1 + (k + 3), 2012 + (k + 3) % 5);
    for (int k = 1; k <= 3; ++k) {
        pano({lat_plus_m(clat, 10.0 * k), clon}, k, 2014);
        pano({lat_plus_m(clat, -10.0 * k), clon}, k + 3, 2015);
    }
    // Temporal twin of the crossing panorama.
    pano(geo::destination_point({clat, clon}, 45.0, 1.5), 7, 2019);
    // A 2023 capture (temporal holdout) on the east arm.
    pano({clat, lon_plus_m(clat, clon, 15.0)}, 6, 2023);
    // Two captures on the southern street (spatiotemporal band).
    pano({37.5205, lon_plus_m(37.5205, clon, -10.0)}, 3, 2016);
    pano({37.5205, lon_plus_m(37.5205, clon, 10.0)}, 9, 2017);

    town.osm_xml = xml.finish();
    town.nodes = nodes;
    town.metadata_jsonl = metadata_from_nodes(nodes);
    return town;
}

} // namespace roam::fixtures
