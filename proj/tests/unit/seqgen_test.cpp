#include "roam/seqgen.hpp"

#include "fixtures.hpp"
#include "roam/errors.hpp"
#include "roam/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace roam;
using panograph::NavGraph;
using panograph::PanoNode;
using seqgen::Action;

namespace {

const geo::BBox kArea{{37.50555, -122.34916}, {37.57277, -122.249168}};

PanoNode make_node(uint64_t id, geo::GeoPoint pos, int month = 1, int year = 2014) {
    PanoNode n;
    n.id = id;
    n.pos = pos;
    n.month = month;
    n.year = year;
    return n;
}

// Nodes spread far apart so only the explicit edges exist.
NavGraph graph_with_edges(std::size_t n, const std::vector<NavGraph::Edge>& edges) {
    std::vector<PanoNode> nodes;
    for (std::size_t i = 0; i < n; ++i)
        nodes.push_back(make_node(i + 1, {37.51 + 0.002 * static_cast<double>(i), -122.30}));
    return NavGraph(nodes, edges, {}, kArea);
}

// Independent oracle: recursive preorder enumeration of all simple paths,
// neighbors ascending, truncated to P afterwards.
void oracle_extend(const NavGraph& g, std::vector<uint32_t>& path, std::vector<bool>& used,
                   std::size_t max_len, std::vector<std::vector<uint32_t>>& out) {
    if (path.size() >= 2) out.push_back(path);
    if (path.size() == max_len) return;
    for (uint32_t v : g.neighbors(path.back())) {
        if (used[v]) continue;
        used[v] = true;
        path.push_back(v);
        oracle_extend(g, path, used, max_len, out);
        path.pop_back();
        used[v] = false;
    }
}

std::vector<std::vector<uint32_t>> oracle_paths(const NavGraph& g, uint64_t origin,
                                                uint32_t P, uint32_t L) {
    std::vector<uint32_t> path{g.index_of(origin)};
    std::vector<bool> used(g.size(), false);
    used[path[0]] = true;
    std::vector<std::vector<uint32_t>> all;
    oracle_extend(g, path, used, L, all);
    if (all.size() > P) all.resize(P);
    return all;
}

} // namespace

TEST_CASE("enumerate_paths on the A-B-C path graph") {
    const auto g = graph_with_edges(3, {{0, 1}, {1, 2}});
    const auto paths = seqgen::enumerate_paths(g, 1, {100, 3, false});
    REQUIRE(paths.size() == 2);
    CHECK(paths[0] == std::vector<uint32_t>{0, 1});
    CHECK(paths[1] == std::vector<uint32_t>{0, 1, 2});
}

TEST_CASE("enumerate_paths: isolated node, cap semantics, unknown origin") {
    const auto g = graph_with_edges(4, {{0, 1}, {0, 2}, {0, 3}});
    // From a leaf: [leaf,center] plus one extension per remaining leaf.
    CHECK(seqgen::enumerate_paths(g, 2, {100, 5, false}).size() == 3);

    // Star center with 3 leaves, L=2, P=2: exactly 2 paths.
    CHECK(seqgen::enumerate_paths(g, 1, {2, 2, false}).size() == 2);

    const auto iso = graph_with_edges(2, {});
    CHECK(seqgen::enumerate_paths(iso, 1, {10, 5, false}).empty());

    CHECK_THROWS_AS(seqgen::enumerate_paths(g, 999, {10, 5, false}), DataError);
    CHECK_THROWS_AS(seqgen::enumerate_paths(g, 1, {0, 5, false}), DataError);
    CHECK_THROWS_AS(seqgen::enumerate_paths(g, 1, {10, 1, false}), DataError);
}

TEST_CASE("enumerate_paths equals the exhaustive oracle on small graphs") {
    // A fixed battery of graphs up to 8 nodes, including dense ones.
    std::vector<std::vector<NavGraph::Edge>> graphs = {
        {{0, 1}, {1, 2}},
        {{0, 1}, {0, 2}, {0, 3}},
        {{0, 1}, {1, 2}, {2, 3}, {3, 0}},                        // cycle
        {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}, {4, 2}},        // two fused cycles
        {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 4}, {3, 4}, {3, 5}, {4, 5}},
    };
    auto rng = std::mt19937_64(5);
    // Plus random graphs on 8 nodes.
    for (int t = 0; t < 6; ++t) {
        std::vector<NavGraph::Edge> edges;
        for (uint32_t u = 0; u < 8; ++u)
            for (uint32_t v = u + 1; v < 8; ++v)
                if (rng::unit(rng) < 0.35) edges.push_back({u, v});
        graphs.push_back(edges);
    }

    for (const auto& edges : graphs) {
        const auto g = graph_with_edges(8, edges);
        for (const uint32_t P : {1u, 3u, 1000000u})
            for (const uint32_t L : {2u, 4u, 8u}) {
                for (uint64_t origin = 1; origin <= g.size(); ++origin) {
                    const auto fast = seqgen::enumerate_paths(g, origin, {P, L, false});
                    const auto slow = oracle_paths(g, origin, P, L);
                    CHECK(fast == slow);
                    CHECK(fast.size() <= P);
                    for (const auto& p : fast) CHECK(p.size() <= L);
                }
            }
    }
}

TEST_CASE("derive_action: identity, canonical temporal delta, frozen east fixture") {
    const auto n1 = make_node(1, fixtures::kPairBase, 9, 2014);
    const auto a_same = seqgen::derive_action(n1, n1);
    CHECK(a_same.distance_m == 0.0);
    CHECK(a_same.heading_deg == 0.0);
    CHECK(a_same.d_month == 0);
    CHECK(a_same.d_year == 0);

    // September 2014 -> December 2013: -9 months => d_year -1, d_month 3.
    const auto n2 = make_node(2, fixtures::kPairBase, 12, 2013);
    const auto back = seqgen::derive_action(n1, n2);
    CHECK(back.d_year == -1);
    CHECK(back.d_month == 3);
    CHECK(back.total_months() == -9);

    const auto east = make_node(3, fixtures::kPairEast7_5, 9, 2014);
    const auto a = seqgen::derive_action(n1, east);
    CHECK(a.distance_m == 7.5);
    CHECK(a.heading_deg == 90.0);

    const auto far = make_node(4, fixtures::kPairEast60, 9, 2014);
    CHECK_THROWS_AS(seqgen::derive_action(n1, far), DataError);
}

TEST_CASE("apply_temporal inverts derive_action's delta") {
    auto g = std::mt19937_64(17);
    for (int i = 0; i < 2000; ++i) {
        const int m1 = 1 + static_cast<int>(rng::bounded(g, 12));
        const int y1 = 2000 + static_cast<int>(rng::bounded(g, 31));
        const int m2 = 1 + static_cast<int>(rng::bounded(g, 12));
        const int y2 = 2000 + static_cast<int>(rng::bounded(g, 31));
        const auto from = make_node(1, fixtures::kPairBase, m1, y1);
        const auto to = make_node(2, fixtures::kPairBase, m2, y2);
        const auto act = seqgen::derive_action(from, to);
        CHECK(act.d_month >= 0);
        CHECK(act.d_month <= 11);
        const auto [m, y] = seqgen::apply_temporal(m1, y1, act);
        CHECK(m == m2);
        CHECK(y == y2);
    }
}

TEST_CASE("gen_lookaround: full permutation mode") {
    const auto node = make_node(1, fixtures::kPairBase, 9, 2014);
    const seqgen::HashViewTokenProvider views;
    const auto sentences = seqgen::gen_lookaround(node, views, {24, 0});
    REQUIRE(sentences.size() == 24);

    std::set<std::vector<double>> orderings;
    for (const auto& s : sentences) {
        REQUIRE(s.samples.size() == 4);
        std::vector<double> headings;
        std::set<double> unique;
        for (std::size_t i = 0; i < 4; ++i) {
            const auto& smp = s.samples[i];
            CHECK(smp.action.distance_m == 0.0); // look-around never moves
            CHECK(smp.action.d_month == 0);
            CHECK(smp.action.d_year == 0);
            CHECK(smp.pos == node.pos);
        }
        // Action i turns toward view i+1; recover the view order from the
        // first three actions plus the repeated last heading.
        for (std::size_t i = 0; i < 3; ++i) headings.push_back(s.samples[i].action.heading_deg);
        headings.push_back(s.samples[3].action.heading_deg);
        for (double h : headings) {
            CHECK((h == 0.0 || h == 90.0 || h == 180.0 || h == 270.0));
            unique.insert(h);
        }
        CHECK(unique.size() >= 3); // four views, last heading repeats view 3
        orderings.insert(headings);
    }
    CHECK(orderings.size() == 24);
}

TEST_CASE("gen_lookaround: subsampling is deterministic and seed-driven") {
    const auto node = make_node(5, fixtures::kPairBase, 9, 2014);
    const seqgen::HashViewTokenProvider views;
    const auto once = seqgen::gen_lookaround(node, views, {1, 42});
    const auto twice = seqgen::gen_lookaround(node, views, {1, 42});
    REQUIRE(once.size() == 1);
    REQUIRE(twice.size() == 1);
    for (int i = 0; i < 4; ++i) {
        CHECK(once[0].samples[i].action.heading_deg == twice[0].samples[i].action.heading_deg);
        CHECK(once[0].samples[i].image_tokens == twice[0].samples[i].image_tokens);
    }
    const auto four = seqgen::gen_lookaround(node, views, {4, 42});
    CHECK(four.size() == 4);
}

TEST_CASE("gen_lookaround honors the node base heading") {
    auto node = make_node(6, fixtures::kPairBase, 9, 2014);
    node.base_heading = 30.0;
    const seqgen::HashViewTokenProvider views;
    const auto sentences = seqgen::gen_lookaround(node, views, {1, 0});
    for (const auto& s : sentences)
        for (const auto& smp : s.samples) {
            const double h = smp.action.heading_deg;
            CHECK((h == 30.0 || h == 120.0 || h == 210.0 || h == 300.0));
        }
}

TEST_CASE("assemble_sentence: actions, terminal sample, replay consistency") {
    // The junction fixture's east-west way runs through the collinear points.
    const auto net = roadnet::RoadNetwork::parse(fixtures::osm_junction_cross());
    panograph::GraphConfig cfg;
    cfg.bbox = kArea;
    std::vector<PanoNode> nodes{
        make_node(1, fixtures::kCollinearP0, 3, 2015),
        make_node(2, fixtures::kCollinearP1, 9, 2014),
        make_node(3, fixtures::kCollinearP2, 1, 2016),
    };
    const auto g = panograph::build_graph(nodes, net, cfg);
    const seqgen::HashViewTokenProvider views;

    const auto two = seqgen::assemble_sentence({g.index_of(1), g.index_of(2)}, g, views);
    REQUIRE(two.samples.size() == 2);
    CHECK(two.samples[0].action.distance_m == 7.5);
    CHECK(two.samples[1].action.distance_m == 0.0); // terminal null action
    CHECK(two.samples[1].action.heading_deg == two.samples[0].action.heading_deg);
    CHECK(two.samples[1].action.d_month == 0);
    CHECK(two.samples[1].action.d_year == 0);

    // Collinear 3-node path: both step headings equal (due east, 90.0).
    const auto three =
        seqgen::assemble_sentence({g.index_of(1), g.index_of(2), g.index_of(3)}, g, views);
    REQUIRE(three.samples.size() == 3);
    CHECK(three.samples[0].action.heading_deg == 90.0);
    CHECK(three.samples[1].action.heading_deg == 90.0);

    // Replay: dead-reckoning from sample 0 reproduces every state within
    // 1.5e-5 degrees and exactly in months.
    geo::GeoPoint pos = three.samples[0].pos;
    int month = three.samples[0].month, year = three.samples[0].year;
    for (std::size_t i = 0; i + 1 < three.samples.size(); ++i) {
        const auto& act = three.samples[i].action;
        pos = geo::destination_point(pos, act.heading_deg, act.distance_m);
        std::tie(month, year) = seqgen::apply_temporal(month, year, act);
        CHECK(std::abs(pos.lat - three.samples[i + 1].pos.lat) <= 1.5e-5);
        CHECK(std::abs(pos.lon - three.samples[i + 1].pos.lon) <= 1.5e-5);
        CHECK(month == three.samples[i + 1].month);
        CHECK(year == three.samples[i + 1].year);
    }

    // A non-edge path is rejected.
    const auto single = roadnet::RoadNetwork::parse(fixtures::osm_single_road());
    std::vector<PanoNode> far{make_node(1, fixtures::kPairBase, 1, 2014),
                              make_node(2, fixtures::kPairEast60, 1, 2014)};
    const auto g2 = panograph::build_graph(far, single, cfg);
    CHECK_THROWS_AS(seqgen::assemble_sentence({0, 1}, g2, views), DataError);
}

TEST_CASE("generate_sentences: sharding partitions the stream") {
    const auto town = fixtures::make_town();
    const auto net = roadnet::RoadNetwork::parse(town.osm_xml);
    auto g = panograph::build_graph(town.nodes, net, town.graph_config());
    panograph::split_graph(g, {2023, 2024}, 0.10);
    const seqgen::HashViewTokenProvider views;

    auto collect = [&](uint32_t shard_i, uint32_t shard_n) {
        seqgen::GenConfig cfg;
        cfg.dfs = {4, 4, false};
        cfg.lookaround_perms = 2;
        cfg.seed = 9;
        cfg.shard_index = shard_i;
        cfg.shard_count = shard_n;
        std::vector<std::pair<uint64_t, std::size_t>> keys; // (origin, sample count)
        seqgen::generate_sentences(g, views, cfg,
                                   [&](const seqgen::VisualSentence& s, panograph::Split) {
                                       keys.push_back({s.origin_id, s.samples.size()});
                                   });
        return keys;
    };

    const auto all = collect(0, 1);
    auto s0 = collect(0, 2);
    const auto s1 = collect(1, 2);
    s0.insert(s0.end(), s1.begin(), s1.end());

    auto sorted = [](std::vector<std::pair<uint64_t, std::size_t>> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    CHECK(sorted(all) == sorted(s0));
    for (const auto& [origin, _] : collect(1, 2)) CHECK(origin % 2 == 1);
}
