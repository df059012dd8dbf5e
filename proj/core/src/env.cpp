#include "roam/env.hpp"

#include "roam/errors.hpp"
#include "roam/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace roam::env {

namespace {

constexpr double kPi = 3.14159265358979323846;

void validate_action(const seqgen::Action& a) {
    if (!(a.distance_m >= 0.0) || a.distance_m > 50.0 + 1e-9)
        throw DataError("action distance outside [0, 50] m");
    if (!(a.heading_deg >= 0.0) || a.heading_deg >= 360.0)
        throw DataError("action heading outside [0, 360)");
    if (a.d_month < 0 || a.d_month > 11)
        throw DataError("action d_month outside 0..11");
    if (a.d_year < -30 || a.d_year > 30)
        throw DataError("action d_year outside -30..30");
}

int months_between(int m1, int y1, int m2, int y2) {
    return (y2 - y1) * 12 + (m2 - m1);
}

} // namespace

StepResult step(const panograph::NavGraph& g, uint32_t current_index,
                const seqgen::Action& action, const StepConfig& cfg) {
    validate_action(action);
    const auto& cur = g.node(current_index);

    const geo::GeoPoint target =
        geo::destination_point(cur.pos, action.heading_deg, action.distance_m);
    const auto [target_month, target_year] =
        seqgen::apply_temporal(cur.month, cur.year, action);

    StepResult r;
    r.from_id = cur.id;
    r.requested = action;

    struct Key {
        int date_gap;
        double dist;
        bool not_current;
        uint64_t id;
    };
    bool found = false;
    Key best{};
    uint32_t best_index = 0;

    for (uint32_t idx : g.nodes_within(target, cfg.snap_radius_m)) {
        const auto& cand = g.node(idx);
        // The realized action must stay expressible: within the 50 m cap.
        const double from_cur = geo::haversine_m(cur.pos, cand.pos);
        if (std::round(from_cur * 10.0) / 10.0 > 50.0) continue;

        Key k{std::abs(months_between(target_month, target_year, cand.month, cand.year)),
              geo::haversine_m(target, cand.pos), idx != current_index, cand.id};
        const bool better =
            !found || std::tie(k.date_gap, k.dist, k.not_current, k.id) <
                          std::tie(best.date_gap, best.dist, best.not_current, best.id);
        if (better) {
            found = true;
            best = k;
            best_index = idx;
        }
    }

    if (!found) {
        r.next_id = cur.id;
        r.next_index = current_index;
        r.valid = false;
        return r;
    }

    r.next_index = best_index;
    r.next_id = g.node(best_index).id;
    r.realized = seqgen::derive_action(cur, g.node(best_index));
    r.valid = true;
    return r;
}

bool valid_transition(const panograph::NavGraph& g, uint64_t u_id, uint64_t v_id) {
    const uint32_t u = g.index_of(u_id);
    const uint32_t v = g.index_of(v_id);
    if (u == v) return true; // staying put (the zero action) is always permissible
    return g.has_edge(u, v);
}

std::pair<std::vector<tok::TokenId>, std::vector<tok::TokenId>> admissible_coord_tokens(
    const geo::GeoPoint& anchor, double move_d_m, const tok::TokenVocab& vocab,
    double tol_m) {
    if (move_d_m < 0.0 || move_d_m > 50.0)
        throw DataError("move distance outside [0, 50] m");

    auto axis = [&](tok::Modality m, double anchor_value, double meters_per_deg) {
        const auto& b = vocab.bins(m);
        if (anchor_value < b.min_value - b.precision / 2.0 ||
            anchor_value > b.max_value + b.precision / 2.0)
            throw DataError(std::string("anchor ") + tok::to_string(m) +
                            " outside vocab range");
        const double reach_m = move_d_m + tol_m;
        const double reach_deg = reach_m / meters_per_deg;
        // Conservative window, then the exact per-bin predicate; float noise
        // in the window bounds can never flip a boundary decision.
        int64_t lo = static_cast<int64_t>(
            std::floor((anchor_value - reach_deg - b.min_value) / b.precision)) - 2;
        int64_t hi = static_cast<int64_t>(
            std::ceil((anchor_value + reach_deg - b.min_value) / b.precision)) + 2;
        lo = std::max<int64_t>(lo, 0);
        hi = std::min<int64_t>(hi, b.count - 1);
        std::vector<tok::TokenId> ids;
        for (int64_t i = lo; i <= hi; ++i) {
            const double center = b.min_value + static_cast<double>(i) * b.precision;
            if (std::abs(center - anchor_value) * meters_per_deg <= reach_m)
                ids.push_back(vocab.offset(m) + static_cast<tok::TokenId>(i));
        }
        return ids;
    };

    const double m_per_deg_lat = geo::kMetersPerDegLat;
    const double m_per_deg_lon =
        geo::kMetersPerDegLat * std::max(0.01, std::cos(anchor.lat * kPi / 180.0));
    return {axis(tok::Modality::latitude, anchor.lat, m_per_deg_lat),
            axis(tok::Modality::longitude, anchor.lon, m_per_deg_lon)};
}

EnvSession::EnvSession(const panograph::NavGraph& g, StepConfig cfg)
    : g_(g), cfg_(cfg), rng_(0) {
    if (g_.size() == 0) throw DataError("EnvSession over an empty graph");
}

void EnvSession::reset(uint64_t node_id, uint64_t seed) {
    current_ = g_.index_of(node_id);
    rng_ = std::mt19937_64(rng::splitmix64(seed));
}

void EnvSession::reset_random(uint64_t seed) {
    rng_ = std::mt19937_64(rng::splitmix64(seed));
    current_ = static_cast<uint32_t>(rng::bounded(rng_, g_.size()));
}

StepResult EnvSession::step(const seqgen::Action& action) {
    StepResult r = env::step(g_, current_, action, cfg_);
    current_ = r.next_index;
    return r;
}

seqgen::Action EnvSession::oracle_action() {
    const auto& nbrs = g_.neighbors(current_);
    if (nbrs.empty()) return seqgen::Action{};
    const uint32_t pick = nbrs[rng::bounded(rng_, nbrs.size())];
    return seqgen::derive_action(g_.node(current_), g_.node(pick));
}

EnvSession::Observation EnvSession::observe() const {
    const auto& n = g_.node(current_);
    Observation obs{n.id, n.pos, n.month, n.year, n.image_ref, {}};
    for (uint32_t idx : g_.neighbors(current_)) obs.neighbor_ids.push_back(g_.node(idx).id);
    return obs;
}

std::string trace_json(const StepResult& r, std::size_t step_index) {
    nlohmann::ordered_json j;
    j["step"] = step_index;
    j["from"] = r.from_id;
    auto action_json = [](const seqgen::Action& a) {
        nlohmann::ordered_json e;
        e["distance_m"] = a.distance_m;
        e["heading_deg"] = a.heading_deg;
        e["d_month"] = a.d_month;
        e["d_year"] = a.d_year;
        return e;
    };
    j["requested"] = action_json(r.requested);
    j["realized"] = action_json(r.realized);
    j["next"] = r.next_id;
    j["valid"] = r.valid;
    return j.dump();
}

} // namespace roam::env
