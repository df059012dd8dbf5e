#pragma once

#include "roam/panograph.hpp"
#include "roam/seqgen.hpp"
#include "roam/tokenize.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace roam::env {

struct StepConfig {
    // Half the mean inter-node spacing band: how far a dead-reckoned target
    // may sit from the node that realizes it.
    double snap_radius_m = 7.5;
};

struct StepResult {
    uint64_t from_id = 0;
    uint64_t next_id = 0;
    uint32_t next_index = 0;
    seqgen::Action requested;
    seqgen::Action realized; // toward the chosen node; zero when invalid
    bool valid = false;
};

// One Markovian transition: dead-reckon the action from the current node,
// then resolve the nearest graph node within snap_radius of the target,
// preferring an exact capture-date match, then nearest date, then distance,
// then the current node, then lowest id. An unresolvable action leaves the
// state unchanged and reports valid=false; it never throws. Output depends
// only on (current node, action, config) - never on history.
StepResult step(const panograph::NavGraph& g, uint32_t current_index,
                const seqgen::Action& action, const StepConfig& cfg = {});

// True iff u == v (the zero action) or (u, v) is a spatial or temporal edge.
// Throws DataError on unknown ids.
bool valid_transition(const panograph::NavGraph& g, uint64_t u_id, uint64_t v_id);

// Coordinate-token self-masking: a latitude (resp. longitude) id is
// admissible iff its bin center lies within move_d + tol meters of the
// anchor along that axis. Returns ascending vocabulary ids per axis.
// Throws DataError when the anchor itself is outside the vocab ranges.
// The 2 m default tolerance is about two latitude quantization steps.
std::pair<std::vector<tok::TokenId>, std::vector<tok::TokenId>> admissible_coord_tokens(
    const geo::GeoPoint& anchor, double move_d_m, const tok::TokenVocab& vocab,
    double tol_m = 2.0);

// A stateful cursor over the graph. The graph is shared read-only; each
// session owns its position and rng and advances sequentially.
class EnvSession {
public:
    explicit EnvSession(const panograph::NavGraph& g, StepConfig cfg = {});

    void reset(uint64_t node_id, uint64_t seed);
    void reset_random(uint64_t seed);

    StepResult step(const seqgen::Action& action);

    // Uniformly samples a neighbor under the session rng and returns the
    // action toward it; the zero action on isolated nodes.
    seqgen::Action oracle_action();

    uint32_t current_index() const { return current_; }
    const panograph::PanoNode& current() const { return g_.node(current_); }

    struct Observation {
        uint64_t node_id;
        geo::GeoPoint pos;
        int month;
        int year;
        std::string image_ref; // view handle; render/tokenize at the call site
        std::vector<uint64_t> neighbor_ids;
    };
    Observation observe() const;

private:
    const panograph::NavGraph& g_;
    StepConfig cfg_;
    uint32_t current_ = 0;
    std::mt19937_64 rng_;
};

// One JSONL trace line per step, for offline evaluation.
std::string trace_json(const StepResult& r, std::size_t step_index);

} // namespace roam::env
