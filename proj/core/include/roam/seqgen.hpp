#pragma once

#include "roam/geo.hpp"
#include "roam/panograph.hpp"

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace roam::seqgen {

// One step instruction. Distance/heading at 0.1 resolution; the temporal
// delta is canonical: d_month in [0, 11], signed years absorb the rest.
struct Action {
    double distance_m = 0.0;  // [0.0, 50.0]
    double heading_deg = 0.0; // [0.0, 359.9]
    int d_month = 0;          // 0..11
    int d_year = 0;           // -30..30

    int total_months() const { return 12 * d_year + d_month; }
    bool operator==(const Action&) const = default;
};

struct Sample {
    std::vector<int32_t> image_tokens; // exactly 1024 ids in [0, image vocab)
    geo::GeoPoint pos;
    int month = 1;
    int year = 2000;
    Action action;
};

enum class SentenceKind : uint8_t { dfs, lookaround };

struct VisualSentence {
    std::vector<Sample> samples;
    uint64_t origin_id = 0;
    std::vector<uint64_t> path_ids; // node ids, one per sample
    SentenceKind kind = SentenceKind::dfs;
};

// Supplies the 1024 image tokens for a node viewed toward heading_deg
// (absolute, true north). Implementations: hash-based (no pixels) below, or a
// renderer + image tokenizer composed at the application layer.
class ViewTokenProvider {
public:
    virtual ~ViewTokenProvider() = default;
    virtual std::vector<int32_t> view_tokens(const panograph::PanoNode& node,
                                             double heading_deg) const = 0;
};

// Deterministic stand-in keyed on (node id, heading bin); useful wherever the
// actual pixels are irrelevant.
class HashViewTokenProvider final : public ViewTokenProvider {
public:
    explicit HashViewTokenProvider(int32_t image_vocab = 8192) : vocab_(image_vocab) {}
    std::vector<int32_t> view_tokens(const panograph::PanoNode& node,
                                     double heading_deg) const override;

private:
    int32_t vocab_;
};

struct PathConfig {
    uint32_t max_paths_per_node = 32;  // P
    uint32_t max_samples_per_seq = 13; // L, nodes per path
    bool same_split_only = false;      // restrict paths to the origin's split
};

// Bounded iterative DFS from origin: emits every simple path of 2..L nodes in
// preorder, neighbors in ascending node-id order, stopping after P paths.
// Returns node-index paths. Throws DataError on an unknown origin.
std::vector<std::vector<uint32_t>> enumerate_paths(const panograph::NavGraph& g,
                                                   uint64_t origin_id,
                                                   const PathConfig& cfg);

// distance = haversine rounded to 0.1 m (heading 0 when that rounds to zero),
// heading = initial bearing rounded to 0.1 deg, temporal delta canonicalized.
// Throws DataError when the rounded distance exceeds 50.0 m.
Action derive_action(const panograph::PanoNode& from, const panograph::PanoNode& to);

// (month, year) advanced by the action's total temporal delta.
std::pair<int, int> apply_temporal(int month, int year, const Action& a);

struct LookaroundConfig {
    uint32_t perms = 4; // orderings emitted per node; >= 24 emits all of them
    uint64_t seed = 0;
};

// Four views at the node's base heading + {0, 90, 180, 270}, emitted in
// permuted orders. Every action moves 0 m and turns toward the next view;
// temporal deltas are zero.
std::vector<VisualSentence> gen_lookaround(const panograph::PanoNode& node,
                                           const ViewTokenProvider& views,
                                           const LookaroundConfig& cfg);

// Samples carry each node's state and a view toward the step heading; the
// final sample repeats the previous heading with a zero action.
VisualSentence assemble_sentence(const std::vector<uint32_t>& path,
                                 const panograph::NavGraph& g,
                                 const ViewTokenProvider& views);

struct GenConfig {
    PathConfig dfs;
    uint32_t lookaround_perms = 4;
    uint64_t seed = 0;
    uint32_t shard_index = 0;
    uint32_t shard_count = 1;
    bool same_split_only = true; // sentences never mix split tags
};

using SentenceSink =
    std::function<void(const VisualSentence&, panograph::Split origin_split)>;

// Full enumeration pass: for every graph node owned by this shard
// (origin id mod shard_count), look-around sentences then DFS sentences.
// Deterministic for a fixed (graph, config); shards partition the stream.
void generate_sentences(const panograph::NavGraph& g, const ViewTokenProvider& views,
                        const GenConfig& cfg, const SentenceSink& sink);

} // namespace roam::seqgen
