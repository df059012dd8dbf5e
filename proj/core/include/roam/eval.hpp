#pragma once

#include "roam/geo.hpp"
#include "roam/roadnet.hpp"
#include "roam/seqgen.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace roam::eval {

struct GeorefRecord {
    geo::GeoPoint predicted;
    geo::GeoPoint truth;
    int year = 0;
    std::string split;
};

struct AdherenceRecord {
    geo::GeoPoint resulting_state;
    double action_distance_m = 0.0;
};

struct NllRecord {
    double nll = 0.0; // per-token negative log-likelihood, >= 0
    int year = 0;
    int month = 0;
    double action_distance_m = 0.0;
    int d_month = 0;
    int d_year = 0;
};

// fraction(t) = |{r : haversine(pred, truth) <= t}| / N. Thresholds must be
// ascending; the result is monotone non-decreasing. Throws DataError on empty
// input.
std::vector<double> error_cdf(const std::vector<GeorefRecord>& records,
                              const std::vector<double>& thresholds_m);

// Lane-width interpretation for adherence. `half`: a state is valid at width
// w when its centerline distance is <= w/2 (w spans the whole lane). `full`:
// valid when <= w.
enum class WidthConvention { half, full };

struct AdherenceRow {
    double width_m = 0.0;
    double all_valid_pct = 0.0;     // every record
    double nonzero_valid_pct = 0.0; // records with action_distance > 0
    std::size_t n_all = 0;
    std::size_t n_nonzero = 0;
};

std::vector<AdherenceRow> road_adherence(const std::vector<AdherenceRecord>& records,
                                         const roadnet::RoadNetwork& net,
                                         const std::vector<double>& widths_m,
                                         WidthConvention convention = WidthConvention::half);

// The lane widths reported by default: 1..8 and 10 meters.
std::vector<double> default_lane_widths();

enum class BucketKey { year, month, action_distance, d_month, d_year };
BucketKey bucket_key_from_string(std::string_view name);

struct BucketRow {
    double bucket = 0.0;
    double perplexity = 0.0; // exp(mean nll) within the bucket
    std::size_t count = 0;
};

// Groups records by the selected key (action_distance rounded to
// distance_bin_m) and reports exp(mean nll) per occupied bucket, ascending.
std::vector<BucketRow> perplexity_by_bucket(const std::vector<NllRecord>& records,
                                            BucketKey key, double distance_bin_m = 1.0);

std::vector<double> action_magnitude_cdf(const std::vector<seqgen::Action>& actions,
                                         const std::vector<double>& thresholds_m);

// JSONL record schemas (one object per line):
//  georef:    {"pred":[lat,lon],"truth":[lat,lon],"year":2023,"split":"test_temporal"}
//  adherence: {"state":[lat,lon],"action_distance":7.5}
//  nll:       {"nll":0.31,"year":2023,"month":6,"action_distance":7.5,
//              "d_month":0,"d_year":0}
std::vector<GeorefRecord> read_georef_jsonl(std::istream& in);
std::vector<AdherenceRecord> read_adherence_jsonl(std::istream& in);
std::vector<NllRecord> read_nll_jsonl(std::istream& in);

// CSV schema v1 writers (header row + fixed 6-decimal fractions).
void write_cdf_csv(const std::vector<double>& thresholds,
                   const std::vector<double>& fractions, std::ostream& out);
void write_adherence_csv(const std::vector<AdherenceRow>& rows, std::ostream& out);
void write_bucket_csv(const std::vector<BucketRow>& rows, std::ostream& out);

} // namespace roam::eval
