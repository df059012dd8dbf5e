#include "roam/eval.hpp"

#include "roam/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>

namespace roam::eval {

namespace {

using json = nlohmann::json;

std::vector<double> cdf_of(const std::vector<double>& values,
                           const std::vector<double>& thresholds) {
    if (values.empty()) throw DataError("empty input: nothing to aggregate");
    if (!std::is_sorted(thresholds.begin(), thresholds.end()))
        throw DataError("thresholds must be ascending");
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> out;
    out.reserve(thresholds.size());
    for (double t : thresholds) {
        const auto n = std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
        out.push_back(static_cast<double>(n) / static_cast<double>(sorted.size()));
    }
    return out;
}

json parse_line(const std::string& line, std::size_t line_no) {
    try {
        return json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), line_no);
    }
}

template <typename F>
auto read_jsonl_records(std::istream& in, F&& parse_record) {
    std::vector<decltype(parse_record(json{}, std::size_t{0}))> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const json j = parse_line(line, line_no);
        try {
            out.push_back(parse_record(j, line_no));
        } catch (const json::exception& e) {
            throw ParseError(std::string("record: ") + e.what(), line_no);
        }
    }
    return out;
}

void write_fraction(std::ostream& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    out << buf;
}

} // namespace

std::vector<double> error_cdf(const std::vector<GeorefRecord>& records,
                              const std::vector<double>& thresholds_m) {
    std::vector<double> errors;
    errors.reserve(records.size());
    for (const auto& r : records) errors.push_back(geo::haversine_m(r.predicted, r.truth));
    return cdf_of(errors, thresholds_m);
}

std::vector<double> default_lane_widths() { return {1, 2, 3, 4, 5, 6, 7, 8, 10}; }

std::vector<AdherenceRow> road_adherence(const std::vector<AdherenceRecord>& records,
                                         const roadnet::RoadNetwork& net,
                                         const std::vector<double>& widths_m,
                                         WidthConvention convention) {
    if (records.empty()) throw DataError("empty input: no adherence records");

    std::vector<double> dist;
    dist.reserve(records.size());
    std::size_t n_nonzero = 0;
    for (const auto& r : records) {
        dist.push_back(net.nearest_centerline(r.resulting_state).distance_m);
        if (r.action_distance_m > 0.0) ++n_nonzero;
    }

    std::vector<AdherenceRow> rows;
    rows.reserve(widths_m.size());
    for (double w : widths_m) {
        const double limit = convention == WidthConvention::half ? w / 2.0 : w;
        std::size_t ok_all = 0, ok_nonzero = 0;
        for (std::size_t i = 0; i < records.size(); ++i) {
            const bool ok = dist[i] <= limit;
            if (ok) ++ok_all;
            if (ok && records[i].action_distance_m > 0.0) ++ok_nonzero;
        }
        AdherenceRow row;
        row.width_m = w;
        row.n_all = records.size();
        row.n_nonzero = n_nonzero;
        row.all_valid_pct = 100.0 * static_cast<double>(ok_all) / records.size();
        row.nonzero_valid_pct =
            n_nonzero ? 100.0 * static_cast<double>(ok_nonzero) / n_nonzero : 0.0;
        rows.push_back(row);
    }
    return rows;
}

BucketKey bucket_key_from_string(std::string_view name) {
    if (name == "year") return BucketKey::year;
    if (name == "month") return BucketKey::month;
    if (name == "action_distance") return BucketKey::action_distance;
    if (name == "d_month") return BucketKey::d_month;
    if (name == "d_year") return BucketKey::d_year;
    throw DataError("unknown bucket key: " + std::string(name));
}

std::vector<BucketRow> perplexity_by_bucket(const std::vector<NllRecord>& records,
                                            BucketKey key, double distance_bin_m) {
    if (records.empty()) throw DataError("empty input: no nll records");
    if (distance_bin_m <= 0.0) throw DataError("distance_bin_m must be positive");

    std::map<double, std::pair<double, std::size_t>> buckets; // key -> (sum, n)
    for (const auto& r : records) {
        if (r.nll < 0.0) throw DataError("negative nll");
        double b = 0.0;
        switch (key) {
            case BucketKey::year: b = r.year; break;
            case BucketKey::month: b = r.month; break;
            case BucketKey::action_distance:
                b = std::round(r.action_distance_m / distance_bin_m) * distance_bin_m;
                break;
            case BucketKey::d_month: b = r.d_month; break;
            case BucketKey::d_year: b = r.d_year; break;
        }
        auto& [sum, n] = buckets[b];
        sum += r.nll;
        ++n;
    }

    std::vector<BucketRow> out;
    out.reserve(buckets.size());
    for (const auto& [b, agg] : buckets)
        out.push_back({b, std::exp(agg.first / static_cast<double>(agg.second)), agg.second});
    return out;
}

std::vector<double> action_magnitude_cdf(const std::vector<seqgen::Action>& actions,
                                         const std::vector<double>& thresholds_m) {
    std::vector<double> magnitudes;
    magnitudes.reserve(actions.size());
    for (const auto& a : actions) magnitudes.push_back(a.distance_m);
    return cdf_of(magnitudes, thresholds_m);
}

std::vector<GeorefRecord> read_georef_jsonl(std::istream& in) {
    return read_jsonl_records(in, [](const json& j, std::size_t) {
        GeorefRecord r;
        r.predicted = {j.at("pred")[0].get<double>(), j.at("pred")[1].get<double>()};
        r.truth = {j.at("truth")[0].get<double>(), j.at("truth")[1].get<double>()};
        r.year = j.value("year", 0);
        r.split = j.value("split", "");
        return r;
    });
}

std::vector<AdherenceRecord> read_adherence_jsonl(std::istream& in) {
    return read_jsonl_records(in, [](const json& j, std::size_t) {
        AdherenceRecord r;
        r.resulting_state = {j.at("state")[0].get<double>(), j.at("state")[1].get<double>()};
        r.action_distance_m = j.at("action_distance").get<double>();
        return r;
    });
}

std::vector<NllRecord> read_nll_jsonl(std::istream& in) {
    return read_jsonl_records(in, [](const json& j, std::size_t) {
        NllRecord r;
        r.nll = j.at("nll").get<double>();
        r.year = j.value("year", 0);
        r.month = j.value("month", 0);
        r.action_distance_m = j.value("action_distance", 0.0);
        r.d_month = j.value("d_month", 0);
        r.d_year = j.value("d_year", 0);
        return r;
    });
}

void write_cdf_csv(const std::vector<double>& thresholds,
                   const std::vector<double>& fractions, std::ostream& out) {
    if (thresholds.size() != fractions.size())
        throw DataError("threshold/fraction size mismatch");
    out << "threshold_m,fraction\n";
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        write_fraction(out, thresholds[i]);
        out << ',';
        write_fraction(out, fractions[i]);
        out << '\n';
    }
}

void write_adherence_csv(const std::vector<AdherenceRow>& rows, std::ostream& out) {
    out << "width_m,all_valid_pct,nonzero_valid_pct,n_all,n_nonzero\n";
    for (const auto& r : rows) {
        write_fraction(out, r.width_m);
        out << ',';
        write_fraction(out, r.all_valid_pct);
        out << ',';
        write_fraction(out, r.nonzero_valid_pct);
        out << ',' << r.n_all << ',' << r.n_nonzero << '\n';
    }
}

void write_bucket_csv(const std::vector<BucketRow>& rows, std::ostream& out) {
    out << "bucket,perplexity,count\n";
    for (const auto& r : rows) {
        write_fraction(out, r.bucket);
        out << ',';
        write_fraction(out, r.perplexity);
        out << ',' << r.count << '\n';
    }
}

} // namespace roam::eval
