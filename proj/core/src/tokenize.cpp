#include "roam/tokenize.hpp"

#include "roam/errors.hpp"
#include "roam/rng.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace roam::tok {

namespace {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

constexpr int kModalities = 10;

const Modality kContentOrder[] = {
    Modality::image,    Modality::latitude, Modality::longitude,
    Modality::month,    Modality::year,     Modality::distance,
    Modality::heading,  Modality::d_month,  Modality::d_year,
};

void check_bins(Modality m, const BinSpec& b) {
    if (!(b.precision > 0.0) || b.max_value < b.min_value || b.count < 1)
        throw DataError(std::string("inconsistent bin spec for ") + to_string(m));
    // The explicit count must be able to express the whole declared range.
    const int32_t needed =
        static_cast<int32_t>(std::floor((b.max_value - b.min_value) / b.precision + 1e-9)) + 1;
    if (b.count < needed)
        throw DataError(std::string("inconsistent range for ") + to_string(m) + ": " +
                        std::to_string(b.count) + " bins cannot express " +
                        std::to_string(needed) + " values");
}

} // namespace

const char* to_string(Modality m) {
    switch (m) {
        case Modality::special: return "special";
        case Modality::image: return "image";
        case Modality::latitude: return "latitude";
        case Modality::longitude: return "longitude";
        case Modality::month: return "month";
        case Modality::year: return "year";
        case Modality::distance: return "distance";
        case Modality::heading: return "heading";
        case Modality::d_month: return "d_month";
        case Modality::d_year: return "d_year";
    }
    return "?";
}

const BinSpec& TokenVocab::bins(Modality m) const {
    switch (m) {
        case Modality::latitude: return cfg_.latitude;
        case Modality::longitude: return cfg_.longitude;
        case Modality::month: return cfg_.month;
        case Modality::year: return cfg_.year;
        case Modality::distance: return cfg_.distance;
        case Modality::heading: return cfg_.heading;
        case Modality::d_month: return cfg_.d_month;
        case Modality::d_year: return cfg_.d_year;
        default: throw DataError(std::string(to_string(m)) + " has no bin spec");
    }
}

TokenVocab TokenVocab::build(const VocabConfig& cfg) {
    if (cfg.image_vocab < 1) throw DataError("image_vocab must be positive");
    if (cfg.special_count < 9)
        throw DataError("special_count must cover the 9 named special tokens");
    for (Modality m : {Modality::latitude, Modality::longitude, Modality::month,
                       Modality::year, Modality::distance, Modality::heading,
                       Modality::d_month, Modality::d_year}) {
        switch (m) {
            case Modality::latitude: check_bins(m, cfg.latitude); break;
            case Modality::longitude: check_bins(m, cfg.longitude); break;
            case Modality::month: check_bins(m, cfg.month); break;
            case Modality::year: check_bins(m, cfg.year); break;
            case Modality::distance: check_bins(m, cfg.distance); break;
            case Modality::heading: check_bins(m, cfg.heading); break;
            case Modality::d_month: check_bins(m, cfg.d_month); break;
            case Modality::d_year: check_bins(m, cfg.d_year); break;
            default: break;
        }
    }

    TokenVocab v;
    v.cfg_ = cfg;
    v.counts_[static_cast<int>(Modality::special)] = cfg.special_count;
    v.counts_[static_cast<int>(Modality::image)] = cfg.image_vocab;
    v.counts_[static_cast<int>(Modality::latitude)] = cfg.latitude.count;
    v.counts_[static_cast<int>(Modality::longitude)] = cfg.longitude.count;
    v.counts_[static_cast<int>(Modality::month)] = cfg.month.count;
    v.counts_[static_cast<int>(Modality::year)] = cfg.year.count;
    v.counts_[static_cast<int>(Modality::distance)] = cfg.distance.count;
    v.counts_[static_cast<int>(Modality::heading)] = cfg.heading.count;
    v.counts_[static_cast<int>(Modality::d_month)] = cfg.d_month.count;
    v.counts_[static_cast<int>(Modality::d_year)] = cfg.d_year.count;

    int32_t off = 0;
    v.offsets_[static_cast<int>(Modality::special)] = 0;
    off += cfg.special_count;
    for (Modality m : kContentOrder) {
        v.offsets_[static_cast<int>(m)] = off;
        off += v.counts_[static_cast<int>(m)];
    }
    v.total_ = off;
    return v;
}

TokenId TokenVocab::encode_value(Modality m, double value) const {
    const BinSpec& b = bins(m);
    // Half a precision step of slack keeps boundary values encodable after
    // float round-trips.
    if (!(value >= b.min_value - b.precision / 2.0) ||
        !(value <= b.max_value + b.precision / 2.0))
        throw DataError(std::string(to_string(m)) + " value " + std::to_string(value) +
                        " outside expressible range [" + std::to_string(b.min_value) + ", " +
                        std::to_string(b.max_value) + "]");
    int64_t idx = std::llround((value - b.min_value) / b.precision);
    if (idx < 0) idx = 0;
    if (idx >= b.count) idx = b.count - 1;
    return offset(m) + static_cast<TokenId>(idx);
}

TokenVocab::Decoded TokenVocab::decode_token(TokenId id) const {
    if (id < 0 || id >= total_)
        throw DataError("token id " + std::to_string(id) + " outside vocabulary of " +
                        std::to_string(total_));
    if (id < count(Modality::special)) return {Modality::special, static_cast<double>(id)};
    if (id < offset(Modality::image) + count(Modality::image))
        return {Modality::image, static_cast<double>(id - offset(Modality::image))};
    for (Modality m : {Modality::latitude, Modality::longitude, Modality::month,
                       Modality::year, Modality::distance, Modality::heading,
                       Modality::d_month, Modality::d_year}) {
        const int32_t lo = offset(m);
        if (id < lo + count(m)) {
            const BinSpec& b = bins(m);
            return {m, b.min_value + static_cast<double>(id - lo) * b.precision};
        }
    }
    throw DataError("unreachable token id");
}

TokenId TokenVocab::image_token(int32_t raw) const {
    if (raw < 0 || raw >= count(Modality::image))
        throw DataError("image token " + std::to_string(raw) + " outside [0, " +
                        std::to_string(count(Modality::image)) + ")");
    return offset(Modality::image) + raw;
}

std::string TokenVocab::manifest_json() const {
    ordered_json j;
    j["format"] = "roam-vocab";
    j["version"] = 1;
    j["total"] = total_;
    j["specials"] = {
        {"count", count(Modality::special)}, {"seq_start", seq_start()},
        {"seq_end", seq_end()},              {"image_start", image_start()},
        {"image_end", image_end()},          {"state_start", state_start()},
        {"state_end", state_end()},          {"action_start", action_start()},
        {"action_end", action_end()},        {"pad", pad()},
    };
    j["modalities"] = ordered_json::array();
    {
        ordered_json e;
        e["name"] = "image";
        e["offset"] = offset(Modality::image);
        e["count"] = count(Modality::image);
        j["modalities"].push_back(std::move(e));
    }
    for (Modality m : {Modality::latitude, Modality::longitude, Modality::month,
                       Modality::year, Modality::distance, Modality::heading,
                       Modality::d_month, Modality::d_year}) {
        const BinSpec& b = bins(m);
        ordered_json e;
        e["name"] = to_string(m);
        e["offset"] = offset(m);
        e["count"] = count(m);
        e["min"] = b.min_value;
        e["max"] = b.max_value;
        e["precision"] = b.precision;
        j["modalities"].push_back(std::move(e));
    }
    return j.dump(2) + "\n";
}

std::vector<TokenId> encode_sample(const seqgen::Sample& s, const TokenVocab& vocab) {
    if (s.image_tokens.size() != 1024)
        throw DataError("sample carries " + std::to_string(s.image_tokens.size()) +
                        " image tokens, expected 1024");
    std::vector<TokenId> out;
    out.reserve(kSampleTokens);
    out.push_back(vocab.image_start());
    for (int32_t raw : s.image_tokens) out.push_back(vocab.image_token(raw));
    out.push_back(vocab.image_end());
    out.push_back(vocab.state_start());
    out.push_back(vocab.encode_value(Modality::latitude, s.pos.lat));
    out.push_back(vocab.encode_value(Modality::longitude, s.pos.lon));
    out.push_back(vocab.encode_value(Modality::month, s.month));
    out.push_back(vocab.encode_value(Modality::year, s.year));
    out.push_back(vocab.state_end());
    out.push_back(vocab.action_start());
    out.push_back(vocab.encode_value(Modality::distance, s.action.distance_m));
    out.push_back(vocab.encode_value(Modality::heading, s.action.heading_deg));
    out.push_back(vocab.encode_value(Modality::d_month, s.action.d_month));
    out.push_back(vocab.encode_value(Modality::d_year, s.action.d_year));
    out.push_back(vocab.action_end());
    return out;
}

namespace {

class SampleReader {
public:
    SampleReader(std::span<const TokenId> tokens, const TokenVocab& vocab)
        : tokens_(tokens), vocab_(vocab) {}

    TokenId next(const char* context) {
        if (pos_ >= tokens_.size())
            throw DataError(std::string("truncated sample: expected ") + context +
                            " at position " + std::to_string(pos_));
        return tokens_[pos_++];
    }
    void expect(TokenId want, const char* name) {
        const TokenId got = next(name);
        if (got != want)
            throw DataError(std::string("malformed sample: expected ") + name + " (id " +
                            std::to_string(want) + ") at position " + std::to_string(pos_ - 1) +
                            ", got id " + std::to_string(got));
    }
    double value(Modality m) {
        const TokenId id = next(to_string(m));
        const auto dec = vocab_.decode_token(id);
        if (dec.modality != m)
            throw DataError(std::string("malformed sample: expected a ") + to_string(m) +
                            " token at position " + std::to_string(pos_ - 1) + ", got " +
                            to_string(dec.modality));
        return dec.value;
    }
    std::size_t consumed() const { return pos_; }

private:
    std::span<const TokenId> tokens_;
    const TokenVocab& vocab_;
    std::size_t pos_ = 0;
};

} // namespace

seqgen::Sample decode_sample(std::span<const TokenId> tokens, const TokenVocab& vocab) {
    SampleReader r(tokens, vocab);
    seqgen::Sample s;

    r.expect(vocab.image_start(), "image_start");
    s.image_tokens.reserve(1024);
    for (int i = 0; i < 1024; ++i)
        s.image_tokens.push_back(static_cast<int32_t>(r.value(Modality::image)));
    r.expect(vocab.image_end(), "image_end");
    r.expect(vocab.state_start(), "state_start");
    s.pos.lat = r.value(Modality::latitude);
    s.pos.lon = r.value(Modality::longitude);
    s.month = static_cast<int>(std::llround(r.value(Modality::month)));
    s.year = static_cast<int>(std::llround(r.value(Modality::year)));
    r.expect(vocab.state_end(), "state_end");
    r.expect(vocab.action_start(), "action_start");
    s.action.distance_m = r.value(Modality::distance);
    s.action.heading_deg = r.value(Modality::heading);
    s.action.d_month = static_cast<int>(std::llround(r.value(Modality::d_month)));
    s.action.d_year = static_cast<int>(std::llround(r.value(Modality::d_year)));
    r.expect(vocab.action_end(), "action_end");
    return s;
}

std::vector<TokenId> encode_sentence(const seqgen::VisualSentence& s, const TokenVocab& vocab) {
    std::vector<TokenId> out;
    out.reserve(2 + s.samples.size() * kSampleTokens);
    out.push_back(vocab.seq_start());
    for (const auto& sample : s.samples) {
        auto enc = encode_sample(sample, vocab);
        out.insert(out.end(), enc.begin(), enc.end());
    }
    out.push_back(vocab.seq_end());
    return out;
}

std::vector<seqgen::Sample> decode_sentence(std::span<const TokenId> tokens,
                                            const TokenVocab& vocab) {
    if (tokens.size() < 2 || tokens.front() != vocab.seq_start() ||
        tokens.back() != vocab.seq_end())
        throw DataError("sentence must start with seq_start and end with seq_end");
    std::span<const TokenId> body = tokens.subspan(1, tokens.size() - 2);
    if (body.size() % kSampleTokens != 0)
        throw DataError("sentence body of " + std::to_string(body.size()) +
                        " tokens is not a whole number of samples");
    std::vector<seqgen::Sample> out;
    for (std::size_t i = 0; i < body.size(); i += kSampleTokens)
        out.push_back(decode_sample(body.subspan(i, kSampleTokens), vocab));
    return out;
}

void write_jsonl_line(const std::vector<TokenId>& tokens, std::ostream& out) {
    out << '[';
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out << ',';
        out << tokens[i];
    }
    out << "]\n";
}

void emit_jsonl(const std::vector<std::vector<TokenId>>& sentences, std::ostream& out) {
    for (const auto& s : sentences) write_jsonl_line(s, out);
}

std::vector<std::vector<TokenId>> read_jsonl(std::istream& in, const TokenVocab* vocab) {
    std::vector<std::vector<TokenId>> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(e.what(), line_no);
        }
        if (!j.is_array()) throw ParseError("expected a JSON array of integers", line_no);
        std::vector<TokenId> tokens;
        tokens.reserve(j.size());
        for (const auto& v : j) {
            if (!v.is_number_integer())
                throw ParseError("non-integer token", line_no);
            const int64_t id = v.get<int64_t>();
            if (id < 0 || (vocab && id >= vocab->total()))
                throw ParseError("token id " + std::to_string(id) + " outside vocabulary",
                                 line_no);
            tokens.push_back(static_cast<TokenId>(id));
        }
        out.push_back(std::move(tokens));
    }
    return out;
}

std::vector<int32_t> StubImageTokenizer::tokenize(const img::Image& image) const {
    if (image.width <= 0 || image.height <= 0 ||
        image.rgb.size() != static_cast<std::size_t>(image.width) * image.height * 3)
        throw DataError("StubImageTokenizer: inconsistent image buffer");

    // 32x32 cells, averaged luminance per cell, hashed with the cell index.
    std::vector<int32_t> out;
    out.reserve(1024);
    for (int gy = 0; gy < 32; ++gy) {
        const int y0 = static_cast<int>(static_cast<int64_t>(gy) * image.height / 32);
        const int y1 = std::max(y0 + 1, static_cast<int>(static_cast<int64_t>(gy + 1) *
                                                         image.height / 32));
        for (int gx = 0; gx < 32; ++gx) {
            const int x0 = static_cast<int>(static_cast<int64_t>(gx) * image.width / 32);
            const int x1 = std::max(x0 + 1, static_cast<int>(static_cast<int64_t>(gx + 1) *
                                                             image.width / 32));
            uint64_t sum = 0;
            uint64_t n = 0;
            for (int y = y0; y < y1 && y < image.height; ++y)
                for (int x = x0; x < x1 && x < image.width; ++x) {
                    const uint8_t* p = image.pixel(x, y);
                    sum += 299u * p[0] + 587u * p[1] + 114u * p[2];
                    ++n;
                }
            const uint64_t mean = n ? sum / (n * 1000u) : 0; // 0..255
            const uint64_t cell = static_cast<uint64_t>(gy) * 32 + gx;
            out.push_back(static_cast<int32_t>(
                rng::splitmix64((cell << 32) | (mean + 1)) % static_cast<uint64_t>(vocab_)));
        }
    }
    return out;
}

} // namespace roam::tok
