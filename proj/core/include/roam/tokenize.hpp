#pragma once

#include "roam/image.hpp"
#include "roam/seqgen.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace roam::tok {

using TokenId = int32_t;

enum class Modality : uint8_t {
    special,
    image,
    latitude,
    longitude,
    month,
    year,
    distance,
    heading,
    d_month,
    d_year,
};
const char* to_string(Modality m);

struct BinSpec {
    double min_value = 0.0;
    double max_value = 0.0; // inclusive expressible range
    double precision = 1.0;
    int32_t count = 0; // explicit bin count; must cover the range
};

// Defaults reproduce the release vocabulary: 29,163 ids total.
struct VocabConfig {
    int32_t image_vocab = 8192;
    BinSpec latitude{37.50555, 37.57277, 1e-5, 6723};
    BinSpec longitude{-122.34916, -122.249168, 1e-5, 10000};
    BinSpec month{1, 12, 1, 12};
    BinSpec year{2000, 2030, 1, 31};
    BinSpec distance{0.0, 50.0, 0.1, 501};
    BinSpec heading{0.0, 359.9, 0.1, 3601}; // bin 3600 reserved, values stop at 359.9
    BinSpec d_month{0, 11, 1, 12};
    BinSpec d_year{-30, 30, 1, 61};
    int32_t special_count = 30;
};

// Contiguous id layout over all modalities plus special tokens. Immutable
// after build; encode/decode are pure.
//
// Special block (ids 0..29): 0 seq_start, 1 seq_end, 2 image_start,
// 3 image_end, 4 state_start, 5 state_end, 6 action_start, 7 action_end,
// 8 pad, 9..29 reserved. Content blocks follow in the order image, latitude,
// longitude, month, year, distance, heading, d_month, d_year.
class TokenVocab {
public:
    static TokenVocab build(const VocabConfig& cfg = {});

    int32_t total() const { return total_; }

    TokenId seq_start() const { return 0; }
    TokenId seq_end() const { return 1; }
    TokenId image_start() const { return 2; }
    TokenId image_end() const { return 3; }
    TokenId state_start() const { return 4; }
    TokenId state_end() const { return 5; }
    TokenId action_start() const { return 6; }
    TokenId action_end() const { return 7; }
    TokenId pad() const { return 8; }

    int32_t offset(Modality m) const { return offsets_[static_cast<int>(m)]; }
    int32_t count(Modality m) const { return counts_[static_cast<int>(m)]; }
    const BinSpec& bins(Modality m) const;

    // Value -> id: bin index round((value - min) / precision), clamped into
    // the block. Throws DataError when the value is outside the expressible
    // range, naming the modality.
    TokenId encode_value(Modality m, double value) const;

    struct Decoded {
        Modality modality;
        double value; // bin center; raw index for image/special ids
    };
    Decoded decode_token(TokenId id) const;

    // Raw image-tokenizer output (in [0, image_vocab)) -> vocabulary id.
    TokenId image_token(int32_t raw) const;

    // JSON description of the layout for cross-implementation checks.
    std::string manifest_json() const;

private:
    TokenVocab() = default;
    VocabConfig cfg_;
    int32_t total_ = 0;
    std::array<int32_t, 10> offsets_{};
    std::array<int32_t, 10> counts_{};
};

// Tokens per encoded sample: 1024 image + 2 + 2 + 4 content values plus the
// six group delimiters.
constexpr std::size_t kSampleTokens = 1024 + 8 + 6;

std::vector<TokenId> encode_sample(const seqgen::Sample& s, const TokenVocab& vocab);
// Consumes exactly kSampleTokens ids; throws DataError on truncated or
// malformed input, naming the offending position.
seqgen::Sample decode_sample(std::span<const TokenId> tokens, const TokenVocab& vocab);

std::vector<TokenId> encode_sentence(const seqgen::VisualSentence& s, const TokenVocab& vocab);
std::vector<seqgen::Sample> decode_sentence(std::span<const TokenId> tokens,
                                            const TokenVocab& vocab);

// One JSON integer array per line, seq_start first and seq_end last.
void write_jsonl_line(const std::vector<TokenId>& tokens, std::ostream& out);
void emit_jsonl(const std::vector<std::vector<TokenId>>& sentences, std::ostream& out);
// Exact inverse. With a vocab, ids are range-checked. Errors carry line numbers.
std::vector<std::vector<TokenId>> read_jsonl(std::istream& in,
                                             const TokenVocab* vocab = nullptr);

// Fixed-length image tokenization behind a pluggable interface.
class ImageTokenizer {
public:
    virtual ~ImageTokenizer() = default;
    // Exactly 1024 ids in [0, image_vocab).
    virtual std::vector<int32_t> tokenize(const img::Image& image) const = 0;
};

// Deterministic non-neural stand-in: 32x32 grid of mean-luminance buckets,
// hashed into the image vocabulary. Same bytes in, same ids out; admits no
// reconstruction.
class StubImageTokenizer final : public ImageTokenizer {
public:
    explicit StubImageTokenizer(int32_t image_vocab = 8192) : vocab_(image_vocab) {}
    std::vector<int32_t> tokenize(const img::Image& image) const override;

private:
    int32_t vocab_;
};

} // namespace roam::tok
