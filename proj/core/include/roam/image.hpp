#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace roam::img {

// Interleaved 8-bit RGB raster.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> rgb; // 3 * width * height

    static Image solid(int w, int h, uint8_t r, uint8_t g, uint8_t b);

    uint8_t* pixel(int x, int y) { return rgb.data() + 3 * (static_cast<std::size_t>(y) * width + x); }
    const uint8_t* pixel(int x, int y) const {
        return rgb.data() + 3 * (static_cast<std::size_t>(y) * width + x);
    }
    bool operator==(const Image&) const = default;
};

// PNG or JPEG, detected from the file's magic bytes. Throws DataError on
// unreadable or unsupported files.
Image load_image(const std::string& path);

void save_png(const Image& image, const std::string& path);

} // namespace roam::img
