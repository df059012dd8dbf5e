#pragma once

#include "roam/image.hpp"

#include <array>

namespace roam::proj {

// Full-sphere panorama. Width must be exactly twice the height; column x
// covers azimuth base_heading + (x + 0.5 - W/2) * 360/W, row y covers
// elevation +90..-90 top to bottom.
struct Equirect {
    img::Image image;
    double base_heading = 0.0; // true-north azimuth of the horizontal center

    // Throws DataError unless the aspect ratio is exactly 2:1.
    void validate() const;
};

struct ViewSpec {
    double heading_deg = 0.0; // absolute, true north
    double pitch_deg = 0.0;
    double fov_deg = 90.0;    // horizontal field of view, (0, 180)
    int out_size = 512;       // square output
};

// Gnomonic (rectilinear) render: each output pixel casts a pinhole ray,
// converted to spherical coordinates and sampled bilinearly with horizontal
// wraparound and vertical clamp. Deterministic.
img::Image project_view(const Equirect& pano, const ViewSpec& spec);

// Views at relative headings {0, 90, 180, 270}, fov 90, pitch 0. Together
// they tile the full horizon.
std::array<img::Image, 4> project_lookaround(const Equirect& pano, int out_size = 512);

// Bilinear sample of the panorama at continuous image coordinates
// (x in [0, W) wrapping, y clamped); exposed for tests.
std::array<double, 3> sample_equirect(const img::Image& image, double x, double y);

} // namespace roam::proj
