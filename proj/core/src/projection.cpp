#include "roam/projection.hpp"

#include "roam/errors.hpp"

#include <cmath>

namespace roam::proj {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg2rad(double d) { return d * kPi / 180.0; }

uint8_t to_byte(double v) {
    const long r = std::lround(v);
    return static_cast<uint8_t>(r < 0 ? 0 : (r > 255 ? 255 : r));
}

} // namespace

void Equirect::validate() const {
    if (image.width <= 0 || image.height <= 0)
        throw DataError("equirect: empty image");
    if (image.width != 2 * image.height)
        throw DataError("equirect: aspect ratio must be exactly 2:1, got " +
                        std::to_string(image.width) + "x" + std::to_string(image.height));
}

std::array<double, 3> sample_equirect(const img::Image& image, double x, double y) {
    const int w = image.width, h = image.height;
    // Texel centers sit at integer + 0.5.
    double xf = x - 0.5;
    double yf = y - 0.5;
    if (yf < 0.0) yf = 0.0;
    if (yf > h - 1.0) yf = h - 1.0;

    const double x0d = std::floor(xf);
    const double y0d = std::floor(yf);
    const double tx = xf - x0d;
    const double ty = yf - y0d;

    auto wrap = [&](long xi) {
        long m = xi % w;
        return static_cast<int>(m < 0 ? m + w : m);
    };
    const int x0 = wrap(static_cast<long>(x0d));
    const int x1 = wrap(static_cast<long>(x0d) + 1);
    const int y0 = static_cast<int>(y0d);
    const int y1 = std::min(y0 + 1, h - 1);

    const uint8_t* p00 = image.pixel(x0, y0);
    const uint8_t* p10 = image.pixel(x1, y0);
    const uint8_t* p01 = image.pixel(x0, y1);
    const uint8_t* p11 = image.pixel(x1, y1);

    std::array<double, 3> out;
    for (int c = 0; c < 3; ++c) {
        const double top = p00[c] * (1.0 - tx) + p10[c] * tx;
        const double bot = p01[c] * (1.0 - tx) + p11[c] * tx;
        out[c] = top * (1.0 - ty) + bot * ty;
    }
    return out;
}

img::Image project_view(const Equirect& pano, const ViewSpec& spec) {
    pano.validate();
    if (spec.fov_deg <= 0.0 || spec.fov_deg >= 180.0)
        throw DataError("fov out of range (0, 180): " + std::to_string(spec.fov_deg));
    if (spec.out_size <= 0) throw DataError("out_size must be positive");

    const int n = spec.out_size;
    const int w = pano.image.width, h = pano.image.height;
    const double tan_half = std::tan(deg2rad(spec.fov_deg) / 2.0);
    const double yaw = deg2rad(spec.heading_deg - pano.base_heading);
    const double pitch = deg2rad(spec.pitch_deg);
    const double cp = std::cos(pitch), sp = std::sin(pitch);

    img::Image out;
    out.width = out.height = n;
    out.rgb.resize(static_cast<std::size_t>(n) * n * 3);

    for (int py = 0; py < n; ++py) {
        const double v = (2.0 * (py + 0.5) / n - 1.0) * tan_half; // down positive
        for (int px = 0; px < n; ++px) {
            const double u = (2.0 * (px + 0.5) / n - 1.0) * tan_half; // right positive

            // Camera ray (x right, y down, z forward), tilted by pitch about
            // the right axis, then yawed toward the requested heading.
            const double rx = u;
            const double ry = v * cp - 1.0 * sp;
            const double rz = 1.0 * cp + v * sp;

            const double azimuth = yaw + std::atan2(rx, rz);
            const double elevation = std::atan2(-ry, std::hypot(rx, rz));

            const double xi = (azimuth / (2.0 * kPi) + 0.5) * w;
            const double yi = (0.5 - elevation / kPi) * h;
            const auto rgb = sample_equirect(pano.image, xi, yi);

            uint8_t* dst = out.pixel(px, py);
            dst[0] = to_byte(rgb[0]);
            dst[1] = to_byte(rgb[1]);
            dst[2] = to_byte(rgb[2]);
        }
    }
    return out;
}

std::array<img::Image, 4> project_lookaround(const Equirect& pano, int out_size) {
    std::array<img::Image, 4> out;
    for (int k = 0; k < 4; ++k) {
        ViewSpec spec;
        spec.heading_deg = pano.base_heading + 90.0 * k;
        spec.fov_deg = 90.0;
        spec.pitch_deg = 0.0;
        spec.out_size = out_size;
        out[k] = project_view(pano, spec);
    }
    return out;
}

} // namespace roam::proj
