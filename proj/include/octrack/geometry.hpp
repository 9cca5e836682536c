#pragma once

#include <algorithm>
#include <cmath>

namespace octrack {

/// Axis-aligned bounding box in corner format, pixel units.
struct Box {
    double x1 = 0.0;
    double y1 = 0.0;
    double x2 = 0.0;
    double y2 = 0.0;

    double width() const { return x2 - x1; }
    double height() const { return y2 - y1; }
    double area() const { return width() * height(); }
    double center_u() const { return 0.5 * (x1 + x2); }
    double center_v() const { return 0.5 * (y1 + y2); }

    /// True when the box has positive extent and finite corners.
    bool valid() const {
        return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) &&
               std::isfinite(y2) && x2 > x1 && y2 > y1;
    }
};

/// Intersection over union of two boxes. Returns 0 for disjoint boxes.
inline double iou(const Box& a, const Box& b) {
    const double ix1 = std::max(a.x1, b.x1);
    const double iy1 = std::max(a.y1, b.y1);
    const double ix2 = std::min(a.x2, b.x2);
    const double iy2 = std::min(a.y2, b.y2);
    const double iw = ix2 - ix1;
    const double ih = iy2 - iy1;
    if (iw <= 0.0 || ih <= 0.0) {
        return 0.0;
    }
    const double inter = iw * ih;
    return inter / (a.area() + b.area() - inter);
}

}  // namespace octrack
