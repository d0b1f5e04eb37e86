#pragma once

#include <vector>

#include "fracmc/evolution.hpp"

namespace fracmc {

struct FrontPoint {
    double x = 0.0;
    double y = 0.0;
};

struct CircleFit {
    bool valid = false;
    double cx = 0.0;
    double cy = 0.0;
    double radius = 0.0;
    // max | |p - c| - R | / R over the contour points.
    double circularity = 0.0;
};

struct Front {
    std::vector<FrontPoint> points;
    CircleFit circle;
    // Max distance of the points from their total-least-squares line.
    double line_deviation = 0.0;
};

// Level-set contour by marching squares: one point per grid edge whose end
// values straddle the level, placed by linear interpolation. Throws
// no-level-crossing when the field never crosses the level.
Front extract_front(const FrontField& field, double level = 0.5);

CircleFit fit_circle(const std::vector<FrontPoint>& points);

}  // namespace fracmc
