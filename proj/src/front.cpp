#include "fracmc/front.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "fracmc/errors.hpp"

namespace fracmc {

CircleFit fit_circle(const std::vector<FrontPoint>& points) {
    CircleFit fit;
    const Eigen::Index m = static_cast<Eigen::Index>(points.size());
    if (m < 3) return fit;
    // Algebraic fit x^2 + y^2 + D x + E y + F = 0.
    Eigen::MatrixXd A(m, 3);
    Eigen::VectorXd b(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const FrontPoint& p = points[static_cast<size_t>(k)];
        A(k, 0) = p.x;
        A(k, 1) = p.y;
        A(k, 2) = 1.0;
        b(k) = -(p.x * p.x + p.y * p.y);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < 3) return fit;
    const Eigen::Vector3d c = qr.solve(b);
    fit.cx = -0.5 * c(0);
    fit.cy = -0.5 * c(1);
    const double r2 = fit.cx * fit.cx + fit.cy * fit.cy - c(2);
    if (!(r2 > 0.0)) return fit;
    fit.radius = std::sqrt(r2);
    double dev = 0.0;
    for (const FrontPoint& p : points) dev = std::max(dev, std::abs(std::hypot(p.x - fit.cx, p.y - fit.cy) - fit.radius));
    fit.circularity = dev / fit.radius;
    fit.valid = std::isfinite(fit.radius);
    return fit;
}

Front extract_front(const FrontField& field, double level) {
    const int N = field.grid.nodes;
    if (field.values.size() != static_cast<size_t>(N) * N)
        throw Error(ErrorKind::invalid_parameter, "field size does not match its grid");
    Front front;
    auto crossing = [&](int i0, int j0, int i1, int j1) {
        const double a = field.at(i0, j0) - level, b = field.at(i1, j1) - level;
        if ((a < 0.0) == (b < 0.0)) return;
        const double t = a / (a - b);
        const double x0 = field.grid.coord(i0), y0 = field.grid.coord(j0);
        const double x1 = field.grid.coord(i1), y1 = field.grid.coord(j1);
        front.points.push_back({x0 + t * (x1 - x0), y0 + t * (y1 - y0)});
    };
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) {
            if (i + 1 < N) crossing(i, j, i + 1, j);
            if (j + 1 < N) crossing(i, j, i, j + 1);
        }
    if (front.points.empty()) throw Error(ErrorKind::no_level_crossing, "field does not cross the requested level");

    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const FrontPoint& p : front.points) mean += Eigen::Vector2d(p.x, p.y);
    mean /= static_cast<double>(front.points.size());
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const FrontPoint& p : front.points) {
        const Eigen::Vector2d d = Eigen::Vector2d(p.x, p.y) - mean;
        cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
    const Eigen::Vector2d normal = es.eigenvectors().col(0);
    for (const FrontPoint& p : front.points)
        front.line_deviation = std::max(front.line_deviation, std::abs(normal.dot(Eigen::Vector2d(p.x, p.y) - mean)));
    front.circle = fit_circle(front.points);
    return front;
}

}  // namespace fracmc
