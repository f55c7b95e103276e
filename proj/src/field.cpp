#include "crease/field.hpp"

#include <algorithm>
#include <cmath>

namespace crease {

double ScalarField2D::sample(double x, double y) const {
    x = std::clamp(x, 0.0, static_cast<double>(width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(height - 1));
    int x0 = std::min(static_cast<int>(x), width - 2 < 0 ? 0 : width - 2);
    int y0 = std::min(static_cast<int>(y), height - 2 < 0 ? 0 : height - 2);
    int x1 = std::min(x0 + 1, width - 1);
    int y1 = std::min(y0 + 1, height - 1);
    double fx = x - x0;
    double fy = y - y0;
    double a = at(x0, y0) * (1.0 - fx) + at(x1, y0) * fx;
    double b = at(x0, y1) * (1.0 - fx) + at(x1, y1) * fx;
    return a * (1.0 - fy) + b * fy;
}

namespace {

template <class Row>
double reduce_rows_sum(const ScalarField2D& u, Row row) {
    // Per-row partials combined serially: independent of thread count.
    std::vector<double> partial(u.height, 0.0);
    for (int y = 0; y < u.height; ++y) partial[y] = row(y);
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

} // namespace

double l2_norm(const ScalarField2D& u) {
    double s = reduce_rows_sum(u, [&](int y) {
        double acc = 0.0;
        const double* p = u.data.data() + u.idx(0, y);
        for (int x = 0; x < u.width; ++x) acc += p[x] * p[x];
        return acc;
    });
    return std::sqrt(s);
}

double min_value(const ScalarField2D& u) {
    return *std::min_element(u.data.begin(), u.data.end());
}

double max_value(const ScalarField2D& u) {
    return *std::max_element(u.data.begin(), u.data.end());
}

double mean_value(const ScalarField2D& u) {
    double s = reduce_rows_sum(u, [&](int y) {
        double acc = 0.0;
        const double* p = u.data.data() + u.idx(0, y);
        for (int x = 0; x < u.width; ++x) acc += p[x];
        return acc;
    });
    return s / static_cast<double>(u.size());
}

double stddev_value(const ScalarField2D& u) {
    double m = mean_value(u);
    double s = reduce_rows_sum(u, [&](int y) {
        double acc = 0.0;
        const double* p = u.data.data() + u.idx(0, y);
        for (int x = 0; x < u.width; ++x) {
            double d = p[x] - m;
            acc += d * d;
        }
        return acc;
    });
    return std::sqrt(s / static_cast<double>(u.size()));
}

} // namespace crease
