#include "crease/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "crease/parallel.hpp"
#include "crease/prng.hpp"

namespace crease {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

SyntheticImage gen_concentric(int size, const std::vector<double>& radii,
                              const std::vector<double>& widths) {
    if (size < 8) throw parameter_error("image size too small");
    if (radii.size() != widths.size()) throw parameter_error("radii/widths length mismatch");
    const double c = 0.5 * (size - 1);
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0) || !(widths[i] > 0.0))
            throw parameter_error("radii and widths must be positive");
        if (radii[i] + 3.0 * widths[i] > c)
            throw parameter_error("ring does not fit in the image");
    }
    // Overlap check: contribution of ring i at ring j's centerline.
    for (std::size_t i = 0; i < radii.size(); ++i)
        for (std::size_t j = 0; j < radii.size(); ++j) {
            if (i == j) continue;
            const double dr = radii[i] - radii[j];
            if (std::exp(-dr * dr / (2.0 * widths[i] * widths[i])) > 0.1)
                std::fprintf(stderr,
                             "warning: ring profiles %zu and %zu overlap by more than 10%%\n",
                             i, j);
        }

    SyntheticImage out;
    out.image = ScalarField2D(size, size);
    parallel_rows(size, [&](int y) {
        for (int x = 0; x < size; ++x) {
            const double r = std::hypot(x - c, y - c);
            double v = 0.0;
            for (std::size_t i = 0; i < radii.size(); ++i) {
                const double d = r - radii[i];
                v += std::exp(-d * d / (2.0 * widths[i] * widths[i]));
            }
            out.image.at(x, y) = std::min(v, 1.0);
        }
    });

    for (std::size_t i = 0; i < radii.size(); ++i) {
        Polyline ring;
        ring.kind = CreaseKind::ridge;
        const double arc = 0.5; // px
        const int n = std::max(16, static_cast<int>(std::ceil(2.0 * kPi * radii[i] / arc)));
        for (int k = 0; k < n; ++k) {
            const double a = 2.0 * kPi * k / n;
            ring.vertices.push_back({c + radii[i] * std::cos(a), c + radii[i] * std::sin(a)});
        }
        ring.vertices.push_back(ring.vertices.front());
        out.ground_truth.curves.push_back(std::move(ring));
    }
    return out;
}

std::vector<Vec2> make_sine_path(int size, double amplitude, double margin) {
    std::vector<Vec2> path;
    const double x0 = margin, x1 = size - 1 - margin;
    const double cy = 0.5 * (size - 1);
    const int n = static_cast<int>(std::ceil((x1 - x0) / 0.25));
    for (int i = 0; i <= n; ++i) {
        const double x = x0 + (x1 - x0) * i / n;
        const double y = cy + amplitude * std::sin(2.0 * kPi * (x - x0) / (x1 - x0));
        path.push_back({x, y});
    }
    return path;
}

namespace {

struct PathGeometry {
    std::vector<Vec2> points;
    std::vector<double> arc; // cumulative arc length per point

    double total() const { return arc.back(); }

    // Nearest path point: returns (distance, arc length at the foot).
    std::pair<double, double> nearest(Vec2 p) const {
        double best_d2 = std::numeric_limits<double>::infinity();
        double best_s = 0.0;
        for (std::size_t i = 1; i < points.size(); ++i) {
            const Vec2 a = points[i - 1], b = points[i];
            const Vec2 ab = b - a;
            const double len2 = dot(ab, ab);
            double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            const Vec2 q{a.x + t * ab.x, a.y + t * ab.y};
            const double d2 = dot(p - q, p - q);
            if (d2 < best_d2) {
                best_d2 = d2;
                best_s = arc[i - 1] + t * (arc[i] - arc[i - 1]);
            }
        }
        return {std::sqrt(best_d2), best_s};
    }

    Vec2 at_arc(double s) const {
        s = std::clamp(s, 0.0, total());
        auto it = std::lower_bound(arc.begin(), arc.end(), s);
        std::size_t i = std::min<std::size_t>(it - arc.begin(), points.size() - 1);
        if (i == 0) return points.front();
        const double seg = arc[i] - arc[i - 1];
        const double f = seg > 0.0 ? (s - arc[i - 1]) / seg : 0.0;
        return {points[i - 1].x + f * (points[i].x - points[i - 1].x),
                points[i - 1].y + f * (points[i].y - points[i - 1].y)};
    }
};

PathGeometry build_geometry(const std::vector<Vec2>& path) {
    if (path.size() < 2) throw parameter_error("path needs at least 2 points");
    PathGeometry geom;
    geom.points = path;
    geom.arc.resize(path.size());
    geom.arc[0] = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i)
        geom.arc[i] = geom.arc[i - 1] + norm(path[i] - path[i - 1]);
    return geom;
}

// 1 outside occlusions, 0 inside, 1 px linear ramps at the ends.
double occlusion_mask(double s, const std::vector<OcclusionInterval>& occ) {
    double m = 1.0;
    for (const auto& o : occ) {
        double outside = s < o.begin ? o.begin - s : (s > o.end ? s - o.end : 0.0);
        m = std::min(m, std::clamp(outside, 0.0, 1.0));
    }
    return m;
}

} // namespace

SyntheticImage gen_occluded_vessel(int size, const std::vector<Vec2>& path, double width,
                                   const std::vector<OcclusionInterval>& occlusions) {
    if (size < 8) throw parameter_error("image size too small");
    if (!(width > 0.0)) throw parameter_error("vessel width must be positive");
    PathGeometry geom = build_geometry(path);
    for (std::size_t i = 0; i < occlusions.size(); ++i) {
        const auto& o = occlusions[i];
        if (!(o.begin >= 0.0) || !(o.end > o.begin) || o.end > geom.total())
            throw parameter_error("occlusion interval outside the path parameter range");
        for (std::size_t j = i + 1; j < occlusions.size(); ++j)
            if (o.begin < occlusions[j].end && occlusions[j].begin < o.end)
                throw parameter_error("occlusion intervals must be disjoint");
    }

    SyntheticImage out;
    out.image = ScalarField2D(size, size);
    parallel_rows(size, [&](int y) {
        for (int x = 0; x < size; ++x) {
            auto [d, s] = geom.nearest({double(x), double(y)});
            const double profile = std::exp(-d * d / (2.0 * width * width));
            out.image.at(x, y) = occlusion_mask(s, occlusions) * profile;
        }
    });

    // Ground truth along the path, occluded spans excluded.
    std::vector<std::pair<double, double>> spans;
    double cursor = 0.0;
    std::vector<OcclusionInterval> sorted = occlusions;
    std::sort(sorted.begin(), sorted.end(),
              [](const OcclusionInterval& a, const OcclusionInterval& b) { return a.begin < b.begin; });
    for (const auto& o : sorted) {
        if (o.begin > cursor) spans.emplace_back(cursor, o.begin);
        cursor = o.end;
    }
    if (cursor < geom.total()) spans.emplace_back(cursor, geom.total());

    for (const auto& [s0, s1] : spans) {
        if (s1 - s0 < 1.0) continue;
        Polyline p;
        p.kind = CreaseKind::ridge;
        const int n = std::max(2, static_cast<int>(std::ceil((s1 - s0) / 0.5)));
        for (int k = 0; k <= n; ++k)
            p.vertices.push_back(geom.at_arc(s0 + (s1 - s0) * k / n));
        out.ground_truth.curves.push_back(std::move(p));
    }
    return out;
}

ScalarField2D add_noise(const ScalarField2D& u, double target_snr, std::uint64_t seed) {
    if (!(target_snr > 0.0)) throw parameter_error("target SNR must be positive");
    const double sigma = stddev_value(u) / target_snr;
    ScalarField2D out = u;
    parallel_rows(u.height, [&](int y) {
        for (int x = 0; x < u.width; ++x) {
            const std::size_t i = u.idx(x, y);
            out.data[i] += sigma * normal01(seed, i);
        }
    });
    return out;
}

std::vector<double> gen_trapezoid_1d(int length, int plateau, double slope) {
    if (length < 5) throw parameter_error("signal too short");
    if (plateau < 0 || !(slope > 0.0)) throw parameter_error("invalid trapezoid parameters");
    const double ramp = 1.0 / slope;
    if (plateau + 2.0 * ramp + 2.0 > length)
        throw parameter_error("trapezoid does not fit in the signal");

    const double center = 0.5 * (length - 1);
    const double a = center - 0.5 * (plateau - 1) - ramp;
    const double b = center + 0.5 * (plateau - 1) + ramp;
    std::vector<double> s(length);
    for (int i = 0; i < length; ++i)
        s[i] = std::clamp(slope * std::min(i - a, b - i), 0.0, 1.0);
    return s;
}

} // namespace crease
