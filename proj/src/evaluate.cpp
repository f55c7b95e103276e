#include "crease/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

namespace crease {

void EvalConfig::validate() const {
    if (!(neighborhood > 0.0)) throw parameter_error("neighborhood must be positive");
    if (!(sample_step > 0.0)) throw parameter_error("sample step must be positive");
}

namespace {

double point_segment_dist2(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const Vec2 q{a.x + t * ab.x, a.y + t * ab.y};
    return dot(p - q, p - q);
}

double point_polyline_dist(Vec2 p, const Polyline& line) {
    if (line.vertices.size() == 1) {
        Vec2 d = p - line.vertices.front();
        return std::sqrt(dot(d, d));
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < line.vertices.size(); ++i)
        best = std::min(best, point_segment_dist2(p, line.vertices[i - 1], line.vertices[i]));
    return std::sqrt(best);
}

double directed_hausdorff(const std::vector<Vec2>& pts, const Polyline& target) {
    double worst = 0.0;
    for (const Vec2& p : pts) worst = std::max(worst, point_polyline_dist(p, target));
    return worst;
}

} // namespace

double hausdorff(const Polyline& a, const Polyline& b, double sample_step) {
    if (a.vertices.empty() || b.vertices.empty())
        throw parameter_error("hausdorff needs non-degenerate polylines");
    const std::vector<Vec2> da = densify(a, sample_step);
    const std::vector<Vec2> db = densify(b, sample_step);
    return std::max(directed_hausdorff(da, b), directed_hausdorff(db, a));
}

EvalResult match_and_score(const CurveSet& gt, const CurveSet& rec, const EvalConfig& cfg) {
    cfg.validate();
    if (gt.curves.empty()) throw parameter_error("ground truth must not be empty");

    std::vector<std::vector<Vec2>> rec_dense;
    rec_dense.reserve(rec.curves.size());
    for (const auto& c : rec.curves) rec_dense.push_back(densify(c, cfg.sample_step));

    EvalResult res;
    std::size_t total_points = 0, matched_points = 0;
    double dist_sum = 0.0;
    int segments_matched = 0;

    for (int gi = 0; gi < static_cast<int>(gt.curves.size()); ++gi) {
        const Polyline& g = gt.curves[gi];
        const std::vector<Vec2> gd = densify(g, cfg.sample_step);
        total_points += gd.size();

        SegmentScore score;
        score.gt_index = gi;
        score.n_points = static_cast<int>(gd.size());

        // Candidates: any densified reconstructed point within the
        // neighborhood of the gt chain.
        double best_h = std::numeric_limits<double>::infinity();
        for (int ri = 0; ri < static_cast<int>(rec.curves.size()); ++ri) {
            if (rec.curves[ri].vertices.empty()) continue;
            bool near = false;
            for (const Vec2& p : rec_dense[ri])
                if (point_polyline_dist(p, g) <= cfg.neighborhood) {
                    near = true;
                    break;
                }
            if (!near) continue;
            const double hd = hausdorff(g, rec.curves[ri], cfg.sample_step);
            if (hd < best_h) {
                best_h = hd;
                score.rec_index = ri;
            }
        }

        if (score.rec_index >= 0) {
            score.hausdorff = best_h;
            ++segments_matched;
            const Polyline& m = rec.curves[score.rec_index];
            double seg_sum = 0.0;
            for (const Vec2& p : gd) {
                const double d = point_polyline_dist(p, m);
                if (d <= cfg.neighborhood) {
                    ++score.n_matched;
                    seg_sum += d;
                }
            }
            score.mean_dist = score.n_matched > 0 ? seg_sum / score.n_matched : 0.0;
            matched_points += score.n_matched;
            dist_sum += seg_sum;
        }
        res.segments.push_back(score);
    }

    res.mean_distance = matched_points > 0 ? dist_sum / matched_points : 0.0;
    if (cfg.segment_fraction)
        res.matched_fraction = static_cast<double>(segments_matched) / gt.curves.size();
    else
        res.matched_fraction =
            total_points > 0 ? static_cast<double>(matched_points) / total_points : 0.0;
    return res;
}

std::string EvalResult::summary() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "E=%.3f, p=%.0f%%", mean_distance, 100.0 * matched_fraction);
    return buf;
}

std::string EvalResult::to_json() const {
    nlohmann::ordered_json root;
    root["E"] = mean_distance;
    root["p"] = matched_fraction;
    root["segments"] = nlohmann::ordered_json::array();
    for (const auto& s : segments) {
        nlohmann::ordered_json js;
        js["gt"] = s.gt_index;
        js["rec"] = s.rec_index;
        js["hausdorff"] = s.hausdorff;
        js["mean_dist"] = s.mean_dist;
        js["points"] = s.n_points;
        js["matched"] = s.n_matched;
        root["segments"].push_back(std::move(js));
    }
    return root.dump(2);
}

double l2_distance(const ScalarField2D& u, const ScalarField2D& v) {
    if (!u.same_dims(v)) throw parameter_error("l2_distance needs matching dimensions");
    // Row-wise partials, deterministic under threading.
    double total = 0.0;
    for (int y = 0; y < u.height; ++y) {
        double row = 0.0;
        const double* a = u.data.data() + u.idx(0, y);
        const double* b = v.data.data() + v.idx(0, y);
        for (int x = 0; x < u.width; ++x) {
            const double d = a[x] - b[x];
            row += d * d;
        }
        total += row;
    }
    return std::sqrt(total);
}

double snr(const ScalarField2D& clean, const ScalarField2D& noisy) {
    if (!clean.same_dims(noisy)) throw parameter_error("snr needs matching dimensions");
    ScalarField2D noise = noisy;
    for (std::size_t i = 0; i < noise.size(); ++i) noise.data[i] -= clean.data[i];
    const double sn = stddev_value(noise);
    if (sn == 0.0) return std::numeric_limits<double>::infinity();
    return stddev_value(clean) / sn;
}

} // namespace crease
