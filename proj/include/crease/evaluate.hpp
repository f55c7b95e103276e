#ifndef CREASE_EVALUATE_HPP
#define CREASE_EVALUATE_HPP

#include <string>
#include <vector>

#include "crease/curves.hpp"
#include "crease/field.hpp"

namespace crease {

struct EvalConfig {
    double neighborhood = 6.0;  // px; 6 for synthetic data, 10 for real data
    double sample_step = 0.25;  // arc-length densification step
    bool segment_fraction = false; // p over segments instead of sample points

    void validate() const;
};

struct SegmentScore {
    int gt_index = -1;
    int rec_index = -1;      // -1: no candidate within the neighborhood
    double hausdorff = -1.0; // to the matched curve
    double mean_dist = 0.0;  // over matched sample points
    int n_points = 0;
    int n_matched = 0;
};

struct EvalResult {
    double mean_distance = 0.0;  // E, px
    double matched_fraction = 0.0; // p in [0,1]
    std::vector<SegmentScore> segments;

    /// "E=0.332, p=100%"
    std::string summary() const;
    std::string to_json() const;
};

/// Symmetric Hausdorff distance between polylines, vertices densified at
/// sample_step, distances measured point-to-segment.
double hausdorff(const Polyline& a, const Polyline& b, double sample_step = 0.25);

/// Per ground-truth chain: candidates are reconstructed chains that come
/// within `neighborhood` of it; the Hausdorff-minimal candidate is matched.
/// A gt sample point counts as matched when its distance to the matched
/// chain is within the neighborhood; E averages those distances, p is the
/// matched fraction of all gt sample points.
EvalResult match_and_score(const CurveSet& gt, const CurveSet& rec, const EvalConfig& cfg);

/// sqrt(sum (u_i - v_i)^2).
double l2_distance(const ScalarField2D& u, const ScalarField2D& v);

/// stddev(clean) / stddev(noisy - clean); +inf when the images are equal.
double snr(const ScalarField2D& clean, const ScalarField2D& noisy);

} // namespace crease

#endif
