#ifndef CREASE_PIPELINE_HPP
#define CREASE_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "crease/curves.hpp"
#include "crease/evaluate.hpp"
#include "crease/field.hpp"
#include "crease/image_io.hpp"
#include "crease/synthgen.hpp"

namespace crease {

/// "0.5:0.5:9.0" (start:step:end, inclusive), "0.5,1.0,2.0", or a JSON array.
std::vector<double> parse_sigma_list(const nlohmann::json& value);

struct GenerateOutcome {
    ScalarField2D clean;
    ScalarField2D noisy;
    CurveSet ground_truth;
    double measured_snr = 0.0;
};

/// Runs a generator spec ({"kind":"concentric",...}); snr <= 0 skips noise.
GenerateOutcome run_generate(const nlohmann::json& spec, std::uint64_t seed);

struct FilterOutcome {
    ScalarField2D filtered;
    std::optional<ScalarField2D> scale_map; // MAFOD: postprocessed map of the output
    int iterations = 0;   // cycles (FED) or explicit steps
    double reached_time = 0.0;
};

/// Dispatches on params["method"]: mafod, ifod, pm2, multiscale-gaussian,
/// bilateral, gaussian. `reference` enables l2-optimal stopping where the
/// method is iterative; snapshot_dir + snapshot_every dump numbered frames.
FilterOutcome run_filter(const ScalarField2D& input, const nlohmann::json& params,
                         const ScalarField2D* reference = nullptr,
                         const std::string& snapshot_dir = "", int snapshot_every = 0);

CurveSet run_extract(const ScalarField2D& u, const ScalarField2D* scale_map,
                     const nlohmann::json& params);

EvalResult run_evaluate(const CurveSet& gt, const CurveSet& rec, const nlohmann::json& params);

void draw_curves(RgbImage& img, const CurveSet& cs, std::array<std::uint8_t, 3> color);

struct PipelineOutcome {
    EvalResult metrics;
    std::string out_dir;
};

/// generate -> filter -> extract -> evaluate, writing images, curves,
/// metrics.json and a manifest (parameters + timing) under out_dir.
PipelineOutcome run_pipeline(const nlohmann::json& config, const std::string& out_dir);

} // namespace crease

#endif
