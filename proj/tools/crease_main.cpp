// Command-line front end: generate / filter / extract / evaluate / pipeline.
// Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "crease/baselines.hpp"
#include "crease/crease_extract.hpp"
#include "crease/curves.hpp"
#include "crease/errors.hpp"
#include "crease/evaluate.hpp"
#include "crease/grid.hpp"
#include "crease/image_io.hpp"
#include "crease/parallel.hpp"
#include "crease/pipeline.hpp"
#include "crease/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw crease::io_error("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw crease::io_error("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

struct GenerateArgs {
    std::string spec_path;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    double snr = -1.0; // <0: take from spec
};

int cmd_generate(const GenerateArgs& a) {
    json spec = load_json(a.spec_path);
    if (a.snr >= 0.0) spec["snr"] = a.snr;
    fs::create_directories(a.out_dir);
    crease::GenerateOutcome gen = crease::run_generate(spec, a.seed);

    crease::write_sf2d(gen.clean, a.out_dir + "/clean.sf2d");
    crease::write_sf2d(gen.noisy, a.out_dir + "/noisy.sf2d");
    if (gen.clean.height > 1) {
        crease::write_png_gray(gen.clean, a.out_dir + "/clean.png");
        crease::write_png_gray(gen.noisy, a.out_dir + "/noisy.png");
    }
    crease::write_curves_json(gen.ground_truth, a.out_dir + "/gt.json");

    json manifest;
    manifest["spec"] = spec;
    manifest["seed"] = a.seed;
    manifest["measured_snr"] = gen.measured_snr;
    std::ofstream mf(a.out_dir + "/generate_manifest.json", std::ios::trunc);
    mf << manifest.dump(2) << "\n";
    std::printf("generated %dx%d image, %zu ground-truth curves\n", gen.clean.width,
                gen.clean.height, gen.ground_truth.curves.size());
    return 0;
}

struct FilterArgs {
    std::string input;
    std::string output;
    std::string scale_map_out;
    std::string reference;
    std::string snapshot_dir;
    int snapshot_every = 0;
    json params = json::object();
};

int cmd_filter(const FilterArgs& a) {
    crease::ScalarField2D u = crease::read_image(a.input);
    std::optional<crease::ScalarField2D> ref;
    if (!a.reference.empty()) ref = crease::read_image(a.reference);
    if (a.snapshot_every > 0 && !a.snapshot_dir.empty()) fs::create_directories(a.snapshot_dir);

    crease::FilterOutcome out =
        crease::run_filter(u, a.params, ref ? &*ref : nullptr,
                           a.snapshot_dir.empty() ? "." : a.snapshot_dir, a.snapshot_every);
    crease::write_image(out.filtered, a.output);
    if (!a.scale_map_out.empty() && out.scale_map)
        crease::write_image(*out.scale_map, a.scale_map_out);
    std::printf("filtered with %s: %d iterations, t=%.4g\n",
                a.params["method"].get<std::string>().c_str(), out.iterations, out.reached_time);
    return 0;
}

struct ExtractArgs {
    std::string input;
    std::string scale_map;
    std::string out = "curves.json";
    std::string csv;
    std::string overlay;
    std::string gt;
    double sigma = 1.0;
    double strength_threshold = 1e-4;
};

int cmd_extract(const ExtractArgs& a) {
    crease::ScalarField2D u = crease::read_image(a.input);
    std::optional<crease::ScalarField2D> sm;
    if (!a.scale_map.empty()) sm = crease::read_image(a.scale_map);

    json params;
    params["sigma"] = a.sigma;
    params["strength_threshold"] = a.strength_threshold;
    crease::CurveSet curves = crease::run_extract(u, sm ? &*sm : nullptr, params);
    crease::write_curves_json(curves, a.out);
    if (!a.csv.empty()) crease::write_curves_csv(curves, a.csv);
    if (!a.overlay.empty()) {
        crease::RgbImage img = crease::to_rgb(u);
        if (!a.gt.empty())
            crease::draw_curves(img, crease::read_curves_json(a.gt), {220, 40, 40});
        crease::draw_curves(img, curves, {40, 90, 220});
        crease::write_png_rgb(img, a.overlay);
    }
    std::printf("extracted %zu curves (%zu vertices)\n", curves.curves.size(),
                curves.total_vertices());
    return 0;
}

struct EvaluateArgs {
    std::string gt;
    std::string rec;
    std::string out;
    double neighborhood = 6.0;
    double sample_step = 0.25;
    bool segment_fraction = false;
};

int cmd_evaluate(const EvaluateArgs& a) {
    crease::CurveSet gt = crease::read_curves_json(a.gt);
    crease::CurveSet rec = crease::read_curves_json(a.rec);
    json params;
    params["neighborhood"] = a.neighborhood;
    params["sample_step"] = a.sample_step;
    params["segment_fraction"] = a.segment_fraction;
    crease::EvalResult res = crease::run_evaluate(gt, rec, params);
    if (!a.out.empty()) {
        std::ofstream f(a.out, std::ios::trunc);
        f << res.to_json() << "\n";
    }
    std::printf("%s\n", res.summary().c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-scale crease enhancement, extraction and evaluation"};
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "Worker thread count (default: CREASE_THREADS or all cores)");

    GenerateArgs ga;
    auto* gen = app.add_subcommand("generate", "Create a synthetic image pair plus ground truth");
    gen->add_option("--spec", ga.spec_path, "Generator spec JSON")->required();
    gen->add_option("--out", ga.out_dir, "Output directory");
    gen->add_option("--seed", ga.seed, "Noise seed");
    gen->add_option("--snr", ga.snr, "Override the spec's signal-to-noise ratio");

    FilterArgs fa;
    std::string method;
    std::string sigmas, t_grid;
    double lambda = -1, theta = -1, T = -1, tau = -1, tau_max = -1, rho = -1;
    double sigma = -1, sigma_spatial = -1, sigma_range = -1, gamma = -1, post_sigma = -1;
    int M = -1, patience = -1, max_steps = -1;
    std::string mode, polarity;
    bool verbose = false;
    auto* fil = app.add_subcommand("filter", "Run MAFOD or a baseline filter");
    fil->add_option("--input,-i", fa.input, "Input image (pgm/png/sf2d)")->required();
    fil->add_option("--output,-o", fa.output, "Output image path")->required();
    fil->add_option("--method", method,
                    "mafod | ifod | pm2 | multiscale-gaussian | bilateral | gaussian")->required();
    fil->add_option("--scale-map-out", fa.scale_map_out, "Write the MAFOD scale map here");
    fil->add_option("--reference", fa.reference, "Reference image for l2-optimal stopping");
    fil->add_option("--snapshot-every", fa.snapshot_every, "Dump a frame every K cycles/steps");
    fil->add_option("--snapshot-dir", fa.snapshot_dir, "Directory for snapshot frames");
    fil->add_option("--lambda", lambda, "Contrast parameter");
    fil->add_option("--theta", theta, "Vesselness threshold");
    fil->add_option("--sigmas", sigmas, "Scale list, e.g. 0.5:0.5:9.0");
    fil->add_option("--T", T, "Diffusion stopping time");
    fil->add_option("--M", M, "Number of FED cycles");
    fil->add_option("--tau", tau, "Explicit step size (ifod/pm2)");
    fil->add_option("--tau-max", tau_max, "FED stability step limit");
    fil->add_option("--rho", rho, "Normalized-Hessian regularization width");
    fil->add_option("--mode", mode, "both | ridges-only | valleys-only");
    fil->add_option("--polarity", polarity, "ridges | valleys (scale selection)");
    fil->add_option("--sigma", sigma, "Gaussian / IFOD regularization sigma");
    fil->add_option("--sigma-spatial", sigma_spatial, "Bilateral spatial sigma");
    fil->add_option("--sigma-range", sigma_range, "Bilateral range sigma");
    fil->add_option("--gamma", gamma, "Ridge-strength normalization exponent");
    fil->add_option("--t-grid", t_grid, "Stopping-time grid, e.g. 1:1:30");
    fil->add_option("--post-sigma", post_sigma, "Extra smoothing after multiscale-gaussian");
    fil->add_option("--patience", patience, "Cycles without l2 improvement before stopping");
    fil->add_option("--max-steps", max_steps, "Iteration cap for ifod/pm2");
    fil->add_flag("--verbose", verbose, "Progress lines on stderr");

    ExtractArgs xa;
    auto* ext = app.add_subcommand("extract", "Extract crease centerlines as polylines");
    ext->add_option("--input,-i", xa.input, "Filtered image")->required();
    ext->add_option("--scale-map", xa.scale_map, "Per-pixel sigma map (sf2d)");
    ext->add_option("--out,-o", xa.out, "Curves JSON path");
    ext->add_option("--csv", xa.csv, "Also write CSV here");
    ext->add_option("--overlay", xa.overlay, "Write an overlay PNG here");
    ext->add_option("--gt", xa.gt, "Ground-truth curves for the overlay");
    ext->add_option("--sigma", xa.sigma, "Derivative scale when no map is given");
    ext->add_option("--strength-threshold", xa.strength_threshold, "Minimum |nu| to keep a point");

    EvaluateArgs ea;
    auto* eva = app.add_subcommand("evaluate", "Score reconstructed curves against ground truth");
    eva->add_option("--gt", ea.gt, "Ground-truth curves JSON")->required();
    eva->add_option("--rec", ea.rec, "Reconstructed curves JSON")->required();
    eva->add_option("--out,-o", ea.out, "Metrics JSON path");
    eva->add_option("--neighborhood", ea.neighborhood, "Matching neighborhood in px");
    eva->add_option("--sample-step", ea.sample_step, "Densification step in px");
    eva->add_flag("--segment-fraction", ea.segment_fraction, "p over segments instead of points");

    std::string pipeline_config, pipeline_out;
    auto* pip = app.add_subcommand("pipeline", "generate + filter + extract + evaluate");
    pip->add_option("--config", pipeline_config, "Pipeline config JSON")->required();
    pip->add_option("--out", pipeline_out, "Output directory (overrides config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        crease::set_thread_count(threads);
        if (*gen) return cmd_generate(ga);
        if (*fil) {
            fa.params["method"] = method;
            if (lambda >= 0) fa.params["lambda"] = lambda;
            if (theta >= 0) fa.params["theta"] = theta;
            if (!sigmas.empty()) fa.params["sigmas"] = sigmas;
            if (T >= 0) fa.params["T"] = T;
            if (M >= 0) fa.params["M"] = M;
            if (tau >= 0) fa.params["tau"] = tau;
            if (tau_max >= 0) fa.params["tau_max"] = tau_max;
            if (rho >= 0) fa.params["rho"] = rho;
            if (!mode.empty()) fa.params["mode"] = mode;
            if (!polarity.empty()) fa.params["polarity"] = polarity;
            if (sigma >= 0) fa.params["sigma"] = sigma;
            if (sigma_spatial >= 0) fa.params["sigma_spatial"] = sigma_spatial;
            if (sigma_range >= 0) fa.params["sigma_range"] = sigma_range;
            if (gamma >= 0) fa.params["gamma"] = gamma;
            if (!t_grid.empty()) fa.params["t_grid"] = t_grid;
            if (post_sigma >= 0) fa.params["post_sigma"] = post_sigma;
            if (patience >= 0) fa.params["patience"] = patience;
            if (max_steps >= 0) fa.params["max_steps"] = max_steps;
            if (verbose) fa.params["verbose"] = true;
            return cmd_filter(fa);
        }
        if (*ext) return cmd_extract(xa);
        if (*eva) return cmd_evaluate(ea);
        if (*pip) {
            crease::PipelineOutcome out = crease::run_pipeline(load_json(pipeline_config), pipeline_out);
            std::printf("%s\n", out.metrics.summary().c_str());
            return 0;
        }
    } catch (const crease::numeric_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
