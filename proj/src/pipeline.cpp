#include "crease/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "crease/baselines.hpp"
#include "crease/crease_extract.hpp"
#include "crease/grid.hpp"
#include "crease/solver.hpp"

namespace crease {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<double> parse_sigma_list(const json& value) {
    std::vector<double> out;
    if (value.is_array()) {
        for (const auto& v : value) out.push_back(v.get<double>());
        return out;
    }
    const std::string s = value.get<std::string>();
    const char sep = s.find(':') != std::string::npos ? ':' : ',';
    std::vector<double> parts;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t next = s.find(sep, pos);
        if (next == std::string::npos) next = s.size();
        try {
            parts.push_back(std::stod(s.substr(pos, next - pos)));
        } catch (const std::exception&) {
            throw parameter_error("cannot parse scale list: " + s);
        }
        pos = next + 1;
    }
    if (sep == ',') return parts;
    if (parts.size() != 3) throw parameter_error("range form must be start:step:end");
    const double start = parts[0], step = parts[1], end = parts[2];
    if (!(step > 0.0) || end < start) throw parameter_error("bad scale range: " + s);
    for (double v = start; v <= end + 1e-9; v += step) out.push_back(v);
    return out;
}

GenerateOutcome run_generate(const json& spec, std::uint64_t seed) {
    if (!spec.contains("kind")) throw parameter_error("generator spec needs a \"kind\"");
    const std::string kind = spec["kind"].get<std::string>();

    GenerateOutcome out;
    SyntheticImage img;
    if (kind == "concentric") {
        img = gen_concentric(spec.value("size", 256),
                             spec.at("radii").get<std::vector<double>>(),
                             spec.at("widths").get<std::vector<double>>());
    } else if (kind == "occluded-vessel") {
        const int size = spec.value("size", 256);
        std::vector<Vec2> path;
        if (spec.contains("path")) {
            for (const auto& p : spec["path"]) path.push_back({p.at(0), p.at(1)});
        } else {
            path = make_sine_path(size, spec.value("amplitude", 18.0), spec.value("margin", 12.0));
        }
        std::vector<OcclusionInterval> occ;
        for (const auto& o : spec.value("occlusions", json::array()))
            occ.push_back({o.at(0), o.at(1)});
        img = gen_occluded_vessel(size, path, spec.value("width", 2.5), occ);
    } else if (kind == "trapezoid-1d") {
        std::vector<double> sig = gen_trapezoid_1d(spec.value("length", 129),
                                                   spec.value("plateau", 21),
                                                   spec.value("slope", 0.04));
        img.image = ScalarField2D(static_cast<int>(sig.size()), 1);
        img.image.data = sig;
    } else {
        throw parameter_error("unknown generator kind: " + kind);
    }

    out.clean = img.image;
    out.ground_truth = std::move(img.ground_truth);
    const double target_snr = spec.value("snr", 0.0);
    if (target_snr > 0.0) {
        out.noisy = add_noise(out.clean, target_snr, seed);
        out.measured_snr = snr(out.clean, out.noisy);
    } else {
        out.noisy = out.clean;
        out.measured_snr = std::numeric_limits<double>::infinity();
    }
    return out;
}

namespace {

ScaleConfig scale_config_from(const json& p) {
    ScaleConfig cfg;
    cfg.sigmas = p.contains("sigmas") ? parse_sigma_list(p["sigmas"])
                                      : parse_sigma_list(json("0.5:0.5:9.0"));
    cfg.rho = p.value("rho", 0.5);
    cfg.beta = p.value("beta", 0.5);
    cfg.theta = p.value("theta", 0.2);
    cfg.polarity = p.value("polarity", "ridges") == std::string("valleys")
                       ? Polarity::valleys
                       : Polarity::ridges;
    return cfg;
}

DiffusivityConfig diff_config_from(const json& p) {
    DiffusivityConfig cfg;
    cfg.lambda = p.value("lambda", 0.005);
    const std::string mode = p.value("mode", "both");
    if (mode == "both") cfg.mode = DiffusivityConfig::Mode::both;
    else if (mode == "ridges-only") cfg.mode = DiffusivityConfig::Mode::ridges_only;
    else if (mode == "valleys-only") cfg.mode = DiffusivityConfig::Mode::valleys_only;
    else throw parameter_error("unknown diffusivity mode: " + mode);
    return cfg;
}

void dump_snapshot(const ScalarField2D& u, const std::string& dir, int index, double time) {
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_%04d_t%.4g", index, time);
    write_png_gray(u, dir + "/" + std::string(name) + ".png");
    write_sf2d(u, dir + "/" + std::string(name) + ".sf2d");
}

FilterOutcome filter_mafod(const ScalarField2D& input, const json& p,
                           const ScalarField2D* reference, const std::string& snapshot_dir,
                           int snapshot_every) {
    MafodParams params;
    params.scale_cfg = scale_config_from(p);
    params.diff_cfg = diff_config_from(p);
    params.rho = p.value("rho", 0.5);
    params.log_progress = p.value("verbose", false);
    FedSchedule sched = make_fed_schedule(p.value("T", 500.0), p.value("M", 10000),
                                          p.value("tau_max", 0.05));

    ScalarField2D best = input;
    CycleObserver stopper;
    if (reference) stopper = l2_stopper(*reference, p.value("patience", 3), &best);

    FilterOutcome out;
    CycleObserver observer = [&](const CycleSnapshot& snap) {
        out.iterations = snap.cycle;
        out.reached_time = snap.time;
        if (snapshot_every > 0 && snap.cycle % snapshot_every == 0)
            dump_snapshot(snap.u, snapshot_dir, snap.cycle, snap.time);
        return stopper ? stopper(snap) : true;
    };

    ScalarField2D last = run_mafod(input, params, sched, observer);
    out.filtered = reference ? best : last;

    // Scale map of the final image, for downstream extraction.
    VesselnessResult scales = select_scales(out.filtered, params.scale_cfg);
    bool any = false;
    for (auto s : scales.segmentation)
        if (s) { any = true; break; }
    out.scale_map = any ? postprocess_scale_map(scales, out.filtered) : scales.scale_map;
    return out;
}

FilterOutcome filter_iterative(const ScalarField2D& input, const json& p,
                               const ScalarField2D* reference, bool fourth_order) {
    const double tau = p.value("tau", fourth_order ? 0.03 : 0.2);
    const double total_time = p.value("T", 20.0);
    const int max_steps = p.value("max_steps",
                                  static_cast<int>(std::ceil(total_time / tau)));
    const double lambda = p.value("lambda", 0.005);
    const double sigma_reg = p.value("sigma", fourth_order ? 1.0 : 0.0);
    const int patience = p.value("patience", 3);

    ScalarField2D u = input, best = input;
    double best_l2 = reference ? l2_distance(*reference, u)
                               : std::numeric_limits<double>::infinity();
    int bad = 0;
    FilterOutcome out;
    for (int k = 1; k <= max_steps; ++k) {
        u = fourth_order ? ifod_step(u, lambda, tau, sigma_reg)
                         : pm_second_order_step(u, lambda, tau);
        if (!u.all_finite()) throw numeric_error("non-finite values during diffusion");
        out.iterations = k;
        out.reached_time = k * tau;
        if (reference) {
            const double d = l2_distance(*reference, u);
            if (d < best_l2) {
                best_l2 = d;
                best = u;
                bad = 0;
            } else if (++bad >= patience) {
                break;
            }
        }
    }
    out.filtered = reference ? best : u;
    return out;
}

} // namespace

FilterOutcome run_filter(const ScalarField2D& input, const json& params,
                         const ScalarField2D* reference, const std::string& snapshot_dir,
                         int snapshot_every) {
    if (!params.contains("method")) throw parameter_error("filter params need a \"method\"");
    const std::string method = params["method"].get<std::string>();
    if (method == "mafod") return filter_mafod(input, params, reference, snapshot_dir, snapshot_every);
    if (method == "ifod") return filter_iterative(input, params, reference, true);
    if (method == "pm2") return filter_iterative(input, params, reference, false);
    if (method == "multiscale-gaussian") {
        RidgeStrengthConfig cfg = RidgeStrengthConfig::defaults();
        cfg.gamma = params.value("gamma", 0.75);
        if (params.contains("t_grid")) cfg.t_grid = parse_sigma_list(params["t_grid"]);
        FilterOutcome out;
        out.filtered = multiscale_gaussian(input, cfg, params.value("post_sigma", 0.0));
        out.iterations = 1;
        return out;
    }
    if (method == "bilateral") {
        FilterOutcome out;
        out.filtered = bilateral(input, params.value("sigma_spatial", 3.0),
                                 params.value("sigma_range", 1.0));
        out.iterations = 1;
        return out;
    }
    if (method == "gaussian") {
        FilterOutcome out;
        out.filtered = gaussian_smooth(input, params.value("sigma", 1.25));
        out.iterations = 1;
        return out;
    }
    throw parameter_error("unknown filter method \"" + method
                          + "\" (choices: mafod, ifod, pm2, multiscale-gaussian, bilateral, gaussian)");
}

CurveSet run_extract(const ScalarField2D& u, const ScalarField2D* scale_map, const json& params) {
    ExtractOptions opts;
    opts.strength_threshold = params.value("strength_threshold", 1e-4);
    if (scale_map && params.value("use_scale_map", true))
        return extract_creases(u, *scale_map, opts);
    return extract_creases(u, params.value("sigma", 1.0), opts);
}

EvalResult run_evaluate(const CurveSet& gt, const CurveSet& rec, const json& params) {
    EvalConfig cfg;
    cfg.neighborhood = params.value("neighborhood", 6.0);
    cfg.sample_step = params.value("sample_step", 0.25);
    cfg.segment_fraction = params.value("segment_fraction", false);
    return match_and_score(gt, rec, cfg);
}

void draw_curves(RgbImage& img, const CurveSet& cs, std::array<std::uint8_t, 3> color) {
    for (const auto& c : cs.curves) {
        for (const Vec2& p : densify(c, 0.25)) {
            const int x = static_cast<int>(std::lround(p.x));
            const int y = static_cast<int>(std::lround(p.y));
            if (x >= 0 && x < img.width && y >= 0 && y < img.height) img.set(x, y, color);
        }
    }
}

PipelineOutcome run_pipeline(const json& config, const std::string& out_dir_arg) {
    const std::string out_dir =
        !out_dir_arg.empty() ? out_dir_arg : config.value("out_dir", std::string("pipeline_out"));
    fs::create_directories(out_dir);

    const std::uint64_t seed = config.value("seed", 1ull);
    auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&t0]() {
        auto t1 = std::chrono::steady_clock::now();
        double s = std::chrono::duration<double>(t1 - t0).count();
        t0 = t1;
        return s;
    };

    json manifest;
    manifest["config"] = config;
    manifest["seed"] = seed;

    // generate
    if (!config.contains("generate")) throw parameter_error("pipeline config needs \"generate\"");
    GenerateOutcome gen = run_generate(config["generate"], seed);
    write_sf2d(gen.clean, out_dir + "/clean.sf2d");
    write_sf2d(gen.noisy, out_dir + "/noisy.sf2d");
    if (gen.clean.height > 1) {
        write_png_gray(gen.clean, out_dir + "/clean.png");
        write_png_gray(gen.noisy, out_dir + "/noisy.png");
    }
    write_curves_json(gen.ground_truth, out_dir + "/gt.json");
    manifest["timing"]["generate_s"] = elapsed();
    manifest["measured_snr"] = gen.measured_snr;

    // filter
    if (!config.contains("filter")) throw parameter_error("pipeline config needs \"filter\"");
    const json& fp = config["filter"];
    const bool use_ref = fp.value("reference", std::string("clean")) != "none";
    const int snapshot_every = fp.value("snapshot_every", 0);
    FilterOutcome filt = run_filter(gen.noisy, fp, use_ref ? &gen.clean : nullptr, out_dir,
                                    snapshot_every);
    write_sf2d(filt.filtered, out_dir + "/filtered.sf2d");
    if (filt.filtered.height > 1) write_png_gray(filt.filtered, out_dir + "/filtered.png");
    if (filt.scale_map) {
        write_sf2d(*filt.scale_map, out_dir + "/scale_map.sf2d");
        write_png_colormapped(*filt.scale_map, out_dir + "/scale_map.png");
    }
    manifest["timing"]["filter_s"] = elapsed();
    manifest["filter_iterations"] = filt.iterations;
    manifest["filter_reached_time"] = filt.reached_time;

    // extract
    const json ep = config.value("extract", json::object());
    CurveSet rec = run_extract(filt.filtered, filt.scale_map ? &*filt.scale_map : nullptr, ep);
    write_curves_json(rec, out_dir + "/curves.json");
    write_curves_csv(rec, out_dir + "/curves.csv");
    RgbImage overlay = to_rgb(filt.filtered);
    draw_curves(overlay, gen.ground_truth, {220, 40, 40});
    draw_curves(overlay, rec, {40, 90, 220});
    write_png_rgb(overlay, out_dir + "/overlay.png");
    manifest["timing"]["extract_s"] = elapsed();

    // evaluate
    PipelineOutcome out;
    out.out_dir = out_dir;
    const json vp = config.value("evaluate", json::object());
    out.metrics = run_evaluate(gen.ground_truth, rec, vp);
    {
        std::ofstream mf(out_dir + "/metrics.json", std::ios::trunc);
        mf << out.metrics.to_json() << "\n";
    }
    manifest["timing"]["evaluate_s"] = elapsed();
    manifest["summary"] = out.metrics.summary();

    std::ofstream mf(out_dir + "/manifest.json", std::ios::trunc);
    mf << manifest.dump(2) << "\n";
    return out;
}

} // namespace crease
