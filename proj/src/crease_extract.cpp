#include "crease/crease_extract.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "crease/parallel.hpp"
#include "crease/scale_select.hpp"

namespace crease {

namespace {

ScalarField2D crease_field_from(const GradientField& g, const HessianField& h) {
    const int w = g.gx.width, ht = g.gx.height;
    ScalarField2D d(w, ht, 0.0, g.gx.dx, g.gx.dy);
    parallel_rows(ht, [&](int y) {
        for (int x = 0; x < w; ++x) {
            Vec2 gv = g.at(x, y);
            Vec2 hg = mul(h.at(x, y), gv);
            d.at(x, y) = gv.x * hg.y - gv.y * hg.x;
        }
    });
    return d;
}

// Bilinear interpolation of the Hessian entry fields at a sub-pixel point.
SymMat2 sample_hessian(const HessianField& h, Vec2 p) {
    return {h.xx.sample(p.x, p.y), h.xy.sample(p.x, p.y), h.yy.sample(p.x, p.y)};
}

struct Segment {
    int edge_a;
    int edge_b;
};

// Edge ids: horizontal edge (x,y)-(x+1,y) then vertical edge (x,y)-(x,y+1).
struct EdgeGrid {
    int w, h;
    int hedge(int x, int y) const { return y * (w - 1) + x; }
    int vedge(int x, int y) const { return (w - 1) * h + y * w + x; }
};

CurveSet marching_squares_impl(const ScalarField2D& d_raw, const HessianField& hf,
                               const ExtractOptions& opts) {
    const int w = d_raw.width, h = d_raw.height;
    CurveSet out;
    if (w < 2 || h < 2) return out;
    EdgeGrid eg{w, h};

    // Degenerate zero sets (d identically zero up to rounding noise, e.g. on
    // exactly axis-aligned profiles) must not produce noise contours: crush
    // values below a relative floor to exact zero.
    ScalarField2D d = d_raw;
    double dmax = 0.0;
    for (double v : d.data) dmax = std::max(dmax, std::abs(v));
    const double floor = 1e-14 * dmax;
    for (double& v : d.data)
        if (std::abs(v) <= floor) v = 0.0;

    // Zero counts as positive so that exact zero sets on grid lines are kept
    // and negation flips cleanly.
    auto pos = [&](int x, int y) { return d.at(x, y) >= 0.0; };
    auto interp = [&](double a, double b) { return a / (a - b); };

    std::map<int, Vec2> edge_vertex;
    auto vertex_on_hedge = [&](int x, int y) {
        int id = eg.hedge(x, y);
        auto it = edge_vertex.find(id);
        if (it == edge_vertex.end())
            it = edge_vertex.emplace(id, Vec2{x + interp(d.at(x, y), d.at(x + 1, y)), double(y)}).first;
        return id;
    };
    auto vertex_on_vedge = [&](int x, int y) {
        int id = eg.vedge(x, y);
        auto it = edge_vertex.find(id);
        if (it == edge_vertex.end())
            it = edge_vertex.emplace(id, Vec2{double(x), y + interp(d.at(x, y), d.at(x, y + 1))}).first;
        return id;
    };

    std::vector<Segment> segments;
    for (int y = 0; y < h - 1; ++y)
        for (int x = 0; x < w - 1; ++x) {
            const bool s00 = pos(x, y), s10 = pos(x + 1, y);
            const bool s01 = pos(x, y + 1), s11 = pos(x + 1, y + 1);
            int crossed[4];
            int n = 0;
            if (s00 != s10) crossed[n++] = 0; // bottom
            if (s10 != s11) crossed[n++] = 1; // right
            if (s01 != s11) crossed[n++] = 2; // top
            if (s00 != s01) crossed[n++] = 3; // left
            if (n == 0) continue;
            auto edge_id = [&](int e) {
                switch (e) {
                    case 0: return vertex_on_hedge(x, y);
                    case 1: return vertex_on_vedge(x + 1, y);
                    case 2: return vertex_on_hedge(x, y + 1);
                    default: return vertex_on_vedge(x, y);
                }
            };
            if (n == 2) {
                segments.push_back({edge_id(crossed[0]), edge_id(crossed[1])});
            } else if (n == 4) {
                // Ambiguous cell: pair separatrices by the center sign.
                const double center =
                    0.25 * (d.at(x, y) + d.at(x + 1, y) + d.at(x, y + 1) + d.at(x + 1, y + 1));
                if ((center >= 0.0) == s00) {
                    segments.push_back({edge_id(0), edge_id(1)}); // around (x+1, y)
                    segments.push_back({edge_id(2), edge_id(3)}); // around (x, y+1)
                } else {
                    segments.push_back({edge_id(0), edge_id(3)}); // around (x, y)
                    segments.push_back({edge_id(1), edge_id(2)}); // around (x+1, y+1)
                }
            }
        }

    // Link segments sharing an edge crossing into chains.
    std::map<int, std::vector<int>> adjacency; // edge id -> segment indices
    for (int i = 0; i < static_cast<int>(segments.size()); ++i) {
        adjacency[segments[i].edge_a].push_back(i);
        adjacency[segments[i].edge_b].push_back(i);
    }

    std::vector<char> used(segments.size(), 0);
    std::vector<std::vector<int>> chains; // sequences of edge ids

    auto walk = [&](int start_seg, int start_edge) {
        std::vector<int> chain{start_edge};
        int seg = start_seg, edge = start_edge;
        for (;;) {
            used[seg] = 1;
            edge = segments[seg].edge_a == edge ? segments[seg].edge_b : segments[seg].edge_a;
            chain.push_back(edge);
            int next = -1;
            for (int cand : adjacency[edge])
                if (!used[cand]) {
                    next = cand;
                    break;
                }
            if (next < 0) break;
            seg = next;
        }
        return chain;
    };

    // Open chains first (start at degree-1 edges), then remaining loops.
    for (const auto& [edge, segs] : adjacency)
        if (segs.size() == 1 && !used[segs.front()]) chains.push_back(walk(segs.front(), edge));
    for (int i = 0; i < static_cast<int>(segments.size()); ++i)
        if (!used[i]) chains.push_back(walk(i, segments[i].edge_a));

    // Superset filter: classify every vertex by the cross-crease eigenvalue
    // of the Hessian.
    for (auto& chain : chains) {
        const bool is_loop = chain.size() > 2 && chain.front() == chain.back();
        std::vector<int> ids(chain.begin(), is_loop ? chain.end() - 1 : chain.end());
        const int m = static_cast<int>(ids.size());
        std::vector<int> cls(m); // +1 ridge, -1 valley, 0 dropped
        std::vector<double> mag(m);
        for (int i = 0; i < m; ++i) {
            Vec2 p = edge_vertex[ids[i]];
            Eigen2 e = hessian_eigen(sample_hessian(hf, p));
            mag[i] = std::abs(e.nu2);
            cls[i] = mag[i] < opts.strength_threshold ? 0 : (e.nu2 < 0.0 ? 1 : -1);
        }

        int first_break = -1;
        for (int i = 0; i < m && first_break < 0; ++i) {
            if (cls[i] == 0) first_break = i;
            else if (is_loop && cls[i] != cls[(i + 1) % m] && cls[(i + 1) % m] != 0)
                first_break = (i + 1) % m;
        }

        auto emit = [&](const std::vector<int>& run_idx, int kind, bool closed) {
            Polyline p;
            p.kind = kind > 0 ? CreaseKind::ridge : CreaseKind::valley;
            double s = 0.0;
            int kept = 0;
            for (int i : run_idx) {
                Vec2 v = edge_vertex.at(ids[i]);
                // Distinct edges can interpolate onto the same grid node;
                // coalesce those so chains stay simple.
                if (!p.vertices.empty() && v.x == p.vertices.back().x && v.y == p.vertices.back().y)
                    continue;
                p.vertices.push_back(v);
                s += mag[i];
                ++kept;
            }
            if (closed && p.vertices.size() > 1 && p.vertices.front().x == p.vertices.back().x
                && p.vertices.front().y == p.vertices.back().y)
                p.vertices.pop_back();
            if (p.vertices.size() < 2) return;
            p.strength = s / kept;
            if (closed) p.vertices.push_back(p.vertices.front());
            out.curves.push_back(std::move(p));
        };

        if (is_loop && first_break < 0) {
            // Uniform loop: keep closed.
            std::vector<int> all(m);
            for (int i = 0; i < m; ++i) all[i] = i;
            emit(all, cls[0], true);
            continue;
        }
        // Rotate loops so runs never wrap; linear chains start at 0.
        const int offset = is_loop ? first_break : 0;
        std::vector<int> run;
        int run_kind = 0;
        for (int oi = 0; oi < m; ++oi) {
            int i = (oi + offset) % m;
            if (cls[i] == 0 || (run_kind != 0 && cls[i] != run_kind)) {
                emit(run, run_kind, false);
                run.clear();
                run_kind = 0;
            }
            if (cls[i] != 0) {
                run.push_back(i);
                run_kind = cls[i];
            }
        }
        emit(run, run_kind, false);
    }
    return out;
}

} // namespace

CreaseFieldResult crease_field(const ScalarField2D& u, double sigma) {
    if (!(sigma >= 0.0)) throw parameter_error("sigma must be non-negative");
    ScalarField2D us = gaussian_smooth(u, sigma);
    return {crease_field_from(gradient(us), hessian(us))};
}

CurveSet marching_squares(const CreaseFieldResult& d, const ScalarField2D& u, double sigma,
                          const ExtractOptions& opts) {
    if (!d.d.same_dims(u)) throw parameter_error("crease field dimensions must match image");
    ScalarField2D us = gaussian_smooth(u, sigma);
    return marching_squares_impl(d.d, hessian(us), opts);
}

CurveSet extract_creases(const ScalarField2D& u_filtered, const ScalarField2D& scale_map,
                         const ExtractOptions& opts) {
    if (!u_filtered.same_dims(scale_map))
        throw parameter_error("scale map dimensions must match image");

    std::vector<double> sigmas(scale_map.data.begin(), scale_map.data.end());
    std::sort(sigmas.begin(), sigmas.end());
    sigmas.erase(std::unique(sigmas.begin(), sigmas.end()), sigmas.end());

    // Blend per-sigma derivative fields through the scale map.
    const int w = u_filtered.width, h = u_filtered.height;
    GradientField g{ScalarField2D(w, h), ScalarField2D(w, h)};
    HessianField hf{ScalarField2D(w, h), ScalarField2D(w, h), ScalarField2D(w, h)};
    for (double sigma : sigmas) {
        ScalarField2D us = gaussian_smooth(u_filtered, sigma);
        GradientField gs = gradient(us);
        HessianField hs = hessian(us);
        for (std::size_t i = 0; i < u_filtered.size(); ++i) {
            if (scale_map.data[i] != sigma) continue;
            g.gx.data[i] = gs.gx.data[i];
            g.gy.data[i] = gs.gy.data[i];
            hf.xx.data[i] = hs.xx.data[i];
            hf.xy.data[i] = hs.xy.data[i];
            hf.yy.data[i] = hs.yy.data[i];
        }
    }
    return marching_squares_impl(crease_field_from(g, hf), hf, opts);
}

CurveSet extract_creases(const ScalarField2D& u_filtered, double sigma,
                         const ExtractOptions& opts) {
    CreaseFieldResult d = crease_field(u_filtered, sigma);
    return marching_squares(d, u_filtered, sigma, opts);
}

} // namespace crease
