#include "crease/curves.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "crease/errors.hpp"

namespace crease {

const char* kind_name(CreaseKind k) { return k == CreaseKind::ridge ? "ridge" : "valley"; }

CreaseKind kind_from_name(const std::string& name) {
    if (name == "ridge") return CreaseKind::ridge;
    if (name == "valley") return CreaseKind::valley;
    throw parameter_error("unknown crease kind: " + name);
}

double Polyline::length() const {
    double len = 0.0;
    for (std::size_t i = 1; i < vertices.size(); ++i) len += norm(vertices[i] - vertices[i - 1]);
    return len;
}

bool Polyline::closed() const {
    if (vertices.size() < 3) return false;
    return vertices.front().x == vertices.back().x && vertices.front().y == vertices.back().y;
}

std::size_t CurveSet::total_vertices() const {
    std::size_t n = 0;
    for (const auto& c : curves) n += c.vertices.size();
    return n;
}

std::string curves_to_json(const CurveSet& cs) {
    nlohmann::ordered_json root;
    root["curves"] = nlohmann::ordered_json::array();
    for (const auto& c : cs.curves) {
        nlohmann::ordered_json jc;
        jc["kind"] = kind_name(c.kind);
        auto pts = nlohmann::ordered_json::array();
        for (const auto& v : c.vertices) pts.push_back({v.x, v.y});
        jc["points"] = std::move(pts);
        root["curves"].push_back(std::move(jc));
    }
    return root.dump();
}

CurveSet curves_from_json(const std::string& json_text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw io_error(std::string("invalid curve JSON: ") + e.what());
    }
    if (!root.contains("curves") || !root["curves"].is_array())
        throw io_error("curve JSON must contain a \"curves\" array");
    CurveSet cs;
    for (const auto& jc : root["curves"]) {
        Polyline p;
        p.kind = kind_from_name(jc.value("kind", "ridge"));
        for (const auto& pt : jc.at("points"))
            p.vertices.push_back({pt.at(0).get<double>(), pt.at(1).get<double>()});
        if (jc.contains("strength")) p.strength = jc["strength"].get<double>();
        cs.curves.push_back(std::move(p));
    }
    return cs;
}

void write_curves_json(const CurveSet& cs, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw io_error("cannot open " + path + " for writing");
    out << curves_to_json(cs) << "\n";
}

CurveSet read_curves_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return curves_from_json(text);
}

void write_curves_csv(const CurveSet& cs, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw io_error("cannot open " + path + " for writing");
    out << "curve_id,kind,x,y\n";
    char line[96];
    for (std::size_t i = 0; i < cs.curves.size(); ++i)
        for (const auto& v : cs.curves[i].vertices) {
            std::snprintf(line, sizeof line, "%zu,%s,%.9g,%.9g\n", i,
                          kind_name(cs.curves[i].kind), v.x, v.y);
            out << line;
        }
}

std::vector<Vec2> densify(const Polyline& p, double step) {
    if (!(step > 0.0)) throw parameter_error("densification step must be positive");
    std::vector<Vec2> pts;
    if (p.vertices.empty()) return pts;
    pts.push_back(p.vertices.front());
    for (std::size_t i = 1; i < p.vertices.size(); ++i) {
        const Vec2 a = p.vertices[i - 1], b = p.vertices[i];
        const double len = norm(b - a);
        const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
        for (int k = 1; k <= n; ++k) {
            double f = static_cast<double>(k) / n;
            pts.push_back({a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)});
        }
    }
    return pts;
}

} // namespace crease
