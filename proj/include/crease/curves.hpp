#ifndef CREASE_CURVES_HPP
#define CREASE_CURVES_HPP

#include <string>
#include <vector>

#include "crease/vec2.hpp"

namespace crease {

enum class CreaseKind { ridge, valley };

const char* kind_name(CreaseKind k);
CreaseKind kind_from_name(const std::string& name);

/// Ordered chain of sub-pixel vertices. Closed chains repeat the first
/// vertex at the end.
struct Polyline {
    std::vector<Vec2> vertices;
    CreaseKind kind = CreaseKind::ridge;
    double strength = 0.0; // mean |nu_cross| along the line

    double length() const;
    bool closed() const;
};

struct CurveSet {
    std::vector<Polyline> curves;

    std::size_t total_vertices() const;
};

/// {"curves":[{"kind":"ridge","points":[[x,y],...]},...]}
std::string curves_to_json(const CurveSet& cs);
CurveSet curves_from_json(const std::string& json_text);
void write_curves_json(const CurveSet& cs, const std::string& path);
CurveSet read_curves_json(const std::string& path);

/// CSV rows: curve_id,kind,x,y
void write_curves_csv(const CurveSet& cs, const std::string& path);

/// Points spaced `step` apart in arc length along the polyline (first and
/// last vertices always included).
std::vector<Vec2> densify(const Polyline& p, double step);

} // namespace crease

#endif
