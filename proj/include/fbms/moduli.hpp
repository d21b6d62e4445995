#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "fbms/errors.hpp"
#include "fbms/geometry.hpp"

namespace fbms {

// A point (r1, r2, r3) of the moduli space of canonical models: geodesic
// radii of the boundary-circle pairs centered on the +-x, +-y, +-z axes.
struct ModuliPoint {
    double r1 = 0, r2 = 0, r3 = 0;

    double r(int i) const { return i == 1 ? r1 : (i == 2 ? r2 : r3); }
    double& r(int i) { return i == 1 ? r1 : (i == 2 ? r2 : r3); }

    std::array<double, 3> as_array() const { return {r1, r2, r3}; }
};

inline void validate(const ModuliPoint& p) {
    for (int i = 1; i <= 3; ++i)
        if (!(p.r(i) > 0.0)) throw NonPositiveRadius(i);
    for (int i = 1; i <= 3; ++i)
        for (int j = i + 1; j <= 3; ++j)
            if (p.r(i) + p.r(j) >= pi / 2) throw OverlappingPair(i, j);
}

inline bool is_valid(const ModuliPoint& p) {
    for (int i = 1; i <= 3; ++i)
        if (!(p.r(i) > 0.0)) return false;
    for (int i = 1; i <= 3; ++i)
        for (int j = i + 1; j <= 3; ++j)
            if (p.r(i) + p.r(j) >= pi / 2) return false;
    return true;
}

// Margin to the boundary of the moduli space (positive inside).
inline double moduli_margin(const ModuliPoint& p) {
    double m = std::min({p.r1, p.r2, p.r3});
    m = std::min(m, pi / 2 - p.r1 - p.r2);
    m = std::min(m, pi / 2 - p.r1 - p.r3);
    m = std::min(m, pi / 2 - p.r2 - p.r3);
    return m;
}

// Stereographic image of a canonical domain: one outer circle, up to five
// inner circles, and the conformal length density of the spherical metric.
struct PlanarModel {
    std::vector<BoundaryCircle> circles;
    StereographicChart chart;
    std::vector<int> groups; // groups present, ascending
    bool canonical = false;  // built from a ModuliPoint (caps on coordinate axes)

    int outer_index() const {
        for (std::size_t k = 0; k < circles.size(); ++k)
            if (circles[k].outer) return static_cast<int>(k);
        return -1;
    }

    std::vector<int> group_indices(int g) const {
        std::vector<int> idx;
        for (std::size_t k = 0; k < circles.size(); ++k)
            if (circles[k].group == g) idx.push_back(static_cast<int>(k));
        return idx;
    }

    int circle_index(int g, int member) const {
        for (std::size_t k = 0; k < circles.size(); ++k)
            if (circles[k].group == g && circles[k].member == member) return static_cast<int>(k);
        return -1;
    }

    double weight(const Complex& z) const { return conformal_weight(z); }

    // Signed distance into the domain (negative outside), as min over circles.
    double boundary_clearance(const Complex& z) const {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& c : circles) {
            const double dc = std::abs(z - c.circle.center);
            d = std::min(d, c.outer ? c.circle.radius - dc : dc - c.circle.radius);
        }
        return d;
    }

    bool contains(const Complex& z, double tol = 1e-12) const { return boundary_clearance(z) >= -tol; }

    ReflectionAction reflection(int axis) const { return ReflectionAction{axis, chart}; }

    // Index of the image circle of `k` under reflection `axis`.
    int reflected_circle(int k, int axis) const {
        const auto& c = circles[k];
        if (c.group == 0 || !azimuth_map(c.group, axis).swaps_member) return k;
        return circle_index(c.group, c.member == 1 ? 2 : 1);
    }
};

namespace detail {

inline BoundaryCircle make_cap_circle(const StereographicChart& chart, int group, int member,
                                      double geo_radius) {
    BoundaryCircle c;
    c.is_cap = true;
    c.group = group;
    c.member = member;
    c.cap_axis = group;
    c.cap_sign = member == 1 ? 1.0 : -1.0;
    c.geo_radius = geo_radius;
    c.chart = chart;
    int ea = 0, eb = 0;
    for (int axis = 1; axis <= 3; ++axis) {
        if (axis == group) continue;
        (ea == 0 ? ea : eb) = axis;
    }
    c.ea_axis = ea;
    c.eb_axis = eb;

    if (group == chart.pole_axis) {
        c.circle.center = {0.0, 0.0};
        if (member == 1) { // cap around the projection pole: outer boundary
            c.circle.radius = 1.0 / std::tan(geo_radius / 2);
            c.outer = true;
        } else {
            c.circle.radius = std::tan(geo_radius / 2);
        }
    } else {
        // Caps about an in-plane axis: both meridian endpoints project onto
        // one coordinate ray; center and radius follow from the pair.
        const double lo = std::cos(geo_radius) / (1.0 + std::sin(geo_radius));
        const double hi = std::cos(geo_radius) / (1.0 - std::sin(geo_radius));
        const double center = 0.5 * (lo + hi); // = sec(geo_radius)
        const double radius = 0.5 * (hi - lo); // = tan(geo_radius)
        const double sign = member == 1 ? 1.0 : -1.0;
        if (group == chart.plane_x_axis()) c.circle.center = {sign * center, 0.0};
        else c.circle.center = {0.0, sign * center};
        c.circle.radius = radius;
    }
    return c;
}

} // namespace detail

// Canonical model restricted to a subset of boundary groups; the projection
// pole sits at the member-1 cap of the highest present group.
inline PlanarModel build_submodel(const ModuliPoint& p, const std::vector<int>& groups_present) {
    auto present = [&groups_present](int g) {
        return std::count(groups_present.begin(), groups_present.end(), g) > 0;
    };
    for (int i = 1; i <= 3; ++i) {
        if (present(i) && !(p.r(i) > 0)) throw NonPositiveRadius(i);
        for (int j = i + 1; j <= 3; ++j)
            if (present(i) && present(j) && p.r(i) + p.r(j) >= pi / 2) throw OverlappingPair(i, j);
    }
    PlanarModel m;
    m.groups = groups_present;
    std::sort(m.groups.begin(), m.groups.end());
    m.canonical = true;
    m.chart.pole_axis = m.groups.back();
    for (int g : m.groups) {
        m.circles.push_back(detail::make_cap_circle(m.chart, g, 1, p.r(g)));
        m.circles.push_back(detail::make_cap_circle(m.chart, g, 2, p.r(g)));
    }
    // outer circle first, then inner circles ordered by group
    std::stable_sort(m.circles.begin(), m.circles.end(),
                     [](const BoundaryCircle& a, const BoundaryCircle& b) { return a.outer > b.outer; });
    return m;
}

inline PlanarModel build_planar_model(const ModuliPoint& p) {
    validate(p);
    return build_submodel(p, {1, 2, 3});
}

// Geodesic cap of radius `geo_radius` about the south pole: a disk model.
inline PlanarModel build_cap_model(double geo_radius) {
    if (!(geo_radius > 0) || geo_radius >= pi) throw NonPositiveRadius(3);
    PlanarModel m;
    m.groups = {3};
    m.chart.pole_axis = 3;
    BoundaryCircle c;
    c.is_cap = true;
    c.group = 3;
    c.member = 2;
    c.cap_axis = 3;
    c.cap_sign = -1.0;
    c.geo_radius = geo_radius;
    c.ea_axis = 1;
    c.eb_axis = 2;
    c.chart = m.chart;
    c.circle.center = {0.0, 0.0};
    c.circle.radius = std::tan(geo_radius / 2);
    c.outer = true;
    m.circles.push_back(c);
    return m;
}

// Generic model from raw plane circles (exactly one of them outer).
inline PlanarModel build_generic_model(const std::vector<Circle>& outer_and_inners) {
    PlanarModel m;
    for (std::size_t k = 0; k < outer_and_inners.size(); ++k) {
        BoundaryCircle c;
        c.circle = outer_and_inners[k];
        c.outer = k == 0;
        m.circles.push_back(c);
    }
    return m;
}

inline PlanarModel build_annulus(double inner_radius, double outer_radius = 1.0) {
    return build_generic_model({{Complex{0, 0}, outer_radius}, {Complex{0, 0}, inner_radius}});
}

// Reflect a point of the closed domain across coordinate plane `axis`.
inline Complex apply_reflection(const PlanarModel& model, int axis, const Complex& z) {
    if (!model.contains(z, 1e-12)) throw PointOutsideDomain();
    return model.reflection(axis).apply(z);
}

// Smallest gap between distinct boundary circles (in the plane chart).
inline double min_circle_gap(const PlanarModel& m) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < m.circles.size(); ++a)
        for (std::size_t b = a + 1; b < m.circles.size(); ++b) {
            const auto& ca = m.circles[a].circle;
            const auto& cb = m.circles[b].circle;
            const double d = std::abs(ca.center - cb.center);
            double g;
            if (m.circles[a].outer) g = ca.radius - (d + cb.radius);
            else if (m.circles[b].outer) g = cb.radius - (d + ca.radius);
            else g = d - ca.radius - cb.radius;
            gap = std::min(gap, g);
        }
    return gap;
}

// Construction invariants of a canonical model: inner circles strictly inside
// the outer one and pairwise disjoint; groups centered on their axes; circle
// set reproduced exactly by every reflection.
inline bool check_model_invariants(const PlanarModel& m, double tol = 1e-12) {
    if (m.outer_index() < 0) return false;
    if (min_circle_gap(m) <= tol) return false;
    for (const auto& c : m.circles) {
        if (c.group == 1 && std::abs(c.circle.center.imag()) > tol) return false;
        if (c.group == 2 && std::abs(c.circle.center.real()) > tol) return false;
        if (c.group == 3 && std::abs(c.circle.center) > tol) return false;
    }
    for (int axis = 1; axis <= 3; ++axis) {
        const auto refl = m.reflection(axis);
        for (std::size_t k = 0; k < m.circles.size(); ++k) {
            const int j = m.reflected_circle(static_cast<int>(k), axis);
            if (j < 0) return false;
            // image of two diametral points determines the image circle
            const Complex p1 = refl.apply(m.circles[k].point(0.0));
            const Complex p2 = refl.apply(m.circles[k].point(pi));
            const auto& target = m.circles[j].circle;
            if (std::abs(std::abs(p1 - target.center) - target.radius) > tol) return false;
            if (std::abs(std::abs(p2 - target.center) - target.radius) > tol) return false;
        }
    }
    return true;
}

} // namespace fbms
