#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "fbms/fourier.hpp"

namespace fbms {

using Complex = std::complex<double>;

struct Vec3 {
    double x = 0, y = 0, z = 0;
    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double c) const { return {c * x, c * y, c * z}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
};

inline Vec3 axis_vector(int axis, double sign = 1.0) {
    switch (axis) {
        case 1: return {sign, 0, 0};
        case 2: return {0, sign, 0};
        default: return {0, 0, sign};
    }
}

inline double coord(const Vec3& v, int axis) { return axis == 1 ? v.x : (axis == 2 ? v.y : v.z); }

// Stereographic chart with projection point +axis_p on the unit sphere. The
// two remaining coordinate axes (in increasing index order) become the plane
// X and Y axes.
struct StereographicChart {
    int pole_axis = 3;

    int plane_x_axis() const { return pole_axis == 1 ? 2 : 1; }
    int plane_y_axis() const { return pole_axis == 3 ? 2 : 3; }

    Complex project(const Vec3& p) const {
        const double d = 1.0 - coord(p, pole_axis);
        return {coord(p, plane_x_axis()) / d, coord(p, plane_y_axis()) / d};
    }

    Vec3 unproject(const Complex& w) const {
        const double q = std::norm(w);
        const double d = 1.0 + q;
        Vec3 p{};
        auto set = [&p](int axis, double v) {
            if (axis == 1) p.x = v;
            else if (axis == 2) p.y = v;
            else p.z = v;
        };
        set(plane_x_axis(), 2.0 * w.real() / d);
        set(plane_y_axis(), 2.0 * w.imag() / d);
        set(pole_axis, (q - 1.0) / d);
        return p;
    }
};

// Length density of the round sphere relative to the plane chart.
inline double conformal_weight(const Complex& z) { return 2.0 / (1.0 + std::norm(z)); }

struct Circle {
    Complex center{0.0, 0.0};
    double radius = 0.0;
};

// One boundary circle of a planar model. Either a raw plane circle
// (parametrized by its plane angle) or the image of a geodesic cap, in which
// case it is parametrized by the spherical azimuth about the cap axis; that
// makes all reflection symmetries act linearly on the parameter.
struct BoundaryCircle {
    Circle circle;
    bool outer = false; // the domain lies inside this circle
    int group = 0;      // boundary-pair index 1..3, or 0 for generic models
    int member = 0;     // 1 = cap about +axis, 2 = cap about -axis

    bool is_cap = false;
    int cap_axis = 0;       // coordinate axis of the cap center
    double cap_sign = 1.0;  // +1 or -1
    double geo_radius = 0;  // spherical radius of the cap
    int ea_axis = 0, eb_axis = 0;
    StereographicChart chart;

    Complex point(double phi) const {
        if (!is_cap) return circle.center + circle.radius * Complex{std::cos(phi), std::sin(phi)};
        const Vec3 p = axis_vector(cap_axis, cap_sign) * std::cos(geo_radius) +
                       (axis_vector(ea_axis) * std::cos(phi) + axis_vector(eb_axis) * std::sin(phi)) *
                           std::sin(geo_radius);
        return chart.project(p);
    }

    // |dw/dphi|: the cap parameter is spherical arc length / sin(geo_radius).
    double speed(double phi) const {
        if (!is_cap) return circle.radius;
        return std::sin(geo_radius) / conformal_weight(point(phi));
    }

    // dw/dphi as a complex number (defines the forward tangent direction).
    Complex dpoint(double phi) const {
        if (!is_cap) return circle.radius * Complex{-std::sin(phi), std::cos(phi)};
        const Vec3 P = axis_vector(cap_axis, cap_sign) * std::cos(geo_radius) +
                       (axis_vector(ea_axis) * std::cos(phi) + axis_vector(eb_axis) * std::sin(phi)) *
                           std::sin(geo_radius);
        const Vec3 dP = (axis_vector(ea_axis) * (-std::sin(phi)) + axis_vector(eb_axis) * std::cos(phi)) *
                        std::sin(geo_radius);
        const int ax = chart.plane_x_axis(), ay = chart.plane_y_axis(), ap = chart.pole_axis;
        const double den = 1.0 - coord(P, ap);
        const Complex num{coord(P, ax), coord(P, ay)};
        const Complex dnum{coord(dP, ax), coord(dP, ay)};
        return (dnum * den + num * coord(dP, ap)) / (den * den);
    }

    // sin(geo_radius): spherical length element per unit of phi.
    double sphere_speed() const { return std::sin(geo_radius); }

    // Unit plane normal pointing out of the computational domain.
    Complex unit_normal_out(double phi) const {
        Complex radial = (point(phi) - circle.center) / circle.radius;
        return outer ? radial : -radial;
    }

    // Azimuth of a point known to lie on (or near) the circle.
    double azimuth(const Complex& z) const {
        if (!is_cap) {
            const Complex d = z - circle.center;
            return std::atan2(d.imag(), d.real());
        }
        const Vec3 p = chart.unproject(z);
        return std::atan2(coord(p, eb_axis), coord(p, ea_axis));
    }
};

// Reflection across the coordinate plane orthogonal to `axis`, expressed in
// the plane chart: the two in-plane reflections are Euclidean, the reflection
// through the pole axis is the inversion z -> z/|z|^2.
struct ReflectionAction {
    int axis = 1;
    StereographicChart chart;

    Complex apply(const Complex& z) const {
        if (axis == chart.pole_axis) {
            const double q = std::norm(z);
            return z / q;
        }
        if (axis == chart.plane_x_axis()) return {-z.real(), z.imag()};
        return {z.real(), -z.imag()};
    }
};

// Action of reflection `axis` on the azimuth parameter of a circle in
// `group`: same-group reflection swaps the pair at equal azimuth; the
// lexicographically first other axis acts as phi -> pi - phi and the second
// as phi -> -phi.
struct AzimuthMap {
    bool swaps_member = false;
    double scale = 1.0;  // +1 or -1
    double offset = 0.0; // 0 or pi
    double operator()(double phi) const { return scale * phi + offset; }
};

inline AzimuthMap azimuth_map(int circle_group, int reflection_axis) {
    if (reflection_axis == circle_group) return {true, 1.0, 0.0};
    int ea = 0, eb = 0;
    for (int axis = 1; axis <= 3; ++axis) {
        if (axis == circle_group) continue;
        if (ea == 0) ea = axis;
        else eb = axis;
    }
    if (reflection_axis == ea) return {false, -1.0, pi};
    return {false, -1.0, 0.0};
}

} // namespace fbms
