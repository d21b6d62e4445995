#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace fbms {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Real trigonometric polynomial a0 + sum_n (a_n cos n*phi + b_n sin n*phi).
struct TrigSeries {
    double a0 = 0.0;
    std::vector<double> a; // a[n-1] multiplies cos(n*phi)
    std::vector<double> b; // b[n-1] multiplies sin(n*phi)

    TrigSeries() = default;
    explicit TrigSeries(int order) : a(order, 0.0), b(order, 0.0) {}

    int order() const { return static_cast<int>(a.size()); }

    double eval(double phi) const {
        double s = a0;
        // recurrence for cos(n*phi), sin(n*phi)
        const double c1 = std::cos(phi), s1 = std::sin(phi);
        double cn = 1.0, sn = 0.0;
        for (std::size_t n = 0; n < a.size(); ++n) {
            const double c = cn * c1 - sn * s1;
            const double s2 = sn * c1 + cn * s1;
            cn = c;
            sn = s2;
            s += a[n] * cn + b[n] * sn;
        }
        return s;
    }

    // d/dphi
    TrigSeries derivative() const {
        TrigSeries d(order());
        for (int n = 1; n <= order(); ++n) {
            d.a[n - 1] = n * b[n - 1];
            d.b[n - 1] = -n * a[n - 1];
        }
        return d;
    }

    TrigSeries& operator+=(const TrigSeries& o) {
        if (o.order() > order()) {
            a.resize(o.a.size(), 0.0);
            b.resize(o.b.size(), 0.0);
        }
        a0 += o.a0;
        for (std::size_t n = 0; n < o.a.size(); ++n) {
            a[n] += o.a[n];
            b[n] += o.b[n];
        }
        return *this;
    }

    TrigSeries& operator*=(double c) {
        a0 *= c;
        for (auto& v : a) v *= c;
        for (auto& v : b) v *= c;
        return *this;
    }

    double max_abs_coeff() const {
        double m = std::abs(a0);
        for (double v : a) m = std::max(m, std::abs(v));
        for (double v : b) m = std::max(m, std::abs(v));
        return m;
    }
};

// Nodes of the shifted equispaced grid phi_q = 2*pi*(q+1/2)/K. The shift keeps
// samples off the reflection axes phi = 0, pi/2, pi, 3*pi/2 and the grid is
// still mapped to itself by phi -> -phi and phi -> pi - phi.
inline std::vector<double> shifted_grid(int K) {
    std::vector<double> phi(K);
    for (int q = 0; q < K; ++q) phi[q] = two_pi * (q + 0.5) / K;
    return phi;
}

// Trigonometric analysis of samples on the shifted grid, truncated at `order`.
// Exact for trigonometric polynomials of degree < K/2.
inline TrigSeries analyze_shifted(const std::vector<double>& samples, int order) {
    const int K = static_cast<int>(samples.size());
    TrigSeries f(order);
    double sum = 0.0;
    for (double v : samples) sum += v;
    f.a0 = sum / K;
    for (int n = 1; n <= order; ++n) {
        double ca = 0.0, cb = 0.0;
        for (int q = 0; q < K; ++q) {
            const double phi = two_pi * (q + 0.5) / K;
            ca += samples[q] * std::cos(n * phi);
            cb += samples[q] * std::sin(n * phi);
        }
        f.a[n - 1] = 2.0 * ca / K;
        f.b[n - 1] = 2.0 * cb / K;
    }
    return f;
}

// Trapezoid rule on the shifted grid; spectrally exact for smooth periodic
// integrands.
inline double integrate_shifted(const std::vector<double>& samples) {
    double s = 0.0;
    for (double v : samples) s += v;
    return s * two_pi / static_cast<double>(samples.size());
}

} // namespace fbms
