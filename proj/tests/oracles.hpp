#pragma once

// Independent oracles used to freeze expected values. Everything here is
// deliberately computed by a route that does not share code with the library
// solvers (closed forms, explicit quadrature, finite differences).

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracles {

// Separation of variables for the mixed problem on the annulus eps < |z| < 1
// (Steklov on the unit circle, Neumann on the inner circle): the radial
// factor of mode n is R(r) = r^n + eps^{2n} r^{-n}, chosen so R'(eps) = 0,
// and the eigenvalue is R'(1)/R(1).
inline double annulus_sn_eigenvalue(double eps, int n) {
    auto R = [&](double r) { return std::pow(r, n) + std::pow(eps, 2 * n) * std::pow(r, -n); };
    auto Rp = [&](double r) {
        return n * std::pow(r, n - 1) - n * std::pow(eps, 2 * n) * std::pow(r, -n - 1);
    };
    (void)R;
    return Rp(1.0) / R(1.0);
}

// Radial profile of the annulus solution with Dirichlet cos(n t) on |z| = 1
// and Neumann 0 on |z| = eps.
inline double annulus_mixed_profile(double eps, int n, double r) {
    return (std::pow(r, n) + std::pow(eps, 2 * n) * std::pow(r, -n)) / (1.0 + std::pow(eps, 2 * n));
}

inline double annulus_mixed_profile_deriv(double eps, int n, double r) {
    return (n * std::pow(r, n - 1) - n * std::pow(eps, 2 * n) * std::pow(r, -n - 1)) /
           (1.0 + std::pow(eps, 2 * n));
}

// Dirichlet energy of the explicit log solution on the annulus with values
// +1 on |z|=1 and -1 on |z|=eps:  u = 1 + 2 log r / |log eps|.
inline double annulus_pm1_energy(double eps) { return 8.0 * M_PI / std::abs(std::log(eps)); }

// Area integral  int |grad u|^2 dA  over the annulus eps < r < 1 by
// Gauss-Legendre in r and trapezoid in angle.
inline double annulus_energy_quadrature(const std::function<std::complex<double>(std::complex<double>)>& grad,
                                        double eps, int nr = 160, int nt = 256) {
    // Gauss-Legendre nodes via Newton iteration on Legendre polynomials
    std::vector<double> x(nr), w(nr);
    for (int i = 0; i < nr; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (nr + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= nr; ++k) {
                double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = nr * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[i] = t;
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= nr; ++k) {
            double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = nr * (t * p1 - p0) / (t * t - 1.0);
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    double total = 0.0;
    for (int i = 0; i < nr; ++i) {
        const double r = 0.5 * (1.0 + eps) + 0.5 * (1.0 - eps) * x[i];
        const double wr = 0.5 * (1.0 - eps) * w[i];
        for (int j = 0; j < nt; ++j) {
            const double t = 2.0 * M_PI * (j + 0.5) / nt;
            const std::complex<double> z{r * std::cos(t), r * std::sin(t)};
            const std::complex<double> g = grad(z);
            total += wr * (2.0 * M_PI / nt) * std::norm(g) * r;
        }
    }
    return total;
}

// Circle through three points (circumcenter construction).
struct FittedCircle {
    std::complex<double> center;
    double radius;
};

inline FittedCircle fit_circle(const std::complex<double>& p1, const std::complex<double>& p2,
                               const std::complex<double>& p3) {
    const double ax = p1.real(), ay = p1.imag();
    const double bx = p2.real(), by = p2.imag();
    const double cx = p3.real(), cy = p3.imag();
    const double d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
    const double ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) +
                       (cx * cx + cy * cy) * (ay - by)) /
                      d;
    const double uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) +
                       (cx * cx + cy * cy) * (bx - ax)) /
                      d;
    FittedCircle f{{ux, uy}, std::abs(p1 - std::complex<double>{ux, uy})};
    return f;
}

// Stereographic projection from (0,0,1) onto the equatorial plane.
inline std::complex<double> project_from_north(double X, double Y, double Z) {
    return {X / (1.0 - Z), Y / (1.0 - Z)};
}

// Least-squares slope of log(y) against log(x).
inline double fitted_exponent(const std::vector<double>& xs, const std::vector<double>& ys) {
    const int n = static_cast<int>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double lx = std::log(xs[i]), ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace oracles
