#pragma once

#include <functional>

#include "fbms/steklov.hpp"

namespace fbms {

// Half-side lengths of the target prism [-a1,a1] x [-a2,a2] x [-a3,a3].
struct PrismConfig {
    double a1 = 1.0, a2 = 1.0, a3 = 1.0;
    double a(int i) const { return i == 1 ? a1 : (i == 2 ? a2 : a3); }

    void check() const {
        for (int i = 1; i <= 3; ++i)
            if (!(a(i) > 0)) throw Error(ErrorKind::validation, "prism half-sides must be positive");
    }
};

// Test-function bound for the energy on the core region of the moduli space.
inline double energy_upper_bound(const PrismConfig& cfg) {
    return 16.0 * std::sqrt(2.0) / pi * (cfg.a1 * cfg.a1 + cfg.a2 * cfg.a2 + cfg.a3 * cfg.a3);
}

// The three odd harmonic potentials u_i (u_i = +-a_i on the group-i circles,
// Neumann elsewhere) together with the extremal boundary densities they
// induce. lambda_i is the spherical normal derivative of u_i, oriented to be
// positive on both circles; as a BoundaryMetric it is stored per unit of
// azimuth, i.e. density = lambda_i * sin(r_i).
struct OddData {
    ModuliPoint p;
    PrismConfig cfg;
    std::vector<SeriesSolution> u;       // u[i-1]
    std::array<BoundaryMetric, 3> lambda;
    std::array<double, 3> L{};           // length of Gamma_i in the metric lambda_i
    std::array<double, 3> dirichlet{};   // E(u_i) by the boundary formula
    std::array<double, 3> energy_identity_rel{};
    double min_multiplier = 0.0;
    double max_solve_residual = 0.0;

    const PlanarModel& model() const { return u.front().model(); }
};

namespace detail {
inline OddData odd_data_once(const ModuliPoint& p, const PrismConfig& cfg, const BasisSpec& basis,
                             bool require_positive);
}

// `require_positive` gates the Hopf positivity of the multiplier densities;
// sign-only consumers near crowded configurations may disable it and judge
// quality by the recorded solve residual instead.
inline OddData odd_data(const ModuliPoint& p, const PrismConfig& cfg, BasisSpec basis = {},
                        bool require_positive = true) {
    cfg.check();
    // crowded configurations may need more resolution before the multiplier
    // densities come out positive
    for (int attempt = 0;; ++attempt) {
        try {
            return detail::odd_data_once(p, cfg, basis, require_positive);
        } catch (const NonPositiveMetric&) {
            if (attempt >= 3) throw;
            basis.order += 16;
        }
    }
}

namespace detail {

inline OddData odd_data_once(const ModuliPoint& p, const PrismConfig& cfg, const BasisSpec& basis,
                             bool require_positive) {
    const PlanarModel model = build_planar_model(p);
    OddData out;
    out.p = p;
    out.cfg = cfg;
    out.min_multiplier = std::numeric_limits<double>::infinity();

    for (int i = 1; i <= 3; ++i) {
        std::vector<ConditionType> types(model.circles.size(), ConditionType::neumann);
        std::vector<BoundaryFn> data(model.circles.size(), nullptr);
        const int k1 = model.circle_index(i, 1), k2 = model.circle_index(i, 2);
        types[k1] = types[k2] = ConditionType::dirichlet;
        data[k1] = constant_fn(cfg.a(i));
        data[k2] = constant_fn(-cfg.a(i));
        MixedOperator op(model, types, basis);
        out.u.push_back(op.solve(data));
        const SeriesSolution& sol = out.u.back();
        out.max_solve_residual = std::max(out.max_solve_residual, sol.max_residual());

        // multiplier densities: +q on the +a_i circle, -q on the partner
        BoundaryMetric lam;
        lam.circles = {k1, k2};
        for (int which = 0; which < 2; ++which) {
            const int k = which == 0 ? k1 : k2;
            const double sign = which == 0 ? 1.0 : -1.0;
            std::vector<double> vals = sol.flux_samples(k);
            for (double& v : vals) v *= sign;
            for (double v : vals)
                out.min_multiplier =
                    std::min(out.min_multiplier, v / model.circles[k].sphere_speed());
            lam.density.push_back(analyze_shifted(vals, 128));
        }
        if (require_positive && !(out.min_multiplier > 0))
            throw NonPositiveMetric("extremal density not positive; raise the basis order");
        out.lambda[i - 1] = lam;
        out.L[i - 1] = lam.length();
        out.dirichlet[i - 1] = sol.dirichlet_energy();
        out.energy_identity_rel[i - 1] =
            std::abs(out.dirichlet[i - 1] - cfg.a(i) * out.L[i - 1]) /
            std::max(1e-300, out.dirichlet[i - 1]);
    }
    return out;
}

} // namespace detail

// E = sum_i a_i L_i.
inline double energy(const OddData& d) {
    double e = 0.0;
    for (int i = 1; i <= 3; ++i) e += d.cfg.a(i) * d.L[i - 1];
    return e;
}

inline double energy(const ModuliPoint& p, const PrismConfig& cfg, BasisSpec basis = {}) {
    return energy(odd_data(p, cfg, basis));
}

// dE/dr_i = int_{Gamma_i} [ (nu u_i)^2 - sum_{j != i} (u_j')^2 ] ds_0, all in
// the spherical metric. Per unit of azimuth the integrand is
// q_i^2 / sin r_i - sum (du_j/dphi)^2 / sin r_i.
inline std::array<double, 3> energy_gradient(const OddData& d) {
    const PlanarModel& model = d.model();
    std::array<double, 3> grad{};
    constexpr int S = SeriesSolution::trace_samples;
    for (int i = 1; i <= 3; ++i) {
        const double sin_r = std::sin(d.p.r(i));
        double acc = 0.0;
        for (int member = 1; member <= 2; ++member) {
            const int k = model.circle_index(i, member);
            const auto& qi = d.u[i - 1].flux_samples(k);
            for (int s = 0; s < S; ++s) acc += qi[s] * qi[s];
            for (int j = 1; j <= 3; ++j) {
                if (j == i) continue;
                const TrigSeries du = d.u[j - 1].value_series(k).derivative();
                for (int s = 0; s < S; ++s) {
                    const double v = du.eval(two_pi * (s + 0.5) / S);
                    acc -= v * v;
                }
            }
        }
        grad[i - 1] = acc * (two_pi / S) / sin_r;
    }
    return grad;
}

inline std::array<double, 3> energy_gradient(const ModuliPoint& p, const PrismConfig& cfg,
                                             BasisSpec basis = {}) {
    return energy_gradient(odd_data(p, cfg, basis));
}

struct EnergyAndGradient {
    double E = 0.0;
    std::array<double, 3> grad{};
};

inline EnergyAndGradient energy_and_gradient(const ModuliPoint& p, const PrismConfig& cfg,
                                             BasisSpec basis = {}) {
    const OddData d = odd_data(p, cfg, basis);
    return {energy(d), energy_gradient(d)};
}

inline double norm3(const std::array<double, 3>& v) {
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

enum class SearchStrategy { diagonal, newton, minmax };

struct SearchOptions {
    BasisSpec basis = [] {
        BasisSpec b;
        b.enforce_tol = false; // searches cross poorly-resolved territory
        return b;
    }();
    std::optional<ModuliPoint> start;
    double grad_tol = 1e-6;
    int max_iterations = 80;
    double margin = 1e-3;     // stay this far inside the moduli space
    double hessian_step = 1e-4;
    int path_nodes = 33;      // discrete mountain-pass resolution
    int minmax_iterations = 400;
};

struct SearchTracePoint {
    int iteration = 0;
    ModuliPoint p;
    double E = 0.0;
    double grad_norm = 0.0;
};

struct CriticalPoint {
    ModuliPoint p;
    double E = 0.0;
    std::array<double, 3> grad{};
    double grad_norm = 0.0;
    Eigen::Matrix3d hessian = Eigen::Matrix3d::Zero();
    int hessian_positive = 0, hessian_negative = 0;
    int iterations = 0;
    std::vector<SearchTracePoint> history;
};

namespace detail {

inline ModuliPoint clamp_to_moduli(ModuliPoint p, double margin) {
    for (int i = 1; i <= 3; ++i) p.r(i) = std::max(p.r(i), margin);
    for (int i = 1; i <= 3; ++i)
        for (int j = i + 1; j <= 3; ++j) {
            const double excess = p.r(i) + p.r(j) - (pi / 2 - margin);
            if (excess > 0) {
                p.r(i) -= excess / 2;
                p.r(j) -= excess / 2;
            }
        }
    for (int i = 1; i <= 3; ++i) p.r(i) = std::max(p.r(i), margin);
    return p;
}

inline Eigen::Matrix3d fd_hessian(const PrismConfig& cfg, const ModuliPoint& p,
                                  const BasisSpec& basis, double h) {
    Eigen::Matrix3d H;
    for (int j = 1; j <= 3; ++j) {
        ModuliPoint hi = p, lo = p;
        hi.r(j) += h;
        lo.r(j) -= h;
        const auto ghi = energy_gradient(hi, cfg, basis);
        const auto glo = energy_gradient(lo, cfg, basis);
        for (int i = 0; i < 3; ++i) H(i, j - 1) = (ghi[i] - glo[i]) / (2 * h);
    }
    return 0.5 * (H + H.transpose()).eval();
}

inline void signature(const Eigen::Matrix3d& H, int& n_pos, int& n_neg) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(H);
    const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
    n_pos = n_neg = 0;
    for (int i = 0; i < 3; ++i) {
        if (es.eigenvalues()[i] > 1e-6 * scale) ++n_pos;
        if (es.eigenvalues()[i] < -1e-6 * scale) ++n_neg;
    }
}

inline CriticalPoint finish_critical_point(const PrismConfig& cfg, const ModuliPoint& p,
                                           const SearchOptions& opts, int iterations,
                                           std::vector<SearchTracePoint> history) {
    CriticalPoint out;
    out.p = p;
    const OddData d = odd_data(p, cfg, opts.basis);
    out.E = energy(d);
    out.grad = energy_gradient(d);
    out.grad_norm = norm3(out.grad);
    out.hessian = fd_hessian(cfg, p, opts.basis, opts.hessian_step);
    signature(out.hessian, out.hessian_positive, out.hessian_negative);
    out.iterations = iterations;
    out.history = std::move(history);
    if (out.grad_norm >= opts.grad_tol) throw NoConvergence(iterations);
    if (out.hessian_negative < 1 || out.hessian_positive < 1) throw NotCritical(out.grad_norm);
    return out;
}

inline CriticalPoint newton_search(const PrismConfig& cfg, ModuliPoint p, const SearchOptions& opts) {
    std::vector<SearchTracePoint> history;
    for (int it = 0; it < opts.max_iterations; ++it) {
        const auto eg = energy_and_gradient(p, cfg, opts.basis);
        const double gn = norm3(eg.grad);
        history.push_back({it, p, eg.E, gn});
        if (gn < opts.grad_tol) return finish_critical_point(cfg, p, opts, it, std::move(history));

        const Eigen::Matrix3d H = fd_hessian(cfg, p, opts.basis, opts.hessian_step);
        const Eigen::Vector3d g(eg.grad[0], eg.grad[1], eg.grad[2]);
        Eigen::Vector3d step = -H.fullPivLu().solve(g);
        // keep the step inside the moduli space with margin
        double t = 1.0;
        bool moved = false;
        for (int back = 0; back < 24; ++back, t *= 0.5) {
            ModuliPoint q = p;
            for (int i = 1; i <= 3; ++i) q.r(i) += t * step[i - 1];
            if (!is_valid(q) || moduli_margin(q) < opts.margin) continue;
            const auto gq = energy_gradient(q, cfg, opts.basis);
            if (norm3(gq) < gn * (1.0 - 0.25 * t) || norm3(gq) < opts.grad_tol) {
                p = q;
                moved = true;
                break;
            }
        }
        if (!moved) {
            // gradient-norm descent stalled; try a tiny damped step
            ModuliPoint q = clamp_to_moduli(
                ModuliPoint{p.r1 + 1e-3 * step[0], p.r2 + 1e-3 * step[1], p.r3 + 1e-3 * step[2]},
                opts.margin);
            if (std::abs(q.r1 - p.r1) + std::abs(q.r2 - p.r2) + std::abs(q.r3 - p.r3) < 1e-15)
                throw NoConvergence(it);
            p = q;
        }
    }
    throw NoConvergence(opts.max_iterations);
}

inline CriticalPoint diagonal_search(const PrismConfig& cfg, const SearchOptions& opts) {
    // golden-section bracket of the diagonal maximum, then a sign change of
    // the diagonal derivative pinpoints the critical radius
    const auto f = [&](double t) { return energy({t, t, t}, cfg, opts.basis); };
    const auto df = [&](double t) {
        const auto g = energy_gradient({t, t, t}, cfg, opts.basis);
        return g[0] + g[1] + g[2];
    };
    double lo = 0.08, hi = pi / 4 - 5e-3;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    std::vector<SearchTracePoint> history;
    int it = 0;
    while (hi - lo > 1e-3) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = f(x1);
        }
        history.push_back({it++, {x1, x1, x1}, f1, 0.0});
    }
    // derivative sign change inside [lo, hi]
    double a = lo, b = hi, da = df(a), db = df(b);
    int expand = 0;
    while (da * db > 0 && expand++ < 8) {
        a = std::max(0.05, a - 0.02);
        b = std::min(pi / 4 - 1e-3, b + 0.02);
        da = df(a);
        db = df(b);
    }
    if (da * db > 0) throw NoConvergence(it);
    for (int k = 0; k < 60 && b - a > 1e-12; ++k) {
        const double mid = 0.5 * (a + b);
        const double dm = df(mid);
        history.push_back({it++, {mid, mid, mid}, 0.0, std::abs(dm) / std::sqrt(3.0)});
        if (dm == 0.0) {
            a = b = mid;
            break;
        }
        (da * dm > 0 ? a : b) = mid;
        (da * dm > 0 ? da : db) = dm;
    }
    const double t = 0.5 * (a + b);
    return finish_critical_point(cfg, {t, t, t}, opts, it, std::move(history));
}

inline CriticalPoint minmax_search(const PrismConfig& cfg, const SearchOptions& opts) {
    // discrete mountain pass: a polyline joins two high-energy corner
    // regions; the highest node repeatedly descends and the polyline is
    // re-distributed by arc length, lowering the pass until a saddle stalls it
    const double d0 = 0.06;
    const ModuliPoint A{pi / 2 - 2 * d0, d0, d0};
    const ModuliPoint B{d0, pi / 2 - 2 * d0, d0};
    const ModuliPoint mid{0.35, 0.35, 0.3};
    const int n = opts.path_nodes;
    std::vector<ModuliPoint> path(n);
    for (int k = 0; k < n; ++k) {
        const double s = static_cast<double>(k) / (n - 1);
        // two straight legs through a safe interior waypoint (convex domain)
        if (s <= 0.5) {
            const double t = 2 * s;
            path[k] = {A.r1 + t * (mid.r1 - A.r1), A.r2 + t * (mid.r2 - A.r2),
                       A.r3 + t * (mid.r3 - A.r3)};
        } else {
            const double t = 2 * s - 1;
            path[k] = {mid.r1 + t * (B.r1 - mid.r1), mid.r2 + t * (B.r2 - mid.r2),
                       mid.r3 + t * (B.r3 - mid.r3)};
        }
    }

    std::vector<SearchTracePoint> history;
    std::vector<double> E(n);
    for (int k = 0; k < n; ++k) E[k] = energy(path[k], cfg, opts.basis);

    int arg = 0;
    for (int it = 0; it < opts.minmax_iterations; ++it) {
        arg = 1;
        for (int k = 2; k < n - 1; ++k)
            if (E[k] > E[arg]) arg = k;
        const auto grad = energy_gradient(path[arg], cfg, opts.basis);
        const double gn = norm3(grad);
        history.push_back({it, path[arg], E[arg], gn});
        if (gn < 20 * opts.grad_tol) break;

        const double margin = moduli_margin(path[arg]);
        const double step = std::min(0.02, 0.5 * margin) / gn;
        ModuliPoint q = path[arg];
        for (int i = 1; i <= 3; ++i) q.r(i) -= step * grad[i - 1];
        path[arg] = clamp_to_moduli(q, opts.margin);
        E[arg] = energy(path[arg], cfg, opts.basis);

        // redistribute nodes uniformly by arc length
        std::vector<double> cum(n, 0.0);
        for (int k = 1; k < n; ++k) {
            const double dx = path[k].r1 - path[k - 1].r1;
            const double dy = path[k].r2 - path[k - 1].r2;
            const double dz = path[k].r3 - path[k - 1].r3;
            cum[k] = cum[k - 1] + std::sqrt(dx * dx + dy * dy + dz * dz);
        }
        std::vector<ModuliPoint> fresh(n);
        fresh[0] = path[0];
        fresh[n - 1] = path[n - 1];
        for (int k = 1; k < n - 1; ++k) {
            const double target = cum[n - 1] * k / (n - 1);
            int seg = 1;
            while (seg < n - 1 && cum[seg] < target) ++seg;
            const double w = (target - cum[seg - 1]) / std::max(1e-300, cum[seg] - cum[seg - 1]);
            fresh[k] = {path[seg - 1].r1 + w * (path[seg].r1 - path[seg - 1].r1),
                        path[seg - 1].r2 + w * (path[seg].r2 - path[seg - 1].r2),
                        path[seg - 1].r3 + w * (path[seg].r3 - path[seg - 1].r3)};
        }
        path = std::move(fresh);
        for (int k = 1; k < n - 1; ++k) E[k] = energy(path[k], cfg, opts.basis);
    }

    // polish the pass point to a genuine critical point
    SearchOptions polish = opts;
    polish.start = path[arg];
    return newton_search(cfg, path[arg], polish);
}

} // namespace detail

inline CriticalPoint find_critical_point(const PrismConfig& cfg, SearchStrategy strategy,
                                         const SearchOptions& opts = {}) {
    cfg.check();
    switch (strategy) {
        case SearchStrategy::diagonal:
            return detail::diagonal_search(cfg, opts);
        case SearchStrategy::newton: {
            ModuliPoint start = opts.start.value_or(ModuliPoint{0.5, 0.5, 0.5});
            if (!is_valid(start)) throw LeftModuliSpace("newton start outside the moduli space");
            return detail::newton_search(cfg, start, opts);
        }
        case SearchStrategy::minmax:
            return detail::minmax_search(cfg, opts);
    }
    throw Error(ErrorKind::validation, "unknown strategy");
}

// ---- level-set certificate machinery ----------------------------------

// Mean of the odd potential u_1-analogue over the azimuth circle of spherical
// radius r0 about the group-i axis, as a function of the group-i radius t.
inline double mean_on_test_circle(const PrismConfig& cfg, int i, double t, double rj, double rk,
                                  double r0, BasisSpec basis) {
    ModuliPoint p;
    p.r(i) = t;
    int slot = 0;
    for (int g = 1; g <= 3; ++g) {
        if (g == i) continue;
        p.r(g) = slot++ == 0 ? rj : rk;
    }
    const OddData d = odd_data(p, cfg, basis);
    // circle of spherical radius r0 concentric with the member-1 cap of group i
    BoundaryCircle probe = detail::make_cap_circle(d.model().chart, i, 1, r0);
    const int S = 128;
    double acc = 0.0;
    for (int q = 0; q < S; ++q) acc += d.u[i - 1].raw_value(probe.point(two_pi * (q + 0.5) / S));
    return acc / S;
}

// The radius h_i(r_j, r_k) at which that mean reaches a_i/2 (bisection; the
// mean is monotone increasing in t).
inline double h_threshold(const PrismConfig& cfg, int i, double rj, double rk, double r0 = pi / 8,
                          BasisSpec basis = {}) {
    double lo = 1e-4, hi = r0 * 0.98;
    const double target = cfg.a(i) / 2;
    double flo = mean_on_test_circle(cfg, i, lo, rj, rk, r0, basis) - target;
    if (flo > 0) return lo;
    for (int it = 0; it < 40 && hi - lo > 1e-6; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = mean_on_test_circle(cfg, i, mid, rj, rk, r0, basis) - target;
        (fm < 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct VdeltaFaceSample {
    ModuliPoint p;
    std::array<double, 3> grad{};
    bool pass = false;
};

struct VdeltaReport {
    double delta = 0.0;
    double epsilon = 0.0; // pinch-face offset; h_i stays below delta there
    std::array<std::vector<VdeltaFaceSample>, 3> radius_faces; // r_i = eps_i
    std::array<std::vector<VdeltaFaceSample>, 3> pinch_faces;  // r_j + r_k = pi/2 - eps
    double max_h_on_pinch = 0.0;
    double max_solve_residual = 0.0;
    bool all_pass = true;
};

// Checks the invariance of V_delta under the gradient flow: the gradient
// points inward on every face of the region.
inline VdeltaReport vdelta_certificate(const PrismConfig& cfg, double delta, int samples_per_face,
                                       BasisSpec basis = {}) {
    cfg.check();
    VdeltaReport rep;
    rep.delta = delta;
    rep.epsilon = delta / 2;

    // faces r_i = eps_i(r_j, r_k), eps_i = min(delta, h_i)
    for (int i = 1; i <= 3; ++i) {
        const double lo = delta, hi = pi / 4;
        for (int s = 0; s < samples_per_face; ++s) {
            const double fs = samples_per_face == 1 ? 0.5 : static_cast<double>(s) / (samples_per_face - 1);
            const double rj = lo + fs * (hi - lo) * 0.96;
            const double rk = std::min(hi * 0.98, pi / 2 - 2 * rep.epsilon - rj) * 0.85;
            if (rk < lo) continue;
            const double h = h_threshold(cfg, i, rj, rk, pi / 8, basis);
            const double eps_i = std::min(delta, h);
            ModuliPoint p;
            p.r(i) = eps_i;
            int slot = 0;
            for (int g = 1; g <= 3; ++g) {
                if (g == i) continue;
                p.r(g) = slot++ == 0 ? rj : rk;
            }
            if (!is_valid(p)) continue;
            VdeltaFaceSample smp;
            smp.p = p;
            const OddData d = odd_data(p, cfg, basis, false);
            rep.max_solve_residual = std::max(rep.max_solve_residual, d.max_solve_residual);
            smp.grad = energy_gradient(d);
            smp.pass = smp.grad[i - 1] > 0;
            rep.all_pass = rep.all_pass && smp.pass;
            rep.radius_faces[i - 1].push_back(smp);
        }
    }

    // faces r_j + r_k = pi/2 - eps (j < k), third radius above its floor
    int slot = 0;
    for (int j = 1; j <= 3; ++j)
        for (int k = j + 1; k <= 3; ++k, ++slot) {
            const int i = 6 - j - k;
            for (int s = 0; s < samples_per_face; ++s) {
                const double fs =
                    samples_per_face == 1 ? 0.5 : static_cast<double>(s) / (samples_per_face - 1);
                const double rj = pi / 4 - fs * 0.35 * (pi / 4);
                const double rk = pi / 2 - rep.epsilon - rj;
                if (rk <= 0 || rk > pi / 4) continue;
                ModuliPoint p;
                p.r(j) = rj;
                p.r(k) = rk;
                const double h = h_threshold(cfg, i, rj, rk, pi / 8, basis);
                rep.max_h_on_pinch = std::max(rep.max_h_on_pinch, h);
                p.r(i) = std::min(pi / 4 * 0.8, std::max(std::min(delta, h) * 1.5, 0.35 * pi / 4));
                if (!is_valid(p)) continue;
                VdeltaFaceSample smp;
                smp.p = p;
                const OddData d = odd_data(p, cfg, basis, false);
                rep.max_solve_residual = std::max(rep.max_solve_residual, d.max_solve_residual);
                smp.grad = energy_gradient(d);
                smp.pass = smp.grad[j - 1] < 0 && smp.grad[k - 1] < 0;
                rep.all_pass = rep.all_pass && smp.pass;
                rep.pinch_faces[slot].push_back(smp);
            }
        }
    rep.all_pass = rep.all_pass && rep.max_h_on_pinch < delta;
    return rep;
}

// Decay of  int_{gamma_1^(1)} (u_j')^2 ds  as r_1 shrinks (j != 1); the
// fitted log-log slope approaches sqrt(2).
inline double tangential_decay_exponent(const PrismConfig& cfg, double r2, double r3,
                                        const std::vector<double>& r1_list, BasisSpec basis = {}) {
    std::vector<double> xs, ys;
    for (double r1 : r1_list) {
        const OddData d = odd_data({r1, r2, r3}, cfg, basis);
        const int k = d.model().circle_index(1, 1);
        const TrigSeries du2 = d.u[1].value_series(k).derivative();
        const TrigSeries du3 = d.u[2].value_series(k).derivative();
        constexpr int S = 256;
        double acc = 0.0;
        for (int s = 0; s < S; ++s) {
            const double phi = two_pi * (s + 0.5) / S;
            const double v2 = du2.eval(phi), v3 = du3.eval(phi);
            acc += v2 * v2 + v3 * v3;
        }
        acc *= (two_pi / S) / std::sin(r1);
        xs.push_back(r1);
        ys.push_back(acc);
    }
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

// ---- cylinder-model diagnostic ----------------------------------------

struct CylinderReport {
    double period_steklov = 0.0;           // conjugate period around gamma_1^(1), target 2*pi
    double max_neumann_period = 0.0;       // worst period around a Neumann circle
    double outer_period = 0.0;             // period around the outer circle (total flux)
    double sigma_odd = 0.0;                // lowest odd-sector eigenvalue, metric lambda_1
    double sigma_even = 0.0;               // lowest even-sector nonzero eigenvalue
    bool odd_below_even = false;
};

inline CylinderReport cylinder_model_diagnostic(const ModuliPoint& p, const PrismConfig& cfg = {},
                                                int modes = 16, BasisSpec basis = {}) {
    const OddData d = odd_data(p, cfg, basis);
    const PlanarModel& model = d.model();
    const SeriesSolution& u1 = d.u[0];

    const int k11 = model.circle_index(1, 1);
    const double flux = integrate_shifted(u1.flux_samples(k11));
    const double scale = two_pi / flux; // normalize the Steklov-pair flux to 2*pi

    CylinderReport rep;
    const int S = 2048;
    for (std::size_t k = 0; k < model.circles.size(); ++k) {
        const auto& c = model.circles[k];
        // offset contour inside the domain, concentric with the circle
        const double off = (c.outer ? -1.0 : 1.0) * 0.35 * std::min(min_circle_gap(model), c.circle.radius);
        double period = 0.0;
        for (int s = 0; s < S; ++s) {
            const double t = two_pi * (s + 0.5) / S;
            const Complex z = c.circle.center + (c.circle.radius + off) * Complex{std::cos(t), std::sin(t)};
            const Complex g = u1.raw_gradient(z);
            const Complex dz = (c.circle.radius + off) * Complex{-std::sin(t), std::cos(t)} * (two_pi / S);
            period += (std::conj(g) * dz).imag();
        }
        period *= scale;
        if (static_cast<int>(k) == k11) rep.period_steklov = std::abs(period);
        else if (c.outer) rep.outer_period = std::abs(period);
        else if (c.group != 1) rep.max_neumann_period = std::max(rep.max_neumann_period, std::abs(period));
    }

    DtnOperator dtn(model, 1, modes, basis);
    const BoundaryMetric& lam = d.lambda[0];
    double best_odd = std::numeric_limits<double>::infinity();
    double best_even = std::numeric_limits<double>::infinity();
    for (const auto& label : SectorLabel::all()) {
        EigOptions o;
        o.sector = label;
        if (dtn.sector_embedding(label).cols() == 0) continue;
        const auto eig = sn_eigen(dtn, lam, o);
        if (eig.empty()) continue;
        double& best = label.s1 == Parity::odd ? best_odd : best_even;
        best = std::min(best, eig.front().sigma);
    }
    rep.sigma_odd = best_odd;
    rep.sigma_even = best_even;
    rep.odd_below_even = rep.sigma_odd < rep.sigma_even;
    return rep;
}

} // namespace fbms
