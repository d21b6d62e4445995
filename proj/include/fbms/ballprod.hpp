#pragma once

#include <random>

#include "fbms/surface.hpp"

namespace fbms {

// Sphere-valued boundary trace data for the constrained problem (SN_i): the
// three components carry the parity patterns oee / eoe / eeo, so the map is
// determined by its values at one quarter of the samples of gamma_1^(i).
struct ConstrainedMap {
    int steklov_group = 0;
    ModuliPoint p;
    std::vector<SeriesSolution> components;     // harmonic extensions, one per target axis
    std::array<std::vector<TrigSeries>, 3> trace; // per component: series on {gamma_1, gamma_2}
    double energy = 0.0;                        // sum of component Dirichlet energies
    double seed_energy = 0.0;                   // energy of the odd +-1 initial trace
    double energy_spread = 0.0;                 // max - min over multistarts
    BoundaryMetric multiplier;                  // lambda * sin(r_i), per unit azimuth
    double min_multiplier = 0.0;
    double stationarity_residual = 0.0;         // sup | nu(U) - lambda U |
    double constraint_defect = 0.0;             // max | |U|^2 - 1 | at enforcement samples
    double interp_defect = 0.0;                 // same, between samples
    double equivariance_defect = 0.0;
    double projected_gradient_norm = 0.0;
    int iterations = 0;
    int effective_rank = 0;
    bool rank_collapse = false;
    std::vector<double> energy_history;
};

struct ConstrainedOptions {
    int trace_modes = 24;       // highest Fourier mode carried on each circle
    BasisSpec basis;            // escalated internally as needed
    int multistarts = 8;        // random starts in addition to the odd seed
    unsigned seed = 2024;
    double grad_tol = 1e-8;
    int max_iterations = 20000;

    ConstrainedOptions() { basis.enforce_tol = false; }
};

namespace detail {

// Quadratic forms of the constrained problem in fundamental-sample
// coordinates, one per component.
struct ConstrainedForms {
    int group = 0;
    int Q = 0; // samples per circle
    std::vector<double> fund_phi;
    std::shared_ptr<DtnOperator> dtn;
    std::array<Eigen::MatrixXd, 3> form;       // F x F, F = Q/4
    std::array<Eigen::MatrixXd, 3> to_coeffs;  // sector coefficients from samples
    std::array<Eigen::MatrixXd, 3> embed_kept; // full-mode embedding of the kept columns
};

inline SectorLabel component_sector(int j) {
    SectorLabel l;
    if (j == 1) l.s1 = Parity::odd;
    if (j == 2) l.s2 = Parity::odd;
    if (j == 3) l.s3 = Parity::odd;
    return l;
}

inline ConstrainedForms build_constrained_forms(const PlanarModel& model, int group,
                                                const ConstrainedOptions& opts) {
    ConstrainedForms out;
    out.group = group;
    out.Q = 2 * opts.trace_modes;
    if (out.Q % 4 != 0) throw IllConditioned("trace modes must be even");
    const int F = out.Q / 4;
    for (int s = 0; s < F; ++s) out.fund_phi.push_back(two_pi * (s + 0.5) / out.Q);

    out.dtn = std::make_shared<DtnOperator>(model, group, out.Q / 2, opts.basis);
    const Eigen::MatrixXd& A = out.dtn->full_matrix();

    for (int j = 1; j <= 3; ++j) {
        const SectorLabel label = component_sector(j);
        const Eigen::MatrixXd E = out.dtn->sector_embedding(label);
        // evaluate each sector basis function at the fundamental samples of
        // gamma_1 and keep the modes visible on the shifted grid
        const int d = 2 * out.dtn->modes() + 1;
        Eigen::MatrixXd P(F, E.cols());
        for (int c = 0; c < E.cols(); ++c)
            for (int s = 0; s < F; ++s) {
                double v = 0.0;
                for (int m = 0; m < d; ++m)
                    if (E(m, c) != 0.0) v += E(m, c) * DtnOperator::mode_value(m, out.fund_phi[s]);
                P(s, c) = v;
            }
        std::vector<int> keep;
        for (int c = 0; c < E.cols(); ++c)
            if (P.col(c).cwiseAbs().maxCoeff() > 1e-8) keep.push_back(c);
        if (static_cast<int>(keep.size()) != F)
            throw IllConditioned("sector sampling is not square");
        Eigen::MatrixXd Pk(F, F), Ek(E.rows(), F);
        for (int c = 0; c < F; ++c) {
            Pk.col(c) = P.col(keep[c]);
            Ek.col(c) = E.col(keep[c]);
        }
        const Eigen::MatrixXd Pinv = Pk.inverse();
        const Eigen::MatrixXd Aj = Ek.transpose() * A * Ek;
        out.form[j - 1] = Pinv.transpose() * Aj * Pinv;
        out.form[j - 1] = 0.5 * (out.form[j - 1] + out.form[j - 1].transpose()).eval();
        out.to_coeffs[j - 1] = Pinv;
        out.embed_kept[j - 1] = Ek;
    }
    return out;
}

// Riemannian projected gradient (Barzilai-Borwein step with monotone Armijo
// safeguard) on the product of per-sample unit spheres.
struct PgResult {
    Eigen::MatrixXd X; // 3 x F
    double energy = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    std::vector<double> history;
};

inline PgResult project_gradient_minimize(const ConstrainedForms& forms, Eigen::MatrixXd X,
                                          double tol, int max_iter) {
    const int F = static_cast<int>(X.cols());
    auto normalize = [&](Eigen::MatrixXd& Y) {
        for (int s = 0; s < F; ++s) {
            const double n = Y.col(s).norm();
            if (n < 1e-14) Y.col(s) = Eigen::Vector3d(1, 0, 0);
            else Y.col(s) /= n;
        }
    };
    normalize(X);
    auto energy_of = [&](const Eigen::MatrixXd& Y) {
        double e = 0.0;
        for (int j = 0; j < 3; ++j) e += Y.row(j) * forms.form[j] * Y.row(j).transpose();
        return e;
    };
    auto gradient_of = [&](const Eigen::MatrixXd& Y) {
        Eigen::MatrixXd G(3, F);
        for (int j = 0; j < 3; ++j) G.row(j) = 2.0 * Y.row(j) * forms.form[j];
        for (int s = 0; s < F; ++s) // tangential part
            G.col(s) -= G.col(s).dot(Y.col(s)) * Y.col(s);
        return G;
    };

    PgResult out;
    double E = energy_of(X);
    Eigen::MatrixXd G = gradient_of(X);
    double step = 1.0 / std::max(1.0, G.norm());
    Eigen::MatrixXd X_prev = X, G_prev = G;
    int it = 0;
    out.history.push_back(E);
    for (; it < max_iter; ++it) {
        if (G.norm() < tol) break;
        double t = step;
        Eigen::MatrixXd Y;
        double Enew = 0.0;
        bool accepted = false;
        for (int back = 0; back < 40; ++back, t *= 0.5) {
            Y = X - t * G;
            normalize(Y);
            Enew = energy_of(Y);
            if (Enew <= E - 1e-4 * t * G.squaredNorm()) {
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        X_prev = X;
        G_prev = G;
        X = Y;
        E = Enew;
        G = gradient_of(X);
        out.history.push_back(E);
        // Barzilai-Borwein step for the next iteration
        const Eigen::MatrixXd dX = X - X_prev, dG = G - G_prev;
        const double denom = (dX.array() * dG.array()).sum();
        step = denom > 1e-300 ? dX.squaredNorm() / denom : 1.0 / std::max(1.0, G.norm());
        step = std::min(std::max(step, 1e-8), 1e3);
    }
    out.X = X;
    out.energy = E;
    out.grad_norm = G.norm();
    out.iterations = it;
    return out;
}

} // namespace detail

inline ConstrainedMap minimize_constrained(const ModuliPoint& p, int group,
                                           const ConstrainedOptions& opts = {}) {
    validate(p);
    const PlanarModel model = build_planar_model(p);
    const detail::ConstrainedForms forms = detail::build_constrained_forms(model, group, opts);
    const int F = forms.Q / 4;

    // odd seed: the group-i component is the constant +-1 trace
    Eigen::MatrixXd seed = Eigen::MatrixXd::Zero(3, F);
    seed.row(group - 1).setOnes();
    double seed_energy = 0.0;
    for (int j = 0; j < 3; ++j) seed_energy += seed.row(j) * forms.form[j] * seed.row(j).transpose();

    std::vector<detail::PgResult> runs;
    runs.push_back(detail::project_gradient_minimize(forms, seed, opts.grad_tol, opts.max_iterations));
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < opts.multistarts; ++trial) {
        Eigen::MatrixXd X(3, F);
        for (int j = 0; j < 3; ++j)
            for (int s = 0; s < F; ++s) X(j, s) = gauss(rng);
        runs.push_back(detail::project_gradient_minimize(forms, X, opts.grad_tol, opts.max_iterations));
    }
    int best = 0;
    double emin = runs[0].energy, emax = runs[0].energy;
    for (std::size_t t = 1; t < runs.size(); ++t) {
        emin = std::min(emin, runs[t].energy);
        emax = std::max(emax, runs[t].energy);
        if (runs[t].energy < runs[best].energy - 1e-12) best = static_cast<int>(t);
    }
    const detail::PgResult& win = runs[best];

    ConstrainedMap out;
    out.steklov_group = group;
    out.p = p;
    out.seed_energy = seed_energy;
    out.energy_spread = emax - emin;
    out.projected_gradient_norm = win.grad_norm;
    out.iterations = win.iterations;
    out.energy_history = win.history;
    if (win.grad_norm > 10 * opts.grad_tol)
        throw NoConvergence(win.iterations);

    // constraint defect at the enforcement samples
    for (int s = 0; s < F; ++s)
        out.constraint_defect =
            std::max(out.constraint_defect, std::abs(win.X.col(s).squaredNorm() - 1.0));

    // traces and harmonic extensions
    const auto circles = forms.dtn->steklov_circles();
    for (int j = 1; j <= 3; ++j) {
        const Eigen::VectorXd c = forms.to_coeffs[j - 1] * win.X.row(j - 1).transpose();
        const Eigen::VectorXd full = forms.embed_kept[j - 1] * c;
        const BoundaryTrace t = forms.dtn->trace_from_coefficients(full, std::nullopt);
        out.trace[j - 1] = {t.series[0], t.series[1]};
        std::vector<BoundaryFn> data(2);
        for (int which = 0; which < 2; ++which) {
            const TrigSeries series = t.series[which];
            data[which] = [series](double phi) { return series.eval(phi); };
        }
        out.components.push_back(forms.dtn->extend(data));
    }

    // energy, multiplier, residuals on the dense trace grid
    double energy = 0.0;
    for (const auto& sol : out.components) energy += sol.dirichlet_energy();
    out.energy = energy;

    constexpr int S = SeriesSolution::trace_samples;
    out.multiplier.circles = {circles[0], circles[1]};
    out.min_multiplier = std::numeric_limits<double>::infinity();
    for (int which = 0; which < 2; ++which) {
        const int k = circles[which];
        const double sin_r = model.circles[k].sphere_speed();
        std::vector<double> lam(S);
        for (int s = 0; s < S; ++s) {
            const double phi = two_pi * (s + 0.5) / S;
            double udotq = 0.0, norm2 = 0.0, res2 = 0.0;
            std::array<double, 3> uval{}, nu{};
            for (int j = 0; j < 3; ++j) {
                uval[j] = out.trace[j][which].eval(phi);
                nu[j] = out.components[j].flux_samples(k)[s] / sin_r;
                udotq += uval[j] * nu[j];
                norm2 += uval[j] * uval[j];
            }
            lam[s] = udotq; // lambda = U . nu(U), with |U| = 1 on the circle
            for (int j = 0; j < 3; ++j) res2 += (nu[j] - lam[s] * uval[j]) * (nu[j] - lam[s] * uval[j]);
            out.stationarity_residual = std::max(out.stationarity_residual, std::sqrt(res2));
            out.interp_defect = std::max(out.interp_defect, std::abs(norm2 - 1.0));
            out.min_multiplier = std::min(out.min_multiplier, lam[s]);
        }
        // density per unit azimuth
        for (double& v : lam) v *= sin_r;
        out.multiplier.density.push_back(analyze_shifted(lam, 128));
    }

    // equivariance of the extensions at interior points
    {
        std::mt19937_64 rng2(77);
        std::uniform_real_distribution<double> uni(-1.9, 1.9);
        int tested = 0;
        while (tested < 24) {
            const Complex z{uni(rng2), uni(rng2)};
            if (!model.contains(z, 0.0) || model.boundary_clearance(z) < 5e-2) continue;
            ++tested;
            for (int axis = 1; axis <= 3; ++axis) {
                const Complex w = model.reflection(axis).apply(z);
                for (int j = 1; j <= 3; ++j) {
                    const double sign = axis == j ? -1.0 : 1.0;
                    out.equivariance_defect =
                        std::max(out.equivariance_defect, std::abs(out.components[j - 1].value(w) -
                                                                   sign * out.components[j - 1].value(z)));
                }
            }
        }
    }

    // effective rank of the span of the three components (trace Gram matrix)
    {
        Eigen::Matrix3d gram = Eigen::Matrix3d::Zero();
        for (int which = 0; which < 2; ++which)
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) {
                    double acc = 0.0;
                    for (int s = 0; s < S; ++s) {
                        const double phi = two_pi * (s + 0.5) / S;
                        acc += out.trace[a][which].eval(phi) * out.trace[b][which].eval(phi);
                    }
                    gram(a, b) += acc * two_pi / S;
                }
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(gram);
        const double top = es.eigenvalues().maxCoeff();
        out.effective_rank = 0;
        for (int a = 0; a < 3; ++a)
            if (es.eigenvalues()[a] > 1e-8 * top) ++out.effective_rank;
        out.rank_collapse = out.effective_rank < 3;
    }
    return out;
}

struct ConformalMaxResult {
    double E_hat = 0.0;                 // sum a_i^2 E(U_i)
    double E_odd = 0.0;                 // odd construction energy at the same point
    std::array<double, 3> component_energy{};
    std::array<double, 3> multiplier_integral{}; // oint lambda ds per group
    double certificate_slack = 0.0;     // min over trials of oint lambda - L sigma_1
    double equality_gap = 0.0;          // test with g = lambda itself
    std::vector<ConstrainedMap> maps;
};

// Maximum of F over the conformal class at p, realized by the constrained
// minimizing maps, with a sampled certificate of the maximizing property.
inline ConformalMaxResult conformal_max_energy(const ModuliPoint& p, const PrismConfig& cfg,
                                               const ConstrainedOptions& opts = {},
                                               int certificate_trials = 10) {
    cfg.check();
    ConformalMaxResult out;
    const PlanarModel model = build_planar_model(p);
    std::mt19937_64 rng(opts.seed + 9);
    std::normal_distribution<double> gauss(0.0, 0.3);
    out.certificate_slack = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 3; ++i) {
        ConstrainedMap cm = minimize_constrained(p, i, opts);
        out.component_energy[i - 1] = cm.energy;
        out.multiplier_integral[i - 1] = cm.multiplier.length();
        out.E_hat += cfg.a(i) * cfg.a(i) * cm.energy;

        DtnOperator dtn(model, i, opts.trace_modes, opts.basis);
        // equality case: the multiplier metric itself has sigma_1 = 1
        {
            const auto eig = sn_eigen(dtn, cm.multiplier, {});
            out.equality_gap = std::max(
                out.equality_gap,
                std::abs(eig.front().sigma * cm.multiplier.length() - cm.multiplier.length()) /
                    cm.multiplier.length());
        }
        for (int trial = 0; trial < certificate_trials; ++trial) {
            const double c1 = gauss(rng), c2 = gauss(rng), c3 = gauss(rng);
            auto density = [&](double phi) {
                return std::exp(c1 * std::cos(2 * phi) + c2 * std::cos(4 * phi) +
                                c3 * std::cos(6 * phi));
            };
            const auto circles = model.group_indices(i);
            const BoundaryMetric g = BoundaryMetric::from_functions(circles, {density, density});
            const auto eig = sn_eigen(dtn, g, {});
            out.certificate_slack = std::min(out.certificate_slack,
                                             cm.multiplier.length() - eig.front().normalized);
        }
        out.maps.push_back(std::move(cm));
    }
    out.E_odd = energy(odd_data(p, cfg, opts.basis));
    return out;
}

struct MaximizeOptions {
    ConstrainedOptions inner;      // used during the search (light multistart)
    ConstrainedOptions final_pass; // used to certify the maximizer
    double simplex_tol = 1e-5;
    int max_evaluations = 400;
    double margin = 1e-3;

    MaximizeOptions() {
        inner.multistarts = 1;
        final_pass.multistarts = 8;
    }
};

struct MaximizeResult {
    ModuliPoint p_max;
    double E_hat = 0.0;
    double simplex_diameter = 0.0;
    double boundary_margin = 0.0;
    int evaluations = 0;
    ConformalMaxResult detail; // full certificate at the maximizer
    std::vector<SearchTracePoint> history;
};

// Derivative-free maximization of E_hat by Nelder-Mead over the moduli space.
inline MaximizeResult maximize_over_moduli(const PrismConfig& cfg,
                                           const std::vector<ModuliPoint>& start_grid,
                                           const MaximizeOptions& opts = {}) {
    cfg.check();
    int evals = 0;
    std::vector<SearchTracePoint> history;
    auto value = [&](const ModuliPoint& q) {
        if (!is_valid(q) || moduli_margin(q) < opts.margin)
            return -std::numeric_limits<double>::infinity();
        ++evals;
        double e = 0.0;
        try {
            for (int i = 1; i <= 3; ++i) {
                ConstrainedMap cm = minimize_constrained(q, i, opts.inner);
                e += cfg.a(i) * cfg.a(i) * cm.energy;
            }
        } catch (const Error&) {
            // crowded configurations the solver cannot certify are treated as
            // infeasible; the maximum is interior by a wide margin
            return -std::numeric_limits<double>::infinity();
        }
        history.push_back({evals, q, e, 0.0});
        return e;
    };

    ModuliPoint best = start_grid.front();
    double fbest = -std::numeric_limits<double>::infinity();
    for (const auto& q : start_grid) {
        const double f = value(q);
        if (f > fbest) {
            fbest = f;
            best = q;
        }
    }

    // Nelder-Mead on -E_hat
    std::array<ModuliPoint, 4> X;
    std::array<double, 4> Fv;
    X[0] = best;
    Fv[0] = fbest;
    for (int k = 1; k < 4; ++k) {
        ModuliPoint q = best;
        q.r(k) = q.r(k) + 0.04;
        if (!is_valid(q) || moduli_margin(q) < opts.margin) q.r(k) -= 0.08;
        X[k] = q;
        Fv[k] = value(q);
    }
    auto diameter = [&X]() {
        double d = 0.0;
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b)
                d = std::max(d, std::abs(X[a].r1 - X[b].r1) + std::abs(X[a].r2 - X[b].r2) +
                                    std::abs(X[a].r3 - X[b].r3));
        return d;
    };
    auto order = [&]() {
        std::array<int, 4> idx{0, 1, 2, 3};
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return Fv[a] > Fv[b]; });
        std::array<ModuliPoint, 4> Xs;
        std::array<double, 4> Fs;
        for (int k = 0; k < 4; ++k) {
            Xs[k] = X[idx[k]];
            Fs[k] = Fv[idx[k]];
        }
        X = Xs;
        Fv = Fs;
    };
    auto combine = [](const ModuliPoint& a, const ModuliPoint& b, double t) {
        return ModuliPoint{a.r1 + t * (b.r1 - a.r1), a.r2 + t * (b.r2 - a.r2),
                           a.r3 + t * (b.r3 - a.r3)};
    };
    while (evals < opts.max_evaluations) {
        order();
        if (diameter() < opts.simplex_tol) break;
        const ModuliPoint centroid{(X[0].r1 + X[1].r1 + X[2].r1) / 3,
                                   (X[0].r2 + X[1].r2 + X[2].r2) / 3,
                                   (X[0].r3 + X[1].r3 + X[2].r3) / 3};
        const ModuliPoint refl = combine(centroid, X[3], -1.0);
        const double frefl = value(refl);
        if (frefl > Fv[0]) {
            const ModuliPoint expand = combine(centroid, X[3], -2.0);
            const double fexp = value(expand);
            if (fexp > frefl) {
                X[3] = expand;
                Fv[3] = fexp;
            } else {
                X[3] = refl;
                Fv[3] = frefl;
            }
        } else if (frefl > Fv[2]) {
            X[3] = refl;
            Fv[3] = frefl;
        } else {
            const ModuliPoint contr = combine(centroid, X[3], 0.5);
            const double fcon = value(contr);
            if (fcon > Fv[3]) {
                X[3] = contr;
                Fv[3] = fcon;
            } else {
                for (int k = 1; k < 4; ++k) {
                    X[k] = combine(X[0], X[k], 0.5);
                    Fv[k] = value(X[k]);
                }
            }
        }
    }
    order();

    MaximizeResult out;
    out.p_max = X[0];
    out.simplex_diameter = diameter();
    out.boundary_margin = moduli_margin(X[0]);
    out.evaluations = evals;
    out.history = std::move(history);
    if (out.boundary_margin <= opts.margin)
        throw BoundaryAttracted("maximizer hugs the moduli boundary: raise resolution");
    out.detail = conformal_max_energy(X[0], cfg, opts.final_pass);
    out.E_hat = out.detail.E_hat;
    return out;
}

// Nine-component image surface in the product of three balls.
struct ProductSurface {
    std::vector<Complex> preimage;
    std::vector<std::array<double, 9>> vertices; // (a1 U1, a2 U2, a3 U3)
    std::vector<std::array<int, 3>> triangles;
    std::vector<double> conformality; // per triangle
    double max_conformality = 0.0;
    std::array<double, 3> sphere_residual{}; // max | |U_i| - 1 | over the group-i loops
    std::array<int, 3> effective_rank{};
    bool factors_through_r3 = false;
    int genus = -1;
    int n_boundary_loops = 0;
};

struct ProductSurfaceOptions {
    double mesh_h = 0.04;
    ConstrainedOptions constrained;
    double stationarity_gate = 1e-5;
};

inline ProductSurface assemble_product_surface(const ModuliPoint& p_max, const PrismConfig& cfg,
                                               const ProductSurfaceOptions& opts = {}) {
    cfg.check();
    const PlanarModel model = build_planar_model(p_max);
    std::vector<ConstrainedMap> maps;
    for (int i = 1; i <= 3; ++i) {
        maps.push_back(minimize_constrained(p_max, i, opts.constrained));
        if (maps.back().stationarity_residual > opts.stationarity_gate)
            throw NotMaximal("constrained map stationarity above the gate");
    }

    const FundamentalMesh fm = mesh_fundamental_domain(model, opts.mesh_h);
    const UnfoldedMesh um = unfold_octant(model, fm);
    const int nf = static_cast<int>(fm.mesh.points.size());

    // component values/gradients on the octant: slot (i-1)*3 + (j-1)
    std::vector<std::array<double, 9>> val(nf);
    std::vector<std::array<Complex, 9>> grd(nf);
    for (int v = 0; v < nf; ++v)
        for (int i = 1; i <= 3; ++i)
            for (int j = 1; j <= 3; ++j) {
                const auto& sol = maps[i - 1].components[j - 1];
                val[v][(i - 1) * 3 + (j - 1)] = cfg.a(i) * sol.value(fm.mesh.points[v]);
                grd[v][(i - 1) * 3 + (j - 1)] = cfg.a(i) * sol.gradient(fm.mesh.points[v]);
            }

    ProductSurface out;
    out.preimage = um.plane;
    out.triangles = um.triangles;
    out.vertices.resize(um.plane.size());
    for (std::size_t v = 0; v < um.plane.size(); ++v) {
        const int s = um.source[v];
        const unsigned g = um.element[v];
        for (int i = 1; i <= 3; ++i)
            for (int j = 1; j <= 3; ++j)
                out.vertices[v][(i - 1) * 3 + (j - 1)] =
                    component_sign(j, g) * val[s][(i - 1) * 3 + (j - 1)];
    }

    // conformality of the combined map per fundamental face
    std::vector<double> fund_conf(fm.mesh.triangles.size());
    for (std::size_t f = 0; f < fm.mesh.triangles.size(); ++f) {
        const auto& t = fm.mesh.triangles[f];
        const Complex c = (fm.mesh.points[t[0]] + fm.mesh.points[t[1]] + fm.mesh.points[t[2]]) / 3.0;
        double xx = 0, yy = 0, xy = 0;
        for (int i = 1; i <= 3; ++i)
            for (int j = 1; j <= 3; ++j) {
                const Complex gi = cfg.a(i) * maps[i - 1].components[j - 1].gradient(c);
                xx += gi.real() * gi.real();
                yy += gi.imag() * gi.imag();
                xy += gi.real() * gi.imag();
            }
        fund_conf[f] = std::hypot(xx - yy, 2 * xy) / std::max(1e-300, xx + yy);
    }
    out.conformality.resize(um.triangles.size());
    for (std::size_t f = 0; f < um.triangles.size(); ++f) {
        out.conformality[f] = fund_conf[um.tri_source[f]];
        out.max_conformality = std::max(out.max_conformality, out.conformality[f]);
    }

    // topology and the sphere constraint along the boundary loops
    const int chi = um.euler_characteristic();
    const auto loops = um.boundary_loops();
    out.n_boundary_loops = static_cast<int>(loops.size());
    out.genus = (2 - out.n_boundary_loops - chi) / 2;
    for (const auto& loop : loops) {
        const int k = fm.on_circle[um.source[loop.front()]];
        const int group = k >= 0 ? model.circles[k].group : 0;
        if (group < 1) throw DegenerateMesh("boundary loop without a source circle");
        for (int v : loop) {
            double n2 = 0.0;
            for (int j = 0; j < 3; ++j) {
                const double c = out.vertices[v][(group - 1) * 3 + j] / cfg.a(group);
                n2 += c * c;
            }
            out.sphere_residual[group - 1] =
                std::max(out.sphere_residual[group - 1], std::abs(std::sqrt(n2) - 1.0));
        }
    }
    for (int i = 0; i < 3; ++i) out.effective_rank[i] = maps[i].effective_rank;
    out.factors_through_r3 =
        out.effective_rank[0] == 1 && out.effective_rank[1] == 1 && out.effective_rank[2] == 1;
    return out;
}

} // namespace fbms
