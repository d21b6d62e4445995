#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>

#include "fbms/harmonic.hpp"

namespace fbms {

enum class Parity : unsigned char { even, odd };

// Parity triple under the reflections rho_1, rho_2, rho_3.
struct SectorLabel {
    Parity s1 = Parity::even, s2 = Parity::even, s3 = Parity::even;

    Parity s(int axis) const { return axis == 1 ? s1 : (axis == 2 ? s2 : s3); }

    // sign of the character on the group element with reflection bitmask g
    double character(unsigned g) const {
        double c = 1.0;
        for (int axis = 1; axis <= 3; ++axis)
            if ((g >> (axis - 1)) & 1u && s(axis) == Parity::odd) c = -c;
        return c;
    }

    std::string str() const {
        std::string out;
        for (int axis = 1; axis <= 3; ++axis) out += s(axis) == Parity::even ? 'e' : 'o';
        return out;
    }

    static SectorLabel parse(const std::string& s) {
        SectorLabel l;
        if (s.size() != 3) throw Error(ErrorKind::validation, "sector label must have three letters");
        auto p = [](char c) {
            if (c != 'e' && c != 'o') throw Error(ErrorKind::validation, "sector letters are 'e' or 'o'");
            return c == 'e' ? Parity::even : Parity::odd;
        };
        l.s1 = p(s[0]);
        l.s2 = p(s[1]);
        l.s3 = p(s[2]);
        return l;
    }

    static std::array<SectorLabel, 8> all() {
        std::array<SectorLabel, 8> out;
        for (unsigned m = 0; m < 8; ++m)
            out[m] = SectorLabel{(m & 1u) ? Parity::odd : Parity::even,
                                 (m & 2u) ? Parity::odd : Parity::even,
                                 (m & 4u) ? Parity::odd : Parity::even};
        return out;
    }

    bool operator==(const SectorLabel&) const = default;
};

// The three sectors that can carry a first eigenfunction of any (SN_i):
// exactly one odd parity.
inline std::array<SectorLabel, 3> admissible_sectors() {
    return {SectorLabel::parse("eeo"), SectorLabel::parse("eoe"), SectorLabel::parse("oee")};
}

inline std::array<SectorLabel, 5> excluded_sectors() {
    return {SectorLabel::parse("eee"), SectorLabel::parse("eoo"), SectorLabel::parse("oeo"),
            SectorLabel::parse("ooe"), SectorLabel::parse("ooo")};
}

// Composite azimuth correspondence of a reflection bitmask on circles of a
// given group, together with the member swap parity.
inline AzimuthMap composite_azimuth_map(int circle_group, unsigned bitmask) {
    AzimuthMap total{false, 1.0, 0.0};
    for (int axis = 1; axis <= 3; ++axis) {
        if (!((bitmask >> (axis - 1)) & 1u)) continue;
        const AzimuthMap m = azimuth_map(circle_group, axis);
        total.scale = m.scale * total.scale;
        total.offset = m.scale * total.offset + m.offset;
        total.swaps_member = total.swaps_member != m.swaps_member;
    }
    return total;
}

// Precompose a series with the affine azimuth map phi -> s*phi + o.
inline TrigSeries precompose(const TrigSeries& f, const AzimuthMap& m) {
    TrigSeries g(f.order());
    g.a0 = f.a0;
    for (int n = 1; n <= f.order(); ++n) {
        const double c = std::cos(n * m.offset), s = std::sin(n * m.offset);
        g.a[n - 1] = f.a[n - 1] * c + f.b[n - 1] * s;
        g.b[n - 1] = m.scale * (f.b[n - 1] * c - f.a[n - 1] * s);
    }
    return g;
}

// Projection of a trace (on a reflection-invariant circle set) onto one
// parity sector: the signed average of its eight reflected pullbacks.
inline BoundaryTrace sector_project(const PlanarModel& model, const BoundaryTrace& t,
                                    const SectorLabel& label) {
    BoundaryTrace out;
    out.circles = t.circles;
    out.metric = t.metric;
    out.series.assign(t.circles.size(), TrigSeries());
    auto position = [&t](int circle) {
        for (std::size_t i = 0; i < t.circles.size(); ++i)
            if (t.circles[i] == circle) return static_cast<int>(i);
        throw Error(ErrorKind::validation, "trace circle set is not reflection invariant");
    };
    for (std::size_t i = 0; i < t.circles.size(); ++i) {
        const int k = t.circles[i];
        const int group = model.circles[k].group;
        TrigSeries acc;
        for (unsigned g = 0; g < 8; ++g) {
            int image = k;
            for (int axis = 1; axis <= 3; ++axis)
                if ((g >> (axis - 1)) & 1u) image = model.reflected_circle(image, axis);
            const AzimuthMap amap = composite_azimuth_map(group, g);
            TrigSeries term = precompose(t.series[position(image)], amap);
            term *= label.character(g) / 8.0;
            acc += term;
        }
        out.series[i] = acc;
    }
    return out;
}

// Positive length density on a set of boundary circles, with respect to the
// azimuth parameter: the length of circle k is the integral of density over
// [0, 2*pi).
struct BoundaryMetric {
    std::vector<int> circles;
    std::vector<TrigSeries> density;

    double length() const {
        double L = 0.0;
        for (const auto& d : density) L += two_pi * d.a0;
        return L;
    }

    double min_sample(int samples = 512) const {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& d : density)
            for (int q = 0; q < samples; ++q) m = std::min(m, d.eval(two_pi * (q + 0.5) / samples));
        return m;
    }

    BoundaryMetric scaled(double c) const {
        BoundaryMetric out = *this;
        for (auto& d : out.density) d *= c;
        return out;
    }

    const TrigSeries* find(int circle) const {
        for (std::size_t i = 0; i < circles.size(); ++i)
            if (circles[i] == circle) return &density[i];
        return nullptr;
    }

    // Spherical metric: constant density sin(geo_radius) per cap circle.
    static BoundaryMetric sphere(const PlanarModel& model, const std::vector<int>& circles) {
        BoundaryMetric m;
        m.circles = circles;
        for (int k : circles) {
            if (!model.circles[k].is_cap)
                throw DegenerateMetric("sphere metric requires cap-parametrized circles");
            TrigSeries d;
            d.a0 = model.circles[k].sphere_speed();
            m.density.push_back(d);
        }
        return m;
    }

    // Plane metric: density |dw/dphi|.
    static BoundaryMetric plane(const PlanarModel& model, const std::vector<int>& circles) {
        BoundaryMetric m;
        m.circles = circles;
        const int S = 512;
        for (int k : circles) {
            std::vector<double> vals(S);
            for (int q = 0; q < S; ++q) vals[q] = model.circles[k].speed(two_pi * (q + 0.5) / S);
            m.density.push_back(analyze_shifted(vals, S / 2 - 1));
        }
        return m;
    }

    static BoundaryMetric from_functions(const std::vector<int>& circles,
                                         const std::vector<std::function<double(double)>>& fns) {
        BoundaryMetric m;
        m.circles = circles;
        const int S = 512;
        for (const auto& f : fns) {
            std::vector<double> vals(S);
            for (int q = 0; q < S; ++q) vals[q] = f(two_pi * (q + 0.5) / S);
            m.density.push_back(analyze_shifted(vals, S / 2 - 1));
        }
        return m;
    }
};

struct EigResult {
    double sigma = 0.0;      // eigenvalue, units 1/length
    double normalized = 0.0; // sigma * L(metric on the Steklov circles)
    std::string sector;      // "full" or a parity triple
    double residual = 0.0;   // ||A x - sigma B x|| / ||x||
    BoundaryTrace trace;     // L2(rho)-normalized
};

// Dirichlet-to-Neumann operator on the Steklov circle set: each Fourier mode
// is extended harmonically (Neumann on the remaining circles) and its flux
// density recorded against the L2-orthonormal mode basis.
class DtnOperator {
public:
    DtnOperator(const PlanarModel& model, std::vector<int> steklov_circles, int modes,
                BasisSpec basis = {}, double symmetry_tol = 1e-6)
        : model_(model), circles_(std::move(steklov_circles)), M_(modes), basis_(basis) {
        if (M_ < 1) throw IllConditioned("need at least one Fourier mode");
        // Azimuth modes spread across plane-angle harmonics under the cap
        // parametrization, so the series needs headroom beyond the top mode;
        // escalate the order until the column solves clear the gate.
        basis_.order = std::max(basis_.order, 2 * M_ + 14);
        basis_.enforce_tol = false;
        std::vector<ConditionType> types(model_.circles.size(), ConditionType::neumann);
        for (int k : circles_) types[k] = ConditionType::dirichlet;
        for (int attempt = 0;; ++attempt) {
            try {
                op_ = std::make_shared<MixedOperator>(model_, types, basis_);
                assemble(symmetry_tol);
                break;
            } catch (const ResidualAboveTolerance&) {
                if (attempt >= 3) throw;
                basis_.order += 16;
                assembly_residual_ = 0.0;
            } catch (const SymmetryDefect&) {
                if (attempt >= 3) throw;
                basis_.order += 16;
                assembly_residual_ = 0.0;
            }
        }
    }

    DtnOperator(const PlanarModel& model, int group, int modes, BasisSpec basis = {},
                double symmetry_tol = 1e-6)
        : DtnOperator(model, model.group_indices(group), modes, basis, symmetry_tol) {}

    const PlanarModel& model() const { return model_; }
    const std::vector<int>& steklov_circles() const { return circles_; }
    int modes() const { return M_; }
    int dim() const { return static_cast<int>(circles_.size()) * (2 * M_ + 1); }
    double symmetry_defect() const { return symmetry_defect_; }
    double assembly_residual() const { return assembly_residual_; }
    const MixedOperator& solver() const { return *op_; }

    // orthonormal mode s on circle slot c: index c*(2M+1) + m,
    // m = 0: 1/sqrt(2 pi); m = 2n-1: cos(n phi)/sqrt(pi); m = 2n: sin(n phi)/sqrt(pi)
    static double mode_value(int m, double phi) {
        if (m == 0) return 1.0 / std::sqrt(two_pi);
        const int n = (m + 1) / 2;
        return (m % 2 ? std::cos(n * phi) : std::sin(n * phi)) / std::sqrt(pi);
    }

    const Eigen::MatrixXd& full_matrix() const { return A_; }

    // Sector restriction: columns combine one admissible mode on the first
    // circle with its +- partner on the second.
    Eigen::MatrixXd sector_embedding(const SectorLabel& label) const {
        if (circles_.size() != 2 || model_.circles[circles_[0]].group == 0)
            throw Error(ErrorKind::validation, "sector restriction needs a canonical circle pair");
        const int group = model_.circles[circles_[0]].group;
        int ea = 0, eb = 0;
        for (int axis = 1; axis <= 3; ++axis) {
            if (axis == group) continue;
            (ea == 0 ? ea : eb) = axis;
        }
        const Parity pa = label.s(ea), pb = label.s(eb);
        const double pair_sign = label.s(group) == Parity::even ? 1.0 : -1.0;
        std::vector<int> modes;
        if (pb == Parity::even) { // cosine modes; parity under phi -> pi - phi is (-1)^n
            for (int n = 0; n <= M_; ++n)
                if ((n % 2 == 0) == (pa == Parity::even)) modes.push_back(n == 0 ? 0 : 2 * n - 1);
        } else { // sine modes; parity under phi -> pi - phi is (-1)^{n+1}
            for (int n = 1; n <= M_; ++n)
                if ((n % 2 == 1) == (pa == Parity::even)) modes.push_back(2 * n);
        }
        const int d = 2 * M_ + 1;
        Eigen::MatrixXd S = Eigen::MatrixXd::Zero(2 * d, static_cast<int>(modes.size()));
        for (std::size_t j = 0; j < modes.size(); ++j) {
            S(modes[j], static_cast<int>(j)) = 1.0 / std::sqrt(2.0);
            S(d + modes[j], static_cast<int>(j)) = pair_sign / std::sqrt(2.0);
        }
        return S;
    }

    Eigen::MatrixXd matrix(const std::optional<SectorLabel>& sector) const {
        if (!sector) return A_;
        const Eigen::MatrixXd S = sector_embedding(*sector);
        return S.transpose() * A_ * S;
    }

    Eigen::MatrixXd mass_matrix(const BoundaryMetric& rho,
                                const std::optional<SectorLabel>& sector) const {
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(dim(), dim());
        const int d = 2 * M_ + 1;
        const int S = 512;
        for (std::size_t c = 0; c < circles_.size(); ++c) {
            const TrigSeries* dens = rho.find(circles_[c]);
            if (!dens) throw DegenerateMetric("metric does not cover the Steklov circles");
            Eigen::MatrixXd modes(d, S);
            Eigen::VectorXd w(S);
            for (int q = 0; q < S; ++q) {
                const double phi = two_pi * (q + 0.5) / S;
                w[q] = dens->eval(phi) * two_pi / S;
                for (int m = 0; m < d; ++m) modes(m, q) = mode_value(m, phi);
            }
            B.block(static_cast<int>(c) * d, static_cast<int>(c) * d, d, d) =
                modes * w.asDiagonal() * modes.transpose();
        }
        if (!sector) return B;
        const Eigen::MatrixXd E = sector_embedding(*sector);
        return E.transpose() * B * E;
    }

    // Coefficient vector of the global constant trace (before restriction).
    Eigen::VectorXd constant_vector() const {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(dim());
        const int d = 2 * M_ + 1;
        for (std::size_t c = 0; c < circles_.size(); ++c) v[static_cast<int>(c) * d] = std::sqrt(two_pi);
        return v;
    }

    BoundaryTrace trace_from_coefficients(const Eigen::VectorXd& x,
                                          const std::optional<SectorLabel>& sector) const {
        Eigen::VectorXd full = sector ? (sector_embedding(*sector) * x).eval() : x;
        BoundaryTrace t;
        t.circles = circles_;
        const int d = 2 * M_ + 1;
        for (std::size_t c = 0; c < circles_.size(); ++c) {
            TrigSeries f(M_);
            f.a0 = full[static_cast<int>(c) * d] / std::sqrt(two_pi);
            for (int n = 1; n <= M_; ++n) {
                f.a[n - 1] = full[static_cast<int>(c) * d + 2 * n - 1] / std::sqrt(pi);
                f.b[n - 1] = full[static_cast<int>(c) * d + 2 * n] / std::sqrt(pi);
            }
            t.series.push_back(f);
        }
        return t;
    }

    // Harmonic extension of Dirichlet data on the Steklov circles.
    SeriesSolution extend(const std::vector<BoundaryFn>& steklov_data) const {
        std::vector<BoundaryFn> data(model_.circles.size(), nullptr);
        for (std::size_t c = 0; c < circles_.size(); ++c) data[circles_[c]] = steklov_data[c];
        return op_->solve(data);
    }

private:
    PlanarModel model_;
    std::vector<int> circles_;
    int M_;
    BasisSpec basis_;
    std::shared_ptr<MixedOperator> op_;
    Eigen::MatrixXd A_;
    double symmetry_defect_ = 0.0;
    double assembly_residual_ = 0.0;

    void assemble(double symmetry_tol) {
        const int d = 2 * M_ + 1;
        const int dimension = dim();
        const int S = 512;

        std::vector<std::vector<BoundaryFn>> batch;
        batch.reserve(dimension);
        for (std::size_t c = 0; c < circles_.size(); ++c) {
            for (int m = 0; m < d; ++m) {
                std::vector<BoundaryFn> data(model_.circles.size(), nullptr);
                data[circles_[c]] = [m](double phi) { return mode_value(m, phi); };
                batch.push_back(std::move(data));
            }
        }
        const std::vector<SeriesSolution> sols = op_->solve_batch(batch);
        for (const auto& s : sols) assembly_residual_ = std::max(assembly_residual_, s.max_residual());
        if (assembly_residual_ > symmetry_tol)
            throw ResidualAboveTolerance(assembly_residual_, symmetry_tol);

        // row pairing matrices: mode values at the sample grid, one per circle
        std::vector<Eigen::MatrixXd> modes(circles_.size());
        for (std::size_t c = 0; c < circles_.size(); ++c) {
            modes[c].resize(d, S);
            for (int q = 0; q < S; ++q) {
                const double phi = two_pi * (q + 0.5) / S;
                for (int m = 0; m < d; ++m) modes[c](m, q) = mode_value(m, phi);
            }
        }

        Eigen::MatrixXd A(dimension, dimension);
        for (int col = 0; col < dimension; ++col) {
            for (std::size_t c = 0; c < circles_.size(); ++c) {
                Eigen::VectorXd q(S);
                const auto& flux = sols[col].flux_samples(circles_[c]);
                for (int i = 0; i < S; ++i) q[i] = flux[i];
                A.block(static_cast<int>(c) * d, col, d, 1) = modes[c] * q * (two_pi / S);
            }
        }
        symmetry_defect_ = (A - A.transpose()).cwiseAbs().maxCoeff();
        if (symmetry_defect_ > symmetry_tol) throw SymmetryDefect(symmetry_defect_);
        A_ = 0.5 * (A + A.transpose());
    }
};

namespace detail {

struct GenEig {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors; // columns, B-normalized
};

// Symmetric generalized eigenproblem A x = sigma B x via the symmetric
// square root of B, optionally deflating one known null direction of A.
inline GenEig sym_gen_eig(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                          const Eigen::VectorXd* deflate) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> bs(B);
    const double bmax = bs.eigenvalues().maxCoeff();
    if (!(bs.eigenvalues().minCoeff() > 1e-13 * bmax))
        throw DegenerateMetric("mass matrix is numerically singular");
    const Eigen::VectorXd sqrt_d = bs.eigenvalues().cwiseSqrt();
    const Eigen::MatrixXd Bh = bs.eigenvectors() * sqrt_d.asDiagonal() * bs.eigenvectors().transpose();
    const Eigen::MatrixXd Bih =
        bs.eigenvectors() * sqrt_d.cwiseInverse().asDiagonal() * bs.eigenvectors().transpose();
    Eigen::MatrixXd C = Bih * A * Bih;
    C = 0.5 * (C + C.transpose()).eval();

    GenEig out;
    if (deflate) {
        Eigen::VectorXd y = Bh * (*deflate);
        y.normalize();
        // Householder reflector sending e_0 to y
        Eigen::VectorXd v = y;
        v[0] += (y[0] >= 0 ? 1.0 : -1.0);
        v.normalize();
        Eigen::MatrixXd H = Eigen::MatrixXd::Identity(C.rows(), C.cols()) - 2.0 * v * v.transpose();
        const Eigen::MatrixXd Ct = H.transpose() * C * H;
        const int n = static_cast<int>(C.rows()) - 1;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ct.bottomRightCorner(n, n));
        out.values = es.eigenvalues();
        Eigen::MatrixXd lifted = Eigen::MatrixXd::Zero(C.rows(), n);
        lifted.bottomRows(n) = es.eigenvectors();
        out.vectors = Bih * (H * lifted);
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
        out.values = es.eigenvalues();
        out.vectors = Bih * es.eigenvectors();
    }
    return out;
}

} // namespace detail

struct EigOptions {
    int count = 1;
    std::optional<SectorLabel> sector; // nullopt: full problem
    double residual_tol = 1e-8;
};

// k smallest nonzero eigenpairs of the weighted Steklov problem on the
// operator's circle set.
inline std::vector<EigResult> sn_eigen(const DtnOperator& dtn, const BoundaryMetric& rho,
                                       const EigOptions& opts = {}) {
    if (!(rho.min_sample() > 0.0)) throw DegenerateMetric("metric density must be positive");
    const Eigen::MatrixXd A = dtn.matrix(opts.sector);
    const Eigen::MatrixXd B = dtn.mass_matrix(rho, opts.sector);

    // constants live in the full space and in the all-even sector only
    bool has_constant = !opts.sector;
    if (opts.sector && *opts.sector == SectorLabel{}) has_constant = true;
    std::optional<Eigen::VectorXd> deflate;
    if (has_constant) {
        Eigen::VectorXd c = dtn.constant_vector();
        if (opts.sector) {
            const Eigen::MatrixXd S = dtn.sector_embedding(*opts.sector);
            deflate = (S.transpose() * c).eval();
        } else {
            deflate = c;
        }
    }
    const detail::GenEig ge = detail::sym_gen_eig(A, B, deflate ? &*deflate : nullptr);

    const double L = rho.length();
    std::vector<EigResult> out;
    const int avail = static_cast<int>(ge.values.size());
    for (int j = 0; j < std::min(opts.count, avail); ++j) {
        EigResult r;
        r.sigma = ge.values[j];
        r.normalized = r.sigma * L;
        r.sector = opts.sector ? opts.sector->str() : "full";
        const Eigen::VectorXd x = ge.vectors.col(j);
        r.residual = (A * x - r.sigma * B * x).norm() / x.norm();
        if (r.residual > opts.residual_tol)
            throw ConvergenceFailure("eigenpair residual " + std::to_string(r.residual));
        r.trace = dtn.trace_from_coefficients(x, opts.sector);
        out.push_back(std::move(r));
    }
    return out;
}

// Convenience wrapper for canonical models.
inline std::vector<EigResult> sn_eigen(const PlanarModel& model, int group, const BoundaryMetric& rho,
                                       const EigOptions& opts = {}, int modes = 24,
                                       BasisSpec basis = {}) {
    DtnOperator dtn(model, group, modes, basis);
    return sn_eigen(dtn, rho, opts);
}

// First eigenvalue table as the Neumann hole at group i shrinks through the
// given radii, for the problems (SN_j), j != i, in the spherical metric.
struct HoleSensitivityReport {
    int hole_group = 0;
    std::vector<int> steklov_groups;
    std::vector<double> eps;
    std::vector<std::array<double, 2>> sigma;   // per eps, per steklov group
    std::array<double, 2> limit_sigma{};        // hole removed entirely
    std::array<double, 2> fitted_exponent{};    // log-log slope of the deficit
    std::array<double, 2> min_deficit{};
};

inline HoleSensitivityReport neumann_hole_sensitivity(const ModuliPoint& p, int hole_group,
                                                      const std::vector<double>& eps_list,
                                                      int modes = 24, BasisSpec basis = {}) {
    HoleSensitivityReport rep;
    rep.hole_group = hole_group;
    for (int g = 1; g <= 3; ++g)
        if (g != hole_group) rep.steklov_groups.push_back(g);

    std::vector<int> keep = rep.steklov_groups;
    const PlanarModel limit_model = build_submodel(p, keep);
    for (std::size_t j = 0; j < rep.steklov_groups.size(); ++j) {
        const int g = rep.steklov_groups[j];
        const auto eig = sn_eigen(limit_model, g,
                                  BoundaryMetric::sphere(limit_model, limit_model.group_indices(g)),
                                  {}, modes, basis);
        rep.limit_sigma[j] = eig.front().sigma;
    }

    rep.eps = eps_list;
    for (double e : eps_list) {
        ModuliPoint q = p;
        q.r(hole_group) = e;
        const PlanarModel m = build_planar_model(q);
        std::array<double, 2> row{};
        for (std::size_t j = 0; j < rep.steklov_groups.size(); ++j) {
            const int g = rep.steklov_groups[j];
            row[j] = sn_eigen(m, g, BoundaryMetric::sphere(m, m.group_indices(g)), {}, modes, basis)
                         .front()
                         .sigma;
        }
        rep.sigma.push_back(row);
    }

    for (std::size_t j = 0; j < rep.steklov_groups.size(); ++j) {
        std::vector<double> xs, ys;
        double mindef = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < rep.eps.size(); ++i) {
            const double deficit = rep.limit_sigma[j] - rep.sigma[i][j];
            mindef = std::min(mindef, deficit);
            if (deficit > 0) {
                xs.push_back(rep.eps[i]);
                ys.push_back(deficit);
            }
        }
        rep.min_deficit[j] = mindef;
        if (xs.size() >= 2) {
            const int n = static_cast<int>(xs.size());
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (int i = 0; i < n; ++i) {
                const double lx = std::log(xs[i]), ly = std::log(ys[i]);
                sx += lx;
                sy += ly;
                sxx += lx * lx;
                sxy += lx * ly;
            }
            rep.fitted_exponent[j] = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        }
    }
    return rep;
}

// sigma_1 of (SN_1) in the spherical metric as r_1 = eps shrinks; the scaled
// product eps * sigma_1 * |log eps| stays bounded.
struct LogDecayReport {
    std::vector<double> eps;
    std::vector<double> sigma1;
    std::vector<double> product;    // eps * sigma1 * |log eps|
    std::vector<double> normalized; // sigma1 * L(Gamma_1)
    double sup_product = 0.0;
};

inline LogDecayReport log_decay_check(const ModuliPoint& base, const std::vector<double>& eps_list,
                                      int modes = 16, BasisSpec basis = {}) {
    LogDecayReport rep;
    for (double e : eps_list) {
        ModuliPoint q = base;
        q.r1 = e;
        const PlanarModel m = build_planar_model(q);
        const auto metric = BoundaryMetric::sphere(m, m.group_indices(1));
        const double s1 = sn_eigen(m, 1, metric, {}, modes, basis).front().sigma;
        rep.eps.push_back(e);
        rep.sigma1.push_back(s1);
        rep.product.push_back(e * s1 * std::abs(std::log(e)));
        rep.normalized.push_back(s1 * metric.length());
        rep.sup_product = std::max(rep.sup_product, rep.product.back());
    }
    return rep;
}

} // namespace fbms
