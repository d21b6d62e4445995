#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "fbms/errors.hpp"
#include "fbms/fourier.hpp"
#include "fbms/moduli.hpp"

namespace fbms {

struct BasisSpec {
    int order = 32;       // Laurent/Taylor truncation degree per circle
    int oversampling = 3; // collocation points per basis function
    double tol = 1e-9;    // max admissible boundary defect
    bool enforce_tol = true;

    void check() const {
        if (order < 1) throw IllConditioned("basis order must be >= 1");
        if (oversampling < 2) throw IllConditioned("oversampling must be >= 2");
    }
};

enum class ConditionType { dirichlet, neumann };

// Scalar data attached to one circle, as a function of the azimuth parameter.
using BoundaryFn = std::function<double(double)>;

inline BoundaryFn constant_fn(double v) {
    return [v](double) { return v; };
}
inline BoundaryFn zero_fn() { return nullptr; } // treated as identically zero

struct BoundaryCondition {
    std::vector<ConditionType> type; // per model circle
    std::vector<BoundaryFn> data;    // per model circle (null = 0)

    static BoundaryCondition neumann_all(std::size_t n_circles) {
        BoundaryCondition bc;
        bc.type.assign(n_circles, ConditionType::neumann);
        bc.data.assign(n_circles, nullptr);
        return bc;
    }
};

enum class MetricTag { plane, sphere };

// A function on a set of boundary circles, stored per circle as a Fourier
// series in the azimuth parameter.
struct BoundaryTrace {
    std::vector<int> circles;
    std::vector<TrigSeries> series;
    MetricTag metric = MetricTag::plane;

    const TrigSeries* find(int circle) const {
        for (std::size_t i = 0; i < circles.size(); ++i)
            if (circles[i] == circle) return &series[i];
        return nullptr;
    }
};

struct CircleCoefficients {
    double log_coeff = 0.0;          // multiplies log(|z - c|/s); inner circles only
    std::vector<Complex> laurent;    // laurent[n-1] pairs with (s/(z-c))^n, outer: ((z-c)/s)^n
};

// Harmonic field represented by one global constant plus a log + power series
// block per boundary circle; exactly harmonic in the domain interior.
class SeriesSolution {
public:
    SeriesSolution(PlanarModel model, BasisSpec basis, double c0,
                   std::vector<CircleCoefficients> coeffs, double dirichlet_defect,
                   double neumann_defect)
        : model_(std::move(model)), basis_(basis), c0_(c0), coeffs_(std::move(coeffs)),
          dirichlet_defect_(dirichlet_defect), neumann_defect_(neumann_defect) {
        const std::size_t n = model_.circles.size();
        value_samples_.resize(n);
        flux_samples_.resize(n);
        value_series_.resize(n);
    }

    const PlanarModel& model() const { return model_; }
    const BasisSpec& basis() const { return basis_; }
    double constant_term() const { return c0_; }
    const std::vector<CircleCoefficients>& coefficients() const { return coeffs_; }

    double max_residual() const { return std::max(dirichlet_defect_, neumann_defect_); }
    double dirichlet_defect() const { return dirichlet_defect_; }
    double neumann_defect() const { return neumann_defect_; }

    // Number of azimuth samples cached per circle.
    static constexpr int trace_samples = 512;

    // Complex gradient u_x + i*u_y by term-wise differentiation; valid away
    // from the boundary circles.
    Complex raw_gradient(const Complex& z) const {
        Complex fprime{0.0, 0.0};
        for (std::size_t k = 0; k < model_.circles.size(); ++k) {
            const auto& bc = model_.circles[k];
            const auto& ck = coeffs_[k];
            const Complex d = z - bc.circle.center;
            const double s = bc.circle.radius;
            if (!bc.outer) {
                if (ck.log_coeff != 0.0) fprime += ck.log_coeff / d;
                const Complex w = s / d;
                Complex wn = w;
                for (std::size_t n = 1; n <= ck.laurent.size(); ++n) {
                    // d/dz (s/(z-c))^n = -(n/s) (s/(z-c))^{n+1}
                    fprime += ck.laurent[n - 1] * (-(static_cast<double>(n) / s)) * wn * w;
                    wn *= w;
                }
            } else {
                const Complex w = d / s;
                Complex wn{1.0, 0.0}; // w^{n-1}
                for (std::size_t n = 1; n <= ck.laurent.size(); ++n) {
                    fprime += ck.laurent[n - 1] * (static_cast<double>(n) / s) * wn;
                    wn *= w;
                }
            }
        }
        return std::conj(fprime);
    }

    double raw_value(const Complex& z) const {
        double u = c0_;
        for (std::size_t k = 0; k < model_.circles.size(); ++k) {
            const auto& bc = model_.circles[k];
            const auto& ck = coeffs_[k];
            const Complex d = z - bc.circle.center;
            const double s = bc.circle.radius;
            if (!bc.outer) {
                if (ck.log_coeff != 0.0) u += ck.log_coeff * std::log(std::abs(d) / s);
                const Complex w = s / d;
                Complex wn{1.0, 0.0};
                for (std::size_t n = 1; n <= ck.laurent.size(); ++n) {
                    wn *= w;
                    u += (ck.laurent[n - 1] * wn).real();
                }
            } else {
                const Complex w = d / s;
                Complex wn{1.0, 0.0};
                for (std::size_t n = 1; n <= ck.laurent.size(); ++n) {
                    wn *= w;
                    u += (ck.laurent[n - 1] * wn).real();
                }
            }
        }
        return u;
    }

    // Distance to the nearest boundary circle and its index.
    std::pair<double, int> nearest_circle(const Complex& z) const {
        double best = std::numeric_limits<double>::infinity();
        int idx = -1;
        for (std::size_t k = 0; k < model_.circles.size(); ++k) {
            const auto& c = model_.circles[k].circle;
            const double d = std::abs(std::abs(z - c.center) - c.radius);
            if (d < best) {
                best = d;
                idx = static_cast<int>(k);
            }
        }
        return {best, idx};
    }

    // Pointwise evaluation; within 1e-8 of a circle the cached boundary trace
    // is used instead of the raw series.
    double value(const Complex& z) const {
        if (!model_.contains(z, 1e-9)) throw PointOutsideDomain();
        const auto [dist, k] = nearest_circle(z);
        if (dist < 1e-8) return value_series(k).eval(model_.circles[k].azimuth(z));
        return raw_value(z);
    }

    Complex gradient(const Complex& z) const {
        if (!model_.contains(z, 1e-9)) throw PointOutsideDomain();
        const auto [dist, k] = nearest_circle(z);
        if (dist < 1e-8) {
            const auto& bc = model_.circles[k];
            const double phi = bc.azimuth(z);
            const double speed = bc.speed(phi);
            const Complex tangent = bc.dpoint(phi) / speed;
            const Complex normal = bc.unit_normal_out(phi);
            const double du_dphi = value_series(k).derivative().eval(phi);
            const double nu_plane = flux_density_series(k).eval(phi) / speed;
            return (du_dphi / speed) * tangent + nu_plane * normal;
        }
        return raw_gradient(z);
    }

    const std::vector<double>& value_samples(int k) const {
        auto& cache = value_samples_[k];
        if (cache.empty()) {
            cache.resize(trace_samples);
            const auto& bc = model_.circles[k];
            for (int q = 0; q < trace_samples; ++q)
                cache[q] = raw_value(bc.point(two_pi * (q + 0.5) / trace_samples));
        }
        return cache;
    }

    // Conformally invariant flux density q = (grad u . n_out) |dw/dphi|.
    const std::vector<double>& flux_samples(int k) const {
        auto& cache = flux_samples_[k];
        if (cache.empty()) {
            cache.resize(trace_samples);
            const auto& bc = model_.circles[k];
            for (int q = 0; q < trace_samples; ++q) {
                const double phi = two_pi * (q + 0.5) / trace_samples;
                const Complex g = raw_gradient(bc.point(phi));
                const Complex n = bc.unit_normal_out(phi);
                cache[q] = (g.real() * n.real() + g.imag() * n.imag()) * bc.speed(phi);
            }
        }
        return cache;
    }

    const TrigSeries& value_series(int k) const {
        auto& cache = value_series_[k];
        if (!cache) cache = analyze_shifted(value_samples(k), trace_samples / 2 - 1);
        return *cache;
    }

    TrigSeries flux_density_series(int k, int order = trace_samples / 2 - 1) const {
        return analyze_shifted(flux_samples(k), order);
    }

    // Boundary Dirichlet energy  sum_k  \oint u q dphi  (equals the area
    // integral of |grad u|^2; conformally invariant).
    double dirichlet_energy() const {
        double e = 0.0;
        for (std::size_t k = 0; k < model_.circles.size(); ++k) {
            const auto& u = value_samples(static_cast<int>(k));
            const auto& q = flux_samples(static_cast<int>(k));
            double s = 0.0;
            for (int i = 0; i < trace_samples; ++i) s += u[i] * q[i];
            e += s * two_pi / trace_samples;
        }
        return e;
    }

private:
    PlanarModel model_;
    BasisSpec basis_;
    double c0_ = 0.0;
    std::vector<CircleCoefficients> coeffs_;
    double dirichlet_defect_ = 0.0, neumann_defect_ = 0.0;
    mutable std::vector<std::vector<double>> value_samples_, flux_samples_;
    mutable std::vector<std::optional<TrigSeries>> value_series_;
};

// Outward normal derivative of the solution on circle k, as a trace in the
// requested metric. The spherical normal derivative differs from the plane
// one by the reciprocal conformal weight.
inline BoundaryTrace normal_derivative(const SeriesSolution& sol, int k, MetricTag metric) {
    const auto& bc = sol.model().circles[k];
    const auto& q = sol.flux_samples(k);
    std::vector<double> vals(SeriesSolution::trace_samples);
    for (int i = 0; i < SeriesSolution::trace_samples; ++i) {
        const double phi = two_pi * (i + 0.5) / SeriesSolution::trace_samples;
        const double speed = metric == MetricTag::plane ? bc.speed(phi) : bc.sphere_speed();
        vals[i] = q[i] / speed;
    }
    BoundaryTrace t;
    t.circles = {k};
    t.series = {analyze_shifted(vals, SeriesSolution::trace_samples / 2 - 1)};
    t.metric = metric;
    return t;
}

// Arc-length derivative of the solution trace on circle k.
inline BoundaryTrace tangential_derivative(const SeriesSolution& sol, int k, MetricTag metric) {
    const auto& bc = sol.model().circles[k];
    const TrigSeries dphi = sol.value_series(k).derivative();
    std::vector<double> vals(SeriesSolution::trace_samples);
    for (int i = 0; i < SeriesSolution::trace_samples; ++i) {
        const double phi = two_pi * (i + 0.5) / SeriesSolution::trace_samples;
        const double speed = metric == MetricTag::plane ? bc.speed(phi) : bc.sphere_speed();
        vals[i] = dphi.eval(phi) / speed;
    }
    BoundaryTrace t;
    t.circles = {k};
    t.series = {analyze_shifted(vals, SeriesSolution::trace_samples / 2 - 1)};
    t.metric = metric;
    return t;
}

// Mixed Dirichlet/Neumann solver: least-squares collocation against the
// log + Laurent basis, factorized once per (model, condition-type) pair so
// that many right-hand sides share the orthogonal factorization.
class MixedOperator {
public:
    MixedOperator(PlanarModel model, std::vector<ConditionType> types, BasisSpec basis = {})
        : model_(std::move(model)), types_(std::move(types)), basis_(basis) {
        basis_.check();
        if (types_.size() != model_.circles.size())
            throw IllConditioned("one boundary condition per circle required");
        pure_neumann_ = true;
        for (auto t : types_)
            if (t == ConditionType::dirichlet) pure_neumann_ = false;
        build();
    }

    const PlanarModel& model() const { return model_; }
    const std::vector<ConditionType>& types() const { return types_; }
    bool pure_neumann() const { return pure_neumann_; }

    SeriesSolution solve(const std::vector<BoundaryFn>& data) const {
        return std::move(solve_batch({data}).front());
    }

    std::vector<SeriesSolution> solve_batch(const std::vector<std::vector<BoundaryFn>>& data) const {
        const int nrhs = static_cast<int>(data.size());
        Eigen::MatrixXd rhs(static_cast<int>(rows_), nrhs);
        for (int j = 0; j < nrhs; ++j) rhs.col(j) = assemble_rhs(data[j], colloc_phi_, row_offset_);
        Eigen::MatrixXd sol = qr_.solve(rhs);
        std::vector<SeriesSolution> out;
        out.reserve(nrhs);
        for (int j = 0; j < nrhs; ++j) {
            Eigen::VectorXd x = col_scale_.asDiagonal() * sol.col(j);
            out.push_back(make_solution(x, data[j]));
        }
        return out;
    }

    int n_columns() const { return static_cast<int>(cols_); }

private:
    PlanarModel model_;
    std::vector<ConditionType> types_;
    BasisSpec basis_;
    bool pure_neumann_ = false;

    std::size_t rows_ = 0, cols_ = 0;
    std::vector<std::vector<double>> colloc_phi_, check_phi_; // per circle
    std::vector<int> row_offset_, check_offset_;
    std::vector<double> row_weight_; // per circle
    Eigen::VectorXd col_scale_;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
    Eigen::MatrixXd check_matrix_; // defect evaluation at the finer grid

    struct Column {
        int circle = -1; // -1: global constant
        int kind = 0;    // 0: constant, 1: log, 2: Re power, 3: Im power
        int degree = 0;
    };
    std::vector<Column> columns_;

    void build() {
        const int N = basis_.order;
        columns_.clear();
        if (!pure_neumann_) columns_.push_back({-1, 0, 0});
        for (std::size_t k = 0; k < model_.circles.size(); ++k) {
            if (!model_.circles[k].outer) columns_.push_back({static_cast<int>(k), 1, 0});
            for (int n = 1; n <= N; ++n) {
                columns_.push_back({static_cast<int>(k), 2, n});
                columns_.push_back({static_cast<int>(k), 3, n});
            }
        }
        cols_ = columns_.size();

        const int K = basis_.oversampling * (2 * N + 2);
        rows_ = 0;
        colloc_phi_.clear();
        row_offset_.clear();
        row_weight_.clear();
        check_phi_.clear();
        check_offset_.clear();
        int check_rows = 0;
        for (std::size_t k = 0; k < model_.circles.size(); ++k) {
            row_offset_.push_back(static_cast<int>(rows_));
            colloc_phi_.push_back(shifted_grid(K));
            row_weight_.push_back(std::sqrt(two_pi / K));
            rows_ += K;
            check_offset_.push_back(check_rows);
            std::vector<double> cg(2 * K);
            for (int q = 0; q < 2 * K; ++q) cg[q] = two_pi * (q + 0.25) / (2 * K);
            check_phi_.push_back(std::move(cg));
            check_rows += 2 * K;
        }

        Eigen::MatrixXd A(static_cast<int>(rows_), static_cast<int>(cols_));
        fill_matrix(A, colloc_phi_, row_offset_, true);
        check_matrix_.resize(check_rows, static_cast<int>(cols_));
        fill_matrix(check_matrix_, check_phi_, check_offset_, false);

        col_scale_.resize(static_cast<int>(cols_));
        for (int j = 0; j < static_cast<int>(cols_); ++j) {
            const double nrm = A.col(j).norm();
            if (!(nrm > 1e-140)) throw IllConditioned("vanishing basis column");
            col_scale_[j] = 1.0 / nrm;
            A.col(j) *= col_scale_[j];
        }
        // rank deficiency is expected for crowded geometries; truncating the
        // small pivots keeps the coefficients bounded and the residual check
        // guards quality
        qr_.setThreshold(1e-11);
        qr_.compute(A);
    }

    // Value of basis column j at z, or its flux density at circle point.
    void fill_matrix(Eigen::MatrixXd& A, const std::vector<std::vector<double>>& grids,
                     const std::vector<int>& offsets, bool weighted) const {
        for (std::size_t k = 0; k < model_.circles.size(); ++k) {
            const auto& bc = model_.circles[k];
            const auto& grid = grids[k];
            const double w = weighted ? row_weight_[k] : 1.0;
            for (std::size_t q = 0; q < grid.size(); ++q) {
                const double phi = grid[q];
                const Complex z = bc.point(phi);
                const int row = offsets[k] + static_cast<int>(q);
                if (types_[k] == ConditionType::dirichlet) {
                    for (std::size_t j = 0; j < cols_; ++j) A(row, j) = w * column_value(columns_[j], z);
                } else {
                    const Complex n = bc.unit_normal_out(phi);
                    const double speed = bc.speed(phi);
                    for (std::size_t j = 0; j < cols_; ++j) {
                        const Complex g = column_gradient(columns_[j], z);
                        A(row, j) = w * (g.real() * n.real() + g.imag() * n.imag()) * speed;
                    }
                }
            }
        }
    }

    double column_value(const Column& col, const Complex& z) const {
        if (col.circle < 0) return 1.0;
        const auto& bc = model_.circles[col.circle];
        const Complex d = z - bc.circle.center;
        const double s = bc.circle.radius;
        if (col.kind == 1) return std::log(std::abs(d) / s);
        const Complex w = bc.outer ? d / s : s / d;
        Complex wn = w;
        for (int n = 1; n < col.degree; ++n) wn *= w;
        return col.kind == 2 ? wn.real() : wn.imag();
    }

    Complex column_gradient(const Column& col, const Complex& z) const {
        if (col.circle < 0) return {0.0, 0.0};
        const auto& bc = model_.circles[col.circle];
        const Complex d = z - bc.circle.center;
        const double s = bc.circle.radius;
        Complex fp;
        if (col.kind == 1) {
            fp = 1.0 / d;
        } else if (!bc.outer) {
            const Complex w = s / d;
            Complex wn = w;
            for (int n = 1; n <= col.degree; ++n) wn *= w; // w^{degree+1}
            fp = -(static_cast<double>(col.degree) / s) * wn;
        } else {
            const Complex w = d / s;
            Complex wn{1.0, 0.0};
            for (int n = 1; n < col.degree; ++n) wn *= w; // w^{degree-1}
            fp = (static_cast<double>(col.degree) / s) * wn;
        }
        // columns are Re g or Im g; grad(Re g) = conj(g'), grad(Im g) = i conj(g')
        const Complex grad = std::conj(fp);
        return col.kind == 3 ? Complex{0, 1} * grad : grad;
    }

    Eigen::VectorXd assemble_rhs(const std::vector<BoundaryFn>& data,
                                 const std::vector<std::vector<double>>& grids,
                                 const std::vector<int>& offsets, bool weighted = true) const {
        if (data.size() != model_.circles.size())
            throw IllConditioned("one data entry per circle required");
        int total = 0;
        for (const auto& g : grids) total += static_cast<int>(g.size());
        Eigen::VectorXd b(total);
        for (std::size_t k = 0; k < model_.circles.size(); ++k) {
            const double w = weighted ? row_weight_[k] : 1.0;
            const auto& grid = grids[k];
            for (std::size_t q = 0; q < grid.size(); ++q)
                b[offsets[k] + static_cast<int>(q)] = data[k] ? w * data[k](grid[q]) : 0.0;
        }
        return b;
    }

    SeriesSolution make_solution(const Eigen::VectorXd& x, const std::vector<BoundaryFn>& data) const {
        double c0 = 0.0;
        std::vector<CircleCoefficients> coeffs(model_.circles.size());
        for (auto& c : coeffs) c.laurent.assign(basis_.order, Complex{0, 0});
        for (std::size_t j = 0; j < cols_; ++j) {
            const auto& col = columns_[j];
            if (col.circle < 0) c0 = x[static_cast<int>(j)];
            else if (col.kind == 1) coeffs[col.circle].log_coeff = x[static_cast<int>(j)];
            else if (col.kind == 2) coeffs[col.circle].laurent[col.degree - 1] += x[static_cast<int>(j)];
            else coeffs[col.circle].laurent[col.degree - 1] += Complex{0, -1} * x[static_cast<int>(j)];
        }
        // defect on the finer check grid (unscaled columns)
        Eigen::VectorXd pred = check_matrix_ * x;
        Eigen::VectorXd target = assemble_rhs(data, check_phi_, check_offset_, false);
        double dir_defect = 0.0, neu_defect = 0.0;
        for (std::size_t k = 0; k < model_.circles.size(); ++k) {
            const int n = static_cast<int>(check_phi_[k].size());
            for (int q = 0; q < n; ++q) {
                const double d = std::abs(pred[check_offset_[k] + q] - target[check_offset_[k] + q]);
                if (types_[k] == ConditionType::dirichlet) dir_defect = std::max(dir_defect, d);
                else neu_defect = std::max(neu_defect, d);
            }
        }
        const double resid = std::max(dir_defect, neu_defect);
        if (basis_.enforce_tol && resid > basis_.tol) throw ResidualAboveTolerance(resid, basis_.tol);
        return SeriesSolution(model_, basis_, c0, std::move(coeffs), dir_defect, neu_defect);
    }
};

// One-shot mixed solve.
inline SeriesSolution solve_mixed(const PlanarModel& model, const BoundaryCondition& bc,
                                  const BasisSpec& basis = {}) {
    if (bc.type.size() != model.circles.size())
        throw IllConditioned("boundary condition must cover every circle");
    MixedOperator op(model, bc.type, basis);
    if (op.pure_neumann()) {
        // compatibility: total imposed flux must vanish
        double total = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < model.circles.size(); ++k) {
            if (!bc.data[k]) continue;
            const int S = 256;
            for (int q = 0; q < S; ++q) {
                const double v = bc.data[k](two_pi * (q + 0.5) / S);
                total += v * two_pi / S;
                scale += std::abs(v) * two_pi / S;
            }
        }
        if (std::abs(total) > 1e-8 * std::max(1.0, scale))
            throw IllConditioned("pure Neumann data violates zero total flux");
    }
    return op.solve(bc.data);
}

} // namespace fbms
