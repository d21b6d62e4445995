#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fbms/steklov.hpp"
#include "oracles.hpp"

using namespace fbms;
using Catch::Approx;

namespace {

BasisSpec quick_basis(int N = 24) {
    BasisSpec b;
    b.order = N;
    return b;
}

TrigSeries random_series(std::mt19937_64& rng, int order, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    TrigSeries f(order);
    f.a0 = g(rng);
    for (int n = 0; n < order; ++n) {
        f.a[n] = g(rng) / (1.0 + n * n);
        f.b[n] = g(rng) / (1.0 + n * n);
    }
    return f;
}

} // namespace

TEST_CASE("unit disk DtN is diagonal with integer symbol", "[steklov]") {
    const PlanarModel disk = build_generic_model({{Complex{0, 0}, 1.0}});
    DtnOperator dtn(disk, std::vector<int>{0}, 6, quick_basis(16));
    const Eigen::MatrixXd& A = dtn.full_matrix();
    REQUIRE(A.rows() == 13);
    Eigen::VectorXd expected(13);
    expected << 0, 1, 1, 2, 2, 3, 3, 4, 4, 5, 5, 6, 6;
    for (int i = 0; i < 13; ++i) {
        for (int j = 0; j < 13; ++j) {
            const double want = i == j ? expected[i] : 0.0;
            CHECK(A(i, j) == Approx(want).margin(1e-10));
        }
    }
    CHECK(dtn.symmetry_defect() < 1e-10);
}

TEST_CASE("annulus Steklov-Neumann eigenvalues", "[steklov]") {
    const double eps = 0.3;
    const PlanarModel ann = build_annulus(eps);
    DtnOperator dtn(ann, std::vector<int>{0}, 8, quick_basis(24));
    const BoundaryMetric rho = BoundaryMetric::plane(ann, {0});
    EigOptions opts;
    opts.count = 10;
    const auto eig = sn_eigen(dtn, rho, opts);
    for (int n = 1; n <= 5; ++n) {
        const double want = oracles::annulus_sn_eigenvalue(eps, n);
        CHECK(eig[2 * n - 2].sigma == Approx(want).margin(1e-8));
        CHECK(eig[2 * n - 1].sigma == Approx(want).margin(1e-8));
        CHECK(eig[2 * n - 2].residual < 1e-8);
    }
}

TEST_CASE("geodesic cap normalized Steklov eigenvalue", "[steklov]") {
    for (double r : {0.3, 0.6, 1.0}) {
        const PlanarModel cap = build_cap_model(r);
        DtnOperator dtn(cap, std::vector<int>{0}, 6, quick_basis(16));
        const BoundaryMetric rho = BoundaryMetric::sphere(cap, {0});
        const auto eig = sn_eigen(dtn, rho, {});
        CHECK(eig.front().sigma == Approx(1.0 / std::sin(r)).epsilon(1e-9));
        CHECK(eig.front().normalized == Approx(two_pi).margin(1e-6));
    }
}

TEST_CASE("sector projection algebra", "[steklov]") {
    const PlanarModel m = build_planar_model({0.4, 0.35, 0.3});
    std::mt19937_64 rng(23);

    BoundaryTrace t;
    t.circles = {0, 1, 2, 3, 4, 5};
    for (int k = 0; k < 6; ++k) t.series.push_back(random_series(rng, 10));

    SECTION("projections are idempotent and sum to the identity") {
        std::vector<TrigSeries> acc(6);
        for (const auto& label : SectorLabel::all()) {
            const BoundaryTrace pt = sector_project(m, t, label);
            const BoundaryTrace ppt = sector_project(m, pt, label);
            for (int k = 0; k < 6; ++k) {
                TrigSeries diff = ppt.series[k];
                TrigSeries neg = pt.series[k];
                neg *= -1.0;
                diff += neg;
                CHECK(diff.max_abs_coeff() < 1e-12);
                acc[k] += pt.series[k];
            }
        }
        for (int k = 0; k < 6; ++k) {
            TrigSeries diff = acc[k];
            TrigSeries neg = t.series[k];
            neg *= -1.0;
            diff += neg;
            CHECK(diff.max_abs_coeff() < 1e-12);
        }
    }

    SECTION("a symmetric trace projects to zero away from its sector") {
        const BoundaryTrace sym = sector_project(m, t, SectorLabel::parse("eee"));
        for (const auto& label : SectorLabel::all()) {
            if (label == SectorLabel::parse("eee")) continue;
            const BoundaryTrace pt = sector_project(m, sym, label);
            for (int k = 0; k < 6; ++k) CHECK(pt.series[k].max_abs_coeff() < 1e-12);
        }
    }
}

TEST_CASE("sector restriction of the DtN operator", "[steklov]") {
    const PlanarModel m = build_planar_model({0.45, 0.4, 0.35});
    const int M = 6;
    DtnOperator dtn(m, 1, M, quick_basis(24));

    SECTION("sector dimensions count the symmetric modes") {
        CHECK(dtn.sector_embedding(SectorLabel::parse("eeo")).cols() == 3); // sin 1,3,5
        CHECK(dtn.sector_embedding(SectorLabel::parse("eoe")).cols() == 3); // cos 1,3,5
        CHECK(dtn.sector_embedding(SectorLabel::parse("oee")).cols() == 4); // cos 0,2,4,6
        int total = 0;
        for (const auto& label : SectorLabel::all())
            total += static_cast<int>(dtn.sector_embedding(label).cols());
        CHECK(total == dtn.dim());
    }

    SECTION("constant trace extends to a constant: zero column") {
        const Eigen::VectorXd c = dtn.constant_vector();
        CHECK((dtn.full_matrix() * c).cwiseAbs().maxCoeff() < 1e-8);
    }

    SECTION("full first eigenvalue is the smallest sector eigenvalue") {
        const BoundaryMetric rho = BoundaryMetric::sphere(m, m.group_indices(1));
        const auto full = sn_eigen(dtn, rho, {});
        double best = std::numeric_limits<double>::infinity();
        for (const auto& label : admissible_sectors()) {
            EigOptions o;
            o.sector = label;
            best = std::min(best, sn_eigen(dtn, rho, o).front().sigma);
        }
        CHECK(full.front().sigma == Approx(best).epsilon(1e-9));
    }

    SECTION("excluded sectors sit strictly above the admissible ones") {
        const BoundaryMetric rho = BoundaryMetric::sphere(m, m.group_indices(1));
        double admissible_min = std::numeric_limits<double>::infinity();
        for (const auto& label : admissible_sectors()) {
            EigOptions o;
            o.sector = label;
            admissible_min = std::min(admissible_min, sn_eigen(dtn, rho, o).front().sigma);
        }
        for (const auto& label : excluded_sectors()) {
            EigOptions o;
            o.sector = label;
            CHECK(sn_eigen(dtn, rho, o).front().sigma > admissible_min + 1e-6);
        }
    }

    SECTION("admissible first eigenvalues are simple within their sector") {
        const BoundaryMetric rho = BoundaryMetric::sphere(m, m.group_indices(1));
        for (const auto& label : admissible_sectors()) {
            EigOptions o;
            o.sector = label;
            o.count = 2;
            const auto eig = sn_eigen(dtn, rho, o);
            REQUIRE(eig.size() == 2);
            CHECK(eig[1].sigma - eig[0].sigma > 1e-6);
        }
    }
}

TEST_CASE("metric scaling leaves the normalized eigenvalue fixed", "[steklov]") {
    const PlanarModel m = build_planar_model({0.4, 0.5, 0.3});
    DtnOperator dtn(m, 2, 8, quick_basis(24));
    const BoundaryMetric rho = BoundaryMetric::sphere(m, m.group_indices(2));
    const auto e1 = sn_eigen(dtn, rho, {});
    const auto e2 = sn_eigen(dtn, rho.scaled(3.7), {});
    CHECK(e2.front().sigma == Approx(e1.front().sigma / 3.7).epsilon(1e-12));
    CHECK(e2.front().normalized == Approx(e1.front().normalized).epsilon(1e-9));
}

TEST_CASE("trace mode refinement converges", "[steklov]") {
    const PlanarModel m = build_planar_model({0.42, 0.37, 0.33});
    const BoundaryMetric rho = BoundaryMetric::sphere(m, m.group_indices(1));
    DtnOperator d16(m, 1, 16, quick_basis(40));
    DtnOperator d24(m, 1, 24, quick_basis(40));
    const double s16 = sn_eigen(d16, rho, {}).front().sigma;
    const double s24 = sn_eigen(d24, rho, {}).front().sigma;
    CHECK(std::abs(s24 - s16) < 1e-8);
}

TEST_CASE("Neumann hole sensitivity", "[steklov]") {
    const ModuliPoint p{0.4, 0.45, 0.5};
    const auto rep = neumann_hole_sensitivity(p, 1, {0.02, 0.04, 0.08, 0.16}, 12, quick_basis(24));
    for (int j = 0; j < 2; ++j) {
        CHECK(rep.min_deficit[j] > -1e-9);         // domain monotonicity
        CHECK(rep.fitted_exponent[j] > 2.0 - 0.2); // quadratic hole rate
    }

    // vanishing-hole limit approaches the four-circle model
    const auto tiny = neumann_hole_sensitivity(p, 1, {0.002}, 12, quick_basis(24));
    for (int j = 0; j < 2; ++j)
        CHECK(std::abs(tiny.sigma[0][j] - tiny.limit_sigma[j]) < 1e-4);
}

TEST_CASE("log decay of the collapsing Steklov pair", "[steklov]") {
    const ModuliPoint base{0.1, 0.55, 0.55};
    const auto rep = log_decay_check(base, {1e-3, 4e-3, 1.6e-2, 6.4e-2}, 10, quick_basis(24));
    REQUIRE(rep.product.size() == 4);
    for (double v : rep.product) {
        CHECK(v > 0.0);
        CHECK(v < 10.0);
    }
    // normalized first eigenvalue shrinks monotonically with the hole
    for (std::size_t i = 1; i < rep.normalized.size(); ++i)
        CHECK(rep.normalized[i - 1] < rep.normalized[i]);
}

TEST_CASE("degenerate metric is rejected", "[steklov]") {
    const PlanarModel m = build_planar_model({0.4, 0.4, 0.4});
    DtnOperator dtn(m, 1, 6, quick_basis(20));
    BoundaryMetric bad = BoundaryMetric::sphere(m, m.group_indices(1));
    bad.density[0].a = {1.0};
    bad.density[0].b = {0.0};
    bad.density[0].a0 = 0.0; // changes sign
    CHECK_THROWS_AS(sn_eigen(dtn, bad, {}), DegenerateMetric);
}
