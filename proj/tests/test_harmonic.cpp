#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fbms/harmonic.hpp"
#include "oracles.hpp"

using namespace fbms;
using Catch::Approx;

namespace {

BoundaryCondition annulus_cos_bc() {
    BoundaryCondition bc;
    bc.type = {ConditionType::dirichlet, ConditionType::neumann};
    bc.data = {[](double phi) { return std::cos(phi); }, nullptr};
    return bc;
}

} // namespace

TEST_CASE("annulus mixed solve matches separation of variables", "[harmonic]") {
    const double eps = 0.3;
    const PlanarModel ann = build_annulus(eps);
    const SeriesSolution sol = solve_mixed(ann, annulus_cos_bc(), {});

    CHECK(sol.max_residual() < 1e-9);
    for (double r : {0.35, 0.5, 0.75, 0.99}) {
        for (double t : {0.0, 0.7, 2.1, 4.4}) {
            const Complex z{r * std::cos(t), r * std::sin(t)};
            const double expected = oracles::annulus_mixed_profile(eps, 1, r) * std::cos(t);
            CHECK(sol.value(z) == Approx(expected).margin(1e-10));
        }
    }

    SECTION("gradient matches the differentiated profile on the real axis") {
        for (double r : {0.4, 0.6, 0.9}) {
            const Complex g = sol.gradient({r, 0.0});
            // u = f(r) cos t: du/dx at t=0 is f'(r), du/dy is 0 by symmetry... u_y = f(r)/r * d(cos)/dt
            const double fr = oracles::annulus_mixed_profile_deriv(eps, 1, r);
            CHECK(g.real() == Approx(fr).margin(1e-9));
            CHECK(std::abs(g.imag()) < 1e-9);
        }
    }

    SECTION("imposed Neumann trace vanishes") {
        const BoundaryTrace t = normal_derivative(sol, 1, MetricTag::plane);
        CHECK(t.series[0].max_abs_coeff() < 1e-8);
    }

    SECTION("evaluation on the Dirichlet circle reproduces the datum") {
        for (double t : {0.3, 1.1, 3.0}) {
            const Complex z{std::cos(t), std::sin(t)};
            CHECK(sol.value(z) == Approx(std::cos(t)).margin(1e-9));
        }
    }
}

TEST_CASE("constant Dirichlet data gives the constant solution", "[harmonic]") {
    const PlanarModel m = build_planar_model({0.4, 0.35, 0.3});
    BoundaryCondition bc;
    bc.type.assign(6, ConditionType::dirichlet);
    bc.data.assign(6, constant_fn(1.0));
    const SeriesSolution sol = solve_mixed(m, bc, {});
    for (const Complex z : {Complex{0.5, 0.5}, Complex{-0.9, 1.2}, Complex{0.0, 2.2}}) {
        CHECK(sol.value(z) == Approx(1.0).margin(1e-11));
        CHECK(std::abs(sol.gradient(z)) < 1e-10);
    }
    CHECK(std::abs(sol.dirichlet_energy()) < 1e-9);
}

TEST_CASE("radial log solution on the annulus", "[harmonic]") {
    const double eps = 0.25;
    const PlanarModel ann = build_annulus(eps);
    BoundaryCondition bc;
    bc.type = {ConditionType::dirichlet, ConditionType::dirichlet};
    bc.data = {constant_fn(0.0), constant_fn(std::log(eps))};
    const SeriesSolution sol = solve_mixed(ann, bc, {});

    // u = log r; outward (into the hole) derivative on |z| = eps is -1/eps
    const BoundaryTrace nu = normal_derivative(sol, 1, MetricTag::plane);
    CHECK(nu.series[0].a0 == Approx(-1.0 / eps).epsilon(1e-9));
    CHECK(sol.value({0.5, 0.0}) == Approx(std::log(0.5)).margin(1e-10));
}

TEST_CASE("plus-minus-one annulus energy", "[harmonic]") {
    const double eps = 0.2;
    const PlanarModel ann = build_annulus(eps);
    BoundaryCondition bc;
    bc.type = {ConditionType::dirichlet, ConditionType::dirichlet};
    bc.data = {constant_fn(1.0), constant_fn(-1.0)};
    const SeriesSolution sol = solve_mixed(ann, bc, {});

    const double expected = oracles::annulus_pm1_energy(eps);
    CHECK(sol.dirichlet_energy() == Approx(expected).epsilon(1e-9));

    SECTION("boundary formula agrees with dense area quadrature") {
        const double area = oracles::annulus_energy_quadrature(
            [&](std::complex<double> z) { return sol.gradient(z); }, eps);
        CHECK(sol.dirichlet_energy() == Approx(area).epsilon(1e-6));
    }
}

TEST_CASE("mixed data area quadrature cross-check", "[harmonic]") {
    const double eps = 0.35;
    const PlanarModel ann = build_annulus(eps);
    BoundaryCondition bc;
    bc.type = {ConditionType::dirichlet, ConditionType::neumann};
    bc.data = {[](double t) { return std::cos(t) + 0.3 * std::sin(2 * t); }, nullptr};
    const SeriesSolution sol = solve_mixed(ann, bc, {});
    const double area = oracles::annulus_energy_quadrature(
        [&](std::complex<double> z) { return sol.gradient(z); }, eps);
    CHECK(sol.dirichlet_energy() == Approx(area).epsilon(1e-6));
}

TEST_CASE("odd data yields odd solution", "[harmonic]") {
    const PlanarModel m = build_planar_model({0.45, 0.4, 0.35});
    // +-1 on the group-1 pair, Neumann elsewhere: odd under rho_1
    BoundaryCondition bc;
    bc.type.assign(6, ConditionType::neumann);
    bc.data.assign(6, nullptr);
    bc.type[m.circle_index(1, 1)] = ConditionType::dirichlet;
    bc.type[m.circle_index(1, 2)] = ConditionType::dirichlet;
    bc.data[m.circle_index(1, 1)] = constant_fn(1.0);
    bc.data[m.circle_index(1, 2)] = constant_fn(-1.0);
    const SeriesSolution sol = solve_mixed(m, bc, {});

    const auto rho1 = m.reflection(1);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(-1.8, 1.8);
    int tested = 0;
    while (tested < 40) {
        const Complex z{uni(rng), uni(rng)};
        if (m.boundary_clearance(z) < 5e-2) continue;
        ++tested;
        CHECK(sol.value(z) + sol.value(rho1.apply(z)) == Approx(0.0).margin(1e-10));
    }

    SECTION("even reflections leave the solution invariant") {
        const auto rho2 = m.reflection(2);
        const auto rho3 = m.reflection(3);
        for (const Complex z : {Complex{0.6, 0.5}, Complex{2.2, 0.6}, Complex{0.1, 1.9}}) {
            CHECK(sol.value(z) - sol.value(rho2.apply(z)) == Approx(0.0).margin(1e-10));
            CHECK(sol.value(z) - sol.value(rho3.apply(z)) == Approx(0.0).margin(1e-10));
        }
    }
}

TEST_CASE("solve equivariance under reflected data", "[harmonic]") {
    const PlanarModel m = build_planar_model({0.42, 0.37, 0.33});
    // generic smooth data on one group-1 circle
    BoundaryCondition bc;
    bc.type.assign(6, ConditionType::neumann);
    bc.data.assign(6, nullptr);
    const int k11 = m.circle_index(1, 1);
    bc.type[k11] = ConditionType::dirichlet;
    bc.data[k11] = [](double t) { return 1.0 + 0.5 * std::cos(t) + 0.2 * std::sin(3 * t); };
    const SeriesSolution sol = solve_mixed(m, bc, {});

    // reflect the data through rho_1 (moves it to the partner circle)
    BoundaryCondition rbc;
    rbc.type.assign(6, ConditionType::neumann);
    rbc.data.assign(6, nullptr);
    const int k12 = m.circle_index(1, 2);
    rbc.type[k12] = ConditionType::dirichlet;
    const auto amap = azimuth_map(1, 1);
    rbc.data[k12] = [amap](double t) { return 1.0 + 0.5 * std::cos(amap(t)) + 0.2 * std::sin(3 * amap(t)); };
    const SeriesSolution rsol = solve_mixed(m, rbc, {});

    const auto rho1 = m.reflection(1);
    for (const Complex z : {Complex{0.7, 0.6}, Complex{-0.5, 1.0}, Complex{0.1, 1.9}}) {
        CHECK(rsol.value(rho1.apply(z)) == Approx(sol.value(z)).margin(1e-10));
    }
}

TEST_CASE("tangential derivative identities", "[harmonic]") {
    const double eps = 0.3;
    const PlanarModel ann = build_annulus(eps);
    const SeriesSolution sol = solve_mixed(ann, annulus_cos_bc(), {});

    SECTION("cos trace on the unit circle differentiates to -sin") {
        const BoundaryTrace du = tangential_derivative(sol, 0, MetricTag::plane);
        CHECK(du.series[0].b[0] == Approx(-1.0).margin(1e-9));
        CHECK(std::abs(du.series[0].a0) < 1e-10);
    }

    SECTION("oint u u' ds vanishes") {
        for (int k : {0, 1}) {
            const auto& u = sol.value_samples(k);
            const BoundaryTrace du = tangential_derivative(sol, k, MetricTag::plane);
            double acc = 0.0;
            const auto& c = ann.circles[k];
            for (int q = 0; q < SeriesSolution::trace_samples; ++q) {
                const double phi = two_pi * (q + 0.5) / SeriesSolution::trace_samples;
                acc += u[q] * du.series[0].eval(phi) * c.speed(phi);
            }
            acc *= two_pi / SeriesSolution::trace_samples;
            CHECK(std::abs(acc) < 1e-10);
        }
    }
}

TEST_CASE("sphere and plane traces differ by the conformal weight", "[harmonic]") {
    const PlanarModel m = build_planar_model({0.4, 0.35, 0.5});
    BoundaryCondition bc;
    bc.type.assign(6, ConditionType::neumann);
    bc.data.assign(6, nullptr);
    const int k = m.circle_index(2, 1);
    bc.type[k] = ConditionType::dirichlet;
    bc.data[k] = [](double t) { return std::cos(t); };
    const SeriesSolution sol = solve_mixed(m, bc, {});

    const int j = m.circle_index(3, 2);
    const BoundaryTrace plane = normal_derivative(sol, j, MetricTag::plane);
    const BoundaryTrace sphere = normal_derivative(sol, j, MetricTag::sphere);
    for (double phi : {0.2, 1.3, 2.8, 4.6}) {
        const Complex z = m.circles[j].point(phi);
        const double factor = (1.0 + std::norm(z)) / 2.0;
        CHECK(sphere.series[0].eval(phi) == Approx(plane.series[0].eval(phi) * factor).margin(1e-12));
    }
}

TEST_CASE("residual decays geometrically in the basis order", "[harmonic]") {
    const PlanarModel m = build_planar_model({0.4, 0.35, 0.3});
    BoundaryCondition bc;
    bc.type.assign(6, ConditionType::neumann);
    bc.data.assign(6, nullptr);
    const int k = m.circle_index(1, 1);
    bc.type[k] = ConditionType::dirichlet;
    bc.data[k] = [](double t) { return 1.0 / (1.1 - std::cos(t)); }; // smooth but slowly resolving
    std::vector<double> resid;
    for (int N : {8, 16, 24, 32, 40}) {
        BasisSpec basis;
        basis.order = N;
        basis.enforce_tol = false;
        resid.push_back(solve_mixed(m, bc, basis).max_residual());
    }
    for (std::size_t i = 1; i < resid.size(); ++i) CHECK(resid[i] < resid[i - 1]);
    const double per_step = std::pow(resid.back() / resid.front(), 1.0 / 32.0);
    CHECK(per_step < 0.9);
}

TEST_CASE("energy is invariant under plane rescaling", "[harmonic]") {
    const double eps = 0.3, c = 2.7;
    BoundaryCondition bc;
    bc.type = {ConditionType::dirichlet, ConditionType::neumann};
    bc.data = {[](double t) { return std::cos(t) + 0.4 * std::sin(2 * t); }, nullptr};
    const SeriesSolution s1 = solve_mixed(build_annulus(eps), bc, {});
    const SeriesSolution s2 = solve_mixed(build_annulus(c * eps, c), bc, {});
    CHECK(s1.dirichlet_energy() == Approx(s2.dirichlet_energy()).epsilon(1e-9));
}

TEST_CASE("solver error paths", "[harmonic]") {
    const PlanarModel ann = build_annulus(0.3);

    SECTION("pure Neumann with incompatible flux") {
        BoundaryCondition bc;
        bc.type = {ConditionType::neumann, ConditionType::neumann};
        bc.data = {constant_fn(1.0), nullptr};
        CHECK_THROWS_AS(solve_mixed(ann, bc, {}), IllConditioned);
    }

    SECTION("pure Neumann with compatible flux pins the constant") {
        BoundaryCondition bc;
        bc.type = {ConditionType::neumann, ConditionType::neumann};
        bc.data = {[](double t) { return std::cos(t); }, nullptr};
        const SeriesSolution sol = solve_mixed(ann, bc, {});
        CHECK(sol.constant_term() == 0.0);
        CHECK(sol.max_residual() < 1e-9);
    }

    SECTION("unresolvable data trips the residual gate") {
        BoundaryCondition bc;
        bc.type = {ConditionType::dirichlet, ConditionType::neumann};
        bc.data = {[](double t) { return t < pi ? 1.0 : -1.0; }, nullptr}; // discontinuous
        BasisSpec basis;
        basis.order = 12;
        CHECK_THROWS_AS(solve_mixed(ann, bc, basis), ResidualAboveTolerance);
    }

    SECTION("points outside the closed domain are rejected") {
        const SeriesSolution sol = solve_mixed(ann, annulus_cos_bc(), {});
        CHECK_THROWS_AS(sol.value({0.1, 0.0}), PointOutsideDomain);
        CHECK_THROWS_AS(sol.gradient({5.0, 0.0}), PointOutsideDomain);
    }
}
