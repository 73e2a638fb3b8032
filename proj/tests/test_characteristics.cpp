#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "twistlab/characteristics.hpp"

using namespace twistlab;

namespace {
const double kEps1 = kTwoPi * 0.1;

WeakKamSolution& flat_solution() {
    static WeakKamSolution sol = solve_weak_kam(standard_map_family(kEps1), 0.0, 128, 64);
    return sol;
}
} // namespace

TEST_CASE("velocity selection closed forms") {
    SystemSpec s0 = standard_map_family(0.0);
    WeakKamSolution sol = solve_weak_kam(s0, 0.5, 128, 64);
    for (double x : {0.0, 0.3, 0.77})
        CHECK(gc_velocity(sol, x, 0.0) == Catch::Approx(0.5).margin(1e-8));

    // hand-built kink: quadratic H gives the midpoint rule plus c
    WeakKamSolution k = sol;
    k.c = 0.1;
    k.kink_threshold = 1e-3;
    for (int kk = 0; kk < k.u.nt; ++kk) {
        k.p_left.ref(kk, 0) = 0.2;
        k.p_right.ref(kk, 0) = -0.2;
    }
    CHECK(gc_velocity(k, 0.0, 0.0) == Catch::Approx(0.1).margin(1e-12));
    k.c = 0.0;
    CHECK(gc_velocity(k, 0.0, 0.0) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("integrable characteristics are straight lines") {
    SystemSpec s0 = standard_map_family(0.0);
    WeakKamSolution sol = solve_weak_kam(s0, 0.5, 128, 64);
    Characteristic chi = integrate_gc(sol, 0.2, 0.0, 40.0);
    for (std::size_t i = 0; i < chi.x_lift.size(); ++i)
        CHECK(chi.x_lift[i] == Catch::Approx(0.2 + 0.5 * double(i) * chi.dtau).margin(1e-8));
    CHECK(rotation_number(chi, 40) == Catch::Approx(0.5).margin(1e-6));
    CHECK(classify_symbol(chi, 1, 2) == RotationSymbol::periodic);
    CHECK_THROWS_AS(rotation_number(chi, 50), Error);
}

TEST_CASE("singular characteristic on the flat has rotation number zero") {
    WeakKamSolution& sol = flat_solution();
    int i_kink = -1;
    for (int i = 0; i < sol.u.nx; ++i)
        if (sol.singular_mask[i]) { i_kink = i; break; }
    REQUIRE(i_kink >= 0);
    double xk = double(i_kink) / sol.u.nx;

    Characteristic chi = integrate_gc(sol, xk, 0.0, 60.0);
    double rho = rotation_number(chi, 50);
    CHECK(std::abs(rho) < 1.0 / 50);
    CHECK(classify_symbol(chi, 0, 1) == RotationSymbol::periodic);

    // forward completeness: a long run stays finite and bounded in speed
    Characteristic lng = integrate_gc(sol, 0.37, 0.0, 300.0);
    for (std::size_t i = 1; i < lng.x_lift.size(); ++i) {
        double d = std::abs(lng.x_lift[i] - lng.x_lift[i - 1]);
        CHECK(d <= sol.sys.v_max * std::abs(lng.dtau) + 1e-12);
    }
}

TEST_CASE("step-halving convergence of the integrator") {
    WeakKamSolution& sol = flat_solution();
    double dtau = sol.u.dt() / 4.0;
    Characteristic a = integrate_gc(sol, 0.37, 0.0, 20.0, dtau);
    Characteristic b = integrate_gc(sol, 0.37, 0.0, 20.0, dtau / 2.0);
    CHECK(std::abs(a.x_lift.back() - b.x_lift.back()) < 0.05);
}

TEST_CASE("desingularization diagnostics shrink under refinement") {
    SystemSpec s = standard_map_family(kEps1);
    WeakKamSolution lo = solve_weak_kam(s, 0.05, 96, 48);
    WeakKamSolution hi = solve_weak_kam(s, 0.05, 192, 96);
    Characteristic ca = integrate_gc(lo, 0.4, 0.0, 40.0);
    Characteristic cb = integrate_gc(hi, 0.4, 0.0, 40.0);
    double fa = double(ca.desingularized) / double(ca.x_lift.size());
    double fb = double(cb.desingularized) / double(cb.x_lift.size());
    CHECK(fb <= fa + 0.02);
}

TEST_CASE("backward integration: unique from regular points, refused at kinks") {
    WeakKamSolution& sol = flat_solution();
    int i_kink = -1, i_reg = -1;
    for (int i = 0; i < sol.u.nx; ++i) {
        if (sol.singular_mask[i] && i_kink < 0) i_kink = i;
        if (!sol.singular_mask[i] && !sol.singular_at(0, i - 1) &&
            !sol.singular_at(0, i + 1) && i_reg < 0)
            i_reg = i;
    }
    REQUIRE(i_kink >= 0);
    REQUIRE(i_reg >= 0);
    CHECK_THROWS_AS(
        integrate_gc_backward(sol, double(i_kink) / sol.u.nx, 0.0, 5.0), Error);
    Characteristic back = integrate_gc_backward(sol, double(i_reg) / sol.u.nx, 0.0, 2.0);
    CHECK(back.x_lift.size() >= 2);
}

TEST_CASE("separation growth obeys the exponential bound") {
    SystemSpec s0 = standard_map_family(0.0);
    WeakKamSolution z = solve_weak_kam(s0, 0.5, 128, 64);
    auto r0 = uniqueness_probe(z, 0.3, 0.0, 1e-4, 20.0);
    CHECK(r0.max_separation == Catch::Approx(1e-4).margin(1e-10));
    CHECK(r0.pass);

    WeakKamSolution& sol = flat_solution();
    auto r = uniqueness_probe(sol, 0.6, 0.0, 1e-4, 10.0);
    CHECK(r.pass);

    // determinism: the same start twice is bitwise identical
    Characteristic u1 = integrate_gc(sol, 0.6, 0.0, 10.0);
    Characteristic u2 = integrate_gc(sol, 0.6, 0.0, 10.0);
    for (std::size_t i = 0; i < u1.x_lift.size(); ++i)
        CHECK(u1.x_lift[i] == u2.x_lift[i]);
}

TEST_CASE("rotation number tracks the slope of alpha across the 1/1 resonance") {
    SystemSpec s = standard_map_family(kEps1);
    WeakKamSolution a = solve_weak_kam(s, 0.8, 128, 64);
    WeakKamSolution b = solve_weak_kam(s, 1.2, 128, 64);
    // both c sit in the rho = 1 flat: alpha differs by exactly delta c
    CHECK(b.alpha - a.alpha == Catch::Approx(0.4).margin(5e-3));
    for (auto* sol : {&a, &b}) {
        Characteristic chi = integrate_gc(*sol, 0.1, 0.0, 80.0);
        CHECK(rotation_number(chi, 60) == Catch::Approx(1.0).margin(2e-2));
    }
}
