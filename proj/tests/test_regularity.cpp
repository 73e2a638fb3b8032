#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "twistlab/regularity.hpp"

using namespace twistlab;

namespace {
const double kEps1 = kTwoPi * 0.1;

std::vector<WeakKamSolution> integrable_sweep(const std::vector<double>& cs) {
    SystemSpec s = standard_map_family(0.0);
    std::vector<WeakKamSolution> out;
    for (double c : cs) out.push_back(solve_weak_kam(s, c, 128, 64));
    return out;
}
} // namespace

TEST_CASE("rectified solution: linear closed form and exact base point") {
    SystemSpec s0 = standard_map_family(0.0);
    WeakKamSolution sol = solve_weak_kam(s0, 0.4, 128, 64);
    auto u = rectified_solution(sol);
    REQUIRE(int(u.size()) == 129);
    CHECK(u[0] == 0.0);
    for (int i = 0; i <= 128; ++i)
        CHECK(u[i] == Catch::Approx(0.4 * i / 128.0).margin(1e-6));

    SystemSpec s = standard_map_family(kEps1);
    WeakKamSolution w = solve_weak_kam(s, 0.0, 128, 64);
    auto v = rectified_solution(w);
    CHECK(v[0] == 0.0);
    for (int i = 0; i < 128; ++i)
        CHECK(std::abs(v[i + 1] - v[i]) <= (w.lipschitz_K + 1e-6) / 128);
}

TEST_CASE("sigma table: integrable closed form, inversion, violation detection") {
    auto sweep = integrable_sweep({-0.4, -0.2, 0.0, 0.2, 0.4});
    SigmaTable t = sigma_of_c(sweep);
    for (auto& e : t.entries) CHECK(e.sigma == Catch::Approx(e.c / 2).margin(1e-6));
    for (auto& e : t.entries) CHECK(t.c_of_sigma(e.sigma) == Catch::Approx(e.c).margin(1e-8));

    // a non-constant distortion with nonzero mean must be detected
    auto bad = sweep;
    for (int i = 0; i < bad[3].u.nx; ++i)
        bad[3].u.ref(0, i) += std::cos(kTwoPi * i / bad[3].u.nx) - 1.0;
    CHECK_THROWS_AS(sigma_of_c(bad), Error);
}

TEST_CASE("sigma increases across the resonance; mirror symmetry of the family") {
    SystemSpec s = standard_map_family(kEps1);
    std::vector<WeakKamSolution> sweep;
    for (double c : {-0.1, 0.0, 0.1}) sweep.push_back(pinned_solution(s, c, 96, 48));
    SigmaTable t = sigma_of_c(sweep);
    CHECK(t.entries[1].sigma == Catch::Approx(0.0).margin(1e-12));
    CHECK(t.entries[2].sigma > t.entries[1].sigma);
    CHECK(t.entries[0].sigma < t.entries[1].sigma);

    // x -> 1/2 - x conjugates the c and -c members (the generating potential
    // is odd about 1/4), so u_{-c}(x) = u_c(1/2 - x) + const
    const int nx = sweep[0].u.nx;
    double mean_m = 0.0, mean_p = 0.0;
    for (int i = 0; i < nx; ++i) {
        mean_m += sweep[0].u.at(0, i);
        mean_p += sweep[2].u.at(0, i);
    }
    mean_m /= nx;
    mean_p /= nx;
    for (int i = 0; i < nx; ++i) {
        double lhs = sweep[0].u.at(0, i) - mean_m;
        double xr = 0.5 - double(i) / nx;
        int j = int(std::lround((xr - std::floor(xr)) * nx)) % nx;
        double rhs = sweep[2].u.at(0, j) - mean_p;
        CHECK(lhs == Catch::Approx(rhs).margin(0.02));
    }
}

TEST_CASE("Holder ratio: integrable sweep stays below the bound") {
    auto sweep = integrable_sweep({-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0});
    SigmaTable t = sigma_of_c(sweep);
    HolderReport rep = holder_check(t, sweep, 10);
    CHECK(rep.pairs >= 10);
    CHECK(rep.pass);
    CHECK(rep.max_ratio <= 1.0 + 1e-3);

    // closed-form oracle: the bound is tight exactly for antisymmetric pairs
    double c = 0.75;
    double R = (2 * c) / std::sqrt(2.0 * (c + c) * c);
    CHECK(R == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("Holder ratio: pinned sweep inside the flat") {
    SystemSpec s = standard_map_family(kEps1);
    std::vector<WeakKamSolution> sweep;
    for (double c : {-0.15, -0.1, -0.05, 0.0, 0.05, 0.1, 0.15})
        sweep.push_back(pinned_solution(s, c, 96, 48));
    SigmaTable t = sigma_of_c(sweep);
    HolderReport rep = holder_check(t, sweep, 10);
    CHECK(rep.pairs >= 20);
    CHECK(rep.pass);
}

TEST_CASE("ordering check across distinct alpha slopes") {
    SystemSpec s0 = standard_map_family(0.0);
    WeakKamSolution a = solve_weak_kam(s0, 0.5, 128, 64);
    WeakKamSolution b = solve_weak_kam(s0, 0.2, 128, 64);
    OrderingReport rep = ordering_check(a, b, 0.5, 0.2);
    CHECK(rep.pass);
    CHECK(rep.min_gap == Catch::Approx(0.3).margin(1e-6));
    CHECK_THROWS_AS(ordering_check(a, a, 0.5, 0.5), Error);

    SystemSpec s = standard_map_family(kEps1);
    WeakKamSolution hi = solve_weak_kam(s, 0.8, 128, 64);
    WeakKamSolution lo = solve_weak_kam(s, 0.0, 128, 64);
    OrderingReport r2 = ordering_check(hi, lo, 1.0, 0.0);
    CHECK(r2.pass);
}
