#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "twistlab/aubry.hpp"

using namespace twistlab;

namespace {
const double kEps1 = kTwoPi * 0.1;

// independent oracle: exhaustive 1-D scan of x -> h(x,x) at 1e-6 resolution
double scan_fixed_point(const SystemSpec& sys) {
    double best_x = 0.0, best = 1e300;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        double x = double(i) / n;
        double a = sys.h(x, x);
        if (a < best) { best = a; best_x = x; }
    }
    return best_x;
}
} // namespace

TEST_CASE("integrable minimal configurations are equally spaced") {
    SystemSpec s = standard_map_family(0.0);
    Configuration c = minimal_periodic(s, 1, 2);
    CHECK(c.action == Catch::Approx(0.125).margin(1e-12));
    CHECK(c.x[1] - c.x[0] == Catch::Approx(0.5).margin(1e-10));
    CHECK(std::abs(c.x[2] - c.x[0] - 1.0) < 1e-12);

    Configuration c0 = minimal_periodic(s, 0, 1);
    CHECK(c0.action == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("perturbed minimizing fixed point matches the brute-force scan") {
    SystemSpec s = standard_map_family(kEps1);
    Configuration c = minimal_periodic(s, 0, 1);
    double xs = scan_fixed_point(s);
    CHECK(wrap01(c.x[0]) == Catch::Approx(xs).margin(2e-6));
    // h(x,x) = (eps/2pi) sin(2 pi x): minimum at 3/4
    CHECK(wrap01(c.x[0]) == Catch::Approx(0.75).margin(1e-8));
    CHECK(c.action == Catch::Approx(-kEps1 / kTwoPi).margin(1e-10));
    // discrete Euler-Lagrange stationarity
    double res = s.h2(c.x[0] - c.p, c.x[0]) + s.h1(c.x[0], c.x[1]);
    CHECK(std::abs(res) < 1e-10);
}

TEST_CASE("beta profile: integrable values, convexity, symmetry") {
    SystemSpec s0 = standard_map_family(0.0);
    BetaProfile pr0 = beta_profile(s0, 8, -1.0, 1.0);
    for (auto& smp : pr0.samples)
        CHECK(smp.beta == Catch::Approx(0.5 * smp.h * smp.h).margin(1e-10));

    SystemSpec s = standard_map_family(kEps1);
    BetaProfile pr = beta_profile(s, 8, -1.5, 1.5);
    CHECK(alpha_from_beta(pr, {0.0})[0].alpha > 0.0); // beta(0) < 0
    // convexity margin
    for (std::size_t i = 1; i + 1 < pr.samples.size(); ++i) {
        auto &a = pr.samples[i - 1], &b = pr.samples[i], &c = pr.samples[i + 1];
        double lam = (b.h - a.h) / (c.h - a.h);
        double chord = (1 - lam) * a.beta + lam * c.beta;
        CHECK(b.beta <= chord + 1e-10);
    }
    // even V: beta(h) = beta(-h)
    for (auto& smp : pr.samples) {
        if (smp.h <= 0) continue;
        for (auto& other : pr.samples)
            if (other.p == -smp.p && other.q == smp.q)
                CHECK(smp.beta == Catch::Approx(other.beta).margin(1e-9));
    }
}

TEST_CASE("alpha from beta: integrable dual and duality gap") {
    SystemSpec s0 = standard_map_family(0.0);
    BetaProfile pr = beta_profile(s0, 16, -1.5, 1.5);
    std::vector<double> cg;
    for (int i = -10; i <= 10; ++i) cg.push_back(0.1 * i);
    auto al = alpha_from_beta(pr, cg);
    for (auto& a : al) {
        CHECK(a.alpha == Catch::Approx(0.5 * a.c * a.c).margin(4e-3));
        CHECK(!a.window_limited);
    }
    // duality gap nonnegative at all sampled pairs
    for (auto& a : al)
        for (auto& smp : pr.samples)
            CHECK(a.alpha + smp.beta - a.c * smp.h >= -1e-9);
}

TEST_CASE("flat edges: none at eps = 0, symmetric interval at the resonance") {
    SystemSpec s0 = standard_map_family(0.0);
    auto [cm0, cp0] = flat_edges(s0, 1, 2);
    CHECK(cm0 == Catch::Approx(0.5).margin(2e-3));
    CHECK(cp0 == Catch::Approx(0.5).margin(2e-3));

    SystemSpec s = standard_map_family(kEps1);
    auto [cm, cp] = flat_edges(s, 0, 1);
    CHECK(cp > 0.01);
    CHECK(cp + cm == Catch::Approx(0.0).margin(1e-3)); // even V symmetry
    auto [cm3, cp3] = flat_edges(s, 1, 3);
    CHECK(cp3 - cm3 >= -1e-9);
    CHECK(cp3 - cm3 < cp - cm);
}

TEST_CASE("heteroclinic configurations in the fixed-point gap") {
    SystemSpec s = standard_map_family(kEps1);
    // endpoint on the configuration: both signs return the periodic orbit
    Configuration per = minimal_periodic(s, 0, 1);
    for (int sign : {+1, -1}) {
        Configuration h = heteroclinic_config(s, 0, 1, sign, per.x[0], 30);
        for (double v : h.x) CHECK(v == Catch::Approx(per.x[0]).margin(1e-12));
    }
    // endpoint in the gap: momenta strictly ordered (+ above -)
    double y = per.x[0] + 0.4;
    Configuration hp = heteroclinic_config(s, 0, 1, +1, y, 40);
    Configuration hm = heteroclinic_config(s, 0, 1, -1, y, 40);
    double pp = s.h2(hp.x[hp.x.size() - 2], hp.x.back());
    double pm = s.h2(hm.x[hm.x.size() - 2], hm.x.back());
    CHECK(pp > pm);
    // self-convergence under window doubling
    Configuration hp2 = heteroclinic_config(s, 0, 1, +1, y, 80);
    double pp2 = s.h2(hp2.x[hp2.x.size() - 2], hp2.x.back());
    CHECK(std::abs(pp - pp2) < 1e-8);
}

TEST_CASE("u_pq pair: integrable closed form and nondecreasing difference") {
    SystemSpec s0 = standard_map_family(0.0);
    GridSection g0 = build_u_pq(s0, 1, 2, 33, 20);
    for (std::size_t i = 0; i < g0.x.size(); ++i) {
        double ref = 0.5 * (g0.x[i] - g0.x[0]);
        CHECK(g0.u_plus[i] == Catch::Approx(ref).margin(1e-8));
        CHECK(g0.u_minus[i] == Catch::Approx(ref).margin(1e-8));
    }

    SystemSpec s = standard_map_family(kEps1);
    GridSection g = build_u_pq(s, 0, 1, 129, 40);
    for (std::size_t i = 1; i < g.x.size(); ++i) {
        double d1 = g.u_plus[i] - g.u_minus[i];
        double d0 = g.u_plus[i - 1] - g.u_minus[i - 1];
        CHECK(d1 - d0 >= -1e-9);
    }
    CHECK(std::abs(g.u_plus[0] - g.u_minus[0]) < 1e-12);
    // one-sided momenta coincide on the Aubry set (gap endpoints here)
    CHECK(std::abs(g.p_plus[0] - g.p_minus[0]) < 1e-7);
    CHECK(std::abs(g.p_plus.back() - g.p_minus.back()) < 1e-7);
}

TEST_CASE("splitting point: symmetry at c = 0 and monotonicity in c") {
    SystemSpec s = standard_map_family(kEps1);
    auto edges = flat_edges(s, 0, 1);
    std::optional<std::pair<double, double>> fl = edges;
    double x0 = minimal_periodic(s, 0, 1).x[0];
    double z0 = splitting_point(s, 0, 1, 0.0, 0, 50, fl);
    // even V: the gap (3/4, 7/4) is symmetric about 5/4
    CHECK(z0 == Catch::Approx(x0 + 0.5).margin(1e-6));
    double half = 0.45 * (edges.second - edges.first);
    double zm = splitting_point(s, 0, 1, -half, 0, 50, fl);
    double zp = splitting_point(s, 0, 1, +half, 0, 50, fl);
    CHECK(zm <= z0);
    CHECK(z0 <= zp);
    CHECK(zp - zm > 1e-4);
}

TEST_CASE("minimal configurations do not cross their translates") {
    SystemSpec s = standard_map_family(kEps1);
    for (auto [p, q] : std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {1, 3}, {2, 5}}) {
        Configuration c = minimal_periodic(s, p, q);
        CHECK(noncrossing_margin(c) >= 0.0);
    }
}

TEST_CASE("Lipschitz graph over the section") {
    SystemSpec s = standard_map_family(kEps1);
    // gather (x mod 1, momentum) across several minimal configurations of one flat
    Configuration c = minimal_periodic(s, 2, 5);
    auto ps = momenta(s, c);
    double K = 0.0;
    for (std::size_t i = 0; i + 1 < ps.size(); ++i) {
        double dx = std::abs(wrap01(c.x[i + 1]) - wrap01(c.x[i]));
        dx = std::min(dx, 1.0 - dx);
        if (dx > 1e-6) K = std::max(K, std::abs(ps[i + 1] - ps[i]) / dx);
    }
    CHECK(K < 50.0);
}
