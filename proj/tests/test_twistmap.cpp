#include <catch2/catch_amalgamated.hpp>

#include "twistlab/twistmap.hpp"

using namespace twistlab;

TEST_CASE("integrable rotation orbit") {
    SystemSpec s = standard_map_family(0.0);
    MapOrbit o = iterate(s, {0.0, 0.5}, 4);
    std::vector<double> expect = {0.0, 0.5, 1.0, 1.5, 2.0};
    for (int i = 0; i <= 4; ++i) {
        CHECK(o.lift[i] == Catch::Approx(expect[i]).margin(1e-14));
        CHECK(o.points[i][1] == Catch::Approx(0.5).margin(1e-14));
        CHECK(std::abs(wrap01(o.lift[i]) - o.points[i][0]) < 1e-12);
    }
}

TEST_CASE("fixed point of the perturbed map sits where V vanishes") {
    double eps = kTwoPi * 0.1;
    SystemSpec s = standard_map_family(eps);
    // V(x) = cos 2 pi x vanishes at x = 1/4: (1/4, 0) is fixed
    auto z = s.map(0.25, 0.0);
    CHECK(z[0] == Catch::Approx(0.25).margin(1e-14));
    CHECK(z[1] == Catch::Approx(0.0).margin(1e-14));
    // (1/2, 0) is not: p' = eps cos(pi) = -eps
    auto w = s.map(0.5, 0.0);
    CHECK(w[1] == Catch::Approx(-eps).margin(1e-14));

    MapOrbit o = iterate(s, {0.25, 0.0}, 50);
    for (auto& pt : o.points) {
        CHECK(pt[0] == Catch::Approx(0.25).margin(1e-10));
        CHECK(pt[1] == Catch::Approx(0.0).margin(1e-10));
    }
}

TEST_CASE("phase portrait basics") {
    SystemSpec s0 = standard_map_family(0.0);
    std::vector<std::array<double, 2>> seeds;
    for (int k = 0; k < 10; ++k) seeds.push_back({0.1, double(k) / 10});
    PointCloud pc = phase_portrait(s0, seeds, 50);
    // horizontal lines: p constant per seed
    for (std::size_t i = 0; i < pc.x.size(); ++i)
        CHECK(pc.p[i] == Catch::Approx(double(pc.seed_id[i]) / 10).margin(1e-13));

    // integer shifts of seeds leave the portrait invariant
    SystemSpec s = standard_map_family(kTwoPi * 0.1);
    PointCloud a = phase_portrait(s, {{0.3, 0.2}}, 100);
    PointCloud b = phase_portrait(s, {{1.3, 0.2}}, 100);
    for (std::size_t i = 0; i < a.x.size(); ++i) {
        CHECK(a.x[i] == Catch::Approx(b.x[i]).margin(1e-9));
        CHECK(a.p[i] == Catch::Approx(b.p[i]).margin(1e-9));
    }
}

TEST_CASE("area preservation and exactness") {
    for (double eps : {0.0, kTwoPi * 0.1, 1.0}) {
        SystemSpec s = standard_map_family(eps);
        auto r = check_symplectic(s, 1000, 0.37, 10000);
        CHECK(r.max_det_err < 1e-10);
        CHECK(r.exactness < 1e-8);
    }
}
