#ifndef TWISTLAB_TWISTMAP_HPP
#define TWISTLAB_TWISTMAP_HPP

#include <array>
#include <cmath>
#include <vector>

#include "errors.hpp"
#include "systems.hpp"

namespace twistlab {

inline double wrap01(double x) {
    double y = x - std::floor(x);
    return (y >= 1.0) ? y - 1.0 : y;
}

struct MapOrbit {
    std::vector<std::array<double, 2>> points; // (x mod 1, p)
    std::vector<double> lift;                  // lifted x
    std::array<double, 2> seed{};
    int length = 0;
};

inline MapOrbit iterate(const SystemSpec& sys, std::array<double, 2> seed, int n) {
    if (n < 1) throw Error(ErrorCode::Usage, "n must be >= 1");
    MapOrbit o;
    o.seed = seed;
    o.length = n + 1;
    o.points.reserve(n + 1);
    o.lift.reserve(n + 1);
    double x = seed[0], p = seed[1];
    o.points.push_back({wrap01(x), p});
    o.lift.push_back(x);
    for (int i = 0; i < n; ++i) {
        auto z = sys.map(x, p);
        x = z[0];
        p = z[1];
        o.points.push_back({wrap01(x), p});
        o.lift.push_back(x);
    }
    return o;
}

struct PointCloud {
    std::vector<int> seed_id;
    std::vector<double> x, p;
};

inline PointCloud phase_portrait(const SystemSpec& sys,
                                 const std::vector<std::array<double, 2>>& seeds, int n) {
    if (seeds.empty()) throw Error(ErrorCode::Usage, "seeds must be nonempty");
    PointCloud pc;
    pc.seed_id.reserve(seeds.size() * (n + 1));
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        MapOrbit o = iterate(sys, seeds[s], n);
        for (int i = 0; i <= n; ++i) {
            pc.seed_id.push_back(int(s));
            pc.x.push_back(o.points[i][0]);
            pc.p.push_back(o.points[i][1]);
        }
    }
    return pc;
}

struct SymplecticReport {
    double max_det_err = 0.0;   // max |det Df - 1|
    double exactness = 0.0;     // |loop integral of f*p dx - p dx| on p = p0
};

/// Area preservation on random samples; exactness by trapezoid quadrature on the
/// noncontractible curve p = p0.
inline SymplecticReport check_symplectic(const SystemSpec& sys, int samples,
                                         double p0 = 0.37, int quad_nodes = 4096,
                                         unsigned seed = 12345) {
    if (samples < 1) throw Error(ErrorCode::Usage, "samples must be >= 1");
    SymplecticReport r;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(0.0, 1.0), up(-2.0, 2.0);
    for (int i = 0; i < samples; ++i) {
        auto J = sys.map_jac(ux(rng), up(rng));
        double det = J[0] * J[3] - J[1] * J[2];
        r.max_det_err = std::max(r.max_det_err, std::abs(det - 1.0));
    }
    // integral over x in [0,1) of p'(x) dx'/dx - p0  (periodic integrand, trapezoid = midpoint sum)
    double acc = 0.0;
    const double dq = 1.0 / quad_nodes;
    for (int i = 0; i < quad_nodes; ++i) {
        double x = i * dq;
        auto z = sys.map(x, p0);
        auto J = sys.map_jac(x, p0);
        acc += (z[1] * J[0] - p0) * dq;
    }
    r.exactness = std::abs(acc);
    return r;
}

} // namespace twistlab

#endif
