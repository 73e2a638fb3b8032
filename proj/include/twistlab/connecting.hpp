#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "twistlab/aubry.hpp"
#include "twistlab/weakkam.hpp"

namespace twistlab {

struct InstabilityInterval {
    double a = 0.0, b = 0.0;
    std::vector<double> flagged_c; // interior samples with nonempty singular set
    int p = 0, q = 0;              // associated resonance when identified, else q = 0
};

struct InstabilityAtlas {
    double eps = 0.0;
    std::vector<InstabilityInterval> intervals; // disjoint, sorted
};

namespace detail {

/// Tolerant singularity probe: runs the period iteration to (near) convergence
/// and reports kinks of the section row; slow convergence in the gaps between
/// resonances must not abort detection.
struct SingularProbe {
    bool singular = false;
    double alpha = 0.0;
};

inline SingularProbe probe_singular(const SystemSpec& sys, double c, int nx, int nt,
                                    int max_periods) {
    auto fp = lo_fixed_point(sys, std::vector<double>(nx, 0.0), c, nt, 1e-6, max_periods);
    const double dx = 1.0 / nx;
    double C = 0.0;
    std::vector<double> pl(nx), pr(nx);
    for (int i = 0; i < nx; ++i) {
        double um = fp.row[(i + nx - 1) % nx], u0 = fp.row[i], up = fp.row[(i + 1) % nx];
        pl[i] = (u0 - um) / dx;
        pr[i] = (up - u0) / dx;
        C = std::max(C, (up + um - 2.0 * u0) / (dx * dx));
    }
    double thresh = std::max(10.0 * dx * C, 1e-3);
    SingularProbe out;
    out.alpha = fp.alpha;
    for (int i = 0; i < nx; ++i)
        if (pl[i] - pr[i] > thresh) { out.singular = true; break; }
    return out;
}

} // namespace detail

/// Scans c_grid for parameters without a rotational invariant circle (nonempty
/// singular set of the solution); maximal flagged runs become open intervals
/// with bisection-refined endpoints.
inline InstabilityAtlas detect_instability(const SystemSpec& sys,
                                           const std::vector<double>& c_grid, int nx = 96,
                                           int nt = 48, double dc_tol = 5e-3,
                                           int max_periods = 300) {
    InstabilityAtlas atlas;
    atlas.eps = sys.eps;
    if (c_grid.empty()) return atlas;
    std::vector<char> flag(c_grid.size());
    std::vector<double> alpha(c_grid.size());
    for (std::size_t i = 0; i < c_grid.size(); ++i) {
        if (i > 0 && c_grid[i] <= c_grid[i - 1])
            throw Error(ErrorCode::Usage, "detect_instability: c_grid must be sorted");
        auto pr = detail::probe_singular(sys, c_grid[i], nx, nt, max_periods);
        flag[i] = pr.singular ? 1 : 0;
        alpha[i] = pr.alpha;
    }
    auto refine = [&](double inside, double outside) {
        while (std::abs(outside - inside) > dc_tol) {
            double mid = 0.5 * (inside + outside);
            if (detail::probe_singular(sys, mid, nx, nt, max_periods).singular)
                inside = mid;
            else
                outside = mid;
        }
        return 0.5 * (inside + outside);
    };
    std::size_t i = 0;
    while (i < c_grid.size()) {
        if (!flag[i]) { ++i; continue; }
        std::size_t j = i;
        while (j + 1 < c_grid.size() && flag[j + 1]) ++j;
        InstabilityInterval iv;
        iv.a = (i == 0) ? c_grid[i] : refine(c_grid[i], c_grid[i - 1]);
        iv.b = (j + 1 == c_grid.size()) ? c_grid[j] : refine(c_grid[j], c_grid[j + 1]);
        for (std::size_t k = i; k <= j; ++k) iv.flagged_c.push_back(c_grid[k]);
        if (j > i) {
            // resonance association from the sampled alpha slope
            double slope = (alpha[j] - alpha[i]) / (c_grid[j] - c_grid[i]);
            for (int q = 1; q <= 8 && iv.q == 0; ++q) {
                double pf = slope * q;
                if (std::abs(pf - std::lround(pf)) < 0.02 * q) {
                    iv.p = int(std::lround(pf));
                    iv.q = q;
                }
            }
        }
        atlas.intervals.push_back(iv);
        i = j + 1;
    }
    return atlas;
}

namespace detail {

/// Discrete Bellman conjugate: w <- max_x [w(x) - h(y,x) + c (x-y)] - alpha,
/// started from the backward solution; the pair touches on the Aubry set.
inline std::vector<double> discrete_conjugate(const SystemSpec& sys, double c,
                                              const std::vector<double>& u, double alpha,
                                              double tol = 1e-10, int max_iters = 4000) {
    const int nx = int(u.size());
    const double dx = 1.0 / nx;
    std::vector<double> w = u, next(nx);
    for (int it = 0; it < max_iters; ++it) {
        double res = 0.0;
        for (int i = 0; i < nx; ++i) {
            double y = i * dx;
            double best = -1e300;
            for (int j = 0; j < nx; ++j) {
                double z = j * dx;
                int n0 = int(std::lround(y + c - z));
                for (int n = n0 - 3; n <= n0 + 3; ++n) {
                    double x = z + n;
                    double v = w[j] - sys.h(y, x) + c * (x - y);
                    if (v > best) best = v;
                }
            }
            next[i] = best - alpha;
            res = std::max(res, std::abs(next[i] - w[i]));
        }
        w.swap(next);
        if (res < tol) break;
    }
    return w;
}

/// Section Aubry estimate for the discrete backend: touching set of the
/// conjugate pair, as grid points in [0,1).
inline std::vector<double> discrete_aubry_points(const SystemSpec& sys, double c, int nx,
                                                 double level = 1e-3) {
    auto [u, alpha] = discrete_weak_kam(sys, c, nx);
    std::vector<double> w = discrete_conjugate(sys, c, u, alpha);
    double dmin = 1e300;
    for (int i = 0; i < nx; ++i) dmin = std::min(dmin, u[i] - w[i]);
    std::vector<double> pts;
    for (int i = 0; i < nx; ++i)
        if (u[i] - w[i] - dmin < level) pts.push_back(double(i) / nx);
    return pts;
}

} // namespace detail

/// Union of x-intervals covering the Manee-set estimates of both parameters,
/// fattened by `margin`; throws NO_GAP when nothing of the circle is left out.
inline std::vector<std::pair<double, double>> mane_neighborhood(const SystemSpec& sys,
                                                                double c, double c_prime,
                                                                double margin,
                                                                int nx = 96, int nt = 48) {
    std::vector<char> covered(nx, 0);
    for (double cc : {c, c_prime}) {
        WeakKamSolution sol = solve_weak_kam(sys, cc, nx, nt, 1e-6, 600);
        std::vector<double> row0(nx);
        for (int i = 0; i < nx; ++i) row0[i] = sol.u.at(0, i);
        std::vector<double> conj = detail::conjugate_row(sys, row0, cc, nt, sol.alpha,
                                                         1e-6, 600);
        double dmin = 1e300;
        for (int i = 0; i < nx; ++i) dmin = std::min(dmin, row0[i] - conj[i]);
        const double tol = 5.0 * std::pow(1.0 / nx + 1.0 / nt, 2);
        int pad = int(std::ceil(margin * nx));
        for (int i = 0; i < nx; ++i) {
            if (row0[i] - conj[i] - dmin >= tol) continue;
            for (int k = -pad; k <= pad; ++k) covered[((i + k) % nx + nx) % nx] = 1;
        }
    }
    int start = -1;
    for (int i = 0; i < nx; ++i)
        if (!covered[i]) { start = i; break; }
    if (start < 0)
        throw Error(ErrorCode::NoGap, "mane_neighborhood: estimate covers the circle");
    // walk the circle from an uncovered node and collect covered arcs
    std::vector<std::pair<double, double>> arcs;
    int i = start;
    do {
        if (covered[i]) {
            int j = i;
            while (covered[(j + 1) % nx] && (j + 1) % nx != start) ++j;
            arcs.push_back({double(i) / nx, double(j + 1) / nx});
            i = (j + 1) % nx;
        } else {
            i = (i + 1) % nx;
        }
    } while (i != start);
    return arcs;
}

/// Smooth compactly supported bump with prescribed integral, evaluable with
/// its primitive on the universal cover (M(x+1) = M(x) + amount).
struct MuProfile {
    double lo = 0.0, hi = 0.0; // support (strictly inside the provided gap)
    double amount = 0.0;
    double scale = 0.0; // amplitude normalization

    double mu(double x) const {
        if (amount == 0.0) return 0.0;
        double xl = x - std::floor(x - lo); // representative in [lo, lo+1)
        if (xl <= lo || xl >= hi) return 0.0;
        double s = (2.0 * xl - lo - hi) / (hi - lo);
        return scale * std::exp(-1.0 / (1.0 - s * s));
    }

    double M(double x) const { // primitive, M(lo) = 0 on the base deck
        if (amount == 0.0) return 0.0;
        double n = std::floor(x - lo);
        double xl = x - n;
        // Simpson on [lo, xl]
        const int m = 64;
        double acc = 0.0, a = lo, b = std::min(xl, hi);
        if (b > a) {
            double h = (b - a) / (2 * m);
            acc = mu(a) + mu(b);
            for (int k = 1; k < 2 * m; ++k) acc += mu(a + k * h) * ((k % 2) ? 4.0 : 2.0);
            acc *= h / 3.0;
        }
        return acc + n * amount;
    }
};

/// Bump supported in the middle 80% of the gap with integral `amount`.
inline MuProfile build_mu(std::pair<double, double> gap, double amount) {
    if (gap.second <= gap.first) throw Error(ErrorCode::Usage, "build_mu: empty gap");
    MuProfile mu;
    double w = gap.second - gap.first;
    mu.lo = gap.first + 0.1 * w;
    mu.hi = gap.second - 0.1 * w;
    mu.amount = amount;
    if (amount != 0.0) {
        // unit-bump mass on (-1,1) for exp(-1/(1-s^2)), via Simpson
        const int m = 512;
        double h = (mu.hi - mu.lo) / (2 * m);
        mu.scale = 1.0;
        double acc = 0.0;
        for (int k = 0; k <= 2 * m; ++k) {
            double x = mu.lo + k * h;
            double s = (2.0 * x - mu.lo - mu.hi) / (mu.hi - mu.lo);
            double v = (std::abs(s) < 1.0) ? std::exp(-1.0 / (1.0 - s * s)) : 0.0;
            acc += v * ((k == 0 || k == 2 * m) ? 1.0 : (k % 2) ? 4.0 : 2.0);
        }
        acc *= h / 3.0;
        mu.scale = amount / acc;
    }
    return mu;
}

struct ModifiedActionSpec {
    double c = 0.0;       // cohomology class of eta
    double c_prime = 0.0; // target class; [mu] = c_prime - c
    MuProfile mu;
    int rho_delta = 1; // the switch happens across [0, rho_delta]
    int T0 = 60, T1 = 60;
};

struct ConnectingOrbit {
    std::vector<double> x; // lifted configuration x_{-T0} .. x_{T1}
    double action = 0.0;   // modified action including T0 a(c) + T1 a(c')
    double el_residual = 0.0;
    double boundary_left = 0.0, boundary_right = 0.0;
    double mu_clearance = 0.0; // min distance of section points to supp mu
    ModifiedActionSpec spec;
};

namespace detail {

inline double nearest_lift(const std::vector<double>& pts, double x) {
    double best = 0.0, bd = 1e300;
    for (double p : pts) {
        double cand = p + std::round(x - p);
        if (std::abs(cand - x) < bd) { bd = std::abs(cand - x); best = cand; }
    }
    return best;
}

} // namespace detail

/// Minimizes the discrete modified action over a finite window with quadratic
/// anchoring to the Aubry estimates of the two classes.
inline ConnectingOrbit connecting_orbit(const SystemSpec& sys, const ModifiedActionSpec& spec,
                                        double boundary_tol, int anchor_nx = 192) {
    if (spec.T0 < 20 || spec.T1 < 20)
        throw Error(ErrorCode::Usage, "connecting_orbit: need T0, T1 >= 20");
    const int N = spec.T0 + spec.T1 + 1;
    const double P = 100.0; // anchor penalty weight
    auto [uL, aL] = discrete_weak_kam(sys, spec.c, anchor_nx);
    auto [uR, aR] = discrete_weak_kam(sys, spec.c_prime, anchor_nx);
    std::vector<double> anchorL = detail::discrete_aubry_points(sys, spec.c, anchor_nx);
    std::vector<double> anchorR =
        detail::discrete_aubry_points(sys, spec.c_prime, anchor_nx);

    auto rho = [&](int i) { return (i >= spec.rho_delta) ? 1.0 : (i <= 0 ? 0.0 : double(i) / spec.rho_delta); };
    auto mu_grad_index = [&](int k) { // gradient weight (rho_i - rho_{i-1}) at i = k - T0
        int i = k - spec.T0;
        return rho(i) - rho(i - 1);
    };

    auto energy = [&](const std::vector<double>& x) {
        double F = 0.0;
        for (int k = 0; k + 1 < N; ++k) {
            int i = k - spec.T0;
            F += sys.h(x[k], x[k + 1]) - spec.c * (x[k + 1] - x[k]) -
                 rho(i) * (spec.mu.M(x[k + 1]) - spec.mu.M(x[k]));
        }
        double dl = x[0] - detail::nearest_lift(anchorL, x[0]);
        double dr = x[N - 1] - detail::nearest_lift(anchorR, x[N - 1]);
        return F + P * dl * dl + P * dr * dr;
    };

    auto minimize = [&](std::vector<double> x) -> std::optional<std::pair<std::vector<double>, double>> {
        std::vector<double> lo(N), di(N), up(N), g(N), step;
        for (int it = 0; it < 400; ++it) {
            double tL = detail::nearest_lift(anchorL, x[0]);
            double tR = detail::nearest_lift(anchorR, x[N - 1]);
            double gn = 0.0;
            for (int k = 0; k < N; ++k) {
                double v = 0.0;
                if (k > 0) v += sys.h2(x[k - 1], x[k]);
                if (k + 1 < N) v += sys.h1(x[k], x[k + 1]);
                if (k == 0) v += spec.c + 2.0 * P * (x[0] - tL);
                if (k == N - 1) v += -spec.c + 2.0 * P * (x[N - 1] - tR);
                v += mu_grad_index(k) * spec.mu.mu(x[k]);
                g[k] = v;
                gn = std::max(gn, std::abs(v));
            }
            if (gn < 1e-11) return std::make_pair(x, energy(x));
            for (int k = 0; k < N; ++k) {
                double d = 0.0;
                if (k > 0) d += sys.h22(x[k - 1], x[k]);
                if (k + 1 < N) d += sys.h11(x[k], x[k + 1]);
                if (k == 0 || k == N - 1) d += 2.0 * P;
                di[k] = d;
                lo[k] = (k > 0) ? sys.h12(x[k - 1], x[k]) : 0.0;
                up[k] = (k + 1 < N) ? sys.h12(x[k], x[k + 1]) : 0.0;
            }
            double F0 = energy(x);
            bool ok = false;
            for (double lam = 0.0; lam <= 1e6; lam = (lam == 0.0) ? 1e-8 : lam * 30.0) {
                std::vector<double> dl = di;
                for (double& v : dl) v += lam;
                std::vector<double> rhs(N);
                for (int k = 0; k < N; ++k) rhs[k] = -g[k];
                if (!detail::solve_tridiag(lo, dl, up, rhs, step)) continue;
                std::vector<double> xt(N);
                for (int k = 0; k < N; ++k) xt[k] = x[k] + step[k];
                if (energy(xt) <= F0 + 1e-13 * std::abs(F0)) {
                    x = xt;
                    ok = true;
                    break;
                }
            }
            if (!ok) {
                double t = 1e-2 / (1.0 + gn);
                for (int k = 0; k < N; ++k) x[k] -= t * g[k];
            }
        }
        return std::nullopt;
    };

    // multistart: constant at an anchor, and ramps crossing the gap both ways
    double base = anchorL.empty() ? 0.0 : anchorL[0];
    std::vector<std::vector<double>> starts;
    starts.emplace_back(N, base);
    for (int dir : {+1, -1}) {
        std::vector<double> x(N, base);
        for (int k = 0; k < N; ++k) {
            int i = k - spec.T0;
            double s = 1.0 / (1.0 + std::exp(-0.8 * double(i - spec.rho_delta)));
            x[k] = base + dir * s;
        }
        starts.push_back(std::move(x));
    }
    std::optional<std::pair<std::vector<double>, double>> best;
    for (auto& x0 : starts) {
        auto r = minimize(x0);
        if (r && (!best || r->second < best->second)) best = r;
    }
    if (!best) throw Error(ErrorCode::NoConvergence, "connecting_orbit: no start converged");

    ConnectingOrbit orb;
    orb.spec = spec;
    orb.x = best->first;
    orb.action = best->second + spec.T0 * aL + spec.T1 * aR;
    orb.boundary_left = std::abs(orb.x[0] - detail::nearest_lift(anchorL, orb.x[0]));
    orb.boundary_right =
        std::abs(orb.x[N - 1] - detail::nearest_lift(anchorR, orb.x[N - 1]));
    orb.el_residual = 0.0;
    orb.mu_clearance = 1e300;
    for (int k = 1; k + 1 < N; ++k) {
        if (spec.mu.mu(orb.x[k]) == 0.0) {
            double r = sys.h2(orb.x[k - 1], orb.x[k]) + sys.h1(orb.x[k], orb.x[k + 1]);
            orb.el_residual = std::max(orb.el_residual, std::abs(r));
        }
        if (spec.mu.amount != 0.0) {
            double xl = orb.x[k] - std::floor(orb.x[k] - spec.mu.lo);
            double d = (xl <= spec.mu.lo) ? spec.mu.lo - xl
                       : (xl >= spec.mu.hi) ? xl - spec.mu.hi
                                            : 0.0;
            orb.mu_clearance = std::min(orb.mu_clearance, d);
        }
    }
    if (orb.boundary_left > boundary_tol || orb.boundary_right > boundary_tol)
        throw Error(ErrorCode::BoundaryMiss,
                    "connecting_orbit: boundary distances " +
                        std::to_string(orb.boundary_left) + ", " +
                        std::to_string(orb.boundary_right));
    return orb;
}

/// Greedy chain of connecting orbits from c1 to c2, halving the step on
/// NO_GAP / BOUNDARY_MISS.
inline std::vector<ConnectingOrbit> transition_chain(const SystemSpec& sys, double c1,
                                                     double c2, double max_step,
                                                     double boundary_tol = 0.1,
                                                     int T = 60, double gap_margin = 0.05,
                                                     double dc_min = 1e-4) {
    std::vector<ConnectingOrbit> chain;
    if (std::abs(c2 - c1) < 1e-15) return chain;
    double dir = (c2 > c1) ? 1.0 : -1.0;
    double cur = c1;
    double step = std::abs(max_step);
    while (dir * (c2 - cur) > 1e-12) {
        step = std::min(step, std::abs(c2 - cur));
        double nxt = cur + dir * step;
        try {
            auto arcs = mane_neighborhood(sys, cur, nxt, gap_margin);
            // largest uncovered arc hosts the bump
            double best_a = 0.0, best_b = 0.0, best_w = -1.0;
            for (std::size_t i = 0; i < arcs.size(); ++i) {
                double gap_start = arcs[i].second;
                double gap_end = (i + 1 < arcs.size()) ? arcs[i + 1].first : arcs[0].first + 1.0;
                if (gap_end - gap_start > best_w) {
                    best_w = gap_end - gap_start;
                    best_a = gap_start;
                    best_b = gap_end;
                }
            }
            if (best_w <= 0.0) throw Error(ErrorCode::NoGap, "no uncovered arc");
            ModifiedActionSpec spec;
            spec.c = cur;
            spec.c_prime = nxt;
            spec.mu = build_mu({best_a, best_b}, nxt - cur);
            spec.T0 = spec.T1 = T;
            chain.push_back(connecting_orbit(sys, spec, boundary_tol));
            cur = nxt;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::NoGap || e.code() == ErrorCode::BoundaryMiss) {
                step *= 0.5;
                if (step < dc_min)
                    throw Error(ErrorCode::ChainStalled,
                                "transition_chain: step underflow at c = " +
                                    std::to_string(cur));
            } else {
                throw;
            }
        }
    }
    return chain;
}

} // namespace twistlab
