#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "twistlab/systems.hpp"

namespace twistlab {

/// Periodic grid in x (and optionally t); values indexed (i_t * nx + i_x),
/// x_i = i/nx, t_k = k/nt.
struct GridFunction {
    int nx = 0;
    int nt = 1;
    std::vector<double> values;

    double dx() const { return 1.0 / nx; }
    double dt() const { return 1.0 / nt; }
    double at(int it, int ix) const {
        it = ((it % nt) + nt) % nt;
        ix = ((ix % nx) + nx) % nx;
        return values[std::size_t(it) * nx + ix];
    }
    double& ref(int it, int ix) { return values[std::size_t(it) * nx + ix]; }
};

enum class Backend { continuous, discrete };

struct WeakKamSolution {
    GridFunction u; // stored without the c*x linear part; periodic in x and t
    double c = 0.0;
    double alpha = 0.0;
    GridFunction p_left, p_right;
    std::vector<std::uint8_t> singular_mask; // same indexing as u.values
    double lipschitz_K = 0.0;
    double semiconcavity_C = 0.0;
    Backend backend = Backend::continuous;
    double residual = 0.0; // last period-to-period sup change
    int iterations = 0;    // periods used
    double kink_threshold = 0.0;
    bool pinned = false;
    double pin_x = 0.0;
    SystemSpec sys;

    bool singular_at(int it, int ix) const {
        it = ((it % u.nt) + u.nt) % u.nt;
        ix = ((ix % u.nx) + u.nx) % u.nx;
        return singular_mask[std::size_t(it) * u.nx + ix] != 0;
    }
};

namespace detail {

/// Linear interpolation of a 1-periodic grid row.
inline double interp_row(const std::vector<double>& row, double x) {
    const int nx = int(row.size());
    double s = (x - std::floor(x)) * nx;
    int i = int(s);
    if (i >= nx) i = nx - 1;
    double f = s - i;
    return (1.0 - f) * row[i] + f * row[std::size_t((i + 1) % nx)];
}

/// One semi-Lagrangian inf-convolution step.
inline std::vector<double> lo_step(const SystemSpec& sys, const std::vector<double>& u,
                                   double c, double t_k, double dt) {
    const int nx = int(u.size());
    const double dx = 1.0 / nx;
    const double W = sys.v_max * dt;
    const double ds = 0.25 * dx;
    const int m = std::max(2, int(std::ceil(W / ds)));
    std::vector<double> out(nx);

    auto phi = [&](double x, double s) {
        // s = x - y (displacement over the step)
        double y = x - s;
        return interp_row(u, y) + dt * sys.L(y, s / dt, t_k) - c * s;
    };

    for (int i = 0; i < nx; ++i) {
        double x = i * dx;
        int jbest = -m;
        double best = phi(x, -m * (W / m));
        const double h = W / m;
        for (int j = -m + 1; j <= m; ++j) {
            double v = phi(x, j * h);
            if (v < best) { best = v; jbest = j; }
        }
        if (jbest > -m && jbest < m) {
            double f0 = phi(x, (jbest - 1) * h), f1 = best, f2 = phi(x, (jbest + 1) * h);
            double den = f0 - 2.0 * f1 + f2;
            if (den > 1e-300) {
                double off = 0.5 * (f0 - f2) / den;
                if (off > -1.0 && off < 1.0) {
                    double v = phi(x, (jbest + off) * h);
                    if (v < best) best = v;
                }
            }
        }
        out[i] = best;
    }
    return out;
}

} // namespace detail

/// u_{k+1}(x) = min_y [u_k(y) + dt L(y,(x-y)/dt,t_k) - c (x-y)] over the
/// window |x-y| <= v_max dt, sub-grid scan plus parabolic refinement.
inline std::vector<double> lax_oleinik_step(const SystemSpec& sys,
                                            const std::vector<double>& u_row, double c,
                                            double t_k, double dt) {
    return detail::lo_step(sys, u_row, c, t_k, dt);
}

namespace detail {

/// Reverse-time analogue: v_k(y) = min_x [v_{k+1}(x) + dt L(y,(x-y)/dt,t_k) - c (x-y)].
inline std::vector<double> lax_oleinik_step_reverse(const SystemSpec& sys,
                                                    const std::vector<double>& v_row,
                                                    double c, double t_k, double dt) {
    const int nx = int(v_row.size());
    std::vector<double> flip(v_row);
    std::vector<double> out = [&] {
        const double dt_ = dt;
        const double W = sys.v_max * dt_;
        const double dx = 1.0 / nx;
        const double ds = 0.25 * dx;
        const int m = std::max(2, int(std::ceil(W / ds)));
        std::vector<double> o(nx);
        auto phi = [&](double y, double s) {
            // s = x - y, velocity of the connecting segment
            double x = y + s;
            return interp_row(flip, x) + dt_ * sys.L(y, s / dt_, t_k) - c * s;
        };
        const double h = W / m;
        for (int i = 0; i < nx; ++i) {
            double y = i * dx;
            int jbest = -m;
            double best = phi(y, -m * h);
            for (int j = -m + 1; j <= m; ++j) {
                double v = phi(y, j * h);
                if (v < best) { best = v; jbest = j; }
            }
            if (jbest > -m && jbest < m) {
                double f0 = phi(y, (jbest - 1) * h), f1 = best, f2 = phi(y, (jbest + 1) * h);
                double den = f0 - 2.0 * f1 + f2;
                if (den > 1e-300) {
                    double off = 0.5 * (f0 - f2) / den;
                    if (off > -1.0 && off < 1.0) {
                        double v = phi(y, (jbest + off) * h);
                        if (v < best) best = v;
                    }
                }
            }
            o[i] = best;
        }
        return o;
    }();
    return out;
}

/// Evolve a section row through one full time period (nt steps of 1/nt).
inline std::vector<double> lo_period(const SystemSpec& sys, std::vector<double> row,
                                     double c, int nt) {
    double dt = 1.0 / nt;
    for (int k = 0; k < nt; ++k)
        row = lo_step(sys, row, c, k * dt, dt);
    return row;
}

inline std::vector<double> lo_period_reverse(const SystemSpec& sys, std::vector<double> row,
                                             double c, int nt) {
    double dt = 1.0 / nt;
    for (int k = nt - 1; k >= 0; --k)
        row = lax_oleinik_step_reverse(sys, row, c, k * dt, dt);
    return row;
}

/// Drive a row to the drift-removed fixed point of the period map; returns
/// (row, alpha, residual, periods).
struct FixedPointResult {
    std::vector<double> row;
    double alpha = 0.0;
    double residual = 0.0;
    int periods = 0;
    bool converged = false;
};

inline FixedPointResult lo_fixed_point(const SystemSpec& sys, std::vector<double> row,
                                       double c, int nt, double tol, int max_periods) {
    FixedPointResult r;
    for (int n = 1; n <= max_periods; ++n) {
        std::vector<double> next = lo_period(sys, row, c, nt);
        double a = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) a += next[i] - row[i];
        a /= double(next.size());
        double res = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) {
            next[i] -= a;
            res = std::max(res, std::abs(next[i] - row[i]));
        }
        row = std::move(next);
        r.alpha = -a;
        r.residual = res;
        r.periods = n;
        if (res < tol) { r.converged = true; break; }
    }
    r.row = std::move(row);
    return r;
}

/// Derivative fields, kink mask, Lipschitz and semiconcavity constants.
inline void finish_solution(WeakKamSolution& sol) {
    const int nx = sol.u.nx, nt = sol.u.nt;
    const double dx = sol.u.dx();
    sol.p_left = sol.p_right = sol.u;
    double K = 0.0, C = 0.0;
    for (int k = 0; k < nt; ++k) {
        for (int i = 0; i < nx; ++i) {
            double um = sol.u.at(k, i - 1), u0 = sol.u.at(k, i), up = sol.u.at(k, i + 1);
            double pl = (u0 - um) / dx, pr = (up - u0) / dx;
            sol.p_left.ref(k, i) = pl;
            sol.p_right.ref(k, i) = pr;
            K = std::max(K, std::max(std::abs(pl), std::abs(pr)));
            C = std::max(C, (up + um - 2.0 * u0) / (dx * dx));
        }
    }
    sol.lipschitz_K = K;
    sol.semiconcavity_C = std::max(C, 0.0);
    sol.kink_threshold = std::max(10.0 * dx * sol.semiconcavity_C, 1e-3);
    sol.singular_mask.assign(sol.u.values.size(), 0);
    for (int k = 0; k < nt; ++k)
        for (int i = 0; i < nx; ++i)
            if (sol.p_left.at(k, i) - sol.p_right.at(k, i) > sol.kink_threshold)
                sol.singular_mask[std::size_t(k) * nx + i] = 1;
}

/// Fill all t rows from a converged t = 0 row; stored rows are made
/// time-periodic by adding back alpha * t_k.
inline void fill_rows(WeakKamSolution& sol, const std::vector<double>& row0) {
    const int nx = int(row0.size()), nt = sol.u.nt;
    sol.u.nx = nx;
    sol.u.values.assign(std::size_t(nx) * nt, 0.0);
    std::vector<double> row = row0;
    double dt = 1.0 / nt;
    for (int k = 0; k < nt; ++k) {
        for (int i = 0; i < nx; ++i) sol.u.ref(k, i) = row[i] + sol.alpha * (k * dt);
        if (k + 1 < nt) row = lo_step(sol.sys, row, sol.c, k * dt, dt);
    }
    finish_solution(sol);
}

inline double clip_level(const SystemSpec& sys) {
    // exceeds any admissible one-period action difference
    double maxL = 0.0;
    for (int i = 0; i < 64; ++i)
        for (int k = 0; k < 16; ++k)
            maxL = std::max(maxL, std::abs(sys.L(i / 64.0, 0.0, k / 16.0)));
    return 10.0 * (sys.v_max * sys.v_max + maxL);
}

} // namespace detail

/// Backward weak KAM solution by period iteration of the semi-Lagrangian
/// operator with mean-drift removal; alpha is minus the converged drift.
inline WeakKamSolution solve_weak_kam(const SystemSpec& sys, double c, int nx, int nt,
                                      double tol = 1e-7, int max_periods = 600) {
    if (nx < 64 || nt < 32) throw Error(ErrorCode::Usage, "need nx >= 64, nt >= 32");
    auto fp = detail::lo_fixed_point(sys, std::vector<double>(nx, 0.0), c, nt, tol,
                                     max_periods);
    if (!fp.converged)
        throw Error(ErrorCode::NoConvergence,
                    "solve_weak_kam: residual " + std::to_string(fp.residual) + " after " +
                        std::to_string(fp.periods) + " periods");
    WeakKamSolution sol;
    sol.sys = sys;
    sol.c = c;
    sol.alpha = fp.alpha;
    sol.backend = Backend::continuous;
    sol.residual = fp.residual;
    sol.iterations = fp.periods;
    sol.u.nx = nx;
    sol.u.nt = nt;
    double mean = 0.0;
    for (double v : fp.row) mean += v;
    mean /= nx;
    for (double& v : fp.row) v -= mean;
    detail::fill_rows(sol, fp.row);
    return sol;
}

/// Discrete Bellman backend on the t = 0 section with the generating function
/// as one-step cost: u(x) = min_y [u(y) + h(y,x) - c (x-y)] + alpha.
inline std::pair<std::vector<double>, double> discrete_weak_kam(const SystemSpec& sys,
                                                                double c, int nx,
                                                                double tol = 1e-10,
                                                                int max_iters = 4000) {
    const double dx = 1.0 / nx;
    std::vector<double> u(nx, 0.0);
    std::vector<double> next(nx);
    double alpha = 0.0, res = 0.0;

    auto step_cost = [&](double y, double x) { return sys.h(y, x) - c * (x - y); };
    auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
        for (int i = 0; i < nx; ++i) {
            double x = i * dx;
            double best = 1e300;
            int jbest = 0, nbest = 0;
            for (int j = 0; j < nx; ++j) {
                double z = j * dx;
                int n0 = int(std::lround(x - z - c));
                for (int n = n0 - 3; n <= n0 + 3; ++n) {
                    double v = in[j] + step_cost(z + n, x);
                    if (v < best) { best = v; jbest = j; nbest = n; }
                }
            }
            // parabolic refinement in the departure point
            double z0 = jbest * dx + nbest;
            double f0 = detail::interp_row(in, z0 - dx) + step_cost(z0 - dx, x);
            double f2 = detail::interp_row(in, z0 + dx) + step_cost(z0 + dx, x);
            double den = f0 - 2.0 * best + f2;
            if (den > 1e-300) {
                double off = 0.5 * (f0 - f2) / den;
                if (off > -1.0 && off < 1.0) {
                    double z = z0 + off * dx;
                    double v = detail::interp_row(in, z) + step_cost(z, x);
                    if (v < best) best = v;
                }
            }
            out[i] = best;
        }
    };

    int it = 0;
    for (it = 1; it <= max_iters; ++it) {
        apply(u, next);
        double a = 0.0;
        for (int i = 0; i < nx; ++i) a += next[i] - u[i];
        a /= nx;
        res = 0.0;
        for (int i = 0; i < nx; ++i) {
            next[i] -= a;
            res = std::max(res, std::abs(next[i] - u[i]));
        }
        u.swap(next);
        alpha = -a;
        if (res < tol) break;
    }
    if (res >= tol)
        throw Error(ErrorCode::NoConvergence,
                    "discrete_weak_kam: residual " + std::to_string(res));
    double mean = 0.0;
    for (double v : u) mean += v;
    mean /= nx;
    for (double& v : u) v -= mean;
    return {u, alpha};
}

/// liminf approximation of the Peierls barrier h_c^inf((x0,0),(.,0)):
/// spike initialization, period iteration with k*alpha compensation,
/// componentwise min over the last `tail` periods.
inline std::vector<double> peierls_barrier(const SystemSpec& sys, double c, double x0,
                                           int nx, int periods = 48, int tail = 16,
                                           int nt = 64,
                                           std::optional<double> alpha_in = std::nullopt) {
    if (periods < tail || tail < 8) throw Error(ErrorCode::Usage, "need periods >= tail >= 8");
    double alpha = alpha_in ? *alpha_in
                            : solve_weak_kam(sys, c, nx, nt, 1e-7, 600).alpha;
    const double M = detail::clip_level(sys);
    std::vector<double> u(nx, M);
    int i0 = int(std::lround((x0 - std::floor(x0)) * nx)) % nx;
    u[i0] = 0.0;
    std::vector<double> mins(nx, 1e300), prev_mins(nx, 1e300);
    for (int k = 1; k <= periods; ++k) {
        u = detail::lo_period(sys, std::move(u), c, nt);
        for (double& v : u) v = std::min(v + alpha, M); // one more alpha per period
        if (k > periods - 2 * tail && k <= periods - tail)
            for (int i = 0; i < nx; ++i) prev_mins[i] = std::min(prev_mins[i], u[i]);
        if (k > periods - tail)
            for (int i = 0; i < nx; ++i) mins[i] = std::min(mins[i], u[i]);
    }
    double osc = 0.0;
    for (int i = 0; i < nx; ++i) osc = std::max(osc, std::abs(mins[i] - prev_mins[i]));
    if (osc > 0.05)
        throw Error(ErrorCode::NoConvergence,
                    "peierls_barrier: tail oscillation " + std::to_string(osc));
    return mins;
}

namespace detail {

/// Reverse barrier h_c^inf((.,0),(x0,0)) by the time-reversed operator.
inline std::vector<double> peierls_barrier_reverse(const SystemSpec& sys, double c,
                                                   double x0, int nx, int periods,
                                                   int tail, int nt, double alpha) {
    const double M = clip_level(sys);
    std::vector<double> v(nx, M);
    int i0 = int(std::lround((x0 - std::floor(x0)) * nx)) % nx;
    v[i0] = 0.0;
    std::vector<double> mins(nx, 1e300);
    for (int k = 1; k <= periods; ++k) {
        v = lo_period_reverse(sys, std::move(v), c, nt);
        for (double& w : v) w = std::min(w + alpha, M);
        if (k > periods - tail)
            for (int i = 0; i < nx; ++i) mins[i] = std::min(mins[i], v[i]);
    }
    return mins;
}

/// Conjugate (forward) solution obtained by reverse-evolving a backward
/// solution row; equals it exactly on the projected Aubry set.
inline std::vector<double> conjugate_row(const SystemSpec& sys, std::vector<double> row,
                                         double c, int nt, double alpha, double tol,
                                         int max_periods) {
    const int nx = int(row.size());
    // forward operator: max_x [v(x) - cost] = -(reverse min applied to -v)
    for (int k = 1; k <= max_periods; ++k) {
        std::vector<double> neg(nx);
        for (int i = 0; i < nx; ++i) neg[i] = -row[i];
        neg = lo_period_reverse(sys, std::move(neg), c, nt);
        double res = 0.0;
        for (int i = 0; i < nx; ++i) {
            double w = -neg[i] - alpha;
            res = std::max(res, std::abs(w - row[i]));
            row[i] = w;
        }
        if (res < tol) break;
    }
    return row;
}

} // namespace detail

/// Section points x with a vanishing two-sided barrier sum: the projected
/// Aubry set up to grid resolution.
inline std::vector<double> aubry_set_estimate(const SystemSpec& sys, double c, int nx,
                                              int nt = 64) {
    WeakKamSolution sol = solve_weak_kam(sys, c, nx, nt, 1e-7, 600);
    std::vector<double> row0(nx);
    for (int i = 0; i < nx; ++i) row0[i] = sol.u.at(0, i);
    std::vector<double> conj =
        detail::conjugate_row(sys, row0, c, nt, sol.alpha, 1e-7, 600);
    // bootstrap pin: the conjugate pair touches on the Aubry set
    int ipin = 0;
    double dmin = 1e300;
    for (int i = 0; i < nx; ++i) {
        double d = row0[i] - conj[i];
        if (d < dmin) { dmin = d; ipin = i; }
    }
    double xpin = double(ipin) / nx;
    std::vector<double> fwd = peierls_barrier(sys, c, xpin, nx, 48, 16, nt, sol.alpha);
    std::vector<double> rev =
        detail::peierls_barrier_reverse(sys, c, xpin, nx, 48, 16, nt, sol.alpha);
    // the barrier sum grows quadratically with the distance to the Aubry set,
    // so the sub-level threshold must scale with the squared grid resolution
    const double aubry_tol = 5.0 * std::pow(1.0 / nx + 1.0 / nt, 2);
    double smin = 1e300;
    for (int i = 0; i < nx; ++i) smin = std::min(smin, fwd[i] + rev[i]);
    std::vector<double> out;
    for (int i = 0; i < nx; ++i)
        if (fwd[i] + rev[i] - smin < aubry_tol) out.push_back(double(i) / nx);
    if (out.empty()) throw Error(ErrorCode::EmptySet, "aubry_set_estimate: tol too tight");
    return out;
}

/// THE solution family used downstream: pinned at the Aubry-estimate point
/// nearest 0 (ties toward positive x), u(.,0) the Peierls barrier from the
/// pin, rows extended through one period.
inline WeakKamSolution pinned_solution(const SystemSpec& sys, double c, int nx, int nt) {
    std::vector<double> est = aubry_set_estimate(sys, c, nx, nt);
    double pin = est[0], best = 2.0;
    for (double x : est) {
        double d = std::min(x, 1.0 - x); // distance to 0 on the circle
        if (d < best - 1e-15 || (std::abs(d - best) <= 1e-15 && x < 0.5 && pin >= 0.5)) {
            best = d;
            pin = x;
        }
    }
    WeakKamSolution sol;
    sol.sys = sys;
    sol.c = c;
    sol.backend = Backend::continuous;
    sol.pinned = true;
    sol.pin_x = pin;
    {
        WeakKamSolution base = solve_weak_kam(sys, c, nx, nt, 1e-7, 600);
        sol.alpha = base.alpha;
        sol.residual = base.residual;
        sol.iterations = base.iterations;
    }
    std::vector<double> row0 =
        peierls_barrier(sys, c, pin, nx, 48, 16, nt, sol.alpha);
    sol.u.nx = nx;
    sol.u.nt = nt;
    detail::fill_rows(sol, row0);
    return sol;
}

struct SuperDiff {
    double p_plus = 0.0;  // right derivative
    double p_minus = 0.0; // left derivative
    bool singular = false;
};

/// One-sided x-derivatives of u at (x,t); the c offset is the caller's
/// responsibility (u is stored without the c*x part).
inline SuperDiff superdifferential(const WeakKamSolution& sol, double x, double t) {
    const int nx = sol.u.nx, nt = sol.u.nt;
    int k = int(std::lround((t - std::floor(t)) * nt)) % nt;
    double s = (x - std::floor(x)) * nx;
    int i = int(std::lround(s));
    SuperDiff d;
    if (std::abs(s - i) <= 1e-3) {
        i %= nx;
        d.p_plus = sol.p_right.at(k, i);
        d.p_minus = sol.p_left.at(k, i);
        d.singular = (d.p_minus - d.p_plus > sol.kink_threshold);
    } else {
        int j = int(s) % nx;
        d.p_plus = d.p_minus = sol.p_right.at(k, j); // interior of a linear piece
        d.singular = false;
    }
    return d;
}

/// sup over non-singular grid points of |d_t u + H(x, d_x u + c, t) - alpha|
/// with centered differences.
inline double hj_residual(const WeakKamSolution& sol) {
    const int nx = sol.u.nx, nt = sol.u.nt;
    const double dx = sol.u.dx(), dt = sol.u.dt();
    double worst = 0.0;
    for (int k = 0; k < nt; ++k) {
        for (int i = 0; i < nx; ++i) {
            if (sol.singular_at(k, i) || sol.singular_at(k, i - 1) ||
                sol.singular_at(k, i + 1) || sol.singular_at(k - 1, i) ||
                sol.singular_at(k + 1, i))
                continue;
            double ut = (sol.u.at(k + 1, i) - sol.u.at(k - 1, i)) / (2.0 * dt);
            double ux = (sol.u.at(k, i + 1) - sol.u.at(k, i - 1)) / (2.0 * dx);
            double r = std::abs(ut + sol.sys.H(i * dx, ux + sol.c, k * dt) - sol.alpha);
            worst = std::max(worst, r);
        }
    }
    return worst;
}

} // namespace twistlab
