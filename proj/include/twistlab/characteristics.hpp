#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "twistlab/weakkam.hpp"

namespace twistlab {

enum class RotationSymbol { irrational, periodic, plus, minus, unclassified };

/// Forward trajectory of the superdifferential velocity field, sampled at
/// step dtau from (x0, t0).
struct Characteristic {
    double t0 = 0.0;
    double dtau = 0.0;
    std::vector<double> x_lift;
    std::vector<std::uint8_t> singular; // flag per sample
    int desingularized = 0; // singular -> regular transitions (grid artifacts)
};

namespace detail {

/// Superdifferential at the grid node nearest (x,t): the one-sided fields are
/// stored nodewise and interpolating across a kink would average the jump away.
inline SuperDiff node_superdiff(const WeakKamSolution& sol, double x, double t) {
    const int nx = sol.u.nx, nt = sol.u.nt;
    int k = int(std::lround((t - std::floor(t)) * nt)) % nt;
    int i = int(std::lround((x - std::floor(x)) * nx)) % nx;
    SuperDiff d;
    d.p_plus = sol.p_right.at(k, i);
    d.p_minus = sol.p_left.at(k, i);
    d.singular = (d.p_minus - d.p_plus > sol.kink_threshold);
    return d;
}

} // namespace detail

/// Velocity selection: H_p at regular points, the difference quotient of H
/// across the superdifferential interval at kinks.
inline double gc_velocity(const WeakKamSolution& sol, double x, double t) {
    SuperDiff d = detail::node_superdiff(sol, x, t);
    double tm = t - std::floor(t);
    if (d.singular) {
        double den = d.p_minus - d.p_plus;
        if (std::abs(den) >= 1e-12)
            return (sol.sys.H(x, d.p_minus + sol.c, tm) -
                    sol.sys.H(x, d.p_plus + sol.c, tm)) /
                   den;
        // threshold inconsistency: fall back to the regular branch
    }
    double px = 0.5 * (d.p_plus + d.p_minus);
    return sol.sys.H_p(x, px + sol.c, tm);
}

/// Forward Euler on the right-continuous velocity field. Singular -> regular
/// transitions are counted as diagnostics, not errors (grid resolution).
inline Characteristic integrate_gc(const WeakKamSolution& sol, double x0, double t0,
                                   double T, double dtau = -1.0) {
    if (T <= 0.0) throw Error(ErrorCode::Usage, "integrate_gc: need T > 0");
    if (dtau <= 0.0) dtau = sol.u.dt() / 4.0;
    Characteristic chi;
    chi.t0 = t0;
    chi.dtau = dtau;
    const int n = int(std::ceil(T / dtau));
    chi.x_lift.reserve(n + 1);
    chi.singular.reserve(n + 1);
    double x = x0;
    bool was_singular = false;
    for (int k = 0; k <= n; ++k) {
        double t = t0 + k * dtau;
        SuperDiff d = detail::node_superdiff(sol, x, t);
        chi.x_lift.push_back(x);
        chi.singular.push_back(d.singular ? 1 : 0);
        if (was_singular && !d.singular) ++chi.desingularized;
        was_singular = d.singular;
        if (k < n) x += dtau * gc_velocity(sol, x, t);
    }
    return chi;
}

/// Backward integration, defined only from regular points (the backward
/// calibrated curve is unique there); refuses singular starts.
inline Characteristic integrate_gc_backward(const WeakKamSolution& sol, double x0,
                                            double t0, double T, double dtau = -1.0) {
    if (T <= 0.0) throw Error(ErrorCode::Usage, "integrate_gc_backward: need T > 0");
    if (dtau <= 0.0) dtau = sol.u.dt() / 4.0;
    if (detail::node_superdiff(sol, x0, t0).singular)
        throw Error(ErrorCode::SingularBackward,
                    "backward integration from a singular point is not unique");
    Characteristic chi;
    chi.t0 = t0;
    chi.dtau = -dtau;
    const int n = int(std::ceil(T / dtau));
    double x = x0;
    for (int k = 0; k <= n; ++k) {
        double t = t0 - k * dtau;
        SuperDiff d = detail::node_superdiff(sol, x, t);
        chi.x_lift.push_back(x);
        chi.singular.push_back(d.singular ? 1 : 0);
        if (d.singular) break; // stop at the first singular sample
        if (k < n) x -= dtau * gc_velocity(sol, x, t);
    }
    return chi;
}

/// Least-squares slope of x_lift over the trailing half of the trajectory.
inline double rotation_number(const Characteristic& chi, int periods) {
    double span = (double(chi.x_lift.size()) - 1.0) * std::abs(chi.dtau);
    if (span + 1e-12 < periods)
        throw Error(ErrorCode::TooShort, "rotation_number: trajectory spans " +
                                             std::to_string(span) + " periods");
    std::size_t n = chi.x_lift.size();
    std::size_t i0 = n / 2;
    double st = 0.0, sx = 0.0, stt = 0.0, stx = 0.0;
    double m = double(n - i0);
    for (std::size_t i = i0; i < n; ++i) {
        double t = double(i) * chi.dtau;
        st += t;
        sx += chi.x_lift[i];
        stt += t * t;
        stx += t * chi.x_lift[i];
    }
    return (m * stx - st * sx) / (m * stt - st * st);
}

/// Rotation-symbol refinement at a rational p/q from the trailing signs of
/// d_k = x(kq) - x((k-1)q) - p.
inline RotationSymbol classify_symbol(const Characteristic& chi, int p, int q,
                                      double tol = 1e-2) {
    double dtau = std::abs(chi.dtau);
    int per_period = int(std::lround(1.0 / dtau));
    std::size_t stride = std::size_t(per_period) * q;
    if (chi.x_lift.size() < 4 * stride + 1)
        throw Error(ErrorCode::TooShort, "classify_symbol: need >= 4 periods of q");
    std::size_t nk = (chi.x_lift.size() - 1) / stride;
    std::size_t k0 = nk / 2 + 1;
    int pos = 0, neg = 0, zero = 0;
    for (std::size_t k = k0; k <= nk; ++k) {
        double d = chi.x_lift[k * stride] - chi.x_lift[(k - 1) * stride] - p;
        if (d > tol) ++pos;
        else if (d < -tol) ++neg;
        else ++zero;
    }
    if (pos == 0 && neg == 0) return RotationSymbol::periodic;
    if (neg == 0) return RotationSymbol::plus;
    if (pos == 0) return RotationSymbol::minus;
    return RotationSymbol::unclassified;
}

struct UniquenessReport {
    double max_separation = 0.0;
    double growth_rate = 0.0; // measured exponential rate
    double gronwall_K = 0.0;  // rate bound from the solution's regularity data
    bool pass = false;
};

/// Integrates from x0 and x0 +/- delta and compares the separation growth with
/// the Gronwall bound delta * exp(K s).
inline UniquenessReport uniqueness_probe(const WeakKamSolution& sol, double x0, double t0,
                                         double delta, double T) {
    if (delta <= 0.0) throw Error(ErrorCode::Usage, "uniqueness_probe: delta > 0");
    Characteristic c0 = integrate_gc(sol, x0, t0, T);
    Characteristic cm = integrate_gc(sol, x0 - delta, t0, T);
    Characteristic cp = integrate_gc(sol, x0 + delta, t0, T);
    UniquenessReport r;
    for (std::size_t i = 0; i < c0.x_lift.size(); ++i) {
        double s = std::max(std::abs(cp.x_lift[i] - c0.x_lift[i]),
                            std::abs(c0.x_lift[i] - cm.x_lift[i]));
        r.max_separation = std::max(r.max_separation, s);
    }
    r.growth_rate = std::log(std::max(r.max_separation, delta) / delta) / T;
    // velocity field Lipschitz constant: H_pp curvature times the one-sided
    // second-derivative bound of u
    r.gronwall_K = sol.semiconcavity_C;
    r.pass = r.growth_rate <= r.gronwall_K + 0.5;
    return r;
}

} // namespace twistlab
