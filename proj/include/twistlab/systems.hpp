#ifndef TWISTLAB_SYSTEMS_HPP
#define TWISTLAB_SYSTEMS_HPP

#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"

namespace twistlab {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Zero-mean trigonometric polynomial sum_k a_k cos(2 pi k x) + b_k sin(2 pi k x).
struct TrigSeries {
    std::vector<double> cos_coeff; // index k-1 holds the k-th harmonic
    std::vector<double> sin_coeff;

    double eval(double x) const {
        double s = 0.0;
        for (std::size_t k = 0; k < cos_coeff.size(); ++k)
            s += cos_coeff[k] * std::cos(kTwoPi * double(k + 1) * x);
        for (std::size_t k = 0; k < sin_coeff.size(); ++k)
            s += sin_coeff[k] * std::sin(kTwoPi * double(k + 1) * x);
        return s;
    }

    double deriv(double x) const {
        double s = 0.0;
        for (std::size_t k = 0; k < cos_coeff.size(); ++k) {
            double w = kTwoPi * double(k + 1);
            s -= cos_coeff[k] * w * std::sin(w * x);
        }
        for (std::size_t k = 0; k < sin_coeff.size(); ++k) {
            double w = kTwoPi * double(k + 1);
            s += sin_coeff[k] * w * std::cos(w * x);
        }
        return s;
    }

    /// Primitive with zero constant term (well defined: the series has zero mean).
    double primitive(double x) const {
        double s = 0.0;
        for (std::size_t k = 0; k < cos_coeff.size(); ++k) {
            double w = kTwoPi * double(k + 1);
            s += cos_coeff[k] / w * std::sin(w * x);
        }
        for (std::size_t k = 0; k < sin_coeff.size(); ++k) {
            double w = kTwoPi * double(k + 1);
            s -= sin_coeff[k] / w * std::cos(w * x);
        }
        return s;
    }

    double max_abs(int samples = 4096) const {
        double m = 0.0;
        for (int i = 0; i < samples; ++i)
            m = std::max(m, std::abs(eval(double(i) / samples)));
        return m;
    }
};

/// A twist-map family member: generating function h on the universal cover,
/// its suspended Lagrangian/Hamiltonian pair, and the explicit map.
/// Immutable after construction; safe to share across threads.
struct SystemSpec {
    std::string name;
    double eps = 0.0;

    // generating function and its partials
    std::function<double(double, double)> h, h1, h2, h11, h12, h22;

    // suspension L(x,v,t), H(x,p,t) and the partials the solvers need
    std::function<double(double, double, double)> L, L_v, L_vv;
    std::function<double(double, double, double)> H, H_p, H_pp;

    // explicit lifted map (x,p) -> (x',p') and its Jacobian (row-major 2x2)
    std::function<std::array<double, 2>(double, double)> map;
    std::function<std::array<double, 4>(double, double)> map_jac;

    double v_max = 2.0;
};

/// Velocity window used by all minimizations: 1 + |c|_max + 4 sqrt(2 max|potential|).
inline double default_v_max(double eps, double max_abs_V, double max_W, double c_max = 1.5) {
    return 1.0 + c_max + 4.0 * std::sqrt(2.0 * eps * max_abs_V * max_W);
}

/// Kicked family f_eps(x,p) = (x + p + eps V(x), p + eps V(x)) together with the
/// smooth time-periodic suspension L = v^2/2 + eps Q(x) W(t), where Q' = V and
/// W(t) = 1 + cos(2 pi t) has unit mean: averaging the suspension potential over
/// one period recovers the potential of the generating function, so both
/// backends describe the same family. V, W given as trig series (V zero-mean;
/// W = 1 + series).
inline SystemSpec make_system(const std::string& name, double eps,
                              TrigSeries V, TrigSeries W_bump) {
    SystemSpec s;
    s.name = name;
    s.eps = eps;

    auto Vf = [V](double x) { return V.eval(x); };
    auto Vd = [V](double x) { return V.deriv(x); };
    auto Q = [V](double x) { return V.primitive(x); }; // Q' = V
    auto Wf = [W_bump](double t) { return 1.0 + W_bump.eval(t); };

    // h(x,x') = (x'-x)^2/2 + eps Q(x) generates the map: p = -d1 h, p' = d2 h.
    s.h = [eps, Q](double x, double xp) {
        double d = xp - x;
        return 0.5 * d * d + eps * Q(x);
    };
    s.h1 = [eps, Vf](double x, double xp) { return -(xp - x) + eps * Vf(x); };
    s.h2 = [](double x, double xp) { return xp - x; };
    s.h11 = [eps, Vd](double x, double) { return 1.0 + eps * Vd(x); };
    s.h12 = [](double, double) { return -1.0; };
    s.h22 = [](double, double) { return 1.0; };

    s.L = [eps, Q, Wf](double x, double v, double t) {
        return 0.5 * v * v + eps * Q(x) * Wf(t);
    };
    s.L_v = [](double, double v, double) { return v; };
    s.L_vv = [](double, double, double) { return 1.0; };
    s.H = [eps, Q, Wf](double x, double p, double t) {
        return 0.5 * p * p - eps * Q(x) * Wf(t);
    };
    s.H_p = [](double, double p, double) { return p; };
    s.H_pp = [](double, double, double) { return 1.0; };

    s.map = [eps, Vf](double x, double p) {
        double pn = p + eps * Vf(x);
        return std::array<double, 2>{x + pn, pn};
    };
    s.map_jac = [eps, Vd](double x, double) {
        double a = eps * Vd(x);
        // d(x')/dx = 1 + a, d(x')/dp = 1, d(p')/dx = a, d(p')/dp = 1
        return std::array<double, 4>{1.0 + a, 1.0, a, 1.0};
    };

    double maxQ = 0.0;
    for (int i = 0; i < 4096; ++i)
        maxQ = std::max(maxQ, std::abs(V.primitive(double(i) / 4096)));
    double maxW = 1.0 + W_bump.max_abs();
    s.v_max = default_v_max(eps, maxQ, maxW);
    if (eps == 0.0) s.v_max = 2.5;
    return s;
}

/// The standard-map member: V(x) = cos(2 pi x), W(t) = 1 + cos(2 pi t).
inline SystemSpec standard_map_family(double eps) {
    TrigSeries V;
    V.cos_coeff = {1.0};
    TrigSeries W;
    W.cos_coeff = {1.0};
    return make_system("standard", eps, V, W);
}

struct ValidationReport {
    double min_Lvv = 0.0;
    double min_Hpp = 0.0;
    double min_twist = 0.0;      // min of -d^2 h / dx dx'
    double max_legendre = 0.0;   // max |L + H - pv| at dual pairs
    double max_periodicity = 0.0;
    bool pass = false;
};

/// Samples the standing assumptions on a grid; throws ASSUMPTION_VIOLATED when
/// a margin is nonpositive.
inline ValidationReport validate_standing_assumptions(const SystemSpec& sys, int grid_density,
                                                      double legendre_tol = 1e-8) {
    if (grid_density < 16) throw Error(ErrorCode::Usage, "grid_density must be >= 16");
    ValidationReport r;
    r.min_Lvv = 1e300;
    r.min_Hpp = 1e300;
    r.min_twist = 1e300;
    const int n = grid_density;
    for (int i = 0; i < n; ++i) {
        double x = double(i) / n;
        for (int j = 0; j < n; ++j) {
            double y = double(j) / n; // second grid axis: x', v (via window), or t
            double v = sys.v_max * (2.0 * y - 1.0);
            for (int k = 0; k < 4; ++k) {
                double t = double(k) / 4;
                r.min_Lvv = std::min(r.min_Lvv, sys.L_vv(x, v, t));
                r.min_Hpp = std::min(r.min_Hpp, sys.H_pp(x, v, t));
                double p = sys.L_v(x, v, t);
                double res = std::abs(sys.L(x, v, t) + sys.H(x, p, t) - p * v);
                r.max_legendre = std::max(r.max_legendre, res);
            }
            r.min_twist = std::min(r.min_twist, -sys.h12(x, x + 2.0 * y - 1.0));
            r.max_periodicity = std::max(
                r.max_periodicity, std::abs(sys.h(x + 1.0, y + 1.0) - sys.h(x, y)));
        }
    }
    r.pass = r.min_Lvv > 0.0 && r.min_Hpp > 0.0 && r.min_twist > 0.0 &&
             r.max_legendre < legendre_tol && r.max_periodicity < 1e-10;
    if (r.min_Lvv <= 0.0 || r.min_Hpp <= 0.0 || r.min_twist <= 0.0)
        throw Error(ErrorCode::AssumptionViolated,
                    "nonpositive convexity/twist margin for system " + sys.name);
    return r;
}

} // namespace twistlab

#endif
