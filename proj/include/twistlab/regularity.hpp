#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "twistlab/weakkam.hpp"

namespace twistlab {

/// u(.,0) + c x - u(0,0) on the lifted deck [0,1]; nx+1 values, first exactly 0.
inline std::vector<double> rectified_solution(const WeakKamSolution& sol) {
    const int nx = sol.u.nx;
    std::vector<double> out(nx + 1);
    double u00 = sol.u.at(0, 0);
    for (int i = 0; i < nx; ++i) out[i] = sol.u.at(0, i) + sol.c * (double(i) / nx) - u00;
    out[nx] = sol.c; // periodic wrap of u plus the linear part at x = 1
    return out;
}

struct SigmaEntry {
    double c = 0.0;
    double sigma = 0.0;
    double lipschitz_C = 0.0; // Lipschitz constant of the rectified solution
};

/// Monotone parametrization sigma(c) with piecewise-linear inversion.
struct SigmaTable {
    std::vector<SigmaEntry> entries; // sorted by c, strictly increasing sigma

    double c_of_sigma(double sigma) const {
        if (entries.size() < 2) throw Error(ErrorCode::Usage, "table too small");
        if (sigma <= entries.front().sigma) return entries.front().c;
        if (sigma >= entries.back().sigma) return entries.back().c;
        for (std::size_t i = 1; i < entries.size(); ++i) {
            if (sigma <= entries[i].sigma) {
                double t = (sigma - entries[i - 1].sigma) /
                           (entries[i].sigma - entries[i - 1].sigma);
                return entries[i - 1].c + t * (entries[i].c - entries[i - 1].c);
            }
        }
        return entries.back().c;
    }
};

/// Trapezoid quadrature of the rectified difference against the c = 0 member.
inline SigmaTable sigma_of_c(const std::vector<WeakKamSolution>& sweep) {
    if (sweep.size() < 2) throw Error(ErrorCode::Usage, "sigma_of_c: need >= 2 solutions");
    const int nx = sweep.front().u.nx;
    int i_zero = -1;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        if (sweep[i].u.nx != nx) throw Error(ErrorCode::Usage, "sigma_of_c: mixed grids");
        if (i > 0 && sweep[i].c <= sweep[i - 1].c)
            throw Error(ErrorCode::Usage, "sigma_of_c: sweep must be sorted in c");
        if (std::abs(sweep[i].c) < 1e-14) i_zero = int(i);
    }
    if (i_zero < 0) throw Error(ErrorCode::Usage, "sigma_of_c: sweep must contain c = 0");

    std::vector<double> base = rectified_solution(sweep[std::size_t(i_zero)]);
    SigmaTable table;
    for (const auto& sol : sweep) {
        std::vector<double> u = rectified_solution(sol);
        double s = 0.0;
        for (int i = 0; i < nx; ++i)
            s += 0.5 * ((u[i] - base[i]) + (u[i + 1] - base[i + 1])) / nx;
        table.entries.push_back({sol.c, s, sol.lipschitz_K + std::abs(sol.c)});
    }
    const double quad_tol = 1e-6;
    for (std::size_t i = 1; i < table.entries.size(); ++i)
        if (table.entries[i].sigma <= table.entries[i - 1].sigma - quad_tol)
            throw Error(ErrorCode::MonotonicityViolation,
                        "sigma decreases between c = " +
                            std::to_string(table.entries[i - 1].c) + " and " +
                            std::to_string(table.entries[i].c));
    return table;
}

struct HolderReport {
    double max_ratio = 0.0;
    int pairs = 0;
    double grid_slack = 0.0;
    bool pass = false;
};

/// max over sampled pairs of ||u1 - u2||_inf / sqrt(2 (C1 + C2) |sigma1 - sigma2|).
inline HolderReport holder_check(const SigmaTable& table,
                                 const std::vector<WeakKamSolution>& sweep, int pairs) {
    if (pairs < 10) throw Error(ErrorCode::Usage, "holder_check: pairs >= 10");
    if (table.entries.size() != sweep.size())
        throw Error(ErrorCode::Usage, "holder_check: table/sweep mismatch");
    const int nx = sweep.front().u.nx;
    std::vector<std::vector<double>> rect;
    rect.reserve(sweep.size());
    for (const auto& sol : sweep) rect.push_back(rectified_solution(sol));

    HolderReport rep;
    rep.grid_slack = 10.0 / nx;
    std::size_t n = sweep.size();
    if (n * (n - 1) / 2 < std::size_t(pairs))
        throw Error(ErrorCode::Usage, "holder_check: sweep too small for requested pairs");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double ds = std::abs(table.entries[i].sigma - table.entries[j].sigma);
            if (ds < 1e-14) continue;
            double diff = 0.0;
            for (int k = 0; k <= nx; ++k)
                diff = std::max(diff, std::abs(rect[i][k] - rect[j][k]));
            double bound = std::sqrt(
                2.0 * (table.entries[i].lipschitz_C + table.entries[j].lipschitz_C) * ds);
            rep.max_ratio = std::max(rep.max_ratio, diff / bound);
            ++rep.pairs;
        }
    }
    rep.pass = rep.max_ratio <= 1.0 + rep.grid_slack;
    return rep;
}

struct OrderingReport {
    double min_gap = 0.0;
    bool pass = false;
};

/// Corollary check: with alpha'(c) > alpha'(c'), the full momentum graphs are
/// strictly ordered on the section.
inline OrderingReport ordering_check(const WeakKamSolution& sol_c,
                                     const WeakKamSolution& sol_cp, double aprime_c,
                                     double aprime_cp) {
    if (aprime_c - aprime_cp < 1e-3)
        throw Error(ErrorCode::AlphaPrimeTie,
                    "ordering_check: alpha' margins indistinguishable");
    if (sol_c.u.nx != sol_cp.u.nx) throw Error(ErrorCode::Usage, "mixed grids");
    const int nx = sol_c.u.nx;
    OrderingReport rep;
    rep.min_gap = 1e300;
    for (int i = 0; i < nx; ++i) {
        double gap = (sol_c.p_right.at(0, i) + sol_c.c) -
                     (sol_cp.p_left.at(0, i) + sol_cp.c);
        rep.min_gap = std::min(rep.min_gap, gap);
    }
    rep.pass = rep.min_gap >= -5.0 / nx;
    return rep;
}

} // namespace twistlab
