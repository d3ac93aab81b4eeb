#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <numbers>
#include <optional>
#include <vector>

#include "concentra/distance.hpp"
#include "concentra/errors.hpp"
#include "concentra/functionals.hpp"
#include "concentra/grid.hpp"

// Perimeter growth sampling with a linear (Steiner) fit, and the sharp
// constants c(N) of the endpoint bound  integral_0^1 p >= c(N) p(0)  for
// nonnegative polynomials, found by exact integer minimization.

namespace concentra {

struct SteinerFit {
    std::vector<double> s_samples;
    std::vector<double> perimeters;
    std::array<double, 2> coefficients{0.0, 0.0};  // P(E+B_s) ~ a0 + a1 s
    double relative_rms_residual = 0.0;
    int degree_used = 1;
};

// Perimeters of the s-grown set at `count` equispaced radii in
// [s_max/count, s_max], with a degree-1 least-squares fit.  The residual is
// normalized by the standard deviation of the sampled perimeters (NRMSE), so
// it measures departure from linearity independent of the perimeter's scale
// or offset.  A large residual is the practical signal that the growth is
// not polynomial (merging parts, vanishing reach); nothing else tries to
// detect that.
inline SteinerFit sample_growth(const GridSet& g, double s_max, int count) {
    if (count < 4) throw BadParametersError("sample_growth: need at least 4 samples");
    if (!(s_max > 0.0)) throw BadParametersError("sample_growth: s_max must be positive");
    if (g.empty()) throw EmptySetError("sample_growth of empty set");

    SteinerFit fit;
    for (int i = 1; i <= count; ++i) {
        const double s = s_max * i / count;
        fit.s_samples.push_back(s);
        fit.perimeters.push_back(perimeter(dilate(g, s)));
    }
    const int n = count;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sx += fit.s_samples[i];
        sy += fit.perimeters[i];
        sxx += fit.s_samples[i] * fit.s_samples[i];
        sxy += fit.s_samples[i] * fit.perimeters[i];
    }
    const double det = n * sxx - sx * sx;
    fit.coefficients[1] = (n * sxy - sx * sy) / det;
    fit.coefficients[0] = (sy - fit.coefficients[1] * sx) / n;
    double ss = 0.0, sv = 0.0;
    for (int i = 0; i < n; ++i) {
        const double resid = fit.perimeters[i] - fit.coefficients[0] - fit.coefficients[1] * fit.s_samples[i];
        ss += resid * resid;
        sv += (fit.perimeters[i] - sy / n) * (fit.perimeters[i] - sy / n);
    }
    fit.relative_rms_residual = sv > 0.0 ? std::sqrt(ss / sv) : 0.0;
    return fit;
}

namespace detail {

// Everything below works on roots scaled to integers in [0, q]: with
// b_i = beta_i / q the objective integral_0^1 prod|x-b_i| dx equals
// F(beta) / q^(N+1) where F is a polynomial integral with rational
// coefficients whose denominators divide lcm(1..7) = 420.  420*F is an
// exact __int128, so candidate minima compare without rounding.
inline constexpr long long kPolyScale = 20000;  // final descent stride = 1

inline __int128 scaled_objective(const std::vector<long long>& roots) {
    const int n = static_cast<int>(roots.size());
    std::array<long long, 6> beta{};
    std::copy(roots.begin(), roots.end(), beta.begin());
    std::sort(beta.begin(), beta.begin() + n);
    // monic expansion of prod (t - beta_i), multiplying one root in at a time
    std::array<__int128, 8> coef{};
    coef[0] = 1;
    int deg = 0;
    for (int i = 0; i < n; ++i) {
        coef[deg + 1] = 0;
        for (int k = deg + 1; k >= 1; --k)
            coef[k] = coef[k - 1] - static_cast<__int128>(beta[i]) * coef[k];
        coef[0] = -static_cast<__int128>(beta[i]) * coef[0];
        ++deg;
    }
    // 420 * antiderivative at t
    auto anti = [&](long long t) {
        __int128 acc = 0;
        __int128 power = t;  // t^(k+1)
        for (int k = 0; k <= deg; ++k) {
            acc += coef[k] * (420 / (k + 1)) * power;
            power *= t;
        }
        return acc;
    };
    __int128 total = 0;
    long long lo = 0;
    for (int j = 0; j <= n; ++j) {
        const long long hi = (j < n) ? beta[j] : kPolyScale;
        if (hi > lo) {
            __int128 piece = anti(hi) - anti(lo);
            if ((n - j) % 2 != 0) piece = -piece;  // sign of the product on (lo, hi)
            total += piece;
        }
        if (j < n) lo = beta[j];
    }
    return total;
}

}  // namespace detail

struct PolyLemResult {
    int N = 0;
    double c_value = 1.0;
    std::vector<double> minimizer;  // sorted ascending
    long long evaluations = 0;
    int grid_steps = 0;
};

// Minimizes integral_0^1 prod|x - b_i| dx over b in [0,1]^N: coarse sorted
// enumeration on a per-axis grid, then coordinate descent down to stride
// 1/20000, all candidates compared by exact integer objectives.
inline PolyLemResult polylem_constant(int N, int grid_steps) {
    if (N < 0) throw BadParametersError("polylem_constant: negative degree");
    if (N > 6) throw DegreeTooLargeError("polylem_constant: degree above 6 (grid blow-up)");
    if (grid_steps < 1 || detail::kPolyScale % grid_steps != 0)
        throw BadParametersError("polylem_constant: grid_steps must divide 20000");

    PolyLemResult res;
    res.N = N;
    res.grid_steps = grid_steps;

    std::vector<long long> beta(N, 0), best(N, 0);
    __int128 best_f = 0;
    bool have = false;
    const long long step = detail::kPolyScale / grid_steps;

    // sorted tuples 0 <= beta_1 <= ... <= beta_N <= q
    auto enumerate = [&](auto&& self, int pos, long long from) -> void {
        if (pos == N) {
            const __int128 f = detail::scaled_objective(beta);
            ++res.evaluations;
            if (!have || f < best_f) {
                have = true;
                best_f = f;
                best = beta;
            }
            return;
        }
        for (long long v = from; v <= detail::kPolyScale; v += step) {
            beta[pos] = v;
            self(self, pos + 1, v);
        }
    };
    enumerate(enumerate, 0, 0);

    for (long long stride = step / 5 > 0 ? step / 5 : 1; ; stride = std::max<long long>(1, stride / 5)) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (int i = 0; i < N; ++i)
                for (long long delta : {-2 * stride, -stride, stride, 2 * stride}) {
                    const long long v = best[i] + delta;
                    if (v < 0 || v > detail::kPolyScale) continue;
                    std::vector<long long> cand = best;
                    cand[i] = v;
                    const __int128 f = detail::scaled_objective(cand);
                    ++res.evaluations;
                    if (f < best_f) {
                        best_f = f;
                        best = cand;
                        improved = true;
                    }
                }
        }
        if (stride == 1) break;
    }

    std::sort(best.begin(), best.end());
    for (long long v : best) res.minimizer.push_back(static_cast<double>(v) / detail::kPolyScale);
    long double denom = 420.0L;
    for (int k = 0; k <= N; ++k) denom *= static_cast<long double>(detail::kPolyScale);
    res.c_value = static_cast<double>(static_cast<long double>(best_f) / denom);
    return res;
}

inline PolyLemResult polylem_constant(int N) {
    return polylem_constant(N, N <= 3 ? 200 : (N == 4 ? 100 : 40));
}

namespace detail {

// c(N) for the default grid, memoized: check_polylem may be called in bulk.
inline double polylem_cached(int N) {
    if (N < 0) throw BadParametersError("polylem_constant: negative degree");
    if (N > 6) throw DegreeTooLargeError("polylem_constant: degree above 6 (grid blow-up)");
    static std::array<double, 7> cache{};
    static std::array<bool, 7> ready{};
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    if (!ready[N]) {
        cache[N] = polylem_constant(N).c_value;
        ready[N] = true;
    }
    return cache[N];
}

inline int poly_degree(const std::vector<double>& p) {
    int deg = 0;
    for (std::size_t k = 0; k < p.size(); ++k)
        if (p[k] != 0.0) deg = static_cast<int>(k);
    return deg;
}

inline double poly_eval(const std::vector<double>& p, double x) {
    double acc = 0.0;
    for (std::size_t k = p.size(); k-- > 0;) acc = acc * x + p[k];
    return acc;
}

}  // namespace detail

// Endpoint bound for a nonnegative polynomial on [0,1]: checks
// integral_0^1 p >= c(N_bound) p(0) with the integral from the coefficient
// formula (no quadrature).  Nonnegativity is screened on a 10^4-point grid;
// intervals whose endpoints come near zero are re-scanned finely so a thin
// dip between grid points cannot slip through.
inline bool check_polylem(const std::vector<double>& p, int N_bound) {
    const int deg = detail::poly_degree(p);
    if (deg > N_bound) throw BadParametersError("check_polylem: degree exceeds the bound");
    double scale = 0.0;
    for (double a : p) scale = std::max(scale, std::abs(a));
    if (scale == 0.0) return true;  // zero polynomial
    const int m = 10000;
    const double drop = -1e-12 * scale;
    const double near = 1e-3 * scale;
    for (int i = 0; i <= m; ++i) {
        const double v = detail::poly_eval(p, static_cast<double>(i) / m);
        if (v < drop) throw NotNonnegativeError("check_polylem: negative sample");
        if (v < near && i < m) {
            for (int j = 1; j < 100; ++j) {
                const double x = (i + j / 100.0) / m;
                if (detail::poly_eval(p, x) < drop)
                    throw NotNonnegativeError("check_polylem: negative sample");
            }
        }
    }
    double integral = 0.0;
    for (std::size_t k = p.size(); k-- > 0;) integral += p[k] / static_cast<double>(k + 1);
    return integral >= detail::polylem_cached(N_bound) * p[0] - 1e-12 * scale;
}

struct LargeRReport {
    double alpha = 0.0;
    double lhs_area = 0.0;     // area(dilate(E,1)) - |B_2|
    double rhs_area = 0.0;     // alpha^2
    double lhs_deficit = 0.0;  // delta_r
    double rhs_deficit = 0.0;  // (r/(1+r)) alpha^2
    std::optional<double> area_ratio;
    std::optional<double> deficit_ratio;
};

// Both links of the large-radius chain evaluated on a set normalized to
// r_E = 1: the unit-growth area gain against alpha^2, and the deficit at r
// against (r/(1+r)) alpha^2.  Ratios are suppressed when alpha sits at the
// center-search noise floor.
inline LargeRReport large_r_chain(const GridSet& g, double r) {
    const double re = equivalent_radius(g);
    if (std::abs(re - 1.0) > 0.02)
        throw NotNormalizedError("large_r_chain: set must be scaled to unit equivalent radius");
    if (!(r >= 2.0)) throw BadParametersError("large_r_chain: r must be at least 2");

    LargeRReport rep;
    rep.alpha = fraenkel_asymmetry(g).alpha;
    rep.lhs_area = area(dilate(g, 1.0)) - 4.0 * std::numbers::pi;
    rep.rhs_area = rep.alpha * rep.alpha;
    rep.lhs_deficit = concentration_deficit(g, r);
    rep.rhs_deficit = r / (1.0 + r) * rep.alpha * rep.alpha;
    if (rep.alpha > 10.0 * g.h()) {
        rep.area_ratio = rep.lhs_area / rep.rhs_area;
        rep.deficit_ratio = rep.lhs_deficit / rep.rhs_deficit;
    }
    return rep;
}

}  // namespace concentra
