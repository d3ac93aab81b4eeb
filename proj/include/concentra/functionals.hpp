#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include <json.hpp>

#include "concentra/boundary.hpp"
#include "concentra/distance.hpp"
#include "concentra/errors.hpp"
#include "concentra/grid.hpp"

// Scalar functionals of a grid set: equivalent radius, concentration deficit,
// Fraenkel asymmetry (deterministic coarse-to-fine center search),
// isoperimetric deficit, perimeter gap, and the oscillation indices.

namespace concentra {

inline double equivalent_radius(const GridSet& g) {
    const double a = area(g);
    if (a <= 0.0) throw EmptySetError("equivalent_radius of empty set");
    return std::sqrt(a / std::numbers::pi);
}

// Discretization slack for deficit-like quantities at pitch h: 3 h P / A.
// Deficits of an ideal ball land within this of zero, and ratio estimates
// divide by a deficit only when it clears a multiple of this floor.
inline double discretization_tolerance(const GridSet& g) {
    return 3.0 * g.h() * perimeter(g) / area(g);
}

inline double concentration_deficit(const GridSet& g, double r) {
    if (!(r > 0.0)) throw BadParametersError("concentration_deficit: r must be positive");
    const double re = equivalent_radius(g);
    const double grown = area(dilate(g, r));
    const double ball = std::numbers::pi * (re + r) * (re + r);
    return std::max(r / re, re / r) * (grown / ball - 1.0);
}

inline double iso_deficit(const GridSet& g) {
    const double a = area(g);
    if (a <= 0.0) throw EmptySetError("iso_deficit of empty set");
    return perimeter(g) / (2.0 * std::sqrt(std::numbers::pi * a)) - 1.0;
}

// Perimeter excess of the s-grown set over the equal-area ball grown by s.
inline double perimeter_gap(const GridSet& g, double s) {
    if (!(s >= 0.0)) throw BadParametersError("perimeter_gap: negative radius");
    const double re = equivalent_radius(g);
    const double p = s == 0.0 ? perimeter(g) : perimeter(dilate(g, s));
    return p - 2.0 * std::numbers::pi * (re + s);
}

namespace detail {

// Per-row prefix sums of occupancy.  One overlap count costs O(rows of the
// ball window) instead of O(cells); the column windows are settled by
// disc_row_window, so counts agree exactly with ball_overlap_area.
class OverlapCounter {
  public:
    explicit OverlapCounter(const GridSet& g)
        : g_(&g), pref_(static_cast<std::size_t>(g.nx() + 1) * g.ny()) {
        for (int iy = 0; iy < g.ny(); ++iy) {
            const std::uint8_t* r = g.row(iy);
            std::int32_t* p = pref_.data() + static_cast<std::size_t>(iy) * (g.nx() + 1);
            p[0] = 0;
            for (int ix = 0; ix < g.nx(); ++ix) p[ix + 1] = p[ix] + r[ix];
            total_ += p[g.nx()];
        }
    }

    long long total() const { return total_; }

    long long count(double cx, double cy, double radius) const {
        const GridSet& g = *g_;
        const int j0 = std::max(
            0, static_cast<int>(std::floor((cy - radius - g.origin_y()) / g.h())) - 1);
        const int j1 = std::min(
            g.ny() - 1, static_cast<int>(std::ceil((cy + radius - g.origin_y()) / g.h())) + 1);
        long long n = 0;
        for (int iy = j0; iy <= j1; ++iy) {
            int lo, hi;
            if (!disc_row_window(g, iy, cx, cy, radius, lo, hi)) continue;
            const std::int32_t* p = pref_.data() + static_cast<std::size_t>(iy) * (g.nx() + 1);
            n += p[hi + 1] - p[lo];
        }
        return n;
    }

  private:
    const GridSet* g_;
    std::vector<std::int32_t> pref_;
    long long total_ = 0;
};

}  // namespace detail

struct AsymmetryTrace {
    long long evaluations = 0;
    double coarse_stride = 0.0;
};

struct AsymmetryResult {
    double alpha = 0.0;
    Point2 center{0.0, 0.0};
    AsymmetryTrace trace;
};

// Normalized best-placed equal-area-ball symmetric difference.  The center
// search is coarse-to-fine on the cell-center lattice: centroid, then a
// coarse scan at stride max(8h, r_E/20) over the bounding box inflated by
// r_E, then every lattice point in the 3x3 block of coarse cells around the
// best (half-width 1.5 strides, wide enough that a flat optimum cannot hide
// its lexicographic extreme outside the window).  All candidates are
// compared by exact cell counts with ties broken toward the smallest (x, y),
// so reruns are bit-identical.
inline AsymmetryResult fraenkel_asymmetry(const GridSet& g) {
    const double a = area(g);
    if (a <= 0.0) throw EmptySetError("fraenkel_asymmetry of empty set");
    const double re = std::sqrt(a / std::numbers::pi);
    const double h = g.h();
    detail::OverlapCounter overlap(g);
    const long long total = overlap.total();

    AsymmetryResult res;
    long long best = -1;
    int bx = 0, by = 0;
    auto consider = [&](int ix, int iy) {
        const long long n = overlap.count(g.cell_x(ix), g.cell_y(iy), re);
        ++res.trace.evaluations;
        if (n > best || (n == best && (ix < bx || (ix == bx && iy < by)))) {
            best = n;
            bx = ix;
            by = iy;
        }
    };

    const Point2 c = centroid(g);
    consider(g.index_x(c.x), g.index_y(c.y));

    int ixmin = g.nx(), ixmax = -1, iymin = g.ny(), iymax = -1;
    for (int iy = 0; iy < g.ny(); ++iy) {
        const std::uint8_t* r = g.row(iy);
        for (int ix = 0; ix < g.nx(); ++ix)
            if (r[ix]) {
                ixmin = std::min(ixmin, ix);
                ixmax = std::max(ixmax, ix);
                iymin = std::min(iymin, iy);
                iymax = std::max(iymax, iy);
            }
    }
    const int ks = std::max(8, static_cast<int>(std::llround(re / (20.0 * h))));
    const int inflate = static_cast<int>(std::ceil(re / h));
    res.trace.coarse_stride = ks * h;
    for (int iy = iymin - inflate; iy <= iymax + inflate; iy += ks)
        for (int ix = ixmin - inflate; ix <= ixmax + inflate; ix += ks) consider(ix, iy);

    const int half = (3 * ks + 1) / 2;
    const int cx2 = bx, cy2 = by;
    for (int iy = cy2 - half; iy <= cy2 + half; ++iy)
        for (int ix = cx2 - half; ix <= cx2 + half; ++ix)
            if (ix != cx2 || iy != cy2) consider(ix, iy);

    res.alpha = 2.0 * static_cast<double>(total - best) / static_cast<double>(total);
    res.center = {g.cell_x(bx), g.cell_y(by)};
    return res;
}

namespace detail {

struct BoundarySegments {
    std::vector<Point2> mid;
    std::vector<Point2> nu;
    std::vector<double> len;
    double inv_sqrt_area = 0.0;
};

// Segment normals are taken from the chord spanning `window` vertices on
// each side: single-segment directions of a traced curve carry a few degrees
// of lattice jitter even after smoothing, while a ~9h baseline averages it
// away at negligible curvature cost.
inline BoundarySegments collect_segments(const BoundaryCurve& c, double set_area,
                                         int window = 6) {
    BoundarySegments s;
    s.inv_sqrt_area = 1.0 / std::sqrt(set_area);
    for (const auto& loop : c.loops) {
        const int n = static_cast<int>(loop.size());
        if (n < 2) continue;
        const int k = std::min(window, (n - 2) / 2);
        for (int i = 0; i < n; ++i) {
            const double len = segment_length(loop, i);
            if (len <= 0.0) continue;
            const Point2& a = loop[(i - k % n + n) % n];
            const Point2& b = loop[(i + 1 + k) % n];
            const double dx = b.x - a.x, dy = b.y - a.y;
            const double chord = std::hypot(dx, dy);
            s.mid.push_back(segment_midpoint(loop, i));
            s.nu.push_back(chord > 0.0 ? Point2{dy / chord, -dx / chord}
                                       : segment_normal(loop, i));
            s.len.push_back(len);
        }
    }
    return s;
}

// Length-weighted L2 gap between the outer normal and the radial direction
// about x, normalized by sqrt(area).  Centers closer than `guard` to a
// segment midpoint are rejected (the radial direction degenerates there).
inline double oscillation_objective(const BoundarySegments& s, Point2 x, double guard) {
    const double g2 = guard * guard;
    double acc = 0.0;
    for (std::size_t i = 0; i < s.len.size(); ++i) {
        const double dx = s.mid[i].x - x.x;
        const double dy = s.mid[i].y - x.y;
        const double d2 = dx * dx + dy * dy;
        if (d2 < g2) return std::numeric_limits<double>::infinity();
        const double inv = 1.0 / std::sqrt(d2);
        const double ex = s.nu[i].x - dx * inv;
        const double ey = s.nu[i].y - dy * inv;
        acc += (ex * ex + ey * ey) * s.len[i];
    }
    return acc * s.inv_sqrt_area;
}

struct SimplexOutcome {
    Point2 x{0.0, 0.0};
    double f = std::numeric_limits<double>::infinity();
    int iterations = 0;
};

// Plain reflect/expand/contract/shrink simplex descent in the plane.
template <class F>
inline SimplexOutcome nelder_mead(F&& f, Point2 seed, double diameter, double tol, int max_iter) {
    std::array<Point2, 3> v{seed, Point2{seed.x + diameter, seed.y},
                            Point2{seed.x, seed.y + diameter}};
    std::array<double, 3> fv{f(v[0]), f(v[1]), f(v[2])};
    auto order = [&] {
        if (fv[1] < fv[0]) {
            std::swap(fv[0], fv[1]);
            std::swap(v[0], v[1]);
        }
        if (fv[2] < fv[1]) {
            std::swap(fv[1], fv[2]);
            std::swap(v[1], v[2]);
        }
        if (fv[1] < fv[0]) {
            std::swap(fv[0], fv[1]);
            std::swap(v[0], v[1]);
        }
    };
    auto dist = [](const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); };
    int it = 0;
    for (; it < max_iter; ++it) {
        order();
        const double diam =
            std::max({dist(v[0], v[1]), dist(v[0], v[2]), dist(v[1], v[2])});
        if (diam < tol) break;
        const Point2 c{0.5 * (v[0].x + v[1].x), 0.5 * (v[0].y + v[1].y)};
        const Point2 dir{c.x - v[2].x, c.y - v[2].y};
        const Point2 xr{c.x + dir.x, c.y + dir.y};
        const double fr = f(xr);
        if (fr < fv[0]) {
            const Point2 xe{c.x + 2.0 * dir.x, c.y + 2.0 * dir.y};
            const double fe = f(xe);
            if (fe < fr) {
                v[2] = xe;
                fv[2] = fe;
            } else {
                v[2] = xr;
                fv[2] = fr;
            }
        } else if (fr < fv[1]) {
            v[2] = xr;
            fv[2] = fr;
        } else {
            const bool outside = fr < fv[2];
            const Point2 xc{c.x + (outside ? 0.5 : -0.5) * dir.x,
                            c.y + (outside ? 0.5 : -0.5) * dir.y};
            const double fc = f(xc);
            if (outside ? fc <= fr : fc < fv[2]) {
                v[2] = xc;
                fv[2] = fc;
            } else {
                for (int k = 1; k < 3; ++k) {
                    v[k] = {0.5 * (v[0].x + v[k].x), 0.5 * (v[0].y + v[k].y)};
                    fv[k] = f(v[k]);
                }
            }
        }
    }
    order();
    return {v[0], fv[0], it};
}

}  // namespace detail

struct OscillationResult {
    double beta = 0.0;
    double beta_star = 0.0;
    Point2 center{0.0, 0.0};  // minimizer of the combined objective
    int beta_iterations = 0;
    int beta_star_iterations = 0;
};

// L2 deviation of the boundary normal from the radial field about the best
// center (beta), and the same plus the squared ball-difference term at one
// shared center (beta_star).  Both are minimized by simplex descent seeded
// at the asymmetry center and at the centroid; beta is clamped so the
// reported pair always satisfies beta <= beta_star.
inline OscillationResult oscillation_index(const GridSet& g, Point2 alpha_seed) {
    const double a = area(g);
    if (a <= 0.0) throw EmptySetError("oscillation_index of empty set");
    const double re = std::sqrt(a / std::numbers::pi);
    const auto segs = detail::collect_segments(smoothed(extract_boundary(g), 3), a);
    detail::OverlapCounter overlap(g);
    const double total = static_cast<double>(overlap.total());

    auto beta_obj = [&](Point2 x) { return detail::oscillation_objective(segs, x, g.h()); };
    auto star_obj = [&](Point2 x) {
        const double b = beta_obj(x);
        if (!std::isfinite(b)) return b;
        const double ad = 2.0 * (total - static_cast<double>(overlap.count(x.x, x.y, re))) / total;
        return b + ad * ad;
    };

    const std::array<Point2, 2> seeds{alpha_seed, centroid(g)};
    const double diameter = 0.25 * re;
    const double tol = 1e-3 * re;

    OscillationResult res;
    detail::SimplexOutcome bb, bs;
    for (const Point2& s : seeds) {
        const auto ob = detail::nelder_mead(beta_obj, s, diameter, tol, 200);
        res.beta_iterations += ob.iterations;
        if (ob.f < bb.f) bb = ob;
        const auto os = detail::nelder_mead(star_obj, s, diameter, tol, 200);
        res.beta_star_iterations += os.iterations;
        if (os.f < bs.f) bs = os;
    }
    if (!std::isfinite(bb.f) || !std::isfinite(bs.f))
        throw CenterOnBoundaryError("oscillation_index: no center clears the boundary guard");

    const double beta2 = std::min(bb.f, beta_obj(bs.x));
    res.beta = std::sqrt(std::max(0.0, beta2));
    res.beta_star = std::sqrt(std::max(0.0, bs.f));
    res.center = bs.x;
    return res;
}

inline OscillationResult oscillation_index(const GridSet& g) {
    return oscillation_index(g, fraenkel_asymmetry(g).center);
}

struct SearchTrace {
    long long alpha_evaluations = 0;
    double alpha_coarse_stride = 0.0;
    int beta_iterations = 0;
    int beta_star_iterations = 0;
    double tol = 0.0;  // discretization_tolerance of the input set
};

// The r-independent functionals of one set, computed once and shared across
// deficit evaluations at many radii.
struct ShapeFunctionals {
    double r_E = 0.0;
    double alpha = 0.0;
    Point2 alpha_center{0.0, 0.0};
    double delta_iso = 0.0;
    double beta = 0.0;
    double beta_star = 0.0;
    Point2 beta_center{0.0, 0.0};
    double h = 0.0;
    SearchTrace trace;
};

inline ShapeFunctionals shape_functionals(const GridSet& g) {
    ShapeFunctionals f;
    f.h = g.h();
    f.r_E = equivalent_radius(g);
    const AsymmetryResult asym = fraenkel_asymmetry(g);
    f.alpha = asym.alpha;
    f.alpha_center = asym.center;
    f.trace.alpha_evaluations = asym.trace.evaluations;
    f.trace.alpha_coarse_stride = asym.trace.coarse_stride;
    f.delta_iso = iso_deficit(g);
    const OscillationResult osc = oscillation_index(g, asym.center);
    f.beta = osc.beta;
    f.beta_star = osc.beta_star;
    f.beta_center = osc.center;
    f.trace.beta_iterations = osc.beta_iterations;
    f.trace.beta_star_iterations = osc.beta_star_iterations;
    f.trace.tol = discretization_tolerance(g);
    return f;
}

struct DeficitReport {
    double r_E = 0.0;
    double r = 0.0;
    double delta_r = 0.0;
    double alpha = 0.0;
    Point2 alpha_center{0.0, 0.0};
    double delta_iso = 0.0;
    double beta = 0.0;
    double beta_star = 0.0;
    Point2 beta_center{0.0, 0.0};
    double h = 0.0;
    SearchTrace diagnostics;
};

inline DeficitReport deficit_report(const GridSet& g, double r, const ShapeFunctionals& f) {
    DeficitReport rep;
    rep.r_E = f.r_E;
    rep.r = r;
    rep.delta_r = concentration_deficit(g, r);
    rep.alpha = f.alpha;
    rep.alpha_center = f.alpha_center;
    rep.delta_iso = f.delta_iso;
    rep.beta = f.beta;
    rep.beta_star = f.beta_star;
    rep.beta_center = f.beta_center;
    rep.h = f.h;
    rep.diagnostics = f.trace;
    return rep;
}

inline DeficitReport deficit_report(const GridSet& g, double r) {
    return deficit_report(g, r, shape_functionals(g));
}

inline nlohmann::json to_json(const DeficitReport& r) {
    return nlohmann::json{
        {"r_E", r.r_E},
        {"r", r.r},
        {"delta_r", r.delta_r},
        {"alpha", r.alpha},
        {"alpha_center", {r.alpha_center.x, r.alpha_center.y}},
        {"delta_iso", r.delta_iso},
        {"beta", r.beta},
        {"beta_star", r.beta_star},
        {"beta_center", {r.beta_center.x, r.beta_center.y}},
        {"h", r.h},
        {"diagnostics",
         {{"alpha_evaluations", r.diagnostics.alpha_evaluations},
          {"alpha_coarse_stride", r.diagnostics.alpha_coarse_stride},
          {"beta_iterations", r.diagnostics.beta_iterations},
          {"beta_star_iterations", r.diagnostics.beta_star_iterations},
          {"tol", r.diagnostics.tol}}}};
}

// Cap for deficit ratios whose denominator sits below the discretization
// guard; keeps reports finite without pretending 0/0 carries information.
inline constexpr double kRatioCap = 1e3;

struct ReductionReport {
    double r = 0.0;
    double alpha = 0.0;
    double alpha_envelope = 0.0;
    double delta = 0.0;
    double delta_envelope = 0.0;
    double tol = 0.0;
    std::optional<double> alpha_ratio;  // alpha / alpha_envelope
    std::optional<double> delta_ratio;  // delta_envelope / delta
    double branch_indicator = kRatioCap;  // min(alpha^2 / delta, cap)
};

// Compares the asymmetry and deficit of a set against those of its
// r-envelope.  Ratios are reported only when their denominator clears ten
// times the discretization tolerance; near the ball both numerator and
// denominator vanish and the quotient is noise.
inline ReductionReport reduction_check(const GridSet& g, double r) {
    if (!(r > 0.0)) throw BadParametersError("reduction_check: r must be positive");
    const GridSet env = envelope(g, r);
    ReductionReport rep;
    rep.r = r;
    rep.tol = discretization_tolerance(g);
    rep.alpha = fraenkel_asymmetry(g).alpha;
    rep.alpha_envelope = fraenkel_asymmetry(env).alpha;
    rep.delta = concentration_deficit(g, r);
    rep.delta_envelope = concentration_deficit(env, r);
    const double guard = 10.0 * rep.tol;
    if (rep.alpha_envelope > guard) rep.alpha_ratio = rep.alpha / rep.alpha_envelope;
    if (rep.delta > guard) {
        rep.delta_ratio = rep.delta_envelope / rep.delta;
        rep.branch_indicator = std::min(rep.alpha * rep.alpha / rep.delta, kRatioCap);
    }
    return rep;
}

}  // namespace concentra
