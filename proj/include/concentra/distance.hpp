#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <vector>

#include "concentra/boundary.hpp"
#include "concentra/errors.hpp"
#include "concentra/grid.hpp"

namespace concentra {

// Squared Euclidean distances from every cell center to the nearest occupied
// cell center, in index units, on the same lattice as the source grid.  Values
// are exact integers: value(c) = min over occupied c' of |c - c'|^2.
class DistanceField {
  public:
    DistanceField(double h, double origin_x, double origin_y, int nx, int ny)
        : h_(h), ox_(origin_x), oy_(origin_y), nx_(nx), ny_(ny),
          sq_(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), 0) {}

    double h() const { return h_; }
    double origin_x() const { return ox_; }
    double origin_y() const { return oy_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }

    std::int32_t sq(int ix, int iy) const { return sq_[idx(ix, iy)]; }
    std::int32_t& sq(int ix, int iy) { return sq_[idx(ix, iy)]; }

    // Distance in world units.
    double distance(int ix, int iy) const {
        return h_ * std::sqrt(static_cast<double>(sq(ix, iy)));
    }

    double cell_x(int ix) const { return ox_ + ix * h_; }
    double cell_y(int iy) const { return oy_ + iy * h_; }

  private:
    std::size_t idx(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx_) +
               static_cast<std::size_t>(ix);
    }

    double h_;
    double ox_, oy_;
    int nx_, ny_;
    std::vector<std::int32_t> sq_;
};

namespace detail {

// Column sentinel for "no occupied cell in this column".  Its square fits in
// 64 bits with room to spare; real distances always beat it when the set is
// nonempty, so it never reaches the output.
constexpr std::int64_t kEdtInf = 1 << 20;

// Separable exact transform.  Pass 1 scans each column for the 1-D row
// distance to the nearest occupied cell; pass 2 takes, per row, the lower
// envelope of the parabolas g(j)^2 + (i-j)^2 using integer floor-division
// for the parabola intersections, so every output is the exact minimum.
// `occupied(ix, iy)` is evaluated on the *unpadded* index box; the field is
// computed on a grid grown by `pad` cells per side.
template <class Occ>
DistanceField edt_core(const GridSet& src, int pad, Occ&& occupied) {
    const int nx = src.nx() + 2 * pad, ny = src.ny() + 2 * pad;
    if (static_cast<double>(nx) * nx + static_cast<double>(ny) * ny >=
        static_cast<double>(std::numeric_limits<std::int32_t>::max()))
        throw Error("distance transform: grid too large for 32-bit squared distances");
    DistanceField out(src.h(), src.origin_x() - pad * src.h(), src.origin_y() - pad * src.h(),
                      nx, ny);

    // Pass 1: per-column vertical distances (stored in the output array).
    for (int ix = 0; ix < nx; ++ix) {
        const int sx = ix - pad;
        std::int64_t d = kEdtInf;
        for (int iy = 0; iy < ny; ++iy) {
            if (occupied(sx, iy - pad)) d = 0;
            else if (d < kEdtInf) ++d;
            out.sq(ix, iy) = static_cast<std::int32_t>(std::min(d, kEdtInf));
        }
        d = kEdtInf;
        for (int iy = ny - 1; iy >= 0; --iy) {
            if (occupied(sx, iy - pad)) d = 0;
            else if (d < kEdtInf) ++d;
            out.sq(ix, iy) = std::min(out.sq(ix, iy), static_cast<std::int32_t>(std::min(d, kEdtInf)));
        }
    }

    // Pass 2: per-row lower envelope (Meijster's scan, exact in int64).
    std::vector<std::int64_t> g(nx), dt(nx);
    std::vector<int> s(nx), t(nx);
    bool any = false;
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            g[ix] = out.sq(ix, iy);
            if (g[ix] == 0) any = true;
        }
        auto F = [&](std::int64_t x, std::int64_t i) { return (x - i) * (x - i) + g[i] * g[i]; };
        auto Sep = [&](std::int64_t i, std::int64_t u) {
            std::int64_t num = u * u - i * i + g[u] * g[u] - g[i] * g[i];
            std::int64_t den = 2 * (u - i);
            // floor division for possibly negative numerator
            std::int64_t q = num / den;
            if (num % den != 0 && ((num < 0) != (den < 0))) --q;
            return q;
        };
        int q = 0;
        s[0] = 0;
        t[0] = 0;
        for (int u = 1; u < nx; ++u) {
            while (q >= 0 && F(t[q], s[q]) > F(t[q], u)) --q;
            if (q < 0) {
                q = 0;
                s[0] = u;
            } else {
                const std::int64_t w = 1 + Sep(s[q], u);
                if (w < nx) {
                    ++q;
                    s[q] = u;
                    t[q] = static_cast<int>(w);
                }
            }
        }
        for (int u = nx - 1; u >= 0; --u) {
            dt[u] = F(u, s[q]);
            if (u == t[q]) --q;
        }
        for (int ix = 0; ix < nx; ++ix)
            out.sq(ix, iy) = static_cast<std::int32_t>(
                std::min<std::int64_t>(dt[ix], std::numeric_limits<std::int32_t>::max()));
    }
    // Column scan only sees emptiness per column; report emptiness globally.
    if (!any) throw EmptySetError("distance transform of empty set");
    return out;
}

// Shared threshold for the dilation/erosion pair: cells with squared index
// distance <= threshold_sq_cells(r, h) form the closed structuring disc.
// The relative guard absorbs representation error when r is an exact
// multiple of h.
inline double threshold_sq_cells(double r, double h) {
    const double q = r / h;
    return q * q * (1.0 + 1e-9);
}

}  // namespace detail

// Exact squared-distance transform of the occupied set.
inline DistanceField edt(const GridSet& g) {
    if (g.empty()) throw EmptySetError("distance transform of empty set");
    return detail::edt_core(g, 0, [&](int ix, int iy) { return g.at(ix, iy); });
}

// Distance transform on a grid grown by `pad` empty cells per side.
inline DistanceField edt_padded(const GridSet& g, int pad) {
    if (g.empty()) throw EmptySetError("distance transform of empty set");
    return detail::edt_core(g, pad, [&](int ix, int iy) { return g.at(ix, iy); });
}

namespace detail {

inline int growth_cells(double r, double h) {
    const double q = r / h;
    return static_cast<int>(std::ceil(q - 1e-9 * std::max(1.0, q))) + 1;
}

}  // namespace detail

// Minkowski sum with the closed disc of radius r: cell occupied iff its exact
// squared distance to the set satisfies d^2 * h^2 <= r^2.  The grid grows by
// ceil(r/h)+1 cells per side so the result keeps an empty margin.
inline GridSet dilate(const GridSet& g, double r) {
    if (!(r > 0.0)) throw BadParametersError("dilate: radius must be positive");
    const int pad = detail::growth_cells(r, g.h());
    const DistanceField d = edt_padded(g, pad);
    const double t = detail::threshold_sq_cells(r, g.h());
    GridSet out(g.h(), d.origin_x(), d.origin_y(), d.nx(), d.ny());
    for (int iy = 0; iy < out.ny(); ++iy) {
        std::uint8_t* row = out.row(iy);
        for (int ix = 0; ix < out.nx(); ++ix)
            row[ix] = static_cast<double>(d.sq(ix, iy)) <= t ? 1 : 0;
    }
    return out;
}

// Morphological erosion by the same closed disc: cell kept iff every cell of
// the disc around it is occupied, i.e. the distance to the complement is
// strictly greater than r.  Cells beyond the stored grid belong to the
// complement; the one-cell internal pad accounts for them exactly.
inline GridSet erode(const GridSet& g, double r) {
    if (!(r > 0.0)) throw BadParametersError("erode: radius must be positive");
    GridSet out(g.h(), g.origin_x(), g.origin_y(), g.nx(), g.ny());
    if (g.empty()) return out;
    // complement within a 1-cell padded frame (never empty)
    const DistanceField d =
        detail::edt_core(g, 1, [&](int ix, int iy) { return !g.at(ix, iy) || !g.in_range(ix, iy); });
    const double t = detail::threshold_sq_cells(r, g.h());
    for (int iy = 0; iy < out.ny(); ++iy) {
        std::uint8_t* row = out.row(iy);
        for (int ix = 0; ix < out.nx(); ++ix)
            row[ix] = static_cast<double>(d.sq(ix + 1, iy + 1)) > t ? 1 : 0;
    }
    return out;
}

// r-envelope (morphological closing): dilate by r, then erode by r.  Contains
// the input, is idempotent, and its dilation equals the dilation of the input.
inline GridSet envelope(const GridSet& g, double r) {
    if (g.empty()) throw EmptySetError("envelope of empty set");
    return erode(dilate(g, r), r);
}

struct ExteriorBallReport {
    double passing_fraction = 0.0;  // boundary length fraction passing the test
    double worst_deficit = 0.0;     // max over samples of r - dist(y + r*nu, E)
};

// Check the exterior ball condition: for boundary points y with outward
// normal nu, an open ball of radius r tangent at y should avoid the set, i.e.
// dist(y + r*nu, E) >= r - tol.  Distances are taken from the exact transform
// at the nearest cell center, corrected by the snap offset so the test value
// is a lower bound for the true distance.
inline ExteriorBallReport exterior_ball_check(const GridSet& g, double r, double tol,
                                              bool require_r_convex = true) {
    if (!(r > 0.0) || !(tol >= 0.0)) throw BadParametersError("exterior_ball_check: bad r/tol");
    if (g.empty()) throw EmptySetError("exterior_ball_check of empty set");
    if (require_r_convex && sym_diff_area(g, envelope(g, r)) != 0.0)
        throw NotRConvexError();

    const BoundaryCurve curve = smoothed(extract_boundary(g), 3);
    const int pad = detail::growth_cells(r, g.h()) + 2;
    const DistanceField d = edt_padded(g, pad);

    double len_total = 0.0, len_pass = 0.0, worst = 0.0;
    for (const auto& loop : curve.loops) {
        const std::size_t n = loop.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point2& a = loop[i];
            const Point2& b = loop[(i + 1) % n];
            const double sx = b.x - a.x, sy = b.y - a.y;
            const double len = std::hypot(sx, sy);
            if (len == 0.0) continue;
            const Point2 mid{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
            const Point2 nu{sy / len, -sx / len};  // interior is on the left
            const double px = mid.x + r * nu.x, py = mid.y + r * nu.y;
            int ix = static_cast<int>(std::llround((px - d.origin_x()) / d.h()));
            int iy = static_cast<int>(std::llround((py - d.origin_y()) / d.h()));
            ix = std::clamp(ix, 0, d.nx() - 1);
            iy = std::clamp(iy, 0, d.ny() - 1);
            const double snap = std::hypot(px - d.cell_x(ix), py - d.cell_y(iy));
            const double dist_lb = d.distance(ix, iy) - snap;
            len_total += len;
            if (dist_lb >= r - tol) len_pass += len;
            worst = std::max(worst, r - dist_lb);
        }
    }
    if (len_total == 0.0) throw EmptySetError("exterior_ball_check: no boundary");
    return {len_pass / len_total, worst};
}

// Dump a distance field as CSV (x, y, d) for plotting.
inline void write_distance_csv(const DistanceField& d, std::ostream& os) {
    os << "x,y,d\n";
    char buf[160];
    for (int iy = 0; iy < d.ny(); ++iy)
        for (int ix = 0; ix < d.nx(); ++ix) {
            std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", d.cell_x(ix), d.cell_y(iy),
                          d.distance(ix, iy));
            os << buf;
        }
}

}  // namespace concentra
