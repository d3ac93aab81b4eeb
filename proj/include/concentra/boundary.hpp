#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <utility>
#include <vector>

#include "concentra/errors.hpp"
#include "concentra/grid.hpp"

namespace concentra {

// Closed polylines tracing the cell-boundary of an occupancy grid.  Vertices
// sit on midpoints of the dual edges between adjacent in/out cell centers;
// loops are oriented with the interior on the left, so outer boundaries run
// counterclockwise and hole boundaries clockwise.  Segment i of a loop joins
// vertex i to vertex (i+1) mod n.
struct BoundaryCurve {
    double h = 0.0;  // spacing of the source grid
    std::vector<std::vector<Point2>> loops;

    std::size_t segment_count() const {
        std::size_t n = 0;
        for (const auto& l : loops) n += l.size();
        return n;
    }
};

inline Point2 segment_normal(const std::vector<Point2>& loop, std::size_t i) {
    const Point2& a = loop[i];
    const Point2& b = loop[(i + 1) % loop.size()];
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len = std::hypot(dx, dy);
    if (len == 0.0) return {0.0, 0.0};
    return {dy / len, -dx / len};  // outward = right of travel (interior left)
}

inline double segment_length(const std::vector<Point2>& loop, std::size_t i) {
    const Point2& a = loop[i];
    const Point2& b = loop[(i + 1) % loop.size()];
    return std::hypot(b.x - a.x, b.y - a.y);
}

inline Point2 segment_midpoint(const std::vector<Point2>& loop, std::size_t i) {
    const Point2& a = loop[i];
    const Point2& b = loop[(i + 1) % loop.size()];
    return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
}

inline double total_length(const BoundaryCurve& c) {
    double s = 0.0;
    for (const auto& loop : c.loops)
        for (std::size_t i = 0; i < loop.size(); ++i) s += segment_length(loop, i);
    return s;
}

// Shoelace area; holes subtract because they run clockwise.
inline double signed_area(const BoundaryCurve& c) {
    double s = 0.0;
    for (const auto& loop : c.loops) {
        const std::size_t n = loop.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point2& a = loop[i];
            const Point2& b = loop[(i + 1) % n];
            s += a.x * b.y - b.x * a.y;
        }
    }
    return 0.5 * s;
}

namespace detail {

// Marching squares over 2x2 blocks of cell centers.  Vertex ids: dual edges,
// type 0 horizontal (between (ix,iy) and (ix+1,iy)), type 1 vertical (between
// (ix,iy) and (ix,iy+1)); indices may be -1 at the frame, hence the +1 bias
// in the packed key.
struct MsKey {
    int type, ix, iy;
    bool operator<(const MsKey& o) const {
        if (iy != o.iy) return iy < o.iy;
        if (ix != o.ix) return ix < o.ix;
        return type < o.type;
    }
    bool operator==(const MsKey& o) const {
        return type == o.type && ix == o.ix && iy == o.iy;
    }
};

}  // namespace detail

// Trace the level-1/2 contour of the occupancy indicator.  Binary data means
// every crossing vertex is the midpoint of a dual edge.  The ambiguous saddle
// blocks (two opposite corners occupied) are resolved as if the block center
// were unoccupied, which cuts both corners and keeps loops manifold.
inline BoundaryCurve extract_boundary(const GridSet& g) {
    using detail::MsKey;
    std::map<MsKey, MsKey> next;  // segment start vertex -> end vertex

    auto emit = [&](MsKey from, MsKey to) {
        auto [it, fresh] = next.emplace(from, to);
        if (!fresh) throw Error("extract_boundary: non-manifold configuration");
        (void)it;
    };

    for (int by = -1; by < g.ny(); ++by) {
        for (int bx = -1; bx < g.nx(); ++bx) {
            const int c00 = g.at(bx, by) ? 1 : 0;
            const int c10 = g.at(bx + 1, by) ? 1 : 0;
            const int c11 = g.at(bx + 1, by + 1) ? 1 : 0;
            const int c01 = g.at(bx, by + 1) ? 1 : 0;
            const int mask = c00 | (c10 << 1) | (c11 << 2) | (c01 << 3);
            if (mask == 0 || mask == 15) continue;
            const MsKey B{0, bx, by};          // bottom edge vertex
            const MsKey T{0, bx, by + 1};      // top
            const MsKey L{1, bx, by};          // left
            const MsKey R{1, bx + 1, by};      // right
            switch (mask) {
                case 1: emit(B, L); break;
                case 2: emit(R, B); break;
                case 4: emit(T, R); break;
                case 8: emit(L, T); break;
                case 3: emit(R, L); break;
                case 12: emit(L, R); break;
                case 9: emit(B, T); break;
                case 6: emit(T, B); break;
                case 7: emit(T, L); break;
                case 11: emit(R, T); break;
                case 13: emit(B, R); break;
                case 14: emit(L, B); break;
                case 5:  // saddle: center out, keep the two occupied corners apart
                    emit(B, L);
                    emit(T, R);
                    break;
                case 10:
                    emit(R, B);
                    emit(L, T);
                    break;
                default: break;
            }
        }
    }

    const double h = g.h();
    auto position = [&](const MsKey& k) -> Point2 {
        if (k.type == 0) return {g.origin_x() + (k.ix + 0.5) * h, g.origin_y() + k.iy * h};
        return {g.origin_x() + k.ix * h, g.origin_y() + (k.iy + 0.5) * h};
    };

    BoundaryCurve out;
    out.h = h;
    // Follow cycles; std::map iteration gives the lexicographically smallest
    // unvisited start vertex, so loop order and starting points are stable.
    std::map<MsKey, MsKey> remaining = next;
    while (!remaining.empty()) {
        const MsKey start = remaining.begin()->first;
        std::vector<Point2> loop;
        MsKey cur = start;
        do {
            auto it = remaining.find(cur);
            if (it == remaining.end()) throw Error("extract_boundary: open contour");
            loop.push_back(position(cur));
            const MsKey nxt = it->second;
            remaining.erase(it);
            cur = nxt;
        } while (!(cur == start));
        out.loops.push_back(std::move(loop));
    }
    return out;
}

// One or more passes of cyclic neighbor averaging: v_i <- (v_{i-1} + v_i +
// v_{i+1}) / 3.  Removes the first-order staircase bias of the raw contour on
// smooth boundaries while moving each vertex by at most a cell.
inline BoundaryCurve smoothed(const BoundaryCurve& c, int passes = 1) {
    BoundaryCurve out = c;
    for (int p = 0; p < passes; ++p) {
        for (auto& loop : out.loops) {
            const std::size_t n = loop.size();
            if (n < 3) continue;
            std::vector<Point2> nv(n);
            for (std::size_t i = 0; i < n; ++i) {
                const Point2& a = loop[(i + n - 1) % n];
                const Point2& b = loop[i];
                const Point2& cc = loop[(i + 1) % n];
                nv[i] = {(a.x + b.x + cc.x) / 3.0, (a.y + b.y + cc.y) / 3.0};
            }
            loop = std::move(nv);
        }
    }
    return out;
}

// Corrected perimeter estimate (length of the once-smoothed contour).
inline double perimeter(const GridSet& g) {
    return total_length(smoothed(extract_boundary(g), 1));
}

// Raw staircase polygon length.
inline double perimeter_raw(const GridSet& g) {
    return total_length(extract_boundary(g));
}

// Perimeter inside the closed ball B_s(x): corrected segment lengths whose
// midpoints fall in the ball.
inline double local_perimeter(const BoundaryCurve& corrected, Point2 x, double s) {
    if (!(s >= 0.0)) throw BadParametersError("local_perimeter: negative radius");
    double sum = 0.0;
    for (const auto& loop : corrected.loops)
        for (std::size_t i = 0; i < loop.size(); ++i) {
            const Point2 m = segment_midpoint(loop, i);
            const double dx = m.x - x.x, dy = m.y - x.y;
            if (dx * dx + dy * dy <= s * s) sum += segment_length(loop, i);
        }
    return sum;
}

inline double local_perimeter(const GridSet& g, Point2 x, double s) {
    return local_perimeter(smoothed(extract_boundary(g), 1), x, s);
}

// Polyline dump: loop id, x, y per vertex.
inline void write_boundary_csv(const BoundaryCurve& c, std::ostream& os) {
    os << "loop,x,y\n";
    char buf[128];
    for (std::size_t li = 0; li < c.loops.size(); ++li)
        for (const Point2& p : c.loops[li]) {
            std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g\n", li, p.x, p.y);
            os << buf;
        }
}

}  // namespace concentra
