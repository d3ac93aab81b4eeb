#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "concentra/errors.hpp"

namespace concentra {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

struct BallSpec {
    Point2 center;
    double radius = 1.0;
};

// Axis-aligned occupancy grid over the lattice {(origin_x + i*h, origin_y + j*h)}.
// A cell is the closed square of side h centered on a lattice point; the set it
// represents is the union of the occupied cells.  Origins are quantized to the
// h-lattice so that grids of equal spacing are comparable cell-by-cell after an
// integer index shift.  Constructors that build sets keep at least one empty
// cell of margin on every side; file input is stored verbatim and ops that need
// margin pad internally.
class GridSet {
  public:
    GridSet() = default;

    GridSet(double h, double origin_x, double origin_y, int nx, int ny)
        : h_(h), ox_(origin_x), oy_(origin_y), nx_(nx), ny_(ny),
          occ_(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), 0) {
        if (!(h > 0.0) || nx <= 0 || ny <= 0)
            throw BadParametersError("GridSet: spacing and dims must be positive");
        ox_ = std::round(origin_x / h) * h;
        oy_ = std::round(origin_y / h) * h;
    }

    // Used by file input: keeps the origin exactly as parsed.
    static GridSet from_raw(double h, double origin_x, double origin_y, int nx, int ny) {
        GridSet g(h, origin_x, origin_y, nx, ny);
        g.ox_ = origin_x;
        g.oy_ = origin_y;
        return g;
    }

    double h() const { return h_; }
    double origin_x() const { return ox_; }
    double origin_y() const { return oy_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }

    bool in_range(int ix, int iy) const {
        return ix >= 0 && ix < nx_ && iy >= 0 && iy < ny_;
    }
    // Out-of-range cells read as unoccupied.
    bool at(int ix, int iy) const {
        return in_range(ix, iy) && occ_[idx(ix, iy)] != 0;
    }
    void set(int ix, int iy, bool v) { occ_[idx(ix, iy)] = v ? 1 : 0; }

    double cell_x(int ix) const { return ox_ + ix * h_; }
    double cell_y(int iy) const { return oy_ + iy * h_; }

    // Index of the cell whose center is nearest to a point (may be out of range).
    int index_x(double x) const { return static_cast<int>(std::llround((x - ox_) / h_)); }
    int index_y(double y) const { return static_cast<int>(std::llround((y - oy_) / h_)); }

    const std::uint8_t* row(int iy) const { return occ_.data() + idx(0, iy); }
    std::uint8_t* row(int iy) { return occ_.data() + idx(0, iy); }

    long long occupied_count() const {
        long long n = 0;
        for (std::uint8_t v : occ_) n += v;
        return n;
    }
    bool empty() const { return occupied_count() == 0; }

    // Grown grid with `cells` extra empty cells on each side.
    GridSet padded(int cells) const {
        GridSet out(h_, ox_ - cells * h_, oy_ - cells * h_, nx_ + 2 * cells, ny_ + 2 * cells);
        for (int iy = 0; iy < ny_; ++iy)
            std::copy(row(iy), row(iy) + nx_, out.row(iy + cells) + cells);
        return out;
    }

    // Crop to the occupied bounding box plus one cell of margin.
    GridSet trimmed() const {
        int x0 = nx_, x1 = -1, y0 = ny_, y1 = -1;
        for (int iy = 0; iy < ny_; ++iy) {
            const std::uint8_t* r = row(iy);
            for (int ix = 0; ix < nx_; ++ix) {
                if (r[ix]) {
                    x0 = std::min(x0, ix);
                    x1 = std::max(x1, ix);
                    y0 = std::min(y0, iy);
                    y1 = std::max(y1, iy);
                }
            }
        }
        if (x1 < 0)  // empty: keep a minimal grid at the same origin
            return GridSet(h_, ox_, oy_, 2, 2);
        x0 -= 1; y0 -= 1; x1 += 1; y1 += 1;
        GridSet out(h_, ox_ + x0 * h_, oy_ + y0 * h_, x1 - x0 + 1, y1 - y0 + 1);
        for (int iy = std::max(y0, 0); iy <= std::min(y1, ny_ - 1); ++iy)
            for (int ix = std::max(x0, 0); ix <= std::min(x1, nx_ - 1); ++ix)
                if (occ_[idx(ix, iy)]) out.set(ix - x0, iy - y0, true);
        return out;
    }

  private:
    std::size_t idx(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx_) +
               static_cast<std::size_t>(ix);
    }

    double h_ = 1.0;
    double ox_ = 0.0, oy_ = 0.0;
    int nx_ = 0, ny_ = 0;
    std::vector<std::uint8_t> occ_;
};

// Rasterize an analytic region: cell occupied iff its center satisfies `inside`.
// The grid covers [x0,x1]x[y0,y1] plus `margin` cells on each side, with the
// origin on the h-lattice.
template <class Pred>
GridSet rasterize(double h, double x0, double y0, double x1, double y1, Pred&& inside,
                  int margin = 1) {
    if (!(h > 0.0) || !(x1 >= x0) || !(y1 >= y0))
        throw BadParametersError("rasterize: bad bounding box or spacing");
    const long long i0 = static_cast<long long>(std::floor(x0 / h)) - margin;
    const long long i1 = static_cast<long long>(std::ceil(x1 / h)) + margin;
    const long long j0 = static_cast<long long>(std::floor(y0 / h)) - margin;
    const long long j1 = static_cast<long long>(std::ceil(y1 / h)) + margin;
    GridSet g(h, static_cast<double>(i0) * h, static_cast<double>(j0) * h,
              static_cast<int>(i1 - i0 + 1), static_cast<int>(j1 - j0 + 1));
    for (int iy = 0; iy < g.ny(); ++iy) {
        const double y = g.cell_y(iy);
        std::uint8_t* r = g.row(iy);
        for (int ix = 0; ix < g.nx(); ++ix)
            r[ix] = inside(g.cell_x(ix), y) ? 1 : 0;
    }
    return g;
}

inline double area(const GridSet& g) {
    return static_cast<double>(g.occupied_count()) * g.h() * g.h();
}

namespace detail {

// Integer cell offset of b relative to a.  Throws if spacings differ or the
// origin offset is not an integer number of cells.
inline void grid_offset(const GridSet& a, const GridSet& b, long long& dx, long long& dy) {
    const double h = a.h();
    if (std::abs(a.h() - b.h()) > 1e-9 * std::max(a.h(), b.h()))
        throw SpacingMismatchError();
    const double fx = (b.origin_x() - a.origin_x()) / h;
    const double fy = (b.origin_y() - a.origin_y()) / h;
    dx = std::llround(fx);
    dy = std::llround(fy);
    if (std::abs(fx - static_cast<double>(dx)) > 1e-9 ||
        std::abs(fy - static_cast<double>(dy)) > 1e-9)
        throw MisalignedOriginsError();
}

}  // namespace detail

// Area of the symmetric difference.  Grids must share spacing and lattice.
inline double sym_diff_area(const GridSet& a, const GridSet& b) {
    long long dx, dy;
    detail::grid_offset(a, b, dx, dy);
    // Work in a's index frame; b's cell (i,j) sits at a-frame (i+dx, j+dy).
    const long long x0 = std::min<long long>(0, dx);
    const long long x1 = std::max<long long>(a.nx() - 1, dx + b.nx() - 1);
    const long long y0 = std::min<long long>(0, dy);
    const long long y1 = std::max<long long>(a.ny() - 1, dy + b.ny() - 1);
    long long diff = 0;
    for (long long iy = y0; iy <= y1; ++iy)
        for (long long ix = x0; ix <= x1; ++ix) {
            const bool va = a.at(static_cast<int>(ix), static_cast<int>(iy));
            const bool vb = b.at(static_cast<int>(ix - dx), static_cast<int>(iy - dy));
            diff += (va != vb) ? 1 : 0;
        }
    return static_cast<double>(diff) * a.h() * a.h();
}

inline bool cellwise_equal(const GridSet& a, const GridSet& b) {
    return sym_diff_area(a, b) == 0.0;
}

// True iff every occupied cell of a is occupied in b.
inline bool cellwise_subset(const GridSet& a, const GridSet& b) {
    long long dx, dy;
    detail::grid_offset(a, b, dx, dy);
    for (int iy = 0; iy < a.ny(); ++iy)
        for (int ix = 0; ix < a.nx(); ++ix)
            if (a.at(ix, iy) &&
                !b.at(static_cast<int>(ix - dx), static_cast<int>(iy - dy)))
                return false;
    return true;
}

inline Point2 centroid(const GridSet& g) {
    long long sx = 0, sy = 0, n = 0;
    for (int iy = 0; iy < g.ny(); ++iy) {
        const std::uint8_t* r = g.row(iy);
        for (int ix = 0; ix < g.nx(); ++ix)
            if (r[ix]) {
                sx += ix;
                sy += iy;
                ++n;
            }
    }
    if (n == 0) throw EmptySetError("centroid of empty set");
    return {g.origin_x() + g.h() * (static_cast<double>(sx) / static_cast<double>(n)),
            g.origin_y() + g.h() * (static_cast<double>(sy) / static_cast<double>(n))};
}

namespace detail {

// Column window [lo, hi] of row iy whose cell centers lie in the closed disc.
// The window comes from a sqrt but the boundary columns are settled by the
// exact center-in-disc predicate, so it is reproducible.  Returns false when
// the row misses the disc entirely.
inline bool disc_row_window(const GridSet& g, int iy, double cx, double cy, double radius,
                            int& lo, int& hi) {
    const double dy = g.cell_y(iy) - cy;
    const double rem = radius * radius - dy * dy;
    if (rem < 0.0) return false;
    const double w = std::sqrt(rem);
    auto pred = [&](int ix) {
        const double dx = g.cell_x(ix) - cx;
        return dx * dx + dy * dy <= radius * radius;
    };
    lo = static_cast<int>(std::ceil((cx - w - g.origin_x()) / g.h() - 0.5));
    hi = static_cast<int>(std::floor((cx + w - g.origin_x()) / g.h() + 0.5));
    lo = std::max(lo - 1, 0);
    hi = std::min(hi + 1, g.nx() - 1);
    while (lo <= hi && !pred(lo)) ++lo;
    while (lo > 0 && pred(lo - 1)) --lo;
    while (hi >= lo && !pred(hi)) --hi;
    while (hi < g.nx() - 1 && pred(hi + 1)) ++hi;
    return lo <= hi;
}

// Count occupied cells of row iy whose centers lie in the closed disc.
inline long long disc_row_count(const GridSet& g, int iy, double cx, double cy, double radius) {
    int lo, hi;
    if (!disc_row_window(g, iy, cx, cy, radius, lo, hi)) return 0;
    long long n = 0;
    const std::uint8_t* r = g.row(iy);
    for (int ix = lo; ix <= hi; ++ix) n += r[ix];
    return n;
}

}  // namespace detail

// Area of the intersection of the set with a closed ball, counted cellwise
// (cell center inside the ball).
inline double ball_overlap_area(const GridSet& g, const BallSpec& ball) {
    if (!(ball.radius >= 0.0)) throw BadParametersError("ball_overlap_area: negative radius");
    long long n = 0;
    const int j0 = std::max(0, static_cast<int>(std::floor(
                                   (ball.center.y - ball.radius - g.origin_y()) / g.h())) -
                                   1);
    const int j1 = std::min(g.ny() - 1, static_cast<int>(std::ceil(
                                            (ball.center.y + ball.radius - g.origin_y()) / g.h())) +
                                            1);
    for (int iy = j0; iy <= j1; ++iy)
        n += detail::disc_row_count(g, iy, ball.center.x, ball.center.y, ball.radius);
    return static_cast<double>(n) * g.h() * g.h();
}

// Refine each cell into k x k subcells (same origin, spacing h/k).  Occupancy
// is replicated, so the area is preserved exactly; the represented region
// shifts by (k-1)h/(2k) per axis because subcell centers tile the parent cell.
inline GridSet resample(const GridSet& g, int k) {
    if (k < 1) throw BadParametersError("resample: factor must be >= 1");
    if (k == 1) return g;
    GridSet out(g.h() / k, g.origin_x(), g.origin_y(), g.nx() * k, g.ny() * k);
    for (int iy = 0; iy < out.ny(); ++iy) {
        const std::uint8_t* src = g.row(iy / k);
        std::uint8_t* dst = out.row(iy);
        for (int ix = 0; ix < out.nx(); ++ix) dst[ix] = src[ix / k];
    }
    return out;
}

// ---------------------------------------------------------------------------
// GSET1 container: four ASCII header lines then nx*ny occupancy bytes
// (0x00/0x01, row-major, y-major rows).  Floats are written with enough
// digits to round-trip exactly.

inline void write_gset(const GridSet& g, std::ostream& os) {
    char buf[128];
    os << "GSET1\n";
    std::snprintf(buf, sizeof buf, "h=%.17g\n", g.h());
    os << buf;
    std::snprintf(buf, sizeof buf, "origin=%.17g %.17g\n", g.origin_x(), g.origin_y());
    os << buf;
    std::snprintf(buf, sizeof buf, "dims=%d %d\n", g.nx(), g.ny());
    os << buf;
    for (int iy = 0; iy < g.ny(); ++iy)
        os.write(reinterpret_cast<const char*>(g.row(iy)), g.nx());
}

inline void write_gset(const GridSet& g, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open for writing: " + path);
    write_gset(g, f);
    if (!f) throw Error("write failed: " + path);
}

inline GridSet read_gset(std::istream& is) {
    auto read_line = [&](const char* what) {
        std::string line;
        if (!std::getline(is, line)) throw FormatError(std::string("GSET1: missing ") + what);
        return line;
    };
    if (read_line("magic") != "GSET1") throw FormatError("GSET1: bad magic");

    const std::string hline = read_line("h line");
    if (hline.rfind("h=", 0) != 0) throw FormatError("GSET1: expected h=");
    char* end = nullptr;
    const double h = std::strtod(hline.c_str() + 2, &end);
    if (end == hline.c_str() + 2 || *end != '\0' || !(h > 0.0))
        throw FormatError("GSET1: bad spacing");

    const std::string oline = read_line("origin line");
    if (oline.rfind("origin=", 0) != 0) throw FormatError("GSET1: expected origin=");
    double ox = 0, oy = 0;
    {
        const char* p = oline.c_str() + 7;
        ox = std::strtod(p, &end);
        if (end == p || *end != ' ') throw FormatError("GSET1: bad origin");
        p = end + 1;
        oy = std::strtod(p, &end);
        if (end == p || *end != '\0') throw FormatError("GSET1: bad origin");
    }

    const std::string dline = read_line("dims line");
    if (dline.rfind("dims=", 0) != 0) throw FormatError("GSET1: expected dims=");
    long long nx = 0, ny = 0;
    {
        const char* p = dline.c_str() + 5;
        nx = std::strtoll(p, &end, 10);
        if (end == p || *end != ' ') throw FormatError("GSET1: bad dims");
        p = end + 1;
        ny = std::strtoll(p, &end, 10);
        if (end == p || *end != '\0') throw FormatError("GSET1: bad dims");
    }
    if (nx <= 0 || ny <= 0 || nx > 1000000 || ny > 1000000 || nx * ny > (1LL << 31))
        throw FormatError("GSET1: dims out of range");

    GridSet g = GridSet::from_raw(h, ox, oy, static_cast<int>(nx), static_cast<int>(ny));
    for (int iy = 0; iy < g.ny(); ++iy) {
        is.read(reinterpret_cast<char*>(g.row(iy)), g.nx());
        if (is.gcount() != nx) throw FormatError("GSET1: truncated payload");
    }
    for (int iy = 0; iy < g.ny(); ++iy) {
        const std::uint8_t* r = g.row(iy);
        for (int ix = 0; ix < g.nx(); ++ix)
            if (r[ix] > 1) throw FormatError("GSET1: payload bytes must be 0x00/0x01");
    }
    if (is.peek() != std::char_traits<char>::eof())
        throw FormatError("GSET1: trailing bytes after payload");
    return g;
}

inline GridSet read_gset(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open: " + path);
    return read_gset(f);
}

}  // namespace concentra
