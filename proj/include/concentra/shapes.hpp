#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "concentra/errors.hpp"
#include "concentra/grid.hpp"

namespace concentra {

// Recipe for a generated test shape.  `params` is kind-specific; `seed` only
// matters for the randomized kinds (perforated_disc, blob).  Generation is
// bit-deterministic for a given spec on any platform.
struct ShapeSpec {
    std::string id;
    std::string kind;
    std::map<std::string, double> params;
    double h = 0.01;
    std::uint64_t seed = 0;

    double param(const std::string& name, double fallback) const {
        auto it = params.find(name);
        return it == params.end() ? fallback : it->second;
    }
};

inline void to_json(nlohmann::json& j, const ShapeSpec& s) {
    j = nlohmann::json{{"id", s.id}, {"kind", s.kind}, {"params", s.params},
                       {"h", s.h},   {"seed", s.seed}};
}

inline void from_json(const nlohmann::json& j, ShapeSpec& s) {
    j.at("kind").get_to(s.kind);
    s.id = j.value("id", s.kind);  // id optional for hand-written spec files
    s.params = j.value("params", std::map<std::string, double>{});
    j.at("h").get_to(s.h);
    s.seed = j.value("seed", std::uint64_t{0});
}

namespace detail {

// Uniform double in [0,1) from the top 53 bits, identical on every platform
// (std::uniform_real_distribution is not specified bit-for-bit).
inline double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double radical_inverse(std::uint64_t n, std::uint64_t base) {
    double inv = 1.0 / static_cast<double>(base), f = inv, x = 0.0;
    while (n) {
        x += static_cast<double>(n % base) * f;
        n /= base;
        f *= inv;
    }
    return x;
}

inline void check_pitch(double h, double approx_area, const std::string& kind) {
    const double re = std::sqrt(approx_area / std::numbers::pi);
    if (!(h > 0.0) || h > re / 20.0)
        throw BadParametersError("generate(" + kind + "): grid pitch too coarse for the shape");
}

// 4-connected component count over occupied cells.
inline int component_count(const GridSet& g) {
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(g.nx()) * g.ny(), 0);
    auto id = [&](int ix, int iy) { return static_cast<std::size_t>(iy) * g.nx() + ix; };
    int comps = 0;
    std::vector<std::pair<int, int>> stack;
    for (int sy = 0; sy < g.ny(); ++sy)
        for (int sx = 0; sx < g.nx(); ++sx) {
            if (!g.at(sx, sy) || seen[id(sx, sy)]) continue;
            ++comps;
            stack.push_back({sx, sy});
            seen[id(sx, sy)] = 1;
            while (!stack.empty()) {
                auto [cx, cy] = stack.back();
                stack.pop_back();
                const int nb[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
                for (auto& d : nb) {
                    const int ux = cx + d[0], uy = cy + d[1];
                    if (g.at(ux, uy) && !seen[id(ux, uy)]) {
                        seen[id(ux, uy)] = 1;
                        stack.push_back({ux, uy});
                    }
                }
            }
        }
    return comps;
}

}  // namespace detail

// Rasterize a shape spec.  Cell centers inside the closed analytic region are
// occupied; every generated grid keeps at least one empty cell of margin.
inline GridSet generate(const ShapeSpec& spec) {
    using std::numbers::pi;
    const double h = spec.h;

    if (spec.kind == "disc") {
        const double R = spec.param("radius", 1.0);
        if (!(R > 0.0)) throw BadParametersError("disc: radius must be positive");
        detail::check_pitch(h, pi * R * R, spec.kind);
        return rasterize(h, -R, -R, R, R,
                         [&](double x, double y) { return x * x + y * y <= R * R; });
    }
    if (spec.kind == "ellipse") {
        // diag(1+eps, 1/(1+eps)) applied to the unit disc: area stays pi.
        const double eps = spec.param("eps", 0.1);
        if (!(eps >= 0.0 && eps <= 0.5)) throw BadParametersError("ellipse: need 0 <= eps <= 0.5");
        const double a = 1.0 + eps, b = 1.0 / (1.0 + eps);
        detail::check_pitch(h, pi, spec.kind);
        return rasterize(h, -a, -b, a, b, [&](double x, double y) {
            const double u = x / a, v = y / b;
            return u * u + v * v <= 1.0;
        });
    }
    if (spec.kind == "two_discs") {
        const double d = spec.param("sep", 4.0);
        if (!(d > 2.0)) throw BadParametersError("two_discs: separation must exceed 2");
        detail::check_pitch(h, 2.0 * pi, spec.kind);
        return rasterize(h, -1.0, -1.0, d + 1.0, 1.0, [&](double x, double y) {
            const double dx = x - d;
            return x * x + y * y <= 1.0 || dx * dx + y * y <= 1.0;
        });
    }
    if (spec.kind == "annulus") {
        const double ri = spec.param("r_in", 0.3), ro = spec.param("r_out", 1.0);
        if (!(0.0 < ri && ri < ro)) throw BadParametersError("annulus: need 0 < r_in < r_out");
        detail::check_pitch(h, pi * (ro * ro - ri * ri), spec.kind);
        return rasterize(h, -ro, -ro, ro, ro, [&](double x, double y) {
            const double q = x * x + y * y;
            return q >= ri * ri && q <= ro * ro;
        });
    }
    if (spec.kind == "square") {
        const double a = spec.param("side", 2.0);
        if (!(a > 0.0)) throw BadParametersError("square: side must be positive");
        detail::check_pitch(h, a * a, spec.kind);
        const double s = a / 2.0;
        return rasterize(h, -s, -s, s, s, [&](double x, double y) {
            return std::abs(x) <= s && std::abs(y) <= s;
        });
    }
    if (spec.kind == "stadium") {
        // straight section of length L capped by half-discs of radius rho
        const double L = spec.param("length", 2.0), rho = spec.param("radius", 0.5);
        if (!(L > 0.0 && rho > 0.0)) throw BadParametersError("stadium: bad dimensions");
        detail::check_pitch(h, 2.0 * L * rho + pi * rho * rho, spec.kind);
        const double half = L / 2.0;
        return rasterize(h, -half - rho, -rho, half + rho, rho, [&](double x, double y) {
            const double cx = std::clamp(x, -half, half);
            const double dx = x - cx;
            return dx * dx + y * y <= rho * rho;
        });
    }
    if (spec.kind == "perforated_disc") {
        const double R = spec.param("radius", 1.0);
        const double hr = spec.param("hole_r", 0.02);
        const int n = static_cast<int>(spec.param("n_holes", 20.0));
        if (!(R > 0.0 && hr > 0.0 && n >= 0 && 2.0 * hr < R))
            throw BadParametersError("perforated_disc: bad parameters");
        detail::check_pitch(h, pi * R * R, spec.kind);
        // hole centers from a seeded Halton sequence mapped to the safe disc,
        // kept >= 3*hole_r apart and a full hole radius clear of the rim
        std::mt19937_64 rng(spec.seed);
        const double rot_u = detail::unit_double(rng), rot_v = detail::unit_double(rng);
        const double safe = R - 2.0 * hr;
        std::vector<Point2> holes;
        for (std::uint64_t k = 1; static_cast<int>(holes.size()) < n; ++k) {
            if (k > 100000) throw BadParametersError("perforated_disc: cannot place holes");
            double u = detail::radical_inverse(k, 2) + rot_u;
            double v = detail::radical_inverse(k, 3) + rot_v;
            u -= std::floor(u);
            v -= std::floor(v);
            const double rr = safe * std::sqrt(u), th = 2.0 * pi * v;
            const Point2 c{rr * std::cos(th), rr * std::sin(th)};
            bool ok = true;
            for (const Point2& p : holes) {
                const double dx = c.x - p.x, dy = c.y - p.y;
                if (dx * dx + dy * dy < 9.0 * hr * hr) {
                    ok = false;
                    break;
                }
            }
            if (ok) holes.push_back(c);
        }
        GridSet g = rasterize(h, -R, -R, R, R, [&](double x, double y) {
            if (x * x + y * y > R * R) return false;
            for (const Point2& p : holes) {
                const double dx = x - p.x, dy = y - p.y;
                if (dx * dx + dy * dy <= hr * hr) return false;
            }
            return true;
        });
        if (detail::component_count(g) != 1)
            throw Error("perforated_disc: generated set is not connected");
        return g;
    }
    if (spec.kind == "blob") {
        // star-shaped radial Fourier boundary rho(theta); amplitude budget is
        // split over modes 1..8 with 1/k^2 decay so the boundary stays smooth
        const double R = spec.param("radius", 1.0);
        const double amp = spec.param("amp", 0.25);
        if (!(R > 0.0 && amp >= 0.0 && amp <= 0.45))
            throw BadParametersError("blob: need radius > 0 and 0 <= amp <= 0.45");
        detail::check_pitch(h, pi * R * R * (1.0 - amp) * (1.0 - amp), spec.kind);
        std::mt19937_64 rng(spec.seed);
        double a[9] = {0}, b[9] = {0};
        double budget = 0.0;
        for (int k = 1; k <= 8; ++k) {
            a[k] = (2.0 * detail::unit_double(rng) - 1.0) / (k * k);
            b[k] = (2.0 * detail::unit_double(rng) - 1.0) / (k * k);
            budget += std::abs(a[k]) + std::abs(b[k]);
        }
        const double scale = budget > 0.0 ? amp / budget : 0.0;
        auto radius_at = [&](double th) {
            double r = 1.0;
            for (int k = 1; k <= 8; ++k)
                r += scale * (a[k] * std::cos(k * th) + b[k] * std::sin(k * th));
            return R * r;
        };
        const double rmax = R * (1.0 + amp);
        GridSet g = rasterize(h, -rmax, -rmax, rmax, rmax, [&](double x, double y) {
            const double rho = radius_at(std::atan2(y, x));
            return x * x + y * y <= rho * rho;
        });
        if (detail::component_count(g) != 1) throw Error("blob: generated set is not connected");
        return g;
    }
    throw BadParametersError("generate: unknown kind '" + spec.kind + "'");
}

// Fixed corpora.  The smoke list is small enough for quick invariant runs;
// the full list is the 25-shape set used by sweeps.
inline std::vector<ShapeSpec> corpus(const std::string& name) {
    auto spec = [](std::string id, std::string kind, std::map<std::string, double> params,
                   double h, std::uint64_t seed = 0) {
        ShapeSpec s;
        s.id = std::move(id);
        s.kind = std::move(kind);
        s.params = std::move(params);
        s.h = h;
        s.seed = seed;
        return s;
    };
    if (name == "smoke") {
        const double h = 0.01;
        return {
            spec("disc_r1", "disc", {{"radius", 1.0}}, h),
            spec("ellipse_e0.1", "ellipse", {{"eps", 0.1}}, h),
            spec("twodiscs_d4", "two_discs", {{"sep", 4.0}}, h),
            spec("annulus_0.3_1", "annulus", {{"r_in", 0.3}, {"r_out", 1.0}}, h),
            spec("square_s2", "square", {{"side", 2.0}}, h),
            spec("blob_s1", "blob", {{"radius", 1.0}, {"amp", 0.25}}, h, 1),
        };
    }
    if (name == "full") {
        const double h = 0.005;
        std::vector<ShapeSpec> out = {
            spec("disc_r1", "disc", {{"radius", 1.0}}, h),
            spec("disc_r0.6", "disc", {{"radius", 0.6}}, h),
            spec("ellipse_e0.02", "ellipse", {{"eps", 0.02}}, h),
            spec("ellipse_e0.05", "ellipse", {{"eps", 0.05}}, h),
            spec("ellipse_e0.1", "ellipse", {{"eps", 0.1}}, h),
            spec("ellipse_e0.2", "ellipse", {{"eps", 0.2}}, h),
            spec("twodiscs_d2.5", "two_discs", {{"sep", 2.5}}, h),
            spec("twodiscs_d4", "two_discs", {{"sep", 4.0}}, h),
            spec("twodiscs_d10", "two_discs", {{"sep", 10.0}}, h),
            spec("annulus_0.2_1", "annulus", {{"r_in", 0.2}, {"r_out", 1.0}}, h),
            spec("annulus_0.3_1", "annulus", {{"r_in", 0.3}, {"r_out", 1.0}}, h),
            spec("annulus_0.5_1", "annulus", {{"r_in", 0.5}, {"r_out", 1.0}}, h),
            spec("perforated_n20", "perforated_disc",
                 {{"radius", 1.0}, {"n_holes", 20.0}, {"hole_r", 0.02}}, h, 7),
            spec("perforated_n40", "perforated_disc",
                 {{"radius", 1.0}, {"n_holes", 40.0}, {"hole_r", 0.015}}, h, 8),
            spec("perforated_n10", "perforated_disc",
                 {{"radius", 1.0}, {"n_holes", 10.0}, {"hole_r", 0.03}}, h, 9),
            spec("stadium_2_0.5", "stadium", {{"length", 2.0}, {"radius", 0.5}}, h),
            spec("stadium_1_1", "stadium", {{"length", 1.0}, {"radius", 1.0}}, h),
            spec("stadium_3_0.3", "stadium", {{"length", 3.0}, {"radius", 0.3}}, h),
            spec("square_s1", "square", {{"side", 1.0}}, h),
            spec("square_s2", "square", {{"side", 2.0}}, h),
            spec("blob_s1", "blob", {{"radius", 1.0}, {"amp", 0.25}}, h, 1),
            spec("blob_s2", "blob", {{"radius", 1.0}, {"amp", 0.25}}, h, 2),
            spec("blob_s3", "blob", {{"radius", 1.0}, {"amp", 0.25}}, h, 3),
            spec("blob_s4", "blob", {{"radius", 1.0}, {"amp", 0.25}}, h, 4),
            spec("blob_s5", "blob", {{"radius", 1.0}, {"amp", 0.25}}, h, 5),
        };
        return out;
    }
    throw UnknownCorpusError("unknown corpus '" + name + "'");
}

inline nlohmann::json corpus_json(const std::string& name) {
    nlohmann::json j;
    j["corpus"] = name;
    j["version"] = 1;
    j["shapes"] = corpus(name);
    return j;
}

}  // namespace concentra
