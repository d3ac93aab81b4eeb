// Command-line front end: per-shape computation, corpus sweeps, invariant
// verification, constant tables, and envelope export.
//
// Exit codes: 0 success; 1 failed verification or internal error; 2 argument
// or input parse failure; 3 empty-set input.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "concentra/boundary.hpp"
#include "concentra/distance.hpp"
#include "concentra/errors.hpp"
#include "concentra/functionals.hpp"
#include "concentra/grid.hpp"
#include "concentra/parallel.hpp"
#include "concentra/shapes.hpp"
#include "concentra/steiner.hpp"
#include "concentra/version.hpp"

namespace {

using namespace concentra;

constexpr int kExitFailure = 1;
constexpr int kExitParse = 2;
constexpr int kExitEmpty = 3;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Input files are either GSET1 containers or ShapeSpec JSON; the magic line
// decides.
GridSet load_input(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open '" + path + "'");
    std::string head(5, '\0');
    f.read(head.data(), 5);
    f.clear();
    f.seekg(0);
    if (head == "GSET1") return read_gset(f);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("'" + path + "' is neither GSET1 nor JSON: " + e.what());
    }
    try {
        return generate(j.get<ShapeSpec>());
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("'" + path + "': bad shape spec: " + e.what());
    }
}

int cmd_compute(const std::string& input, double r) {
    const GridSet g = load_input(input);
    const DeficitReport rep = deficit_report(g, r);
    std::cout << to_json(rep).dump(2) << "\n";
    return 0;
}

int cmd_envelope(const std::string& input, double r, const std::string& out) {
    const GridSet g = load_input(input);
    write_gset(envelope(g, r), out);
    return 0;
}

int cmd_polylem(int max_n) {
    std::cout << "N  c(N)            evaluations  minimizer\n";
    for (int n = 0; n <= max_n; ++n) {
        const PolyLemResult res = polylem_constant(n);
        std::ostringstream mins;
        for (std::size_t i = 0; i < res.minimizer.size(); ++i)
            mins << (i ? " " : "") << fmt(res.minimizer[i]);
        std::printf("%-2d %-15s %-12lld [%s]\n", n, fmt(res.c_value).c_str(),
                    res.evaluations, mins.str().c_str());
    }
    return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepRow {
    std::string shape_id;
    double h = 0, r = 0, r_E = 0, delta_r = 0, alpha = 0, alpha_cx = 0, alpha_cy = 0,
           delta_iso = 0, beta = 0, beta_star = 0;
    std::optional<double> ratio;  // alpha^2 / delta_r, only past the guard
};

struct ShapeSweep {
    std::string kind;
    double eps = 0.0;  // ellipse parameter, 0 otherwise
    double beta = 0.0, beta_star = 0.0;
    std::vector<SweepRow> rows;
};

ShapeSweep sweep_shape(const ShapeSpec& sp, const std::vector<double>& r_grid) {
    const GridSet g = generate(sp);
    const ShapeFunctionals f = shape_functionals(g);
    const double tol = discretization_tolerance(g);
    ShapeSweep out;
    out.kind = sp.kind;
    out.eps = sp.param("eps", 0.0);
    out.beta = f.beta;
    out.beta_star = f.beta_star;
    for (double m : r_grid) {
        SweepRow row;
        row.shape_id = sp.id;
        row.h = sp.h;
        row.r = m * f.r_E;
        row.r_E = f.r_E;
        row.delta_r = concentration_deficit(g, row.r);
        row.alpha = f.alpha;
        row.alpha_cx = f.alpha_center.x;
        row.alpha_cy = f.alpha_center.y;
        row.delta_iso = f.delta_iso;
        row.beta = f.beta;
        row.beta_star = f.beta_star;
        if (row.delta_r > 10.0 * tol) row.ratio = f.alpha * f.alpha / row.delta_r;
        out.rows.push_back(row);
    }
    return out;
}

int cmd_sweep(const std::string& corpus_name, std::optional<double> h_override,
              std::vector<double> r_grid, const std::string& out_dir) {
    std::vector<ShapeSpec> specs = corpus(corpus_name);
    if (h_override)
        for (ShapeSpec& s : specs) s.h = *h_override;
    if (r_grid.empty()) r_grid = {0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0};

    const std::vector<ShapeSweep> shapes = parallel_map<ShapeSweep>(
        static_cast<int>(specs.size()),
        [&](int i) { return sweep_shape(specs[i], r_grid); });

    std::filesystem::create_directories(out_dir);

    std::string csv =
        "shape_id,h,r,r_E,delta_r,alpha,alpha_cx,alpha_cy,delta_iso,beta,beta_star,"
        "ratio_alpha2_over_delta\n";
    for (const ShapeSweep& s : shapes)
        for (const SweepRow& row : s.rows) {
            csv += row.shape_id;
            for (double v : {row.h, row.r, row.r_E, row.delta_r, row.alpha, row.alpha_cx,
                             row.alpha_cy, row.delta_iso, row.beta, row.beta_star})
                csv += "," + fmt(v);
            csv += ",";
            if (row.ratio) csv += fmt(*row.ratio);
            csv += "\n";
        }
    {
        std::ofstream f(out_dir + "/sweep.csv", std::ios::binary);
        if (!f) throw Error("cannot write " + out_dir + "/sweep.csv");
        f << csv;
    }

    // empirical constants over guarded rows
    std::optional<double> c_main;
    for (const ShapeSweep& s : shapes)
        for (const SweepRow& row : s.rows)
            if (row.ratio && (!c_main || *row.ratio > *c_main)) c_main = *row.ratio;
    std::optional<double> k_osc;
    for (const ShapeSweep& s : shapes)
        if (s.beta > 0.0) {
            const double q = s.beta_star / s.beta;
            if (!k_osc || q > *k_osc) k_osc = q;
        }

    // log-log slope of delta vs eps over the ellipse family at r = r_E,
    // excluding readings below twice the disc-measured noise floor
    std::size_t at_one = 0;
    for (std::size_t i = 1; i < r_grid.size(); ++i)
        if (std::abs(r_grid[i] - 1.0) < std::abs(r_grid[at_one] - 1.0)) at_one = i;
    double floor = 0.0;
    int n_ellipse = 0;
    for (const ShapeSweep& s : shapes) {
        if (s.kind == "disc") floor = std::max(floor, std::abs(s.rows[at_one].delta_r));
        if (s.kind == "ellipse") ++n_ellipse;
    }
    std::vector<std::pair<double, double>> pts;  // (ln eps, ln delta)
    for (const ShapeSweep& s : shapes)
        if (s.kind == "ellipse" && s.eps > 0.0 && s.rows[at_one].delta_r > 2.0 * floor)
            pts.push_back({std::log(s.eps), std::log(s.rows[at_one].delta_r)});
    std::optional<double> slope;
    if (n_ellipse >= 3 && pts.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (auto [x, y] : pts) sx += x, sy += y, sxx += x * x, sxy += x * y;
        const double n = static_cast<double>(pts.size());
        slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }

    nlohmann::json summary;
    summary["empirical_C_main"] = c_main ? nlohmann::json(*c_main) : nlohmann::json();
    summary["empirical_K_osc"] = k_osc ? nlohmann::json(*k_osc) : nlohmann::json();
    summary["ellipse_slope"] = slope ? nlohmann::json(*slope) : nlohmann::json();
    summary["metadata"] = {
        {"corpus", corpus_name},
        {"h", specs.empty() ? 0.0 : specs.front().h},
        {"r_grid", r_grid},
        {"rows", shapes.empty() ? 0 : shapes.size() * r_grid.size()},
        {"versions", {{"concentra", kVersion}, {"grid_format", "GSET1"}}},
    };
    {
        std::ofstream f(out_dir + "/summary.json", std::ios::binary);
        if (!f) throw Error("cannot write " + out_dir + "/summary.json");
        f << summary.dump(2) << "\n";
    }
    std::cout << "wrote " << out_dir << "/sweep.csv ("
              << shapes.size() * r_grid.size() << " rows) and " << out_dir
              << "/summary.json\n";
    return 0;
}

// ---------------------------------------------------------------------------
// verify

struct CheckOutcome {
    std::string name;
    bool pass = true;
    double seconds = 0.0;
    std::string detail;  // filled on failure
};

template <typename Fn>
CheckOutcome run_check(const std::string& name, Fn&& body) {
    CheckOutcome out;
    out.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        std::string why;
        out.pass = body(why);
        out.detail = why;
    } catch (const std::exception& e) {
        out.pass = false;
        out.detail = e.what();
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

std::vector<std::int64_t> brute_force_sq(const GridSet& g) {
    std::vector<std::pair<int, int>> occ;
    for (int iy = 0; iy < g.ny(); ++iy)
        for (int ix = 0; ix < g.nx(); ++ix)
            if (g.at(ix, iy)) occ.push_back({ix, iy});
    std::vector<std::int64_t> out(static_cast<std::size_t>(g.nx()) * g.ny(), 0);
    for (int iy = 0; iy < g.ny(); ++iy)
        for (int ix = 0; ix < g.nx(); ++ix) {
            std::int64_t best = std::numeric_limits<std::int64_t>::max();
            for (auto [ox, oy] : occ) {
                const std::int64_t dx = ix - ox, dy = iy - oy;
                best = std::min(best, dx * dx + dy * dy);
            }
            out[static_cast<std::size_t>(iy) * g.nx() + ix] = best;
        }
    return out;
}

int cmd_verify(const std::string& level) {
    const bool full = level == "full";
    const std::uint64_t seed = 20260814;  // fixed: verify output is deterministic
    std::vector<CheckOutcome> checks;

    checks.push_back(run_check("edt brute force", [&](std::string& why) {
        std::mt19937_64 rng(seed);
        const int trials = full ? 200 : 60;
        for (int t = 0; t < trials; ++t) {
            const int nx = 2 + static_cast<int>(rng() % 63), ny = 2 + static_cast<int>(rng() % 63);
            GridSet g(1.0, 0.0, 0.0, nx, ny);
            const int pts = 1 + static_cast<int>(rng() % 120);
            for (int i = 0; i < pts; ++i) {
                const int ix = static_cast<int>(rng() % nx), iy = static_cast<int>(rng() % ny);
                g.set(ix, iy, true);
            }
            const DistanceField d = edt(g);
            const auto ref = brute_force_sq(g);
            for (int iy = 0; iy < ny; ++iy)
                for (int ix = 0; ix < nx; ++ix)
                    if (d.sq(ix, iy) != ref[static_cast<std::size_t>(iy) * nx + ix]) {
                        why = "mismatch in trial " + std::to_string(t);
                        return false;
                    }
        }
        return true;
    }));

    // every remaining check walks the shape corpus
    const std::vector<ShapeSpec> specs = corpus(full ? "full" : "smoke");

    checks.push_back(run_check("closing idempotence", [&](std::string& why) {
        for (const ShapeSpec& sp : specs) {
            const GridSet g = generate(sp);
            const double re = equivalent_radius(g);
            for (double r : {0.2 * re, 0.5 * re, 0.5}) {
                const GridSet once = envelope(g, r);
                if (sym_diff_area(once, envelope(once, r)) != 0.0) {
                    why = sp.id + " at r=" + fmt(r);
                    return false;
                }
                if (!cellwise_subset(g, once)) {
                    why = sp.id + " not extensive at r=" + fmt(r);
                    return false;
                }
            }
        }
        return true;
    }));

    checks.push_back(run_check("dilate envelope equality", [&](std::string& why) {
        for (const ShapeSpec& sp : specs) {
            const GridSet g = generate(sp);
            const double re = equivalent_radius(g);
            for (double r : {0.2 * re, 0.5 * re, 0.5}) {
                if (sym_diff_area(dilate(g, r), dilate(envelope(g, r), r)) != 0.0) {
                    why = sp.id + " at r=" + fmt(r);
                    return false;
                }
            }
        }
        return true;
    }));

    checks.push_back(run_check("coarea identity", [&](std::string& why) {
        for (const ShapeSpec& sp : specs) {
            const GridSet g = generate(sp);
            const double re = equivalent_radius(g), ds = 5.0 * sp.h;
            for (double s : {0.5 * re, re}) {
                const double lhs =
                    (area(dilate(g, s + ds)) - area(dilate(g, s))) / ds;
                const double rhs = perimeter(dilate(g, s + ds / 2.0));
                if (std::abs(lhs - rhs) > 0.03 * rhs) {
                    why = sp.id + " at s=" + fmt(s) + ": " + fmt(lhs) + " vs " + fmt(rhs);
                    return false;
                }
            }
        }
        return true;
    }));

    checks.push_back(run_check("steiner residuals", [&](std::string& why) {
        const double h = full ? 0.005 : 0.01;
        const int count = full ? 20 : 12;
        std::vector<ShapeSpec> convex;
        for (const ShapeSpec& sp : specs)
            if (sp.kind == "disc" || sp.kind == "square" || sp.kind == "ellipse" ||
                sp.kind == "stadium")
                convex.push_back(sp);
        for (ShapeSpec sp : convex) {
            sp.h = h;
            const GridSet g = generate(sp);
            const SteinerFit fit = sample_growth(g, equivalent_radius(g), count);
            if (fit.relative_rms_residual >= 0.02) {
                why = sp.id + " residual " + fmt(fit.relative_rms_residual);
                return false;
            }
        }
        ShapeSpec merge;
        merge.id = "twodiscs_d2.5";
        merge.kind = "two_discs";
        merge.params = {{"sep", 2.5}};
        merge.h = h;
        const SteinerFit fit = sample_growth(generate(merge), 1.0, count);
        if (fit.relative_rms_residual <= 0.05) {
            why = "negative control residual " + fmt(fit.relative_rms_residual);
            return false;
        }
        return true;
    }));

    checks.push_back(run_check("polylem properties", [&](std::string& why) {
        if (polylem_constant(0).c_value != 1.0) {
            why = "c(0) != 1";
            return false;
        }
        if (std::abs(polylem_constant(1).c_value - 0.25) > 1e-6) {
            why = "c(1) off: " + fmt(polylem_constant(1).c_value);
            return false;
        }
        if (std::abs(polylem_constant(2, 200).c_value - polylem_constant(2, 400).c_value) >=
            1e-4) {
            why = "c(2) unstable under stride halving";
            return false;
        }
        std::mt19937_64 rng(seed + 1);
        auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
        const int trials = full ? 1000 : 100;
        for (int t = 0; t < trials; ++t) {
            const int pairs = static_cast<int>(rng() % 4);
            const int ones = static_cast<int>(rng() % (7 - 2 * pairs));
            std::vector<double> p{0.5 + 1.5 * unit()};
            auto mul = [&](const std::vector<double>& f) {
                std::vector<double> out(p.size() + f.size() - 1, 0.0);
                for (std::size_t i = 0; i < p.size(); ++i)
                    for (std::size_t j = 0; j < f.size(); ++j) out[i + j] += p[i] * f[j];
                p = out;
            };
            for (int i = 0; i < pairs; ++i) {
                const double b = unit();
                mul({-b, 1.0});
                mul({-b, 1.0});
            }
            for (int i = 0; i < ones; ++i) mul({1.0, -1.0});
            if (!check_polylem(p, 2 * pairs + ones)) {
                why = "endpoint bound failed on trial " + std::to_string(t);
                return false;
            }
        }
        return true;
    }));

    bool all = true;
    double total = 0.0;
    std::printf("verify level=%s (seed %llu)\n", level.c_str(),
                static_cast<unsigned long long>(seed));
    for (const CheckOutcome& c : checks) {
        all = all && c.pass;
        total += c.seconds;
        std::printf("  %-28s %-4s %8.2f s%s%s\n", c.name.c_str(), c.pass ? "pass" : "FAIL",
                    c.seconds, c.detail.empty() ? "" : "  ", c.detail.c_str());
    }
    std::printf("verify: %zu checks, %s in %.1f s\n", checks.size(),
                all ? "all passed" : "FAILURES above", total);
    return all ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"grid-set concentration functionals"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string input, out_path, corpus_name, level = "smoke";
    double r = 1.0;
    std::optional<double> h_override;
    std::vector<double> r_grid;
    int max_n = 4;

    CLI::App* compute = app.add_subcommand("compute", "deficit report for one set");
    compute->add_option("--input", input, "GSET1 file or shape-spec JSON")->required();
    compute->add_option("--r", r, "concentration radius")->required()->check(CLI::PositiveNumber);

    CLI::App* sweep = app.add_subcommand("sweep", "corpus sweep to CSV + JSON summary");
    sweep->set_help_flag("--help", "print help");  // frees -h for the spacing option
    sweep->add_option("--corpus", corpus_name, "corpus name (smoke|full)")->required();
    sweep->add_option("--h", h_override, "override grid spacing")->check(CLI::PositiveNumber);
    sweep->add_option("--r-grid", r_grid, "radii as multiples of r_E (comma separated)")
        ->delimiter(',');
    sweep->add_option("--out", out_path, "output directory")->required();

    CLI::App* verify = app.add_subcommand("verify", "run the invariant suite");
    verify->add_option("--level", level, "smoke|full")
        ->check(CLI::IsMember({"smoke", "full"}));

    CLI::App* polylem = app.add_subcommand("polylem", "table of endpoint constants c(N)");
    polylem->add_option("--max-n", max_n, "largest degree (0..6)")->check(CLI::Range(0, 6));

    CLI::App* env = app.add_subcommand("envelope", "write the r-envelope as GSET1");
    env->add_option("--input", input, "GSET1 file or shape-spec JSON")->required();
    env->add_option("--r", r, "envelope radius")->required()->check(CLI::PositiveNumber);
    env->add_option("--out", out_path, "output GSET1 path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitParse;
    }

    try {
        if (*compute) return cmd_compute(input, r);
        if (*sweep) return cmd_sweep(corpus_name, h_override, r_grid, out_path);
        if (*verify) return cmd_verify(level);
        if (*polylem) return cmd_polylem(max_n);
        if (*env) return cmd_envelope(input, r, out_path);
    } catch (const EmptySetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEmpty;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const BadParametersError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const UnknownCorpusError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return 0;
}
