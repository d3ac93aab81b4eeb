#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <numbers>

#include "concentra/boundary.hpp"
#include "concentra/shapes.hpp"

using namespace concentra;
using std::numbers::pi;

namespace {

ShapeSpec make(const std::string& kind, std::map<std::string, double> params, double h,
               std::uint64_t seed = 0) {
    ShapeSpec s;
    s.id = kind;
    s.kind = kind;
    s.params = std::move(params);
    s.h = h;
    s.seed = seed;
    return s;
}

}  // namespace

TEST_CASE("generated areas match the analytic ones", "[shapes]") {
    const double h = 0.01;
    struct Row {
        ShapeSpec spec;
        double expect;
    };
    const Row rows[] = {
        {make("disc", {{"radius", 1.0}}, h), pi},
        {make("ellipse", {{"eps", 0.2}}, h), pi},
        {make("two_discs", {{"sep", 4.0}}, h), 2.0 * pi},
        {make("annulus", {{"r_in", 0.3}, {"r_out", 1.0}}, h), pi * (1.0 - 0.09)},
        {make("square", {{"side", 2.0}}, h), 4.0},
        {make("stadium", {{"length", 2.0}, {"radius", 0.5}}, h), 2.0 + pi * 0.25},
    };
    for (const Row& row : rows) {
        GridSet g = generate(row.spec);
        CAPTURE(row.spec.kind);
        const double per = perimeter(g);
        CHECK(area(g) == Catch::Approx(row.expect).margin(3.0 * h * per));
    }
}

TEST_CASE("perforated disc loses the hole area and stays connected", "[shapes]") {
    const double h = 0.005;
    ShapeSpec s = make("perforated_disc",
                       {{"radius", 1.0}, {"n_holes", 20.0}, {"hole_r", 0.02}}, h, 7);
    GridSet g = generate(s);
    const double expect = pi - 20.0 * pi * 0.02 * 0.02;
    CHECK(area(g) == Catch::Approx(expect).margin(3.0 * h * (2.0 * pi + 20.0 * 2.0 * pi * 0.02)));
    const BoundaryCurve c = extract_boundary(g);
    CHECK(c.loops.size() == 21);  // outer rim plus one loop per hole
}

TEST_CASE("generation is deterministic, seeds matter", "[shapes]") {
    ShapeSpec s = make("blob", {{"radius", 1.0}, {"amp", 0.25}}, 0.01, 1);
    GridSet a = generate(s);
    GridSet b = generate(s);
    CHECK(cellwise_equal(a, b));
    s.seed = 2;
    GridSet c = generate(s);
    CHECK(sym_diff_area(a, c) > 0.0);
}

TEST_CASE("blob stays near its base radius", "[shapes]") {
    ShapeSpec s = make("blob", {{"radius", 1.0}, {"amp", 0.25}}, 0.01, 4);
    GridSet g = generate(s);
    CHECK(area(g) > pi * 0.55 * 0.55);
    CHECK(area(g) < pi * 1.45 * 1.45);
}

TEST_CASE("parameter validation", "[shapes]") {
    CHECK_THROWS_AS(generate(make("disc", {{"radius", -1.0}}, 0.01)), BadParametersError);
    CHECK_THROWS_AS(generate(make("two_discs", {{"sep", 1.5}}, 0.01)), BadParametersError);
    CHECK_THROWS_AS(generate(make("annulus", {{"r_in", 1.0}, {"r_out", 0.3}}, 0.01)),
                    BadParametersError);
    CHECK_THROWS_AS(generate(make("ellipse", {{"eps", 0.9}}, 0.01)), BadParametersError);
    CHECK_THROWS_AS(generate(make("no_such_shape", {}, 0.01)), BadParametersError);
    // pitch too coarse for the shape scale
    CHECK_THROWS_AS(generate(make("disc", {{"radius", 1.0}}, 0.2)), BadParametersError);
}

TEST_CASE("corpora have the published sizes and budgets", "[shapes]") {
    const auto smoke = corpus("smoke");
    const auto full = corpus("full");
    CHECK(smoke.size() == 6);
    CHECK(full.size() == 25);
    long long smoke_cells = 0;
    for (const auto& s : smoke) {
        GridSet g = generate(s);
        smoke_cells += static_cast<long long>(g.nx()) * g.ny();
    }
    CHECK(smoke_cells < 10'000'000);
    CHECK_THROWS_AS(corpus("nightly"), UnknownCorpusError);
}

TEST_CASE("corpus ids are unique", "[shapes]") {
    for (const char* name : {"smoke", "full"}) {
        const auto list = corpus(name);
        for (std::size_t i = 0; i < list.size(); ++i)
            for (std::size_t j = i + 1; j < list.size(); ++j)
                CHECK(list[i].id != list[j].id);
    }
}

TEST_CASE("shape specs round-trip through JSON", "[shapes]") {
    ShapeSpec s = make("annulus", {{"r_in", 0.3}, {"r_out", 1.0}}, 0.005, 11);
    s.id = "annulus_test";
    const nlohmann::json j = s;
    const ShapeSpec back = j.get<ShapeSpec>();
    CHECK(back.id == s.id);
    CHECK(back.kind == s.kind);
    CHECK(back.h == s.h);
    CHECK(back.seed == s.seed);
    CHECK(back.params == s.params);
}

TEST_CASE("corpus JSON is versioned", "[shapes]") {
    const nlohmann::json j = corpus_json("smoke");
    CHECK(j.at("version") == 1);
    CHECK(j.at("corpus") == "smoke");
    CHECK(j.at("shapes").size() == 6);
    const ShapeSpec first = j.at("shapes")[0].get<ShapeSpec>();
    CHECK(first.kind == "disc");
}

TEST_CASE("corpus files on disk match the in-code lists", "[shapes]") {
    for (const std::string name : {"smoke", "full"}) {
        const std::string path =
            std::string(CONCENTRA_DATA_DIR) + "/corpus_" + name + ".json";
        std::ifstream in(path, std::ios::binary);
        REQUIRE(in.good());
        const nlohmann::json on_disk = nlohmann::json::parse(in);
        CHECK(on_disk == corpus_json(name));
    }
}
