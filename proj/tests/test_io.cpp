#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "battery/battery.hpp"
#include "dsl/expr.hpp"
#include "io/export.hpp"

using namespace supenv;
using namespace supenv::io;
using Json = nlohmann::json;

namespace {

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::string source_dir() { return SUPENV_SOURCE_DIR; }

}  // namespace

TEST_CASE("value formatting") {
    CHECK(format_value(0.1) == "0.1");
    CHECK(format_value(-0.0) == "0");
    CHECK(format_value(1.0 / 3.0) == "0.333333333333");
    CHECK(format_value(kInfinity) == "inf");
    CHECK(format_value(ExtendedValue::finite(2.5e-20)) == "2.5e-20");
    CHECK(format_value(123456789012345.0) == "1.23456789012e+14");
}

TEST_CASE("envelope csv layout") {
    BoxGrid g(-1.0, 1.0, 3);
    FunctionSpec f("ind", 1, [](const Point& p) { return p[0] < 0 ? kInfinity : ExtendedValue::finite(p[0]); });
    auto r = envelopes::compute_envelopes(f, g);
    auto rows = lines(envelope_csv(r));
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "x,f,f_ls,f_lc,f_lslc");
    CHECK(rows[1] == "-1,inf,inf,inf,inf");
    CHECK(rows[2] == "0,0,0,0,0");
    CHECK(rows[3] == "1,1,1,1,1");

    BoxGrid g2({0.0, 0.0}, {1.0, 1.0}, {2, 2});
    auto r2 = envelopes::compute_envelopes(constant_function(1.0, 2), g2);
    auto rows2 = lines(envelope_csv(r2));
    REQUIRE(rows2.size() == 5);
    CHECK(rows2[0] == "x,y,f,f_ls,f_lc,f_lslc");
    CHECK(rows2[2] == "1,0,1,1,1,1");
}

TEST_CASE("envelope json carries the metadata") {
    BoxGrid g(-2.0, 2.0, 9);
    auto r = envelopes::compute_envelopes(battery::find("twopoint").function(), g);
    r.expression = "if abs(x) = 1 then 0 else inf";
    auto j = Json::parse(envelope_json(r));
    CHECK(j["schema"] == 1);
    CHECK(j["kind"] == "envelope");
    CHECK(j["function"]["expression"] == r.expression);
    CHECK(j["grid"]["nodes"][0] == 9);
    CHECK(j["options"]["approach_depth"] == 40);
    CHECK(j["f"][0] == "inf");
    CHECK(j["domain_hull"]["vertices"].size() == 2);
    CHECK(j["ordering_ok"] == true);
    CHECK(envelope_json(r) == envelope_json(r));
}

TEST_CASE("sweep json keys") {
    BoxGrid g(-2.0, 2.0, 41);
    auto s = lp::p_sweep(battery::find("abs").function(), g, {1, 2});
    auto j = Json::parse(sweep_json(s, {"abs", "abs(x)"}));
    CHECK(j["schema"] == 1);
    CHECK(j.contains("p_ladder"));
    CHECK(j.contains("max_gap"));
    CHECK(j["p_ladder"].size() == 2);
    CHECK(j["rungs"].size() == 2);
    auto rows = lines(sweep_csv(s));
    CHECK(rows[0] == "x,p1,p2,sup,f_lslc");
    CHECK(rows.size() == 42);
}

TEST_CASE("recovery and falsify renderings") {
    auto r = variational::recovery_sequence(-1.0, 1.0, 1.0, 10);
    auto j = Json::parse(recovery_json(r));
    CHECK(j["deviation"].get<double>() == doctest::Approx(0.1));
    CHECK(j["slopes_inside"] == true);
    CHECK(lines(recovery_csv(r))[0] == "t,u");

    auto none = Json::parse(falsify_json(std::nullopt, 0.3, {}, {"abs", "abs(x)"}));
    CHECK(none["found"] == false);
    CHECK(none["counterexample"].is_null());
    CHECK(lines(falsify_csv(std::nullopt)).size() == 1);
}

TEST_CASE("unwritable paths raise IoError") {
    CHECK_THROWS_AS(write_file("/nonexistent-dir/x/out.csv", "x"), IoError);
    CHECK_THROWS_AS(read_file("/nonexistent-dir/x/in.csv"), IoError);
    const auto tmp = std::filesystem::temp_directory_path() / "supenv_io_test.txt";
    write_file(tmp.string(), "abc\n");
    CHECK(read_file(tmp.string()) == "abc\n");
    std::filesystem::remove(tmp);
}

TEST_CASE("shipped battery files match the built-in table") {
    for (const auto& e : battery::entries()) {
        CAPTURE(e.name);
        const auto path = std::filesystem::path(source_dir()) / "battery" / (e.name + ".fn");
        REQUIRE(std::filesystem::exists(path));
        CHECK(dsl::parse(read_file(path.string())) == dsl::parse(e.expression));
    }
}

TEST_CASE("golden files name an expression that reproduces their samples") {
    for (const auto& e : battery::entries()) {
        CAPTURE(e.name);
        const auto path = std::filesystem::path(source_dir()) / "battery" / "golden" / (e.name + ".json");
        REQUIRE(std::filesystem::exists(path));
        auto j = Json::parse(read_file(path.string()));
        const std::string expr = j["function"]["expression"];
        auto f = dsl::to_function_spec(dsl::parse(expr), e.name, e.dim);
        auto fs = sample(f, e.grid());
        const auto& golden = j["f"];
        REQUIRE(golden.size() == fs.size());
        bool same = true;
        for (std::size_t i = 0; i < fs.size() && same; ++i) {
            if (fs[i].is_infinite()) same = golden[i] == "inf";
            else same = golden[i].is_number() && golden[i].get<double>() == fs[i].value();
        }
        CHECK(same);
    }
}
