#include <limits>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "saranfk/report.hpp"

using namespace saranfk;

namespace {

ReportRecord sample_record() {
    ReportRecord r;
    r.id = "qfk-lr@q=0.3";
    r.anchor = "Corollary 4.3";
    r.q = 0.3;
    r.cost_class = CostClass::QLattice;
    r.samples = 5;
    r.max_rel_residual = std::numeric_limits<double>::infinity();
    r.pass = false;
    r.wall_time_ms = 12.345678901234567;
    ReportFailure f;
    f.params.values = {{"alpha1", 0.1 + 1.0 / 3.0}, {"k", 2.0}};
    f.params.arguments = {{"x", Complex(0.123456789012345678, -0.2)}};
    f.residual = std::numeric_limits<double>::infinity();
    r.failures.push_back(f);
    f.residual = 1.0000000000000002e-4;
    r.failures.push_back(f);
    return r;
}

}  // namespace

TEST_CASE("json record field set and order") {
    const std::string line = to_json_line(sample_record());
    const auto j = nlohmann::ordered_json::parse(line);
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"id", "anchor", "q", "samples", "max_rel_residual", "pass", "wall_time_ms",
                                           "failures"});
    CHECK(j["max_rel_residual"].is_null());
    CHECK(j["failures"][0]["residual"].is_null());
    CHECK(j["failures"][1].contains("params"));
    CHECK(line.find('\n') == std::string::npos);
}

TEST_CASE("json round trip is lossless") {
    const ReportRecord r = sample_record();
    const ReportRecord back = from_json_line(to_json_line(r));
    CHECK(back.id == r.id);
    CHECK(back.q == r.q);
    CHECK(back.cost_class == CostClass::QLattice);
    CHECK(back.wall_time_ms == r.wall_time_ms);
    REQUIRE(back.failures.size() == 2);
    CHECK(back.failures[0].params == r.failures[0].params);
    CHECK(std::isinf(back.failures[0].residual));
    CHECK(back.failures[1].residual == r.failures[1].residual);
    CHECK(to_json_line(back) == to_json_line(r));
}

TEST_CASE("a null q stays null") {
    ReportRecord r = sample_record();
    r.id = "euler-1";
    r.q.reset();
    r.failures.clear();
    r.max_rel_residual = 3e-15;
    r.pass = true;
    const ReportRecord back = from_json_line(to_json_line(r));
    CHECK_FALSE(back.q.has_value());
    CHECK(back.cost_class == CostClass::SingleIntegral);
}

TEST_CASE("reports from verification runs") {
    const auto res = verify_identity(lookup("gasper-discrete"), 42, 4);
    const ReportRecord r = to_record(res);
    CHECK(r.id == "gasper-discrete@q=0.5");
    CHECK(r.pass);
    std::stringstream s;
    write_report(s, {r, r}, ReportFormat::Json);
    const auto back = read_report(s);
    REQUIRE(back.size() == 2);
    CHECK(to_json_line(back[1]) == to_json_line(r));

    std::stringstream h;
    write_report(h, {r}, ReportFormat::Human);
    CHECK(h.str().find("Gasper finite expansion of 3phi2") != std::string::npos);
    CHECK(h.str().find("e-") != std::string::npos);

    std::stringstream c;
    write_report(c, {r}, ReportFormat::Csv);
    std::string header, row, extra;
    std::getline(c, header);
    std::getline(c, row);
    CHECK(header.rfind("id,anchor,q,", 0) == 0);
    CHECK(row.rfind("gasper-discrete@q=0.5,", 0) == 0);
    CHECK_FALSE(std::getline(c, extra));
}

TEST_CASE("bad input") {
    CHECK_THROWS_AS(parse_report_format("xml"), RangeError);
    CHECK_THROWS_AS(from_json_line("{\"id\": 1}"), RangeError);
    CHECK_THROWS_AS(from_json_line("not json"), RangeError);
}
