#include "nbm/error.hpp"
#include "nbm/scada.hpp"

#include <doctest.h>

#include <sstream>

using namespace nbm;

namespace {

const char* kHeader =
    "timestamp,wind_speed,wind_direction,active_power,rotor_speed,generator_speed,current\n";

SCADADataset parse(const std::string& text) {
    std::istringstream in(text);
    return parse_scada_table(in);
}

} // namespace

TEST_CASE("parse: header-only table yields an empty dataset") {
    const auto d = parse(kHeader);
    CHECK(d.size() == 0);
}

TEST_CASE("parse: well-formed rows round-trip bit-exactly") {
    const std::string text = std::string(kHeader) +
                             "1000,8.5,210.25,1500.125,11.5,1299.5,1320.0625\n"
                             "1600,9.124999999999999,211,1600,11.75,1327.75,1400\n"
                             "2200,0,0,0,0,0,0\n";
    const auto d = parse(text);
    REQUIRE(d.size() == 3);
    CHECK(d.records[0].timestamp == 1000);
    CHECK(d.records[0].wind_speed == 8.5);
    CHECK(d.records[1].wind_speed == 9.124999999999999);
    CHECK(d.records[2].active_power == 0.0);

    std::ostringstream out;
    write_scada_table(d, out);
    const auto reparsed = parse(out.str());
    CHECK(reparsed == d);
}

TEST_CASE("parse: wind_direction out of range names the row") {
    const std::string text = std::string(kHeader) + "1000,8,400,100,10,1100,90\n";
    CHECK_THROWS_WITH_AS(parse(text), doctest::Contains("row 1"), ParseError);
    CHECK_THROWS_WITH_AS(parse(text), doctest::Contains("wind_direction"), ParseError);
}

TEST_CASE("parse: malformed numeric cell reports the line number") {
    const std::string text = std::string(kHeader) + "1000,8,210,100,10,1100,90\n"
                                                    "1600,8,2x0,100,10,1100,90\n";
    CHECK_THROWS_WITH_AS(parse(text), doctest::Contains("line 3"), ParseError);
}

TEST_CASE("parse: non-monotonic timestamps rejected") {
    const std::string text = std::string(kHeader) + "1000,8,210,100,10,1100,90\n"
                                                    "1000,8,210,100,10,1100,90\n";
    CHECK_THROWS_WITH_AS(parse(text), doctest::Contains("strictly increasing"), ParseError);
}

TEST_CASE("parse: wrong header is a schema error") {
    CHECK_THROWS_AS(parse("time,ws,wd,p,r,g,c\n1,2,3,4,5,6,7\n"), ParseError);
}

TEST_CASE("parse: wrong column count names the line") {
    const std::string text = std::string(kHeader) + "1000,8,210,100,10,1100\n";
    CHECK_THROWS_WITH_AS(parse(text), doctest::Contains("expected 7 columns"), ParseError);
}

TEST_CASE("parse: CRLF line endings accepted") {
    const std::string text =
        "timestamp,wind_speed,wind_direction,active_power,rotor_speed,generator_speed,current\r\n"
        "1000,8.5,210,1500,11.5,1299.5,1320\r\n";
    const auto d = parse(text);
    REQUIRE(d.size() == 1);
    CHECK(d.records[0].wind_speed == 8.5);
}

TEST_CASE("format_double round-trips awkward values") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.123456789, -0.0, 5.0}) {
        CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
    }
}
