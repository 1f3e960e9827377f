#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "dynspec/io.hpp"
#include "dynspec/spectral.hpp"
#include "json.hpp"

using namespace dynspec;

TEST_CASE("format_double round-trips exactly") {
    for (double v : {0.1, 1.0 / 3.0, -0.11, 1e-300, 6.02214076e23, 0.0}) {
        std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("piecewise map JSON round trip is bitwise") {
    PiecewiseLinearMarkovMap m = golden_mean_map();
    std::string text = map_json(m);
    LoadedMap back = parse_map(text);
    REQUIRE(back.is_piecewise());
    CHECK(back.piecewise->breakpoints() == m.breakpoints());
    for (int k = 0; k < m.size(); ++k) {
        CHECK(back.piecewise->slope(k) == m.slope(k));
        CHECK(back.piecewise->intercept(k) == m.intercept(k));
    }
}

TEST_CASE("smooth map JSON round trip keeps the parameter") {
    SmoothFullBranchMap f = moebius(-0.11);
    LoadedMap back = parse_map(map_json(f));
    REQUIRE(back.smooth.has_value());
    CHECK(back.smooth->parameter() == -0.11);
    CHECK(back.smooth->family() == "moebius");
}

TEST_CASE("named fixtures parse") {
    CHECK(parse_map("{\"type\": \"tent\"}").is_piecewise());
    CHECK(parse_map("{\"type\": \"doubling\"}").is_piecewise());
    CHECK(parse_map("{\"type\": \"golden_mean\"}").piecewise->size() == 2);
}

TEST_CASE("malformed map descriptions are rejected with InvalidArgument") {
    for (const char* text : {
             "not json at all",
             "{}",
             "{\"type\": \"nonsense\"}",
             "{\"type\": \"moebius\"}",
             "{\"type\": \"piecewise_linear\", \"breakpoints\": [0, 1]}",
             "{\"type\": \"piecewise_linear\", \"breakpoints\": \"x\", \"branches\": []}",
         }) {
        try {
            (void)parse_map(text);
            CHECK_MESSAGE(false, text);
        } catch (const Error& e) {
            CHECK(e.code() == Errc::InvalidArgument);
        }
    }
}

TEST_CASE("an invalid but well-formed map still parses; validation tells") {
    LoadedMap m = parse_map(
        "{\"type\": \"piecewise_linear\", \"breakpoints\": [0, 0.5, 1],"
        " \"branches\": [{\"slope\": 0.5, \"intercept\": 0},"
        " {\"slope\": 2, \"intercept\": -1}]}");
    REQUIRE(m.is_piecewise());
    CHECK_FALSE(m.piecewise->valid());
    std::string report = validation_json(m.piecewise->validation());
    auto j = nlohmann::json::parse(report);
    CHECK(j["ok"] == false);
    CHECK(j["expanding_ok"] == false);
    bool found = false;
    for (const auto& issue : j["issues"]) found = found || issue["code"] == "NotExpanding";
    CHECK(found);
}

TEST_CASE("spectral report serialization carries the key quantities") {
    SpectralReport rep = mixing_rate(tent_map(), 2);
    auto j = nlohmann::json::parse(spectral_report_json(rep));
    CHECK(j["beta"] == 1.0);
    CHECK(j["degree"] == 2);
    CHECK(std::abs(j["mixing_rate"].get<double>() - 2.0 * std::log(2.0)) < 1e-12);
    CHECK(j["eigenvalues"].size() == 6);
    CHECK(j["density"].size() == 2);

    std::string csv = spectrum_csv(rep);
    CHECK(csv.rfind("block,re,im,modulus\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}

TEST_CASE("density CSV requires a piecewise constant") {
    PiecewiseLinearMarkovMap m = golden_mean_map();
    PiecewisePolynomial h = invariant_density(m);
    std::string csv = density_csv(h);
    CHECK(csv.find("element,lo,hi,value") == 0);
    std::istringstream rows(csv);
    std::string line;
    std::getline(rows, line);
    std::vector<double> lo, hi, value;
    while (std::getline(rows, line)) {
        int e = 0;
        double a = 0, b = 0, v = 0;
        REQUIRE(std::sscanf(line.c_str(), "%d,%lf,%lf,%lf", &e, &a, &b, &v) == 4);
        lo.push_back(a);
        hi.push_back(b);
        value.push_back(v);
    }
    REQUIRE(value.size() == 2);
    CHECK(lo[0] == 0.0);
    CHECK(hi[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(hi[1] == 1.0);
    CHECK(value[0] == doctest::Approx(1.125).epsilon(1e-12));
    CHECK(value[1] == doctest::Approx(0.75).epsilon(1e-12));

    PiecewisePolynomial linear;
    linear.map = &m;
    linear.coeff = {{1.0, 2.0}, {0.5, 0.0}};
    CHECK_THROWS_AS((void)density_csv(linear), Error);
}

TEST_CASE("series CSV shape") {
    CorrelationSeries s;
    s.config.n_max = 3;
    s.lagged = {2.0, 1.0, 0.5, 0.25};
    s.std_error = {0.0, 0.01, 0.01, 0.01};
    std::string csv = series_csv(s);
    CHECK(csv.rfind("n,corr,normalized,std_error\n", 0) == 0);
    CHECK(csv.find("\n1,1,0.5,0.01") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}

TEST_CASE("verdict and property reports serialize with their flags") {
    BoundsVerdict v = verify_bounds(golden_mean_map(), 4);
    auto j = nlohmann::json::parse(bounds_verdict_json(v));
    CHECK(j["ok"] == true);
    CHECK(j["nu_identity_deviation"] == 0.0);
    CHECK(j["same_sign_applicable"] == true);

    std::vector<double> grid = {0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0};
    PressureProperties p = verify_pressure_properties(golden_mean_map(), grid);
    auto q = nlohmann::json::parse(pressure_properties_json(p));
    CHECK(q["ok"] == true);
    CHECK(std::abs(q["p_at_one"].get<double>()) < 1e-10);
}

TEST_CASE("file round trip") {
    std::string path = "io_test_tmp.json";
    write_file(path, map_json(tent_map()));
    LoadedMap m = load_map(path);
    CHECK(m.is_piecewise());
    CHECK(m.piecewise->valid());
    std::remove(path.c_str());
    CHECK_THROWS_AS((void)load_map("definitely_missing_file.json"), Error);
}
