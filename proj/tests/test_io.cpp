#include <catch_amalgamated.hpp>

#include <sstream>

#include "supres/io.hpp"

using namespace supres;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinRel;

namespace {

const char* kClumps = R"({
  "geometry": {"clumps": {"num_clumps": 2, "clump_sizes": [2, 2], "alpha": 0.2, "beta": 20,
                          "anchors": [0.2, 0.7], "M": 100}},
  "M": 100, "L": 500, "nu": 0.05, "estimator": "esprit", "trials": 12, "seed": 9,
  "sweep": {"parameter": "nu", "logspace": [-3, -1, 5]}
})";

std::string first_line(const std::string& s)
{
    return s.substr(0, s.find('\n'));
}

} // namespace

TEST_CASE("config parsing")
{
    const ExperimentConfig c = io::parse_config(kClumps);
    CHECK(c.M == 100);
    CHECK(c.L == 500);
    CHECK(c.nu == 0.05);
    CHECK(c.estimator == Estimator::esprit);
    CHECK(c.trials == 12);
    CHECK(c.root_seed == 9);
    REQUIRE(c.sweep);
    CHECK(c.sweep->parameter == SweepParameter::nu);
    REQUIRE(c.sweep->values.size() == 5);
    CHECK_THAT(c.sweep->values.front(), WithinRel(1e-3, 1e-12));
    CHECK_THAT(c.sweep->values[2], WithinRel(1e-2, 1e-12));
    CHECK_THAT(c.sweep->values.back(), WithinRel(1e-1, 1e-12));
    CHECK(resolve_support(c).size() == 4);
}

TEST_CASE("config round trip")
{
    ExperimentConfig c = io::parse_config(kClumps);
    c.phase = PhaseSpec{{SweepParameter::L, {10, 100, 1000, 10000}}, {SweepParameter::nu, {0.1, 1, 2, 5}}, -2.0};
    c.abscissa = Abscissa::sigma_s;
    const ExperimentConfig back = io::parse_config(io::to_json(c).dump());
    CHECK(io::to_json(back) == io::to_json(c));
    CHECK(back.phase->threshold == -2.0);
    CHECK(back.abscissa == Abscissa::sigma_s);

    ExperimentConfig explicit_support;
    explicit_support.geometry = SupportSet{0.1, 0.45, 0.9};
    explicit_support.M = 16;
    const ExperimentConfig again = io::parse_config(io::to_json(explicit_support).dump());
    CHECK(std::get<SupportSet>(again.geometry) == SupportSet{0.1, 0.45, 0.9});
}

TEST_CASE("malformed JSON reports its position")
{
    try {
        io::parse_config("{\n  \"M\": 16,\n  \"L\": ]\n}");
        FAIL("expected a ValidationError");
    } catch (const ValidationError& e) {
        CHECK_THAT(e.what(), ContainsSubstring("malformed JSON"));
        CHECK_THAT(e.what(), ContainsSubstring("line 3"));
        CHECK_THAT(e.what(), ContainsSubstring("column"));
    }
}

TEST_CASE("schema violations")
{
    const std::string support = R"("geometry": {"support": {"points": [0.1, 0.5]}}, "M": 16)";
    auto bad = [&](const std::string& extra) { return "{" + support + extra + "}"; };
    CHECK_NOTHROW(io::parse_config(bad("")));
    CHECK_THROWS_WITH(io::parse_config(bad(R"(, "colour": 1)")), ContainsSubstring("unknown key"));
    CHECK_THROWS_AS(io::parse_config(bad(R"(, "amplitudes": "laplace")")), ValidationError);
    CHECK_THROWS_AS(io::parse_config(bad(R"(, "estimator": "prony")")), ValidationError);
    CHECK_THROWS_AS(io::parse_config(bad(R"(, "L": "many")")), ValidationError);
    CHECK_THROWS_AS(io::parse_config(bad(R"(, "sweep": {"parameter": "M", "values": [1, 2, 3]})")),
                    ValidationError);
    CHECK_THROWS_AS(io::parse_config(bad(R"(, "sweep": {"parameter": "nu"})")), ValidationError);
    CHECK_THROWS_AS(io::parse_config(bad(R"(, "sweep": {"parameter": "nu", "logspace": [0, 1]})")),
                    ValidationError);
    CHECK_THROWS_AS(io::parse_config(R"({"M": 16})"), ValidationError);
    CHECK_THROWS_AS(io::parse_config("[1, 2]"), ValidationError);
    CHECK_THROWS_AS(io::parse_config(R"({"geometry": {"support": {"points": [0.1, 0.5]}}, "M": 2})"),
                    ValidationError);
    CHECK_THROWS_WITH(
        io::parse_config(R"({"geometry": {"clumps": {"num_clumps": 2, "clump_sizes": [2, 2], "alpha": 0.2,
            "beta": 20, "anchors": [0.2, 0.3], "M": 100}}, "M": 100})"),
        ContainsSubstring("(c)"));
    CHECK_THROWS_AS(io::load_config("/nonexistent/config.json"), ValidationError);
}

TEST_CASE("CSV writers")
{
    const auto batch = synthesize_snapshots(SupportSet{0.1, 0.6}, 4, 3, CircularGaussianAmplitudes{},
                                            NoiseModel{0.1}, 5);
    std::ostringstream snaps;
    io::write_snapshots_csv(snaps, batch);
    CHECK(first_line(snaps.str()) == "re_1,im_1,re_2,im_2,re_3,im_3");
    const std::string snap_text = snaps.str();
    CHECK(std::count(snap_text.begin(), snap_text.end(), '\n') == 5);

    std::ostringstream cov;
    io::write_covariance_csv(cov, empirical_covariance(batch));
    CHECK(first_line(cov.str()) == "row,col,re,im");
    const std::string cov_text = cov.str();
    CHECK(std::count(cov_text.begin(), cov_text.end(), '\n') == 17);

    SweepResult r;
    r.rows.push_back({0.1, 2.0, 0.01, 0.001, 1e-4, 10, 0});
    std::ostringstream sw;
    io::write_sweep_csv(sw, {r});
    CHECK(first_line(sw.str()) == "metric,parameter,value,sigma_s,mean,std,n,censored");
    CHECK_THAT(sw.str(), ContainsSubstring("md,nu,0.1"));

    PhaseGrid g;
    g.axis1 = {SweepParameter::L, {10, 20}};
    g.axis2 = {SweepParameter::nu, {0.1, 0.2}};
    g.cells = {-3, -2, -1, 0};
    g.crossings.push_back({10, 0.15});
    std::ostringstream ph, cr;
    io::write_phase_csv(ph, g);
    io::write_crossings_csv(cr, g);
    CHECK(ph.str() == "axis1,axis2,cell\n10,0.10000000000000001,-3\n10,0.20000000000000001,-2\n"
                      "20,0.10000000000000001,-1\n20,0.20000000000000001,0\n");
    CHECK(first_line(cr.str()) == "axis1,axis2");

    const auto j = io::to_json(g);
    CHECK(j.at("transition_fit").is_null());
    CHECK(j.at("cells").size() == 4);
}
