#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <string>
#include <vector>

#include "doctest.h"
#include "dskg/errors.hpp"
#include "dskg/lab.hpp"

using namespace dskg::lab;
using dskg::ode::Outcome;

namespace {

ScanSpec small_spec() {
    ScanSpec spec;
    spec.mass_is_curved = true;
    spec.mass = {0.5};
    spec.d0 = {-0.6, -0.2};
    spec.d1 = {1.0, 3.0};
    spec.amp = {1e-4};
    spec.grid = {-2.2, 2.2, 111, 0.02, 5.0};
    return spec;
}

}  // namespace

TEST_CASE("scan spec JSON parsing") {
    const std::string text = R"({
        "schema_version": 1,
        "M": [0.5],
        "d0": {"min": -0.9, "max": -0.1, "count": 5},
        "d1": [1, 2, 3],
        "amp": [1e-4],
        "grid": {"nx": 221, "dt": 0.01, "t_max": 30},
        "threads": 2
    })";
    const auto spec = ScanSpec::from_json(text);
    CHECK(spec.mass_is_curved);
    CHECK(spec.mass == std::vector<double>{0.5});
    REQUIRE(spec.d0.size() == 5);
    CHECK(spec.d0.front() == doctest::Approx(-0.9).epsilon(1e-15));
    CHECK(spec.d0[2] == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(spec.d0.back() == doctest::Approx(-0.1).epsilon(1e-14));
    CHECK(spec.d1 == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(spec.p == std::vector<double>{2.0});  // default preserved
    CHECK(spec.grid.nx == 221);
    CHECK(spec.grid.t_max == 30.0);
    CHECK(spec.threads == 2);

    // Round trip through to_json.
    const auto again = ScanSpec::from_json(spec.to_json());
    CHECK(again.mass == spec.mass);
    CHECK(again.d0 == spec.d0);
    CHECK(again.grid.dt == spec.grid.dt);
    CHECK(again.two_grid == spec.two_grid);
}

TEST_CASE("scan spec rejects malformed input") {
    CHECK_THROWS_AS(ScanSpec::from_json("not json"), dskg::ConfigError);
    CHECK_THROWS_AS(ScanSpec::from_json("[1,2]"), dskg::ConfigError);
    CHECK_THROWS_AS(  // missing schema_version
        ScanSpec::from_json(R"({"M":[0.5],"d0":[0],"d1":[0]})"),
        dskg::ConfigError);
    CHECK_THROWS_AS(  // unknown key
        ScanSpec::from_json(
            R"({"schema_version":1,"M":[0.5],"d0":[0],"d1":[0],"oops":1})"),
        dskg::ConfigError);
    CHECK_THROWS_AS(  // both mass axes
        ScanSpec::from_json(
            R"({"schema_version":1,"m":[0.3],"M":[0.5],"d0":[0],"d1":[0]})"),
        dskg::ConfigError);
    CHECK_THROWS_AS(  // no mass axis
        ScanSpec::from_json(R"({"schema_version":1,"d0":[0],"d1":[0]})"),
        dskg::ConfigError);
    CHECK_THROWS_AS(  // CFL violation surfaces through validate
        ScanSpec::from_json(
            R"({"schema_version":1,"M":[0.5],"d0":[0],"d1":[0],
                "grid":{"nx":45,"dt":0.2}})"),
        dskg::ConfigError);
    CHECK_THROWS_AS(  // unknown grid key
        ScanSpec::from_json(
            R"({"schema_version":1,"M":[0.5],"d0":[0],"d1":[0],
                "grid":{"cells":10}})"),
        dskg::ConfigError);
    CHECK_THROWS_AS(  // axis of wrong type
        ScanSpec::from_json(
            R"({"schema_version":1,"M":"half","d0":[0],"d1":[0]})"),
        dskg::ConfigError);
}

TEST_CASE("smoke sweep classifies every point") {
    const auto result = run_scan(small_spec());
    CHECK(result.records.size() == 4);
    CHECK(result.warnings.empty());
    for (const auto& rec : result.records) {
        CHECK(rec.status == RecordStatus::ok);
        CHECK(rec.M == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(!rec.detail.empty());
        CHECK(rec.holder_ok);
        CHECK(rec.causal_ok);
        CHECK(rec.cert_eventual_checked);
    }
    // Records arrive in grid order: d0 major, d1 minor here.
    CHECK(result.records[0].key.d0 == -0.6);
    CHECK(result.records[0].key.d1 == 1.0);
    CHECK(result.records[1].key.d1 == 3.0);
    CHECK(result.records[2].key.d0 == -0.2);
}

TEST_CASE("invalid parameter points are skipped with a reason") {
    ScanSpec spec = small_spec();
    spec.mass_is_curved = false;
    spec.mass = {0.3, 0.6};  // 0.6 > n/2
    spec.d0 = {-0.4};
    spec.d1 = {1.0};
    spec.beta = {0.0, -0.5};  // beta -0.5 makes q_eff = 1
    spec.grid.t_max = 1.0;
    const auto result = run_scan(spec);
    REQUIRE(result.records.size() == 4);
    int skipped = 0;
    for (const auto& rec : result.records)
        if (rec.status == RecordStatus::skipped) {
            ++skipped;
            CHECK(!rec.detail.empty());
        }
    CHECK(skipped == 3);  // (0.3, beta=-0.5), (0.6, *)
    CHECK(result.records[0].status == RecordStatus::ok);
    CHECK(result.records[1].detail.find("exceed") != std::string::npos);
    CHECK(result.records[2].detail.find("exceeds n/2") != std::string::npos);

    const auto csv = records_csv(result);
    CHECK(csv.find("skipped") != std::string::npos);
}

TEST_CASE("duplicate grid points are removed with a warning") {
    ScanSpec spec = small_spec();
    spec.d0 = {-0.4, -0.4};
    spec.d1 = {2.0};
    spec.grid.t_max = 1.0;
    const auto result = run_scan(spec);
    CHECK(result.records.size() == 1);
    REQUIRE(result.warnings.size() == 1);
    CHECK(result.warnings[0].find("duplicate grid point") != std::string::npos);
}

TEST_CASE("records CSV is byte-identical across thread counts") {
    ScanSpec spec = small_spec();
    spec.grid.t_max = 3.0;
    spec.threads = 1;
    const auto serial = run_scan(spec);
    spec.threads = 3;
    const auto pooled = run_scan(spec);
    CHECK(records_csv(serial) == records_csv(pooled));
    CHECK(summary_csv(serial) == summary_csv(pooled));
}

TEST_CASE("DSKG_THREADS caps the pool") {
    ScanSpec spec = small_spec();
    spec.grid.t_max = 1.0;
    spec.threads = 8;
    setenv("DSKG_THREADS", "1", 1);
    const auto capped = run_scan(spec);
    CHECK(capped.threads_used == 1);
    setenv("DSKG_THREADS", "junk", 1);
    const auto loose = run_scan(spec);
    CHECK(loose.threads_used >= 1);  // malformed cap is ignored
    unsetenv("DSKG_THREADS");
}

TEST_CASE("boundary summary along d0 matches the predicted borderline") {
    ScanSpec spec;
    spec.mass_is_curved = true;
    spec.mass = {0.5};
    spec.d0 = {-0.9, -0.7, -0.5, -0.3, -0.1};
    spec.d1 = {3.0};
    spec.amp = {1e-4};
    spec.grid = {-2.2, 2.2, 221, 0.01, 30.0};
    const auto result = run_scan(spec);
    REQUIRE(result.summary.size() == 1);
    const auto& s = result.summary[0];
    CHECK(s.d0_predicted == doctest::Approx(-0.5).epsilon(1e-14));
    REQUIRE(s.d0_boundary.has_value());
    CHECK(*s.d0_last_alive == -0.7);
    CHECK(*s.d0_first_blowup == -0.5);
    CHECK(*s.d0_boundary == doctest::Approx(-0.6).epsilon(1e-14));
    CHECK(*s.distance <= 0.2);  // within one grid cell
    CHECK(s.ordered);
    CHECK(s.inconclusive_off_boundary == 0);
    CHECK(result.concordance_ok);

    // The envelope certificate fires exactly on the predicted blow-up side.
    for (const auto& rec : result.records) {
        const bool predicted = rec.key.d0 >= -0.5;  // d1 = 3 > 2 covers the edge
        CHECK(rec.cert_eventual_holds == predicted);
        CHECK((rec.outcome == Outcome::blowup) == predicted);
    }
}

TEST_CASE("energy-gap certificate concords with the observed blow-up") {
    ScanSpec spec;
    spec.mass_is_curved = true;
    spec.mass = {0.5};
    spec.d0 = {0.0};
    spec.d1 = {0.0};
    spec.amp = {5.0};
    spec.grid = {-2.2, 2.2, 221, 0.01, 10.0};
    const auto result = run_scan(spec);
    REQUIRE(result.records.size() == 1);
    const auto& rec = result.records[0];
    CHECK(rec.cert_bounded_holds);
    CHECK(rec.cert_lemma == "energy_gap");
    REQUIRE(rec.cert_T_upper.has_value());
    CHECK(*rec.cert_T_upper < 10.0);
    CHECK(rec.outcome == Outcome::blowup);
    REQUIRE(rec.T_est.has_value());
    CHECK(*rec.T_est <= *rec.cert_T_upper * 1.05);
    CHECK(rec.concordant);
    CHECK(result.concordance_ok);
}

TEST_CASE("a failing grid point degrades to inconclusive") {
    ScanSpec spec = small_spec();
    spec.R0 = 0.01;  // no grid node inside the bump on an even grid
    spec.two_grid = false;
    spec.d0 = {-0.4};
    spec.d1 = {1.0};
    spec.grid = {-2.2, 2.2, 112, 0.01, 0.5};
    const auto result = run_scan(spec);
    REQUIRE(result.records.size() == 1);
    CHECK(result.records[0].status == RecordStatus::ok);
    CHECK(result.records[0].outcome == Outcome::inconclusive);
    CHECK(result.records[0].detail.find("point failed") != std::string::npos);
}

TEST_CASE("plot data emission") {
    std::vector<RunRecord> records;
    CHECK(plot_csv(records) == "d0,d1,M,p,beta,amp,outcome,T_est\r\n");

    RunRecord one;
    one.key = {0.5, 2.0, 0.0, -0.25, 3.0, 0.01};
    one.M = 0.5;
    one.outcome = Outcome::blowup;
    one.T_est = 6.5;
    records.push_back(one);
    RunRecord skipped;
    skipped.key = {0.9, 2.0, 0.0, -0.25, 3.0, 0.01};
    skipped.status = RecordStatus::skipped;
    records.push_back(skipped);
    CHECK(plot_csv(records) ==
          "d0,d1,M,p,beta,amp,outcome,T_est\r\n"
          "-0.25,3,0.5,2,0,0.01,blowup,6.5\r\n"
          "-0.25,3,,2,0,0.01,skipped,\r\n");
}

TEST_CASE("manifest round trip preserves plot data") {
    ScanSpec spec = small_spec();
    spec.grid.t_max = 2.0;
    const auto result = run_scan(spec);
    const auto manifest = scan_json(result);
    const auto records = records_from_json(manifest);
    CHECK(plot_csv(records) == plot_csv(result.records));
    CHECK_THROWS_AS(records_from_json("{}"), dskg::ConfigError);
    CHECK_THROWS_AS(records_from_json("nope"), dskg::ConfigError);
}

TEST_CASE("CSV fields with separators are quoted") {
    ScanResult result;
    result.spec.mass_is_curved = false;
    RunRecord rec;
    rec.key = {0.3, 2.0, 0.0, -0.5, 1.0, 0.1};
    rec.m = 0.3;
    rec.M = 0.4;
    rec.outcome = Outcome::inconclusive;
    rec.detail = "left, then \"right\"";
    result.records.push_back(rec);
    const auto csv = records_csv(result);
    CHECK(csv.find("\"left, then \"\"right\"\"\"") != std::string::npos);
}
