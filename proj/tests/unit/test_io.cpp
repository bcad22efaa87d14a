#include "arhmm/core.hpp"
#include "arhmm/decode.hpp"
#include "arhmm/errors.hpp"
#include "arhmm/fit.hpp"
#include "arhmm/geometry.hpp"
#include "arhmm/io.hpp"
#include "arhmm/simulate.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

using arhmm::StepTurnSeries;
using arhmm::Track;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("arhmm-io-test-" + std::to_string(std::rand()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("track CSV round-trips") {
    TempDir tmp;
    Track a;
    a.id = "gull-1";
    a.locations = {{0.0, 0.0}, {1.25, -3.5}, {2.125, 4.0625}};
    Track b;
    b.id = "gull-2";
    b.locations = {{10.0, 10.0}, {11.0, 11.0}, {12.0, 13.0}};
    arhmm::write_tracks(tmp.file("tracks.csv"), {a, b});
    const auto back = arhmm::read_tracks(tmp.file("tracks.csv"));
    REQUIRE(back.size() == 2);
    CHECK(back[0].id == "gull-1");
    CHECK(back[1].locations[2].y == 13.0);
    CHECK(back[0].locations[1].x == 1.25);
}

TEST_CASE("read_tracks groups rows by id in first-appearance order") {
    TempDir tmp;
    arhmm::spit_file(tmp.file("mixed.csv"),
                     "id,x,y\nb,0,0\nb,1,0\nb,1,1\na,5,5\na,6,5\na,6,6\n");
    const auto tracks = arhmm::read_tracks(tmp.file("mixed.csv"));
    REQUIRE(tracks.size() == 2);
    CHECK(tracks[0].id == "b");
    CHECK(tracks[1].id == "a");
    CHECK(tracks[1].locations.size() == 3);
}

TEST_CASE("read_tracks accepts and checks an optional time column") {
    TempDir tmp;
    arhmm::spit_file(tmp.file("timed.csv"),
                     "id,x,y,t_sec\nw,0,0,0.0\nw,1,0,0.5\nw,1,1,1.0\n");
    const auto tracks = arhmm::read_tracks(tmp.file("timed.csv"));
    REQUIRE(tracks.size() == 1);
    CHECK(tracks[0].locations.size() == 3);

    arhmm::spit_file(tmp.file("bad-time.csv"),
                     "id,x,y,t_sec\nw,0,0,0.0\nw,1,0,0.5\nw,1,1,0.5\n");
    CHECK_THROWS_WITH_AS(arhmm::read_tracks(tmp.file("bad-time.csv")),
                         doctest::Contains(":4:"), arhmm::DataError);
}

TEST_CASE("read_tracks reports malformed input with line numbers") {
    TempDir tmp;
    arhmm::spit_file(tmp.file("bad-header.csv"), "id,lon,lat\nw,0,0\n");
    CHECK_THROWS_AS(arhmm::read_tracks(tmp.file("bad-header.csv")), arhmm::DataError);

    arhmm::spit_file(tmp.file("bad-field.csv"), "id,x,y\nw,0,0\nw,oops,1\nw,2,2\n");
    CHECK_THROWS_WITH_AS(arhmm::read_tracks(tmp.file("bad-field.csv")),
                         doctest::Contains(":3:"), arhmm::DataError);

    CHECK_THROWS_AS(arhmm::read_tracks(tmp.file("missing.csv")), arhmm::DataError);

    arhmm::spit_file(tmp.file("empty.csv"), "id,x,y\n");
    CHECK_THROWS_AS(arhmm::read_tracks(tmp.file("empty.csv")), arhmm::DataError);
}

TEST_CASE("series CSV round-trips at full precision") {
    TempDir tmp;
    StepTurnSeries s;
    s.track_id = "s-1";
    s.steps = {17.052198575570387, 1e-7, 1234.5678901234567};
    s.turns = {0.24907002385399957, -3.0000000000000004, arhmm::pi};
    arhmm::write_series(tmp.file("series.csv"), {s});
    const auto back = arhmm::read_series(tmp.file("series.csv"));
    REQUIRE(back.size() == 1);
    REQUIRE(back[0].length() == 3);
    for (std::size_t t = 0; t < 3; ++t) {
        CHECK(back[0].steps[t] == s.steps[t]); // bit-exact via %.17g
        CHECK(back[0].turns[t] == s.turns[t]);
    }
}

TEST_CASE("read_series validates domain constraints") {
    TempDir tmp;
    arhmm::spit_file(tmp.file("neg.csv"), "id,t,step,turn\na,0,5.0,0.1\na,1,-2.0,0.2\n");
    CHECK_THROWS_WITH_AS(arhmm::read_series(tmp.file("neg.csv")),
                         doctest::Contains(":3:"), arhmm::DataError);

    arhmm::spit_file(tmp.file("wide.csv"), "id,t,step,turn\na,0,5.0,0.1\na,1,2.0,3.5\n");
    CHECK_THROWS_AS(arhmm::read_series(tmp.file("wide.csv")), arhmm::DataError);

    arhmm::spit_file(tmp.file("order.csv"), "id,t,step,turn\na,1,5.0,0.1\na,0,2.0,0.2\n");
    CHECK_THROWS_AS(arhmm::read_series(tmp.file("order.csv")), arhmm::DataError);
}

TEST_CASE("states CSV round-trips") {
    TempDir tmp;
    arhmm::StateSequence q;
    q.track_id = "q";
    q.states = {1, 1, 2, 1, 2};
    arhmm::write_states(tmp.file("states.csv"), {q});
    const auto back = arhmm::read_states(tmp.file("states.csv"));
    REQUIRE(back.size() == 1);
    CHECK(back[0].states == q.states);
}

TEST_CASE("residual CSV writes NA for undefined leading entries") {
    TempDir tmp;
    arhmm::ResidualSeries r;
    r.track_id = "r";
    r.r_step = {std::nan(""), -0.5, 1.25};
    r.r_turn = {0.1, 0.2, 0.3};
    arhmm::write_residuals(tmp.file("rs.csv"), {r}, arhmm::ResidualVariable::step);
    const std::string text = arhmm::slurp_file(tmp.file("rs.csv"));
    CHECK(text.find("NA") != std::string::npos);
    CHECK(text.find("track_id,t,value") == 0);
    CHECK(text.find("-0.5") != std::string::npos);
}

TEST_CASE("integrate_track closes a regular polygon") {
    // Eleven unit steps all turning pi/6 plus the reused leading segment
    // trace a regular 12-gon, so the path returns to the origin.
    StepTurnSeries s;
    s.track_id = "poly";
    s.steps.assign(11, 1.0);
    s.turns.assign(11, arhmm::pi / 6.0);
    const Track t = arhmm::integrate_track(s, {0.0, 0.0}, 0.0);
    REQUIRE(t.locations.size() == 13); // 12 segments
    CHECK(t.locations.back().x == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(t.locations.back().y == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("integrate_track inverts steps_and_turns") {
    std::uint64_t seed = 20250816;
    StepTurnSeries s;
    s.track_id = "inv";
    auto unit = [&seed]() {
        seed = seed * 6364136223846793005ull + 1442695040888963407ull;
        return static_cast<double>(seed >> 11) * 0x1p-53;
    };
    for (int i = 0; i < 40; ++i) {
        s.steps.push_back(0.2 + 30.0 * unit());
        s.turns.push_back((unit() - 0.5) * 1.9 * arhmm::pi);
    }
    const Track t = arhmm::integrate_track(s, {3.0, -4.0}, 0.7);
    const StepTurnSeries back = arhmm::steps_and_turns(t);
    REQUIRE(back.length() == s.length());
    for (std::size_t i = 0; i < s.length(); ++i) {
        CHECK(back.steps[i] == doctest::Approx(s.steps[i]).epsilon(1e-10));
        CHECK(back.turns[i] == doctest::Approx(s.turns[i]).epsilon(1e-10));
    }
}

TEST_CASE("fit JSON round-trips and unwraps selection envelopes") {
    TempDir tmp;
    arhmm::SimScenario sc = arhmm::benchmark_scenario(1);
    sc.T = 150;
    sc.seed = 3;
    const arhmm::PooledData data({arhmm::simulate(sc).series});
    arhmm::FitOptions opts;
    opts.n_starts = 2;
    opts.seed = 4;
    const arhmm::FitResult fr = arhmm::fit(data, sc.spec, {}, opts);

    const std::string text = arhmm::fit_to_json(fr);
    const arhmm::FitResult back = arhmm::fit_from_json(text);
    CHECK(back.loglik == fr.loglik);
    CHECK(back.params.mu_step == fr.params.mu_step);
    CHECK(back.params.phi_step == fr.params.phi_step);
    CHECK(back.spec.p_step == fr.spec.p_step);
    CHECK(back.aic == fr.aic);
    CHECK(back.edf == fr.edf);

    // A path-mode document nests the result under "refit"/"selected".
    const std::string envelope = "{\"mode\":\"path\",\"refit\":" + text + "}";
    const arhmm::FitResult unwrapped = arhmm::fit_from_json(envelope);
    CHECK(unwrapped.loglik == fr.loglik);

    arhmm::write_fit_json(tmp.file("fit.json"), fr);
    CHECK(arhmm::read_fit_json(tmp.file("fit.json")).loglik == fr.loglik);
}

TEST_CASE("format_double round-trips every value exactly") {
    // 17 significant digits: always enough to recover the exact double.
    CHECK(arhmm::format_double(0.1) == "0.10000000000000001");
    CHECK(arhmm::format_double(1.0 / 3.0) == "0.33333333333333331");
    for (const double v : {17.052198575570387, 1e-300, -0.0, 3.0, arhmm::pi}) {
        CHECK(std::stod(arhmm::format_double(v)) == v);
    }
}
