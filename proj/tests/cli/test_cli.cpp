// End-to-end tests that drive the installed CLI binary as a subprocess and
// check exit codes, stdout, and the files it writes.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef ARHMM_CLI_PATH
#error "ARHMM_CLI_PATH must name the CLI binary"
#endif

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("arhmm-cli-test-" + std::to_string(std::rand()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

struct RunResult {
    int exit_code = -1;
    std::string output; // stdout and stderr combined
};

int run_count = 0;

RunResult run_cli(const TempDir& tmp, const std::string& args) {
    const std::string log = tmp.file("run-" + std::to_string(run_count++) + ".log");
    const std::string cmd =
        std::string(ARHMM_CLI_PATH) + " " + args + " > " + log + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::ostringstream content;
    content << in.rdbuf();
    r.output = content.str();
    return r;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

bool exists(const std::string& path) { return std::filesystem::exists(path); }

} // namespace

TEST_CASE("help is exit 0 and usage errors are exit 1") {
    TempDir tmp;

    auto help = run_cli(tmp, "--help");
    CHECK(help.exit_code == 0);
    CHECK(help.output.find("simulate") != std::string::npos);
    CHECK(help.output.find("fit") != std::string::npos);

    CHECK(run_cli(tmp, "").exit_code == 1);           // a subcommand is required
    CHECK(run_cli(tmp, "frobnicate").exit_code == 1); // unknown subcommand
    CHECK(run_cli(tmp, "fit --bogus-flag x.csv").exit_code == 1);
    CHECK(run_cli(tmp, "fit").exit_code == 1); // missing required options
    CHECK(run_cli(tmp, "simulate --degree 7 --out-series a --out-states b").exit_code ==
          1); // degree out of range

    // --lambda and --path are mutually exclusive.
    write_file(tmp.file("dummy.csv"), "id,t,step,turn\na,0,1.0,0.1\n");
    const auto both = run_cli(tmp, "fit " + tmp.file("dummy.csv") +
                                       " --spec '{\"n_states\":2}' --out " +
                                       tmp.file("f.json") + " --lambda 1 --path");
    CHECK(both.exit_code == 1);
}

TEST_CASE("missing or malformed inputs are exit 2") {
    TempDir tmp;

    // Nonexistent input file.
    auto r = run_cli(tmp, "fit " + tmp.file("nope.csv") +
                              " --spec '{\"n_states\":2}' --out " + tmp.file("f.json"));
    CHECK(r.exit_code == 2);

    // Wrong header.
    write_file(tmp.file("bad-header.csv"), "id,step\nx,1\n");
    r = run_cli(tmp, "fit " + tmp.file("bad-header.csv") +
                         " --spec '{\"n_states\":2}' --out " + tmp.file("f.json"));
    CHECK(r.exit_code == 2);

    // Negative step value.
    write_file(tmp.file("neg.csv"),
               "id,t,step,turn\na,0,5.0,0.1\na,1,-2.0,0.2\na,2,4.0,0.0\n");
    r = run_cli(tmp, "fit " + tmp.file("neg.csv") + " --spec '{\"n_states\":2}' --out " +
                         tmp.file("f.json"));
    CHECK(r.exit_code == 2);

    // Spec file with broken JSON.
    write_file(tmp.file("spec.json"), "{\"n_states\": }");
    write_file(tmp.file("ok.csv"),
               "id,t,step,turn\na,0,5.0,0.1\na,1,2.0,0.2\na,2,4.0,0.0\n");
    r = run_cli(tmp, "fit " + tmp.file("ok.csv") + " --spec " + tmp.file("spec.json") +
                         " --out " + tmp.file("f.json"));
    CHECK(r.exit_code == 2);
}

TEST_CASE("prep converts locations and rejects non-increasing times") {
    TempDir tmp;
    write_file(tmp.file("loc.csv"), "id,x,y\nw,0,0\nw,10,0\nw,20,5\nw,25,15\n");
    const auto ok = run_cli(tmp, "prep " + tmp.file("loc.csv") + " --out " +
                                     tmp.file("series.csv"));
    CHECK(ok.exit_code == 0);
    REQUIRE(exists(tmp.file("series.csv")));
    std::ifstream in(tmp.file("series.csv"));
    std::string header;
    std::getline(in, header);
    CHECK(header == "id,t,step,turn");

    write_file(tmp.file("bad-t.csv"), "id,x,y,t_sec\nw,0,0,1.0\nw,1,0,0.5\n");
    CHECK(run_cli(tmp, "prep " + tmp.file("bad-t.csv") + " --out " +
                           tmp.file("s2.csv")).exit_code == 2);
}

TEST_CASE("simulate, fit, decode, and residuals round-trip") {
    TempDir tmp;
    const std::string series = tmp.file("series.csv");
    const std::string states = tmp.file("states.csv");

    auto sim = run_cli(tmp, "simulate --degree 0 --T 220 --seed 5 --out-series " +
                                series + " --out-states " + states);
    CHECK(sim.exit_code == 0);
    REQUIRE(exists(series));
    REQUIRE(exists(states));

    const std::string fit_json = tmp.file("fit.json");
    auto fit = run_cli(tmp, "fit " + series + " --spec '{\"n_states\":2}' --out " +
                                fit_json + " --starts 3 --seed 1");
    CHECK(fit.exit_code == 0);
    CHECK(fit.output.find("loglik=") != std::string::npos);
    REQUIRE(exists(fit_json));
    {
        std::ifstream in(fit_json);
        std::ostringstream content;
        content << in.rdbuf();
        CHECK(content.str().find("\"mu_step\"") != std::string::npos);
    }

    auto dec = run_cli(tmp, "decode " + series + " --fit " + fit_json + " --out " +
                                tmp.file("decoded.csv") + " --truth " + states);
    CHECK(dec.exit_code == 0);
    REQUIRE(exists(tmp.file("decoded.csv")));
    const auto pos = dec.output.find("accuracy=");
    REQUIRE(pos != std::string::npos);
    const double acc = std::stod(dec.output.substr(pos + 9));
    CHECK(acc > 0.9);

    auto res = run_cli(tmp, "residuals " + series + " --fit " + fit_json + " --out " +
                                tmp.file("resid.csv"));
    CHECK(res.exit_code == 0);
    CHECK(exists(tmp.file("resid.step.csv")));
    CHECK(exists(tmp.file("resid.turn.csv")));

    // Truth with an out-of-range state label is a data error.
    write_file(tmp.file("bad-truth.csv"), "track_id,t,value\nsim,0,7\n");
    auto bad = run_cli(tmp, "decode " + series + " --fit " + fit_json + " --out " +
                                tmp.file("d2.csv") + " --truth " +
                                tmp.file("bad-truth.csv"));
    CHECK(bad.exit_code == 2);
}

TEST_CASE("fit over a lambda grid writes the path envelope") {
    TempDir tmp;
    const std::string series = tmp.file("series.csv");
    auto sim = run_cli(tmp, "simulate --degree 1 --T 260 --seed 9 --out-series " +
                                series + " --out-states " + tmp.file("states.csv"));
    REQUIRE(sim.exit_code == 0);

    const std::string out = tmp.file("path.json");
    auto fit = run_cli(tmp, "fit " + series +
                                " --spec '{\"n_states\":2,\"p_step\":1,\"p_turn\":1}'" +
                                " --out " + out +
                                " --path --grid 0,0.8 --starts 2 --fresh-starts 1" +
                                " --criterion bic --seed 3");
    CHECK(fit.exit_code == 0);
    CHECK(fit.output.find("selected_degrees") != std::string::npos);
    REQUIRE(exists(out));
    std::ifstream in(out);
    std::ostringstream content;
    content << in.rdbuf();
    CHECK(content.str().find("\"mode\": \"path\"") != std::string::npos);
    CHECK(content.str().find("\"refit\"") != std::string::npos);
    CHECK(content.str().find("\"selected\"") != std::string::npos);
}

TEST_CASE("study smoke run produces every output table") {
    TempDir tmp;
    const std::string dir = tmp.file("study");
    auto r = run_cli(tmp, "study --scenario table1 --out " + dir +
                              " --replicates 1 --T 150 --stability-T 60"
                              " --consistency-T 80 --starts 2 --seed 11");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("accuracy") != std::string::npos);
    for (const char* name :
         {"accuracy.csv", "accuracy_summary.csv", "stability.csv",
          "stability_summary.csv", "consistency.csv", "consistency_summary.csv"}) {
        CAPTURE(name);
        CHECK(exists(dir + "/" + std::string(name)));
    }
}
