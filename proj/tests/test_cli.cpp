#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "supres/esprit.hpp"
#include "supres/harness.hpp"
#include "supres/io.hpp"

using namespace supres;
namespace fs = std::filesystem;

namespace {

struct Run {
    int status = -1;
    std::string out;
};

fs::path tmp_dir()
{
    const fs::path dir(SUPRES_TEST_TMP);
    fs::create_directories(dir);
    return dir;
}

fs::path write_file(const std::string& name, const std::string& text)
{
    const fs::path p = tmp_dir() / name;
    std::ofstream(p) << text;
    return p;
}

Run run(const std::string& args)
{
    const fs::path out = tmp_dir() / "stdout.txt";
    const std::string cmd = std::string("\"") + SUPRES_CLI_PATH + "\" " + args + " > \"" + out.string() +
                            "\" 2>&1";
    Run r;
    const int raw = std::system(cmd.c_str());
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

const char* kNoiseless = R"({
  "geometry": {"support": {"points": [0.1, 0.35, 0.8]}},
  "M": 24, "L": 6, "nu": 0.0, "seed": 5, "trials": 1
})";

} // namespace

TEST_CASE("esprit subcommand on a noiseless config")
{
    const fs::path cfg = write_file("noiseless.json", kNoiseless);
    const fs::path out = tmp_dir() / "esprit.json";
    const Run r = run("esprit --config \"" + cfg.string() + "\" --out \"" + out.string() + "\"");
    INFO(r.out);
    REQUIRE(r.status == 0);
    std::ifstream in(out);
    const auto j = io::json::parse(in);
    const double md = j.at("md").get<double>();
    CHECK(md <= 1e-9);
    CHECK(j.at("estimated_support").size() == 3);
    CHECK(j.at("eigenvalues").size() == 3);

    const TrialOutcome lib = run_trial(io::parse_config(kNoiseless), 0);
    CHECK(md == *lib.md);
}

TEST_CASE("music subcommand writes a profile")
{
    const fs::path cfg = write_file("noiseless_music.json", kNoiseless);
    const fs::path out = tmp_dir() / "profile.csv";
    const Run r = run("music --config \"" + cfg.string() + "\" --out \"" + out.string() + "\"");
    INFO(r.out);
    REQUIRE(r.status == 0);
    std::ifstream in(out);
    std::string header;
    std::getline(in, header);
    CHECK(header == "omega,value");
}

TEST_CASE("bounds subcommand")
{
    const fs::path cfg = write_file("bounds.json", R"({
  "geometry": {"support": {"points": [0.1, 0.35, 0.8]}}, "M": 24, "L": 100, "nu": 0.1
})");
    const Run r = run("bounds --config \"" + cfg.string() + "\"");
    INFO(r.out);
    REQUIRE(r.status == 0);
    const auto j = io::json::parse(r.out);
    for (const char* key : {"sigma_S", "srf", "xi", "bounds", "crb_trace"}) {
        CHECK(j.contains(key));
    }
}

TEST_CASE("error exit codes")
{
    const fs::path bad = write_file("bad.json", "{ \"M\": 16,, }");
    const Run malformed = run("esprit --config \"" + bad.string() + "\"");
    CHECK(malformed.status == 1);
    const fs::path noiseless = write_file("noiseless_bounds.json", kNoiseless);
    CHECK(run("bounds --config \"" + noiseless.string() + "\"").status == 1);
    CHECK(malformed.out.find("malformed JSON") != std::string::npos);

    CHECK(run("esprit --config \"" + bad.string() + "\" --frobnicate").status == 1);
    CHECK(run("esprit").status == 1);
    CHECK(run("esprit --config /nonexistent.json").status == 1);
}

TEST_CASE("check subcommand")
{
    const Run r = run("check --suite sigma");
    INFO(r.out);
    CHECK(r.status == 0);
    CHECK(r.out.find("PASS") != std::string::npos);
    CHECK(run("check --suite nonsense").status == 1);
}
