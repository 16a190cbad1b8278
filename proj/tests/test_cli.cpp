// End-to-end runs of the otfsaf executable.

#include "otfsaf/emit.hpp"

#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef OTFSAF_CLI_PATH
#error "OTFSAF_CLI_PATH must point at the otfsaf executable"
#endif

using namespace otfsaf;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(OTFSAF_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "otfsaf_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

const std::string kSmall = "--n 2 --m 2 --tau-samples-per-t 2 --fd-samples-per-df 2 --fd-max 2";

}  // namespace

TEST_CASE("af writes one CSV row per grid point") {
    const fs::path out = scratch("af.csv");
    REQUIRE(run("af " + kSmall + " --out " + out.string()) == 0);
    std::ifstream is(out);
    const ResultTable t = read_csv(is);
    CHECK(t.columns == std::vector<std::string>{"tau", "fd", "re", "im", "abs"});
    // tau in [-2T, 2T] and fd in [-2df, 2df], both at 2 samples per unit
    REQUIRE(t.rows.size() == 9 * 9);
    CHECK(cell_as_double(t.rows[0][0]) == -2.0);
    CHECK(cell_as_double(t.rows[0][1]) == -2.0);
    CHECK(cell_as_double(t.rows[1][0]) == -2.0);
    CHECK(cell_as_double(t.rows[1][1]) == -1.5);
    // origin of a 4-QAM frame: NM
    bool found = false;
    for (const auto& r : t.rows) {
        if (cell_as_double(r[0]) == 0.0 && cell_as_double(r[1]) == 0.0) {
            CHECK_THAT(cell_as_double(r[4]), Catch::Matchers::WithinRel(4.0, 1e-12));
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("JSON output echoes the configuration") {
    const fs::path out = scratch("moments.json");
    REQUIRE(run("moments " + kSmall + " --t 2 --qam 16 --seed 9 --format json --out " + out.string()) == 0);
    const Json j = Json::parse(slurp(out));
    const Json& c = j.at("config");
    CHECK(c.at("N") == 2);
    CHECK(c.at("M") == 2);
    CHECK(c.at("T") == 2.0);
    CHECK(c.at("order") == 16);
    CHECK(c.at("seed") == 9);
    CHECK(j.at("results").at("columns").size() == 9);
    CHECK(j.at("results").at("rows").size() == 9 * 9);
}

TEST_CASE("montecarlo output is deterministic") {
    const fs::path a = scratch("mc_a.csv");
    const fs::path b = scratch("mc_b.csv");
    const std::string args = "montecarlo " + kSmall + " --realizations 20 --seed 4 --out ";
    REQUIRE(run(args + a.string()) == 0);
    REQUIRE(run(args + b.string() + " --threads 2") == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK_FALSE(slurp(a).empty());
}

TEST_CASE("metrics reports a summary") {
    const fs::path out = scratch("metrics.json");
    REQUIRE(run("metrics --n 2 --m 4 --realizations 5 --tau-samples-per-t 4 --fd-samples-per-df 4 --format json --out " +
                out.string()) == 0);
    const Json j = Json::parse(slurp(out));
    CHECK(j.at("results").at("rows").size() == 5);
    const Json& s = j.at("results").at("summary");
    CHECK(s.at("pslr_db").at("min").get<double>() <= s.at("pslr_db").at("mean").get<double>());
    CHECK(s.at("pslr_db").at("mean").get<double>() <= s.at("pslr_db").at("max").get<double>());
    CHECK(s.at("islr_db").at("min").get<double>() <= s.at("islr_db").at("max").get<double>());
}

TEST_CASE("compare and table1 run on small inputs") {
    const fs::path c = scratch("compare.csv");
    REQUIRE(run("compare --n 2 --m-values 2,4 --realizations 3 --tau-samples-per-t 4 --fd-samples-per-df 4 --out " +
                c.string()) == 0);
    std::ifstream cs(c);
    const ResultTable ct = read_csv(cs);
    REQUIRE(ct.rows.size() == 4);
    CHECK(std::get<std::string>(ct.rows[0][0]) == "otfs");
    CHECK(std::get<std::string>(ct.rows[1][0]) == "ofdm");

    const fs::path t = scratch("table1.csv");
    REQUIRE(run("table1 --n 2 --m 2 --orders 4,16 --realizations 20 --tau-samples-per-t 4 --fd-samples-per-df 4 --out " +
                t.string()) == 0);
    std::ifstream ts(t);
    const ResultTable tt = read_csv(ts);
    REQUIRE(tt.rows.size() == 2);
    CHECK(cell_as_double(tt.rows[1][0]) == 16.0);
}

TEST_CASE("validate passes") {
    CHECK(run("validate") == 0);
}

TEST_CASE("bad arguments exit with 2") {
    CHECK(run("") == 2);
    CHECK(run("bogus") == 2);
    CHECK(run("af --qam 7") == 2);
    CHECK(run("af --format xml") == 2);
    CHECK(run("af --n 0") == 2);
    CHECK(run("af --waveform fmcw") == 2);
    CHECK(run("af " + kSmall + " --out /nonexistent-dir/af.csv") == 2);
    CHECK(run("af --help") == 0);
}
