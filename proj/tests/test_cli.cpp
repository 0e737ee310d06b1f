#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "optdesign/design.hpp"

using namespace optdesign;

namespace {

struct CliResult {
    int status;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

CliResult run_cli(const std::string& args) {
    const char* bin = std::getenv("OPTDESIGN_CLI_PATH");
#ifdef OPTDESIGN_CLI_PATH_DEFAULT
    if (bin == nullptr) bin = OPTDESIGN_CLI_PATH_DEFAULT;
#endif
    REQUIRE(bin != nullptr);
    static int counter = 0;
    const std::string out_path = "cli_out_" + std::to_string(counter) + ".txt";
    const std::string err_path = "cli_err_" + std::to_string(counter) + ".txt";
    ++counter;
    const std::string cmd =
        std::string(bin) + " " + args + " >" + out_path + " 2>" + err_path;
    const int raw = std::system(cmd.c_str());
    CliResult r{WEXITSTATUS(raw), slurp(out_path), slurp(err_path)};
    std::remove(out_path.c_str());
    std::remove(err_path.c_str());
    return r;
}

}  // namespace

TEST_CASE("design verb reproduces the worked example") {
    const CliResult r = run_cli("design hoel-levine --g 4 --n 52 --target 2");
    REQUIRE(r.status == 0);
    const Design d = design_from_json(r.out);
    CHECK(d.frequencies == std::vector<int>{5, 12, 20, 15});
    CHECK(d.kind == DesignKind::hoel_levine);
    // CLI output is the canonical serialization plus a newline
    CHECK(r.out == to_json(d) + "\n");
}

TEST_CASE("degree flag is an alias for g minus one") {
    const CliResult a = run_cli("design hoel-levine --g 4 --n 52 --target 2");
    const CliResult b = run_cli("design hoel-levine --degree 3 --n 52 --target 2");
    CHECK(a.out == b.out);
    const CliResult both = run_cli("design hoel-levine --g 4 --degree 3 --n 52 --target 2");
    CHECK(both.status == 2);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run_cli("design guest --g 4 --n 52 --target 2").status == 2);
    CHECK(run_cli("nonsense --g 4").status == 2);
    CHECK(run_cli("design hoel-levine --g 4.5 --n 52 --target 2").status == 2);
    CHECK(run_cli("design hoel-levine --g 4 --n 52 --target 2 --mystery 1").status == 2);
    CHECK(run_cli("crossover").status == 2);  // missing --g
}

TEST_CASE("computation errors exit with 1") {
    const CliResult inside = run_cli("design hoel-levine --g 4 --n 52 --target 0.5");
    CHECK(inside.status == 1);
    CHECK(inside.err.find("not-extrapolation") != std::string::npos);
    CHECK(run_cli("variance --in no_such_file.json --at 2").status == 1);
}

TEST_CASE("crossover verb emits the two-node radius") {
    const CliResult r = run_cli("crossover --g 2");
    REQUIRE(r.status == 0);
    CHECK(r.out.rfind("{\"g\":2,\"c1\":", 0) == 0);
    const std::size_t pos = r.out.find("\"c1\":") + 5;
    const double c1 = std::strtod(r.out.c_str() + pos, nullptr);
    CHECK(std::abs(c1 - 2.0) <= 1e-10);
    const CliResult alias = run_cli("crossover --degree 1");
    CHECK(alias.out == r.out);
}

TEST_CASE("variance verb evaluates and profiles a stored design") {
    const CliResult d = run_cli("design hoel-levine --g 4 --n 52 --target 2 --out hl.json");
    REQUIRE(d.status == 0);

    const CliResult at = run_cli("variance --in hl.json --sigma2 1 --at 2");
    REQUIRE(at.status == 0);
    CHECK(at.out == "{\"x\":2,\"variance\":13}\n");

    const CliResult profile = run_cli("variance --in hl.json --points 5");
    REQUIRE(profile.status == 0);
    CHECK(profile.out.rfind("x,variance\n", 0) == 0);
    CHECK(profile.out.find("# max at ") != std::string::npos);

    const CliResult both = run_cli("variance --in hl.json --points 5 --at 2");
    CHECK(both.status == 2);
    std::remove("hl.json");
}

TEST_CASE("guest design through the interval flag") {
    const CliResult r = run_cli("design guest --g 3 --n 30 --interval 0,2");
    REQUIRE(r.status == 0);
    const Design d = design_from_json(r.out);
    CHECK(d.nodes[0] == 0.0);
    CHECK(d.nodes[1] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(d.nodes[2] == 2.0);
    CHECK(d.frequencies == std::vector<int>{10, 10, 10});
}

TEST_CASE("simulate verb is deterministic under a fixed seed") {
    REQUIRE(run_cli("design guest --g 3 --n 12 --out guest.json").status == 0);
    const std::string args =
        "simulate --design guest.json --coeffs 0,1 --noise gumbel --sigma 0.5 "
        "--x 1.5 --replications 2000 --seed 7";
    const CliResult a = run_cli(args);
    const CliResult b = run_cli(args);
    REQUIRE(a.status == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("\"variance_ratio\":") != std::string::npos);
    CHECK(a.out.find("\"seed\":7") != std::string::npos);
    std::remove("guest.json");
}

TEST_CASE("simulate verb compares designs and dumps estimates") {
    REQUIRE(run_cli("design guest --g 3 --n 12 --out g.json").status == 0);
    REQUIRE(run_cli("design hoel-levine --g 3 --n 12 --target 3 --out h.json").status == 0);

    const CliResult both = run_cli(
        "simulate --design g.json --design h.json --coeffs 0,0,1 --x 3 "
        "--replications 1000 --seed 2");
    REQUIRE(both.status == 0);
    CHECK(std::count(both.out.begin(), both.out.end(), '\n') == 2);

    CHECK(run_cli("simulate --design g.json --design h.json --coeffs 0,0,1 --x 3 "
                  "--replications 1000 --seed 2 --level 0.9")
              .status == 2);

    const CliResult dump = run_cli(
        "simulate --design g.json --coeffs 0,0,1 --x 3 --replications 500 --seed 2 "
        "--dump est.csv");
    REQUIRE(dump.status == 0);
    const std::string est = slurp("est.csv");
    CHECK(est.rfind("replicate,estimate\n", 0) == 0);
    CHECK(std::count(est.begin(), est.end(), '\n') == 501);
    std::remove("est.csv");
    std::remove("g.json");
    std::remove("h.json");
}

TEST_CASE("bivariate verb builds the tensor design") {
    const CliResult r = run_cli("bivariate --g1 2 --g2 2 --m1 52 --rect 0,1,0,1 --u -1,-1");
    REQUIRE(r.status == 0);
    CHECK(r.out.find("\"replications\":[[") != std::string::npos);
    CHECK(r.out.find("\"M1\":52") != std::string::npos);

    CHECK(run_cli("bivariate --g1 2 --g2 2 --m1 52").status == 2);
    CHECK(run_cli("bivariate --gumbel-omega 3 --g1 2").status == 2);

    const CliResult omega = run_cli("bivariate --gumbel-omega 3 --replicates 5000 --seed 1");
    REQUIRE(omega.status == 0);
    CHECK(omega.out.rfind("dim=3\n", 0) == 0);
}
