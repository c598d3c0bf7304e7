#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qfilter/config.hpp"
#include "qfilter/csv.hpp"
#include "qfilter/riccati.hpp"
#include "qfilter/run_record.hpp"

using namespace qfilter;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("qfilter_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args, const fs::path& err_file = {}) {
    std::string cmd = std::string("\"") + QFILTER_CLI_PATH + "\" " + args + " > /dev/null";
    if (!err_file.empty()) cmd += " 2> \"" + err_file.string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> last_csv_row(const fs::path& p) {
    std::istringstream in(slurp(p));
    std::string line, last;
    while (std::getline(in, line))
        if (!line.empty()) last = line;
    return split_csv_line(last);
}

}  // namespace

TEST_CASE("parse_config defaults and overrides") {
    const Config d = parse_config("");
    CHECK(d.params.m == 1.0);
    CHECK(d.params.lambda == 1.0);
    CHECK(d.params.dim == 1);
    CHECK(d.run.dt == 1e-4);
    CHECK(d.run.seed == 42);
    CHECK(d.grid.n_points == 2048);
    CHECK_FALSE(d.grid.x_min.has_value());

    const Config c = parse_config(
        "# comment\n"
        "params.lambda = 2.5\n"
        "params.dim=3\n"
        "packet.q=1,2,3\n"
        "packet.p=0.5\n"
        "run.seed=7\n"
        "grid.x_min=-5\n"
        "outputs.record_w=true\n");
    CHECK(c.params.lambda == 2.5);
    CHECK(c.packet.q == RealVector{1, 2, 3});
    CHECK(c.packet.p == RealVector{0.5, 0.5, 0.5});
    CHECK(c.run.seed == 7);
    CHECK(*c.grid.x_min == -5.0);
    CHECK(c.outputs.record_w);
}

TEST_CASE("parse_config errors") {
    CHECK_THROWS_AS(parse_config("params.mass=abc\n"), ParseError);
    CHECK_THROWS_AS(parse_config("no equals sign\n"), ParseError);
    CHECK_THROWS_AS(parse_config("params.colour=1\n"), UnknownKey);
    CHECK_THROWS_AS(parse_config("params.mass=-1\n"), InvalidParameter);
    try {
        parse_config("params.hbar=1\nrun.dt=x\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find('2') != std::string::npos);
    }
}

TEST_CASE("render_config round-trips") {
    const Config c = parse_config("params.lambda=0.3\nparams.dim=3\npacket.q=1,-2,0.125\nrun.t_end=1.5\ngrid.x_max=9\n");
    const Config back = parse_config(render_config(c));
    CHECK(render_config(back) == render_config(c));
    CHECK(back.packet.q == c.packet.q);
    CHECK(back.params.lambda == c.params.lambda);
}

TEST_CASE("QFILTER_SEED overrides run.seed") {
    Config c = parse_config("run.seed=3\n");
    ::setenv("QFILTER_SEED", "1234", 1);
    apply_env_overrides(c);
    CHECK(c.run.seed == 1234);
    ::setenv("QFILTER_SEED", "nope", 1);
    CHECK_THROWS_AS(apply_env_overrides(c), InvalidParameter);
    ::unsetenv("QFILTER_SEED");
    Config untouched = parse_config("run.seed=3\n");
    apply_env_overrides(untouched);
    CHECK(untouched.run.seed == 3);
}

TEST_CASE("sha256") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("cli riccati with defaults") {
    const fs::path dir = scratch_dir("riccati");
    REQUIRE(run_cli("riccati --out \"" + dir.string() + "\"") == 0);
    const auto row = last_csv_row(dir / "riccati.csv");
    const complex alpha = omega_stationary(make_params(1, 1, 1, 1)).value();
    CHECK(std::abs(std::stod(row.at(1)) - alpha.real()) < 1e-9);
    CHECK(std::abs(std::stod(row.at(2)) - alpha.imag()) < 1e-9);
    CHECK(fs::exists(dir / "run_record.txt"));
}

TEST_CASE("cli trajectory is reproducible and recorded") {
    const fs::path a = scratch_dir("traj_a"), b = scratch_dir("traj_b");
    REQUIRE(run_cli("trajectory --out \"" + a.string() + "\"") == 0);
    REQUIRE(run_cli("trajectory --out \"" + b.string() + "\"") == 0);
    CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));
    CHECK(slurp(a / "noise.csv") == slurp(b / "noise.csv"));

    const std::string record = slurp(a / "run_record.txt");
    CHECK(record.find("subcommand=trajectory\n") != std::string::npos);
    CHECK(record.find("run.seed=42\n") != std::string::npos);
    const std::string manifest_line = sha256_file(a / "trajectory.csv") + "  trajectory.csv";
    CHECK(record.find(manifest_line) != std::string::npos);
}

TEST_CASE("cli error reporting") {
    const fs::path dir = scratch_dir("errors");
    std::ofstream(dir / "bad.cfg") << "params.mass=0\n";
    std::ofstream(dir / "unknown.cfg") << "params.spin=1\n";

    REQUIRE(run_cli("grid --config \"" + (dir / "bad.cfg").string() + "\" --out \"" + dir.string() + "\"",
                    dir / "err1.txt") == 2);
    CHECK(slurp(dir / "err1.txt").rfind("error: code=InvalidParameter message=", 0) == 0);

    REQUIRE(run_cli("riccati --config \"" + (dir / "unknown.cfg").string() + "\"", dir / "err2.txt") == 2);
    CHECK(slurp(dir / "err2.txt").rfind("error: code=UnknownKey message=", 0) == 0);

    CHECK(run_cli("frobnicate", dir / "err3.txt") == 2);
}
