#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <sys/wait.h>

#include "graphdenoise/graph.hpp"
#include "graphdenoise/rules.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int status = -1;
    std::string output;  // stdout and stderr together
};

Run run(const std::string& args) {
    const std::string cmd = std::string(GDENOISE_PATH) + " " + args + " 2>&1";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe)) r.output += buf.data();
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("gdenoise_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> data_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') out.push_back(line);
    return out;
}

void write_file(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("denoise writes a bridge file that reads back to the same set") {
    const auto dir = scratch("denoise");
    const auto graph = dir / "tri.txt";
    write_file(graph, "3 3\n0 1 1.0\n1 2 1.0\n0 2 3.0\n");
    const auto r = run("denoise " + graph.string() + " --rule ldr --q 0.5 --out " + (dir / "out").string());
    CHECK(r.status == 0);
    CHECK(r.output.find("|E|=3") != std::string::npos);
    const auto file = dir / "out" / "bridges_ldr.txt";
    REQUIRE(fs::exists(file));

    std::ifstream in(file);
    const auto back = gd::read_bridge_set(in);
    std::ifstream gin(graph);
    const auto g = gd::read_graph(gin);
    CHECK(back.edges == gd::ldr(g, 0.5).edges);
}

TEST_CASE("denoise reports the malformed line") {
    const auto dir = scratch("malformed");
    const auto graph = dir / "bad.txt";
    write_file(graph, "3 2\n0 1 1.0\n1 two 2.0\n");
    const auto r = run("denoise " + graph.string() + " --rule jdr --out " + dir.string());
    CHECK(r.status == 2);
    CHECK(r.output.find("line 3") != std::string::npos);
}

TEST_CASE("input errors exit with status 2") {
    const auto dir = scratch("inputs");
    const auto graph = dir / "g.txt";
    write_file(graph, "2 1\n0 1 1.0\n");
    CHECK(run("denoise " + graph.string() + " --rule ldr --q 1.5 --out " + dir.string()).status == 2);
    CHECK(run("denoise " + (dir / "missing.txt").string() + " --out " + dir.string()).status == 2);
    CHECK(run("denoise " + graph.string() + " --rule bogus --out " + dir.string()).status == 2);
    CHECK(run("--no-such-flag").status == 2);
    CHECK(run("--help").status == 0);
}

TEST_CASE("swissroll emits one row per method and is reproducible") {
    const auto a = scratch("swiss_a");
    const auto b = scratch("swiss_b");
    const std::string common = "swissroll --n 200 --mu 1.2 --trials 1 --seed 3 --table --out ";
    const auto ra = run(common + a.string());
    const auto rb = run(common + b.string());
    REQUIRE(ra.status == 0);
    REQUIRE(rb.status == 0);
    CHECK(ra.output.find("SP") != std::string::npos);
    CHECK(ra.output.find("NPDR, q=") != std::string::npos);

    const auto rows = data_lines(slurp(a / "swissroll_trials.csv"));
    REQUIRE(!rows.empty());
    CHECK(rows.front() == "mu,rule,q,trial,E,bridges_flagged,bridges_true,disconnected");
    CHECK(rows.size() == 1 + 8);

    for (const char* name : {"swissroll_trials.csv", "swissroll_summary.csv", "swissroll_geodesics.dat"})
        CHECK(slurp(a / name) == slurp(b / name));
}

TEST_CASE("tomo creates its output directory and prints both rules") {
    const auto dir = scratch("tomo") / "nested" / "deeper";
    const auto r = run("tomo --side 64 --n 96 --r 64 --k 10 --seeds 1 --out " + dir.string());
    REQUIRE(r.status == 0);
    CHECK(fs::exists(dir / "tomo_results.csv"));
    CHECK(fs::exists(dir / "tomo_sinogram.bin"));
    CHECK(fs::exists(dir / "tomo_phantom.pgm"));
    const std::regex jdr(R"(jdr\(q=[0-9.]+\): rho=-?[0-9.e-]+ disconnected=[0-9]+)");
    const std::regex npdr(R"(npdr\(q=[0-9.]+\): rho=-?[0-9.e-]+ disconnected=[0-9]+)");
    CHECK(std::regex_search(r.output, jdr));
    CHECK(std::regex_search(r.output, npdr));
}

TEST_CASE("tomo without noise reports a faithful true-angle reconstruction") {
    const auto dir = scratch("tomo_clean");
    const auto r = run("tomo --snr-db inf --seeds 1 --jdr-grid 0.8 --out " + dir.string());
    REQUIRE(r.status == 0);
    std::smatch m;
    REQUIRE(std::regex_search(r.output, m, std::regex(R"(true_order: rho=([0-9.]+))")));
    const double rho = std::stod(m[1]);
    MESSAGE("rho " << rho);
    CHECK(rho >= 0.9);
}
