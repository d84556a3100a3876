#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "cantor/cli.hpp"
#include "cantor/potential.hpp"
#include "cantor/tm_solver.hpp"

using namespace cantor;
using namespace cantor::cli;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "cantor_spectra");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "cantor_cli_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

}  // namespace

TEST_CASE("defaults") {
  const auto c = parse_args({"spectrum", "--order", "0", "--mu", "300"});
  CHECK(c.command == Subcommand::spectrum);
  CHECK(c.cantor.order == 0);
  CHECK(c.mu == 300.0);
  CHECK(c.lo == -1.0);
  CHECK(c.hi == 0.0);
  CHECK(c.tolerance == 1e-10);
  CHECK(c.engine == Engine::fd);
  CHECK(!c.grid_points);
  const auto d = parse_args({"staircase"});
  CHECK(d.cantor.order == 4);
  CHECK(d.mu == 300.0);
}

TEST_CASE("negative mu is a usage error") {
  const auto r = invoke({"spectrum", "--mu", "-5"});
  CHECK(r.code == 2);
  CHECK(r.err.find("mu") != std::string::npos);
  CHECK(r.err.find("Usage") != std::string::npos);
}

TEST_CASE("unknown flags and subcommands are rejected") {
  CHECK(invoke({"spectrum", "--bogus", "1"}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"spectrum", "--engine", "qr"}).code == 2);
  CHECK(invoke({"sweep", "--mu-list", "10,x"}).code == 2);
  CHECK(invoke({"spectrum", "--lo", "0", "--hi", "-1"}).code == 2);
  CHECK(invoke({"plot"}).code == 2);
}

TEST_CASE("help exits 0") {
  const auto r = invoke({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("staircase") != std::string::npos);
}

TEST_CASE("mu list gives one sweep row per entry") {
  const auto c = parse_args({"sweep", "--mu-list", "10,20,40"});
  CHECK(c.mu_list == std::vector<double>{10, 20, 40});
  const auto r = invoke({"sweep", "--order", "1", "--mu-list", "10,20,40", "--grid", "299"});
  REQUIRE(r.code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "mu,grid_points,count_below_zero,count_in_window,min_eps,max_eps,mean_pr_lowest");
  CHECK(lines[1].rfind("10,299,", 0) == 0);
  CHECK(lines[3].rfind("40,299,", 0) == 0);
}

TEST_CASE("config file values sit between defaults and flags") {
  const auto path = scratch("run.cfg");
  write_text(path, "# sample\norder = 2\nmu=150\n\ntol = 1e-12 # tighter\n");
  const auto c = parse_args({"spectrum", "--config", path.string(), "--mu", "75"});
  CHECK(c.cantor.order == 2);
  CHECK(c.mu == 75.0);
  CHECK(c.tolerance == 1e-12);
  CHECK(c.hi == 0.0);

  write_text(path, "order 2\n");
  CHECK(invoke({"spectrum", "--config", path.string()}).code == 2);
  write_text(path, "colour = red\n");
  CHECK(invoke({"spectrum", "--config", path.string()}).code == 2);
  CHECK(invoke({"spectrum", "--config", scratch("missing.cfg").string()}).code == 2);
}

TEST_CASE("potential output") {
  const auto r = invoke({"potential", "--order", "1"});
  REQUIRE(r.code == 0);
  CHECK(r.out ==
        "0 0.33333333333333331 -1\n"
        "0.33333333333333331 0.66666666666666663 1\n"
        "0.66666666666666663 1 -1\n");
  CantorSpec spec;
  spec.order = 3;
  const auto p3 = build_cantor_potential(spec);
  CHECK(parse_potential(invoke({"potential", "--order", "3"}).out) == p3);
}

TEST_CASE("potential file input") {
  const auto path = scratch("two.txt");
  write_text(path, "0 0.5 -1\n0.5 1 0.25\n");
  const auto r = invoke({"potential", "--potential-file", path.string()});
  CHECK(r.code == 0);
  CHECK(r.out == "0 0.5 -1\n0.5 1 0.25\n");
  write_text(path, "0 0.5 -1\n0.4 1 0.25\n");
  const auto bad = invoke({"spectrum", "--potential-file", path.string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("line 2") != std::string::npos);
}

TEST_CASE("box staircase ends at 95") {
  const auto r = invoke({"staircase", "--order", "0", "--mu", "300", "--lo", "-1", "--hi", "0", "--resolution", "4"});
  REQUIRE(r.code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 6);
  CHECK(lines[0] == "epsilon,count");
  CHECK(lines[1] == "-1,0");
  CHECK(lines[5] == "0,95");
}

TEST_CASE("spectrum rows match the TM oracle") {
  const auto r = invoke({"spectrum", "--order", "2", "--mu", "300", "--lo", "-0.35", "--hi", "-0.30", "--engine", "tm"});
  REQUIRE(r.code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() >= 2);
  CHECK(lines[0] == "index,epsilon,participation_ratio");
  CantorSpec spec;
  spec.order = 2;
  const auto tm = tm_eigenvalues(build_cantor_potential(spec), ModelParams(300), -0.35, -0.30);
  REQUIRE(lines.size() == tm.size() + 1);
  double prev = -1.0;
  for (std::size_t k = 0; k < tm.size(); ++k) {
    const auto& line = lines[k + 1];
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    CHECK(std::stoul(line.substr(0, c1)) == k);
    const double eps = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    CHECK(eps == tm[k]);
    CHECK(eps >= prev);
    prev = eps;
    const double pr = std::stod(line.substr(c2 + 1));
    CHECK(pr > 0.0);
    CHECK(pr <= 1.0);
  }
}

TEST_CASE("order-4 window at mu 300") {
  const auto r = invoke({"spectrum", "--order", "4", "--mu", "300", "--lo", "-0.33", "--hi", "-0.30"});
  REQUIRE(r.code == 0);
  CantorSpec spec;
  const auto tm = tm_eigenvalues(build_cantor_potential(spec), ModelParams(300), -0.33, -0.30);
  CHECK(lines_of(r.out).size() == tm.size() + 1);
}

TEST_CASE("states, clusters and json lines") {
  const auto states = invoke({"states", "--order", "2", "--mu", "100", "--grid", "899", "--eps", "-0.9,-0.5"});
  REQUIRE(states.code == 0);
  const auto lines = lines_of(states.out);
  REQUIRE(lines.size() == 900);
  CHECK(lines[0].rfind("x,v,eps=", 0) == 0);
  CHECK(std::count(lines[0].begin(), lines[0].end(), ',') == 3);

  const auto clusters = invoke({"clusters", "--order", "2", "--mu", "300", "--engine", "tm"});
  REQUIRE(clusters.code == 0);
  CHECK(lines_of(clusters.out)[0] == "cluster,index,epsilon");

  const auto json = invoke({"sweep", "--order", "1", "--mu-list", "5,50", "--grid", "199", "--format", "json-lines"});
  REQUIRE(json.code == 0);
  const auto jl = lines_of(json.out);
  REQUIRE(jl.size() == 2);
  CHECK(jl[0].rfind("{\"mu\":5.0,", 0) == 0);
  CHECK(jl[0].find("\"min_eps\":null") != std::string::npos);
}

TEST_CASE("states with an empty window is a config error") {
  CHECK(invoke({"states", "--order", "0", "--mu", "5", "--lo", "-1", "--hi", "-0.9"}).code == 2);
}

TEST_CASE("identical configs give byte-identical output") {
  const std::vector<std::string> args{"spectrum", "--order", "3", "--mu", "120"};
  const auto a = invoke(args);
  const auto b = invoke(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto file = scratch("spectrum.csv");
  auto with_output = args;
  with_output.insert(with_output.end(), {"--output", file.string()});
  REQUIRE(invoke(with_output).code == 0);
  std::ifstream in(file, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == a.out);
}

TEST_CASE("plot scripts") {
  const auto stair = scratch("stair.csv");
  write_text(stair, invoke({"staircase", "--order", "0", "--mu", "30", "--resolution", "10"}).out);
  auto r = invoke({"plot", "--data", stair.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("with steps") != std::string::npos);
  CHECK(r.out.find(stair.string()) != std::string::npos);

  const auto dens = scratch("states.csv");
  write_text(dens, invoke({"states", "--order", "1", "--mu", "50", "--grid", "99", "--eps", "-0.9"}).out);
  r = invoke({"plot", "--data", dens.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("with lines") != std::string::npos);
  CHECK(r.out.find("v(x)") != std::string::npos);

  const auto pot = scratch("pot.txt");
  write_text(pot, invoke({"potential", "--order", "2"}).out);
  r = invoke({"plot", "--data", pot.string()});
  CHECK(r.out.find("fillsteps") != std::string::npos);

  const auto empty = scratch("empty.csv");
  write_text(empty, "");
  r = invoke({"plot", "--data", empty.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("# warning") != std::string::npos);

  CHECK(invoke({"plot", "--data", scratch("nope.csv").string()}).code == 1);
}

TEST_CASE("installed binary exit codes") {
  const auto run = [](const std::string& args) {
    const std::string cmd = std::string(CANTOR_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  CHECK(run("potential --order 1") == 0);
  CHECK(run("spectrum --mu -5") == 2);
  CHECK(run("plot --data /nonexistent/file.csv") == 1);
}
