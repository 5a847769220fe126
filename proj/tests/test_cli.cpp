#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "dualrdm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = dualrdm::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

double header_value(const std::string& text, const std::string& key) {
  const auto pos = text.find("# " + key + "=");
  REQUIRE(pos != std::string::npos);
  return std::stod(text.substr(pos + key.size() + 3));
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("dualrdm_test_" + name);
  std::ofstream(path) << content;
  return path;
}

const double kHubbard = 2.0 - 2.0 * std::sqrt(2.0);

}  // namespace

TEST_CASE("solve: Hubbard dimer") {
  const Run r = run({"solve", "--toy", "hubbard-dimer", "--t", "1", "--U", "4", "--with-fci", "--e-hf", "0.0"});
  CHECK(r.code == 0);
  const double e = header_value(r.out, "e_app");
  CHECK(e >= kHubbard - 1e-4);
  CHECK(e <= kHubbard + 1e-6);
  CHECK(header_value(r.out, "e_fci") == doctest::Approx(kHubbard));
  CHECK(header_value(r.out, "correlation_percent") == doctest::Approx(100.0).epsilon(1e-5));
  CHECK(r.out.find("wall_time_s=") != std::string::npos);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() >= 2);
  CHECK(rows[0] == std::vector<std::string>{"n", "mu", "delta", "derivative", "slope", "inner_iterations"});
}

TEST_CASE("solve: JSON report") {
  const Run r = run({"solve", "--toy", "random", "--seed", "3", "--r", "6", "--nelec", "3", "--format", "json"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["status"] == "converged");
  CHECK(j["n_electrons"] == 3);
  CHECK(j["iterations"].size() == j["outer_iterations"].get<std::size_t>());
  CHECK(j.contains("wall_time_s"));
  CHECK(j["total_inner_iterations"].get<int>() > 0);
  CHECK_FALSE(j.contains("correlation_percent"));
}

TEST_CASE("solve: exit codes") {
  const Run missing = run({"solve", "--fcidump", "/nonexistent/file.dump"});
  CHECK(missing.code == 2);
  CHECK_FALSE(missing.err.empty());

  CHECK(run({"solve"}).code == 2);
  CHECK(run({"solve", "--toy", "hubbard-dimer", "--fcidump", "x"}).code == 2);
  CHECK(run({"solve", "--toy", "nope"}).code == 2);
  CHECK(run({"solve", "--toy", "hubbard-dimer", "--t", "-1"}).code == 2);
  CHECK(run({"solve", "--toy", "hubbard-dimer", "--bogus"}).code == 2);
  CHECK(run({"solve", "--toy", "hubbard-dimer", "--damping", "1.5"}).code == 2);
  CHECK(run({}).code == 2);

  const Run below = run({"solve", "--toy", "hubbard-dimer", "--mu0", "-5"});
  CHECK(below.code == 2);
  CHECK(below.err.find("supply larger mu0") != std::string::npos);

  const Run stuck = run({"solve", "--toy", "random", "--r", "6", "--nelec", "3", "--max-inner", "2", "--no-timestamp"});
  CHECK(stuck.code == 3);
  CHECK(stuck.out.find("# status=not-converged") != std::string::npos);

  const auto nan_dump = temp_file("nan.dump", "&FCI NORB=2,NELEC=2 &END\nnan 1 1 1 1\n-1.0 1 2 0 0\n");
  CHECK(run({"solve", "--fcidump", nan_dump.string()}).code == 4);
}

TEST_CASE("solve: FCIDUMP input") {
  const auto path = temp_file("h2.dump",
                              "&FCI NORB=2,NELEC=2,MS2=0,ORBSYM=1,1,ISYM=1 &END\n"
                              "4.0 1 1 1 1\n4.0 2 2 2 2\n-1.0 2 1 0 0\n0.5 0 0 0 0\n");
  const Run r = run({"solve", "--fcidump", path.string(), "--with-fci"});
  CHECK(r.code == 0);
  CHECK(header_value(r.out, "e_app") == doctest::Approx(kHubbard + 0.5).epsilon(1e-6));
}

TEST_CASE("output is deterministic without the timestamp line") {
  const std::vector<std::string> args{"solve", "--toy", "random", "--seed", "5", "--r", "6", "--nelec", "3", "--no-timestamp"};
  const Run a = run(args);
  const Run b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("generated=") == std::string::npos);
}

TEST_CASE("output file") {
  const auto path = std::filesystem::temp_directory_path() / "dualrdm_test_out.csv";
  std::filesystem::remove(path);
  const Run r = run({"fci", "--toy", "hubbard-dimer", "--output", path.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("e_fci,dimension,solver,e_core") != std::string::npos);
}

TEST_CASE("config file with command-line override") {
  const auto cfg = temp_file("run.cfg", "# toy run\ntoy = hubbard-dimer\nU = 4\nno-timestamp = true\nformat = csv\n");
  const Run from_file = run({"solve", "--config", cfg.string()});
  CHECK(from_file.code == 0);
  CHECK(header_value(from_file.out, "e_app") == doctest::Approx(kHubbard).epsilon(1e-6));
  CHECK(from_file.out.find("generated=") == std::string::npos);

  const Run overridden = run({"solve", "--config", cfg.string(), "--U", "0"});
  CHECK(overridden.code == 0);
  CHECK(header_value(overridden.out, "e_app") == doctest::Approx(-2.0).epsilon(1e-6));

  CHECK(run({"solve", "--config", "/nonexistent.cfg"}).code == 2);
  const auto bad = temp_file("bad.cfg", "toy hubbard-dimer\n");
  CHECK(run({"solve", "--config", bad.string()}).code == 2);
}

TEST_CASE("curve: schema, zero region, monotone and convex") {
  const double mu_star = kHubbard / 2.0;
  const Run below = run({"curve", "--toy", "hubbard-dimer", "--mu-min", "-2", "--mu-max", std::to_string(mu_star - 0.01),
                         "--points", "5", "--no-timestamp"});
  CHECK(below.code == 0);
  auto rows = csv_rows(below.out);
  CHECK(rows[0] == std::vector<std::string>{"mu", "delta", "derivative", "inner_iterations", "error"});
  CHECK(rows.size() == 6);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][1]) == 0.0);

  const Run span = run({"curve", "--toy", "hubbard-dimer", "--mu-min", std::to_string(mu_star - 0.5), "--mu-max",
                        std::to_string(mu_star + 0.5), "--points", "21", "--threads", "2"});
  CHECK(span.code == 0);
  rows = csv_rows(span.out);
  REQUIRE(rows.size() == 22);
  std::vector<double> d;
  for (std::size_t i = 1; i < rows.size(); ++i) d.push_back(std::stod(rows[i][1]));
  CHECK(d.front() == 0.0);
  CHECK(d.back() > 0.0);
  for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i] >= d[i - 1] - 1e-8);
  for (std::size_t i = 1; i + 1 < d.size(); ++i) CHECK(d[i] <= 0.5 * (d[i - 1] + d[i + 1]) + 1e-8);

  CHECK(run({"curve", "--toy", "hubbard-dimer", "--mu-min", "1", "--mu-max", "0", "--points", "3"}).code == 2);
  CHECK(run({"curve", "--toy", "hubbard-dimer", "--mu-min", "0", "--mu-max", "1", "--points", "1"}).code == 2);
  CHECK(run({"curve", "--toy", "random", "--nelec", "3", "--mu-min", "0", "--mu-max", "1", "--points", "2",
             "--max-inner", "1"})
            .code == 3);
}

TEST_CASE("dissociate: batch rows and lower bounds") {
  const Run two = run({"dissociate", "-g", "a=toy:hubbard-dimer:t=1,U=1", "-g", "b=toy:random:seed=2,r=6,nelec=3",
                       "--no-timestamp"});
  CHECK(two.code == 0);
  auto rows = csv_rows(two.out);
  CHECK(rows[0] == std::vector<std::string>{"label", "e_app", "e_fci", "gap", "status"});
  CHECK(rows.size() == 3);

  std::vector<std::string> args{"dissociate", "--no-timestamp"};
  for (const char* u : {"0", "2", "4", "8"}) {
    args.push_back("--geometry");
    args.push_back(std::string("U") + u + "=toy:hubbard-dimer:t=1,U=" + u);
  }
  const Run scan = run(args);
  CHECK(scan.code == 0);
  rows = csv_rows(scan.out);
  REQUIRE(rows.size() == 5);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i][4] == "ok");
    CHECK(std::stod(rows[i][1]) <= std::stod(rows[i][2]) + 1e-6);
  }
  CHECK(rows[1][0] == "U0");
  CHECK(rows[4][0] == "U8");

  const Run mixed = run({"dissociate", "-g", "ok=toy:hubbard-dimer", "-g", "bad=/nonexistent.dump"});
  CHECK(mixed.code == 0);
  rows = csv_rows(mixed.out);
  CHECK(rows[2][1].empty());
  CHECK(rows[2][4].rfind("input-error", 0) == 0);

  CHECK(run({"dissociate"}).code == 2);
}

TEST_CASE("fci subcommand") {
  const Run r = run({"fci", "--toy", "hubbard-dimer", "--format", "json"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["e_fci"].get<double>() == doctest::Approx(kHubbard).epsilon(1e-10));
  CHECK(j["dimension"] == 6);

  CHECK(run({"fci", "--toy", "random", "--r", "10", "--nelec", "4", "--cap", "100"}).code == 2);

  const auto rdm = std::filesystem::temp_directory_path() / "dualrdm_test_rdm.csv";
  CHECK(run({"fci", "--toy", "hubbard-dimer", "--rdm-out", rdm.string()}).code == 0);
  std::ifstream in(rdm);
  std::string header;
  std::getline(in, header);
  CHECK(header == "p,q,r,s,value");
  double trace = 0.0;
  for (std::string line; std::getline(in, line);) {
    int p, q, r2, s;
    double v;
    REQUIRE(std::sscanf(line.c_str(), "%d,%d,%d,%d,%lf", &p, &q, &r2, &s, &v) == 5);
    if (p == r2 && q == s) trace += v;
  }
  CHECK(trace == doctest::Approx(2.0).epsilon(1e-10));

  // Noninteracting diagonal system: sum of the N lowest orbital energies.
  const auto dump = temp_file("diag.dump", "&FCI NORB=3,NELEC=3 &END\n-1.0 1 1 0 0\n-0.25 2 2 0 0\n0.5 3 3 0 0\n");
  const Run d = run({"fci", "--fcidump", dump.string(), "--format", "json"});
  CHECK(nlohmann::json::parse(d.out)["e_fci"].get<double>() == doctest::Approx(-2.25).epsilon(1e-12));
}

TEST_CASE("check subcommand") {
  const Run ok = run({"check", "--seed", "12345"});
  CHECK(ok.code == 0);
  for (const char* suite : {"adjoint,PASS", "gradient,PASS", "necessity,PASS", "energy-chain,PASS"})
    CHECK(ok.out.find(suite) != std::string::npos);
  CHECK(run({"check", "--seed", "12345"}).out == ok.out);

  const Run bad = run({"check", "--corrupt-adjoint"});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("adjoint,FAIL") != std::string::npos);
}

TEST_CASE("help and version") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"--version"}).code == 0);
}
