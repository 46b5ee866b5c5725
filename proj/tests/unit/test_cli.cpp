#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"

namespace cli = qheng::cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::main(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& csv) {
  std::vector<std::string> v;
  std::size_t start = 0;
  for (std::size_t pos; (pos = csv.find("\r\n", start)) != std::string::npos; start = pos + 2) {
    v.push_back(csv.substr(start, pos - start));
  }
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> v;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) v.push_back(cell);
  return v;
}

std::string field(const std::string& csv, const std::string& column, std::size_t row = 0) {
  const auto l = lines(csv);
  const auto header = split(l.at(0));
  const auto values = split(l.at(row + 1));
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == column) return i < values.size() ? values[i] : std::string();
  FAIL("missing column " << column);
  return {};
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << body;
  return path;
}

}  // namespace

TEST_CASE("demon command reproduces the reference cycle") {
  const auto r = run({"demon", "--ds", "2", "--dd", "1", "--ts", "4", "--td", "1", "--theta", "1.5707963"});
  REQUIRE(r.code == 0);
  CHECK(std::abs(std::stod(field(r.out, "W")) - 0.04273047) < 1e-7);
  CHECK(lines(r.out).size() == 2);
}

TEST_CASE("invalid values exit 2 and name the key") {
  auto r = run({"otto", "--th", "-1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("--th") != std::string::npos);
  r = run({"demon", "--theta", "4"});
  CHECK(r.code == 2);
  CHECK(r.err.find("--theta") != std::string::npos);
  CHECK(run({"carnot", "--unknown-flag", "1"}).code == 2);
  CHECK(run({"carnot", "--th", "abc"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"carnot", "--substance", "custom"}).code == 2);
  CHECK(run({"sweep", "--engine", "otto", "--grid", "theta=0:1:2"}).code == 2);
  CHECK(run({"sweep", "--engine", "otto", "--grid", "th=0:1"}).code == 2);
}

TEST_CASE("domain errors during computation exit 1") {
  const auto r = run({"limit-otto", "--dh", "2", "--dl", "1", "--th", "1.5", "--tl", "1"});
  CHECK(r.code == 1);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("I/O failures exit 3") {
  CHECK(run({"carnot", "--out", "/nonexistent-dir/x.csv"}).code == 3);
  CHECK(run({"carnot", "--config", "/nonexistent-dir/x.ini"}).code == 3);
}

TEST_CASE("output file") {
  const auto path = std::filesystem::temp_directory_path() / "qheng_cli_out.csv";
  std::filesystem::remove(path);
  REQUIRE(run({"swap", "--out", path.string()}).code == 0);
  std::ifstream in(path, std::ios::binary);
  const std::string body((std::istreambuf_iterator<char>(in)), {});
  CHECK(body == run({"swap"}).out);
  std::filesystem::remove(path);
}

TEST_CASE("config file with flag precedence") {
  const auto cfg = temp_file("qheng_cli.ini", "# comment\nth = 5\ntl=0.5 ; trailing\nsteps = 512\n");
  const auto r = run({"carnot", "--config", cfg.string(), "--th", "3"});
  REQUIRE(r.code == 0);
  CHECK(field(r.out, "T_h") == "3");
  CHECK(field(r.out, "T_l") == "0.5");
  CHECK(field(r.out, "steps") == "512");

  const auto bad = temp_file("qheng_cli_bad.ini", "nonsense = 1\n");
  const auto b = run({"carnot", "--config", bad.string()});
  CHECK(b.code == 2);
  CHECK(b.err.find("nonsense") != std::string::npos);

  const auto underscore = temp_file("qheng_cli_us.ini", "t_start = 0.5\nt_end = 3\n");
  const auto u = run({"entropy-balance", "--config", underscore.string()});
  REQUIRE(u.code == 0);
  CHECK(field(u.out, "T_start") == "0.5");
}

TEST_CASE("CSV layout") {
  const auto r = run({"otto"});
  REQUIRE(r.code == 0);
  const auto header = split(lines(r.out).at(0));
  const std::vector<std::string> expected = {
      "substance", "param_h", "param_l", "alpha", "T_h", "T_l", "n_levels", "W_net", "Q_in", "Q_out", "efficiency",
      "otto_efficiency", "positive_work", "pwc", "closed_form_W", "closed_form_gap", "closed_form_W_gaussian", "T_A",
      "T_B", "T_C", "T_D", "closure_error", "truncation_capped"};
  CHECK(header == expected);
  CHECK(field(r.out, "W_net") == "0.1085992474281503");
  CHECK(field(r.out, "positive_work") == "true");
  CHECK(field(r.out, "closed_form_W_gaussian").empty());
}

TEST_CASE("CSV quoting") {
  cli::Table t{"x", {"a", "b"}, {{std::string("has,comma"), std::string("say \"hi\"")}}};
  std::ostringstream os;
  cli::write_csv(os, t);
  CHECK(os.str() == "a,b\r\n\"has,comma\",\"say \"\"hi\"\"\"\r\n");
}

TEST_CASE("JSON output") {
  const auto r = run({"compare", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["schema"] == "qheng.table/1");
  CHECK(doc["command"] == "compare");
  CHECK(doc["columns"].size() == doc["rows"][0].size());
  CHECK(doc["rows"][0].back() == true);
}

TEST_CASE("limit commands emit one row per N with shrinking errors") {
  const auto r = run({"limit-carnot", "--n", "1,2,4,8,16,32,64,128,256,512,1024"});
  REQUIRE(r.code == 0);
  REQUIRE(lines(r.out).size() == 12);
  double previous = 1e300;
  for (std::size_t row = 0; row < 11; ++row) {
    const double e = std::stod(field(r.out, "err_W", row));
    CHECK(e <= previous);
    previous = e;
  }
}

TEST_CASE("empty sweep is header only") {
  const auto r = run({"sweep"});
  CHECK(r.code == 0);
  CHECK(lines(r.out).size() == 1);
  const auto zero = run({"sweep", "--engine", "swap", "--grid", "ts=1:4:0"});
  CHECK(zero.code == 0);
  CHECK(lines(zero.out).size() == 1);
}

TEST_CASE("sweep rows, per-point errors and seeded sampling") {
  const auto r = run({"sweep", "--engine", "otto", "--grid", "th=1:4:4", "--grid", "dh=2:3:2"});
  REQUIRE(r.code == 0);
  REQUIRE(lines(r.out).size() == 9);
  CHECK(field(r.out, "grid_th", 7) == "4");
  CHECK(field(r.out, "grid_dh", 7) == "3");
  CHECK(field(r.out, "status", 0) == "ok");

  const auto bad = run({"sweep", "--engine", "otto", "--grid", "th=-1:1:2"});
  REQUIRE(bad.code == 0);
  CHECK(field(bad.out, "status", 0).rfind("invalid", 0) == 0);
  CHECK(field(bad.out, "W_net", 0).empty());
  CHECK(field(bad.out, "status", 1) == "ok");

  const std::vector<std::string> args = {"sweep", "--engine", "demon", "--grid", "theta=0:3:2", "--random", "5",
                                         "--seed", "9"};
  CHECK(run(args).out == run(args).out);
  auto other = args;
  other.back() = "10";
  CHECK(run(args).out != run(other).out);
}

TEST_CASE("sweep output does not depend on the worker count") {
  const std::vector<std::string> args = {"sweep", "--engine", "carnot", "--grid", "th=1.5:4:12", "--steps", "128"};
  setenv("QHENG_THREADS", "1", 1);
  CHECK(cli::worker_count(100) == 1);
  const auto one = run(args).out;
  setenv("QHENG_THREADS", "7", 1);
  CHECK(cli::worker_count(100) == 7);
  CHECK(cli::worker_count(3) == 3);
  const auto seven = run(args).out;
  unsetenv("QHENG_THREADS");
  CHECK(one == seven);
}
