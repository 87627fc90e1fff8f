#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli/app.hpp"
#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sharpfid");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = sharpfid::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::current_path() / "cli_test_output" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Parses the one-line CSV record printed by a model subcommand.
std::map<std::string, std::string> record(const std::string& text) {
  std::istringstream in(text);
  std::string header, values;
  std::getline(in, header);
  std::getline(in, values);
  std::map<std::string, std::string> r;
  std::istringstream h(header), v(values);
  std::string key, value;
  while (std::getline(h, key, ',') && std::getline(v, value, ',')) r[key] = value;
  return r;
}

// First two numeric columns of a figure CSV (the label column may be quoted).
std::vector<std::pair<double, double>> columns(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::pair<double, double>> rows;
  while (std::getline(in, line)) {
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    rows.emplace_back(std::stod(line.substr(0, a)), std::stod(line.substr(a + 1, b - a - 1)));
  }
  return rows;
}

double mass_between(const std::vector<std::pair<double, double>>& curve, double lo, double hi) {
  double m = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    const double a = curve[i - 1].first, b = curve[i].first;
    if (a >= lo && b <= hi) m += 0.5 * (b - a) * (curve[i - 1].second + curve[i].second);
  }
  return m;
}

}  // namespace

TEST_CASE("model subcommand prints a record") {
  const auto r = cli({"normal-known", "--xbar", "1.96", "--se", "1", "--eps", "0", "--prior", "0.5"});
  REQUIRE(r.code == 0);
  const auto rec = record(r.out);
  CHECK(rec.at("model") == "normal-known");
  CHECK(std::stod(rec.at("p_in")) == doctest::Approx(0.1716).epsilon(5e-4 / 0.1716));

  const auto j = cli({"normal-known", "--xbar", "1.96", "--se", "1", "--eps", "0", "--prior", "0.5",
                      "--format", "json"});
  REQUIRE(j.code == 0);
  const auto doc = nlohmann::json::parse(j.out);
  CHECK(doc.at("p_in").get<double>() == doctest::Approx(std::stod(rec.at("p_in"))));
}

TEST_CASE("every model runs from flags") {
  CHECK(cli({"normal-direct", "--n", "9", "--xbar", "2.1", "--sd", "3", "--eps", "0.2", "--prior", "0.33",
             "--gpd", "smoothed"})
            .code == 0);
  CHECK(cli({"normal-gibbs", "--n", "9", "--xbar", "2.1", "--sd", "3", "--eps", "0.2", "--prior", "0.33",
             "--gpd", "smoothed", "--samples", "2000", "--scan", "fixed:mu-sigma"})
            .code == 0);
  CHECK(cli({"binomial", "--n", "16", "--x", "5", "--eps", "0.01", "--center", "0.5", "--prior", "0.3",
             "--samples", "20000"})
            .code == 0);
  CHECK(cli({"relative-risk", "--e-t", "6", "--n-t", "20", "--e-c", "18", "--n-c", "30", "--eps", "0.045",
             "--prior", "0.4", "--samples", "50000"})
            .code == 0);
}

TEST_CASE("exit codes") {
  SUBCASE("invalid prior") {
    const auto r = cli({"normal-known", "--xbar", "1", "--se", "1", "--eps", "0", "--prior", "1.5"});
    CHECK(r.code == 2);
    CHECK(!r.err.empty());
  }
  SUBCASE("unknown flag") { CHECK(cli({"normal-known", "--bogus", "1"}).code == 2); }
  SUBCASE("malformed JSON spec") {
    const auto dir = fresh_dir("bad_json");
    std::ofstream(dir / "spec.json") << "{\"schema\": 1, \"model\": ";
    CHECK(cli({"run", "--spec", (dir / "spec.json").string()}).code == 2);
  }
  SUBCASE("unknown spec key") {
    const auto dir = fresh_dir("bad_key");
    std::ofstream(dir / "spec.json") << R"({"schema": 1, "model": "normal-known", "colour": 3})";
    CHECK(cli({"run", "--spec", (dir / "spec.json").string()}).code == 2);
  }
  SUBCASE("numerical failure") {
    // A hypothesis interval far from every draw leaves the inside component empty.
    const auto r = cli({"binomial", "--n", "16", "--x", "16", "--lo", "0.001", "--hi", "0.0011", "--prior",
                        "0.3", "--samples", "100"});
    CHECK(r.code == 3);
  }
  SUBCASE("figure id out of range") {
    const auto dir = fresh_dir("bad_figure");
    CHECK(cli({"figure", "10", "--out", dir.string()}).code == 2);
  }
}

TEST_CASE("JSON spec and flags agree") {
  const auto dir = fresh_dir("spec");
  std::ofstream(dir / "spec.json") << R"({
    "schema": 1,
    "model": "binomial",
    "data": {"n": 16, "x": 4},
    "hypothesis": {"center": 0.5, "eps": 0.01, "prior": 0.3},
    "gpd": "flat",
    "mc": {"samples": 30000, "seed": 5},
    "output": {"path": ")" + (dir / "out").generic_string() + R"(", "format": "csv"}
  })";
  fs::create_directories(dir / "out");
  const auto a = cli({"run", "--spec", (dir / "spec.json").string()});
  REQUIRE(a.code == 0);
  const auto b = cli({"binomial", "--n", "16", "--x", "4", "--center", "0.5", "--eps", "0.01", "--prior", "0.3",
                      "--samples", "30000", "--seed", "5"});
  REQUIRE(b.code == 0);
  CHECK(a.out == b.out);
  CHECK(fs::exists(dir / "out" / "result.csv"));
  CHECK(slurp(dir / "out" / "result.csv") == a.out);
}

TEST_CASE("seed falls back to the environment") {
  const std::vector<std::string> args{"binomial", "--n", "16", "--x", "5", "--center", "0.5", "--eps", "0.01",
                                      "--prior", "0.3", "--samples", "20000"};
  auto with_seed = args;
  with_seed.insert(with_seed.end(), {"--seed", "77"});
  const auto explicit_run = cli(with_seed);
  ::setenv("SHARPFID_SEED", "77", 1);
  const auto env_run = cli(args);
  ::setenv("SHARPFID_SEED", "not-a-number", 1);
  const auto bad = cli(args);
  ::unsetenv("SHARPFID_SEED");
  const auto default_run = cli(args);
  CHECK(explicit_run.code == 0);
  CHECK(env_run.out == explicit_run.out);
  CHECK(bad.code == 2);
  CHECK(default_run.out != explicit_run.out);
}

TEST_CASE("figure 1 files and shapes") {
  const auto dir = fresh_dir("fig1");
  const auto r = cli({"figure", "1", "--out", dir.string()});
  REQUIRE(r.code == 0);
  std::size_t csv = 0;
  for (const auto& e : fs::directory_iterator(dir)) csv += e.path().extension() == ".csv";
  CHECK(csv == 6);
  CHECK(fs::exists(dir / "fig1_meta.json"));
  const auto meta = nlohmann::json::parse(slurp(dir / "fig1_meta.json"));
  CHECK(meta.at("files").size() == 6);

  const auto first = slurp(dir / "fig1_eps0_prior0.5.csv");
  CHECK(first.rfind("xbar,probability,curve\r\n", 0) == 0);
  // 17 significant digits.
  CHECK(first.find("0.58578643762690497") != std::string::npos);

  for (const std::string eps : {"0", "0.25", "0.5"}) {
    const auto lower = columns(dir / ("fig1_eps" + eps + "_prior0.3.csv"));
    const auto upper = columns(dir / ("fig1_eps" + eps + "_prior0.5.csv"));
    REQUIRE(lower.size() == 201);
    REQUIRE(upper.size() == 201);
    bool above = true, decreasing = true;
    for (std::size_t i = 0; i < upper.size(); ++i) {
      above = above && upper[i].second > lower[i].second;
      if (i > 0) decreasing = decreasing && upper[i].second <= upper[i - 1].second;
    }
    CHECK(above);
    CHECK(decreasing);
  }
  // Sharp null, prior one half: the curve crosses 0.5 at sqrt(ln 2).
  const auto sharp = columns(dir / "fig1_eps0_prior0.5.csv");
  for (std::size_t i = 1; i < sharp.size(); ++i) {
    if (sharp[i - 1].second > 0.5 && sharp[i].second <= 0.5) {
      CHECK(sharp[i - 1].first < std::sqrt(std::log(2.0)));
      CHECK(sharp[i].first >= std::sqrt(std::log(2.0)));
    }
  }
}

TEST_CASE("figure 2 densities") {
  const auto dir = fresh_dir("fig2");
  REQUIRE(cli({"figure", "2", "--out", dir.string()}).code == 0);
  double prev = 1.0;
  for (const std::string xbar : {"1.7", "2.1", "2.5"}) {
    const auto curve = columns(dir / ("fig2_xbar" + xbar + ".csv"));
    CHECK(mass_between(curve, -3.0, 7.0) == doctest::Approx(1.0).epsilon(2e-3));
    const double inside = mass_between(curve, -0.1, 0.1);
    CHECK(inside < prev);
    prev = inside;
  }
}

TEST_CASE("figure 3 curves barely depend on eps") {
  const auto dir = fresh_dir("fig3");
  REQUIRE(cli({"figure", "3", "--out", dir.string()}).code == 0);
  std::map<std::string, std::vector<std::pair<double, double>>> c;
  for (const std::string eps : {"0", "0.1", "0.2"}) {
    for (const std::string prior : {"0.3", "0.5"}) {
      c[eps + "/" + prior] = columns(dir / ("fig3_eps" + eps + "_prior" + prior + ".csv"));
    }
  }
  for (std::size_t i = 0; i < c["0/0.3"].size(); ++i) {
    if (c["0/0.3"][i].first > 3.0) break;
    for (const std::string prior : {"0.3", "0.5"}) {
      const double a = c["0/" + prior][i].second;
      const double b = c["0.1/" + prior][i].second;
      const double d = c["0.2/" + prior][i].second;
      const double eps_spread = std::max({a, b, d}) - std::min({a, b, d});
      const double prior_spread = c["0/0.5"][i].second - c["0/0.3"][i].second;
      CHECK(eps_spread < prior_spread);
    }
  }
}

TEST_CASE("figure 5 files are reproducible") {
  const auto a = fresh_dir("fig5a");
  const auto b = fresh_dir("fig5b");
  REQUIRE(cli({"figure", "5", "--out", a.string(), "--seed", "3"}).code == 0);
  REQUIRE(cli({"figure", "5", "--out", b.string(), "--seed", "3"}).code == 0);
  std::size_t csv = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().extension() != ".csv") continue;
    ++csv;
    CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
  }
  CHECK(csv == 3);
}

TEST_CASE("Monte Carlo figure is byte-identical under a fixed seed") {
  const auto a = fresh_dir("fig4a");
  const auto b = fresh_dir("fig4b");
  REQUIRE(cli({"figure", "4", "--out", a.string(), "--seed", "8", "--threads", "1"}).code == 0);
  REQUIRE(cli({"figure", "4", "--out", b.string(), "--seed", "8", "--threads", "3"}).code == 0);
  for (const auto& e : fs::directory_iterator(a)) {
    CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
  }
}
