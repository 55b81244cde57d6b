#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "lens/cli.hpp"

using json = nlohmann::ordered_json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = lens::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::vector<std::string> keys(const json& j) {
  std::vector<std::string> out;
  for (auto it = j.begin(); it != j.end(); ++it) out.push_back(it.key());
  return out;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("lefschetz_lens_" + name);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("solve cusp") {
  const Run r = run({"solve", "--model", "cusp", "--y", "-3,0"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(keys(j) == std::vector<std::string>{"model", "params", "source", "solutions", "sum_all", "sum_real", "n_real"});
  CHECK(keys(j["solutions"][0]) == std::vector<std::string>{"x", "real", "det_j", "mu", "residual"});
  CHECK(j["n_real"] == 3);
  CHECK(std::abs(j["sum_all"][0].get<double>()) <= 1e-12);
  CHECK(std::abs(j["sum_all"][1].get<double>()) <= 1e-12);
  CHECK(j["model"] == "cusp");
}

TEST_CASE("solve fold with a conjugate pair") {
  const Run r = run({"solve", "--model", "fold", "--y", "0,-1"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["n_real"] == 0);
  CHECK(std::abs(j["sum_all"][0].get<double>()) <= 1e-12);
  CHECK(std::abs(j["sum_all"][1].get<double>()) <= 1e-12);
  for (const auto& s : j["solutions"]) CHECK(std::abs(std::abs(s["mu"][1].get<double>()) - 0.5) <= 1e-12);
}

TEST_CASE("solve exit codes") {
  CHECK(run({"solve", "--model", "fold"}).code == 64);
  CHECK(run({"solve", "--model", "butterfly", "--y", "0,0"}).code == 64);
  CHECK(run({"solve", "--model", "fold", "--c", "1", "--y", "0,1"}).code == 64);
  CHECK(run({"solve", "--model", "fold", "--y", "0"}).code == 64);
  CHECK(run({"solve", "--model", "fold", "--y", "0,1", "--format", "csv"}).code == 64);
  CHECK(run({}).code == 64);
  CHECK(run({"launch"}).code == 64);
  // Source on the fold caustic.
  CHECK(run({"solve", "--model", "fold", "--y", "0.5,0"}).code == 3);
}

TEST_CASE("help exits cleanly") {
  const Run r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("solve") != std::string::npos);
}

TEST_CASE("verify") {
  SUBCASE("single trial") {
    const Run r = run({"verify", "--model", "hyperbolic-umbilic", "--trials", "1"});
    CHECK(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["generator"] == "mt19937_64/splitmix64");
    CHECK(j["seed"] == 42);
    REQUIRE(j["models"].size() == 1);
    const auto& m = j["models"][0];
    CHECK(m["accepted"].get<int>() + m["rejected_near_caustic"].get<int>() + m["rejected_unsolved"].get<int>() == 1);
  }
  SUBCASE("all models in catalog order") {
    const Run r = run({"verify", "--model", "all", "--trials", "50", "--seed", "7"});
    CHECK(r.code == 0);
    const json j = json::parse(r.out);
    std::vector<std::string> names;
    for (const auto& m : j["models"]) names.push_back(m["model"]);
    CHECK(names == std::vector<std::string>{"fold", "cusp", "swallowtail", "elliptic-umbilic", "hyperbolic-umbilic",
                                            "elliptic-umbilic-lensing", "hyperbolic-umbilic-lensing"});
  }
  SUBCASE("byte-identical reruns") {
    const Run a = run({"verify", "--model", "all", "--trials", "200", "--seed", "42"});
    const Run b = run({"verify", "--model", "all", "--trials", "200", "--seed", "42"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }
  SUBCASE("impossible tolerance fails but still reports") {
    const Run r = run({"verify", "--model", "cusp", "--trials", "20", "--tol", "0"});
    CHECK(r.code == 1);
    CHECK(json::parse(r.out)["passed"] == false);
  }
}

TEST_CASE("lefschetz") {
  SUBCASE("hyperbolic umbilic") {
    const Run r = run({"lefschetz", "--model", "hyperbolic-umbilic", "--c", "1", "--y", "0.3,0.7"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    for (const char* k : {"affine_sum", "infinity_fixed_points", "infinity_sum", "total"}) CHECK(j.contains(k));
    CHECK(std::abs(j["total"][0].get<double>() - 1.0) <= 1e-10);
    CHECK(keys(j["infinity_fixed_points"][0]) == std::vector<std::string>{"point", "lambda", "index"});
  }
  SUBCASE("fold reports the indeterminacy point") {
    const Run r = run({"lefschetz", "--model", "fold", "--y", "0,1"});
    CHECK(r.code == 65);
    CHECK(r.err.find("(0:1:0)") != std::string::npos);
  }
  SUBCASE("elliptic umbilic") {
    const Run r = run({"lefschetz", "--model", "elliptic-umbilic", "--c", "3", "--y", "0,0"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(std::abs(j["infinity_sum"][0].get<double>() - 1.0) <= 1e-12);
    REQUIRE(j["infinity_fixed_points"].size() == 3);
    for (const auto& p : j["infinity_fixed_points"]) {
      CHECK(std::abs(p["index"][0].get<double>() - 1.0 / 3) <= 1e-12);
      CHECK(std::abs(p["lambda"][0].get<double>() + 2.0) <= 1e-10);
    }
  }
}

TEST_CASE("caustic") {
  SUBCASE("deltoid with three cusps") {
    const Run r = run({"caustic", "--model", "elliptic-umbilic", "--c", "3", "--samples", "2000"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 2001);
    CHECK(rows[0] == std::vector<std::string>{"t", "x1", "x2", "y1", "y2", "beta", "is_cusp"});
    int cusps = 0;
    double last_t = -1.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      REQUIRE(rows[i].size() == 7);
      cusps += rows[i][6] == "1";
      const double t = std::stod(rows[i][0]);
      CHECK(t > last_t);
      last_t = t;
    }
    CHECK(cusps == 3);
  }
  SUBCASE("fold") {
    const auto rows = csv_rows(run({"caustic", "--model", "fold", "--samples", "10"}).out);
    REQUIRE(rows.size() == 11);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CHECK(std::stod(rows[i][5]) > 1.0);
      CHECK(rows[i][6] == "0");
    }
  }
  SUBCASE("empty requests") {
    const Run zero = run({"caustic", "--samples", "0"});
    CHECK(zero.code == 0);
    CHECK(zero.out == "t,x1,x2,y1,y2,beta,is_cusp\n");
    const Run degenerate = run({"caustic", "--model", "elliptic-umbilic", "--c", "0", "--samples", "10"});
    CHECK(degenerate.code == 0);
    CHECK(degenerate.out == "t,x1,x2,y1,y2,beta,is_cusp\n");
  }
  SUBCASE("contour method") {
    const Run r = run({"caustic", "--model", "elliptic-umbilic", "--c", "3", "--samples", "500", "--method", "contour"});
    CHECK(r.code == 0);
    CHECK(csv_rows(r.out).size() == 501);
    CHECK(run({"caustic", "--model", "fold", "--method", "spline"}).code == 64);
  }
}

TEST_CASE("sweep") {
  SUBCASE("elliptic umbilic grid") {
    const Run r =
        run({"sweep", "--model", "elliptic-umbilic", "--c", "3", "--window", "-12,12,-12,12", "--resolution", "64,64"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 4097);
    CHECK(rows[0] == std::vector<std::string>{"y1", "y2", "n_real", "sum_real_mu", "rejected"});
    std::set<std::string> counts;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i][4] == "1") continue;
      counts.insert(rows[i][2]);
      if (rows[i][2] == "4") CHECK(std::abs(std::stod(rows[i][3])) <= 1e-8 * 100);
    }
    CHECK(counts == std::set<std::string>{"2", "4"});
    // Row-major with y1 varying fastest.
    CHECK(std::stod(rows[1][0]) < std::stod(rows[2][0]));
    CHECK(rows[1][1] == rows[2][1]);
  }
  SUBCASE("shape") {
    CHECK(csv_rows(run({"sweep", "--model", "fold", "--window", "-1,1,-1,1", "--resolution", "2,2"}).out).size() == 5);
  }
  SUBCASE("usage") {
    CHECK(run({"sweep", "--model", "fold", "--resolution", "2,2"}).code == 64);
    CHECK(run({"sweep", "--model", "fold", "--window", "-1,1,-1,1"}).code == 64);
    CHECK(run({"sweep", "--model", "fold", "--window", "1,-1,-1,1", "--resolution", "2,2"}).code == 64);
    CHECK(run({"sweep", "--model", "fold", "--window", "-1,1,-1,1", "--resolution", "0,2"}).code == 64);
  }
}

TEST_CASE("config file and output path") {
  const auto cfg = temp_path("config.txt");
  const auto out = temp_path("out.json");
  {
    std::ofstream f(cfg);
    f << "# cusp fixture\nmodel = cusp\ny = 5,5\noutput_path = " << out.string() << "\n";
  }
  // Command-line flags override the file.
  const Run r = run({"solve", "--config", cfg.string(), "--y", "-3,0"});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  const json j = json::parse(read_file(out));
  CHECK(j["source"][0] == -3.0);
  CHECK(j["n_real"] == 3);
  {
    std::ofstream f(cfg);
    f << "colour = blue\n";
  }
  CHECK(run({"solve", "--config", cfg.string()}).code == 64);
  CHECK(run({"solve", "--config", temp_path("missing.txt").string()}).code == 64);
  std::filesystem::remove(cfg);
  std::filesystem::remove(out);
}

TEST_CASE("golden outputs") {
  const std::filesystem::path dir = LENS_GOLDEN_DIR;
  const std::vector<std::pair<std::string, std::vector<std::string>>> cases{
      {"solve_cusp.json", {"solve", "--model", "cusp", "--y", "-3,0"}},
      {"solve_elliptic_umbilic.json", {"solve", "--model", "elliptic-umbilic", "--c", "3", "--y", "0,0"}},
      {"lefschetz_hyperbolic_umbilic.json", {"lefschetz", "--model", "hyperbolic-umbilic", "--c", "1", "--y", "0.3,0.7"}},
      {"caustic_fold.csv", {"caustic", "--model", "fold", "--samples", "10"}},
      {"sweep_fold.csv", {"sweep", "--model", "fold", "--window", "-1,1,-1,1", "--resolution", "2,2"}},
      {"verify_swallowtail.json", {"verify", "--model", "swallowtail", "--trials", "25", "--seed", "42"}},
  };
  for (const auto& [file, args] : cases) {
    CAPTURE(file);
    const auto path = dir / file;
    REQUIRE_MESSAGE(std::filesystem::exists(path), "missing golden file");
    CHECK(run(args).out == read_file(path));
  }
}

}  // TEST_SUITE
