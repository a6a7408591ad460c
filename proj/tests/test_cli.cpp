// End-to-end checks of the command-line tool.

#include "aca/io.hpp"

#include "doctest.h"
#include "support.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using aca::Index;
using aca::MatrixXd;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(ACA_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("aca_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator()(const std::string& name) const { return (dir / name).string(); }
};

void write_planted(const std::string& path) {
  const auto g = testing::planted_groups(3);
  aca::io::write_csv_file(path, g.data, {"x", "y", "z"});
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("fit prints increasing depths and is reproducible") {
    Scratch tmp;
    write_planted(tmp("data.csv"));
    const auto a = run("fit --input " + tmp("data.csv") + " --components 3 --seed 5 --output " + tmp("a.json"));
    REQUIRE(a.code == 0);
    const auto b = run("fit --input " + tmp("data.csv") + " --components 3 --seed 5 --output " + tmp("b.json"));
    CHECK(a.out == b.out);
    CHECK(slurp(tmp("a.json")) == slurp(tmp("b.json")));

    const auto model = aca::io::load_model_file(tmp("a.json"));
    for (Index i = 1; i < model.size(); ++i) CHECK(model.min_depths[i] > model.min_depths[i - 1]);
    CHECK(a.out.find("Contributions of the 3 most important variables") != std::string::npos);
    CHECK(a.out.find("AC3") != std::string::npos);

    // Loading and saving again reproduces the file.
    aca::io::save_model_file(tmp("c.json"), model);
    CHECK(slurp(tmp("c.json")) == slurp(tmp("a.json")));
  }

  TEST_CASE("usage and data errors") {
    Scratch tmp;
    write_planted(tmp("data.csv"));
    CHECK(run("fit --input " + tmp("data.csv") + " --components 0 --seed 1 --output " + tmp("m.json")).code == 2);
    CHECK(run("fit --input " + tmp("data.csv") + " --components 4 --seed 1 --output " + tmp("m.json")).code == 2);
    CHECK(run("fit --input " + tmp("data.csv") + " --components 1 --output " + tmp("m.json")).code == 2);
    CHECK(run("simulate --n 10 --d 2 --output " + tmp("s.csv")).code == 2);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("--help").code == 0);

    std::ofstream(tmp("bad.csv")) << "a,b\n1,2\n3,oops\n";
    CHECK(run("fit --input " + tmp("bad.csv") + " --components 1 --seed 1 --output " + tmp("m.json")).code == 3);
    std::ofstream(tmp("ragged.csv")) << "1,2\n3\n";
    CHECK(run("depth --input " + tmp("ragged.csv")).code == 3);

    REQUIRE(run("fit --input " + tmp("data.csv") + " --components 1 --seed 1 --output " + tmp("m.json")).code == 0);
    std::ofstream(tmp("wide.csv")) << "1,2,3,4\n";
    CHECK(run("transform --model " + tmp("m.json") + " --input " + tmp("wide.csv")).code == 2);
    std::ofstream(tmp("broken.json")) << "{\"format_version\": 1}";
    CHECK(run("transform --model " + tmp("broken.json") + " --input " + tmp("data.csv")).code == 3);
  }

  TEST_CASE("transform") {
    Scratch tmp;
    write_planted(tmp("data.csv"));
    REQUIRE(run("fit --input " + tmp("data.csv") + " --components 2 --seed 2 --output " + tmp("m.json")).code == 0);
    const auto t = run("transform --model " + tmp("m.json") + " --input " + tmp("data.csv"));
    REQUIRE(t.code == 0);
    const auto rows = lines(t.out);
    CHECK(rows.front() == "AC1,AC2");
    CHECK(rows.size() == 101);

    std::istringstream in(t.out);
    const auto scores = aca::io::read_csv(in).data;
    const auto model = aca::io::load_model_file(tmp("m.json"));
    std::vector<double> ac1(scores.col(0).data(), scores.col(0).data() + scores.rows());
    CHECK(scores(model.anchor_rows[0], 0) >= testing::ref_median(ac1));

    std::ofstream(tmp("empty.csv")) << "x,y,z\n";
    const auto e = run("transform --model " + tmp("m.json") + " --input " + tmp("empty.csv"));
    CHECK(e.code == 0);
    CHECK(e.out == "AC1,AC2\n");
  }

  TEST_CASE("full transform keeps distances") {
    Scratch tmp;
    std::mt19937_64 rng(7);
    const MatrixXd x = testing::gaussian(25, 3, rng);
    aca::io::write_csv_file(tmp("x.csv"), x, {});
    REQUIRE(run("fit --input " + tmp("x.csv") + " --components 3 --seed 2 --output " + tmp("m.json")).code == 0);
    REQUIRE(run("transform --model " + tmp("m.json") + " --input " + tmp("x.csv") + " --output " + tmp("s.csv")).code ==
            0);
    const MatrixXd s = aca::io::read_csv_file(tmp("s.csv")).data;
    for (Index a = 0; a < x.rows(); ++a)
      for (Index b = a + 1; b < x.rows(); ++b)
        CHECK(std::abs((s.row(a) - s.row(b)).norm() - (x.row(a) - x.row(b)).norm()) < 1e-8);
  }

  TEST_CASE("depth") {
    Scratch tmp;
    std::mt19937_64 rng(8);
    MatrixXd x(61, 3);
    x.topRows(60) = testing::gaussian(60, 3, rng);
    x.row(60) << 0, 40, 0;
    aca::io::write_csv_file(tmp("x.csv"), x, {});
    const auto r = run("depth --input " + tmp("x.csv") + " --seed 3");
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    const auto t = aca::io::read_csv(in);
    CHECK(t.names == std::vector<std::string>{"depth", "u1", "u2", "u3"});
    REQUIRE(t.data.rows() == 61);
    CHECK(t.data.col(0).minCoeff() > 0);
    CHECK(t.data.col(0).maxCoeff() <= 1);
    Index argmin;
    const double lowest = t.data.col(0).minCoeff(&argmin);
    CHECK(argmin == 60);
    CHECK((t.data.col(0).array() == lowest).count() == 1);
    CHECK(run("depth --input " + tmp("x.csv") + " --seed 3").out == r.out);
  }

  TEST_CASE("explain") {
    Scratch tmp;
    aca::AcaModel<double> m;
    m.ambient_dim = 4;
    m.components = MatrixXd::Zero(4, 1);
    m.components(2, 0) = 1;
    m.min_depths = aca::VectorXd::Constant(1, 0.2);
    m.anchor_rows = {0};
    aca::io::save_model_file(tmp("e3.json"), m);
    const auto r = run("explain --model " + tmp("e3.json"));
    REQUIRE(r.code == 0);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() >= 3);
    CHECK(rows[2].find("V3") != std::string::npos);
    CHECK(rows[2].find("100.0000%") != std::string::npos);

    const auto j = nlohmann::json::parse(run("explain --json --model " + tmp("e3.json")).out);
    double total = 0;
    for (const auto& e : j.at("ranking")) total += e.at("share").get<double>();
    CHECK(std::abs(total - 1) < 1e-4);
    CHECK(j.at("ranking")[0].at("index") == 3);

    // Symmetric cross centered at the origin: the origin is the deepest point.
    std::ofstream cross(tmp("cross.csv"));
    cross << "a,b,c,d\n0,0,0,0\n";
    for (int k = 1; k <= 3; ++k)
      for (int v = 0; v < 4; ++v)
        for (int s : {-1, 1}) {
          for (int c = 0; c < 4; ++c) cross << (c ? "," : "") << (c == v ? s * k : 0);
          cross << "\n";
        }
    cross.close();
    const auto cj = nlohmann::json::parse(
        run("explain --json --model " + tmp("e3.json") + " --input " + tmp("cross.csv") + " --point 0,0,0,0").out);
    for (const auto& e : cj.at("cell_scores").at("scores")) CHECK(e.at("score").get<double>() == 0.0);
    CHECK(cj.at("ranking")[0].at("variable") == "c");

    CHECK(run("explain --model " + tmp("e3.json") + " --point 0,0,0,0").code == 2);
    CHECK(run("explain --model " + tmp("e3.json") + " --component 2").code == 2);
  }

  TEST_CASE("simulate") {
    Scratch tmp;
    const std::string base = "simulate --n 1000 --d 5 --eps 0.05 --seed 9 ";
    REQUIRE(run(base + "--output " + tmp("a.csv") + " --labels " + tmp("a.lab") + " --meta " + tmp("a.json")).code == 0);
    REQUIRE(run(base + "--output " + tmp("b.csv") + " --labels " + tmp("b.lab") + " --meta " + tmp("b.json")).code == 0);
    CHECK(slurp(tmp("a.csv")) == slurp(tmp("b.csv")));
    CHECK(slurp(tmp("a.lab")) == slurp(tmp("b.lab")));
    CHECK(slurp(tmp("a.json")) == slurp(tmp("b.json")));

    const auto labels = aca::io::read_csv_file(tmp("a.lab")).data;
    CHECK(labels.rows() == 1000);
    CHECK(labels.sum() == 50);
    const auto meta = nlohmann::json::parse(slurp(tmp("a.json")));
    CHECK(meta.at("n_anomalies") == 50);
    CHECK(meta.at("mu_tilde").size() == 5);
    CHECK(meta.at("cov").size() == 5);
    CHECK(aca::io::read_csv_file(tmp("a.csv")).data.rows() == 1000);

    REQUIRE(run("simulate --n 100 --d 3 --eps 0 --seed 9 --output " + tmp("c.csv") + " --labels " + tmp("c.lab")).code ==
            0);
    CHECK(aca::io::read_csv_file(tmp("c.lab")).data.sum() == 0);
  }

  TEST_CASE("benchmark") {
    Scratch tmp;
    const std::string args = "benchmark --n 200 --d 4 --runs 1 --components 2 --budget 200 --seed 4 ";
    const auto a = run(args + "--output " + tmp("a.json"));
    REQUIRE(a.code == 0);
    REQUIRE(run(args + "--output " + tmp("b.json")).code == 0);
    CHECK(slurp(tmp("a.json")) == slurp(tmp("b.json")));
    const auto j = nlohmann::json::parse(slurp(tmp("a.json")));
    REQUIRE(j.at("runs").size() == 1);
    const auto& rec = j.at("runs")[0];
    CHECK(rec.at("aca").at("j_hat").get<int>() >= 1);
    CHECK(rec.at("aca").at("j_hat").get<int>() <= 2);
    CHECK(rec.at("pca").at("j_hat").get<int>() >= 1);
    CHECK(rec.at("pca").at("j_hat").get<int>() <= 4);
  }
}
