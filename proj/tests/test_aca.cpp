#include "aca/aca.hpp"
#include "aca/metrics.hpp"

#include "doctest.h"
#include "support.hpp"

#include <random>
#include <vector>

using aca::DepthNotion;
using aca::Index;
using aca::MatrixXd;
using aca::OptimizerConfig;
using aca::VectorXd;

namespace {

std::vector<double> column(const MatrixXd& m, Index j) { return {m.col(j).data(), m.col(j).data() + m.rows()}; }

}  // namespace

TEST_SUITE("aca") {
  TEST_CASE("full fit is an orthonormal basis") {
    std::mt19937_64 rng(1);
    for (Index d : {2, 3, 5}) {
      const MatrixXd x = testing::gaussian(60, d, rng);
      for (auto notion : {DepthNotion::projection, DepthNotion::asymmetric_projection}) {
        const auto m = aca::fit<double>(x, d, notion, OptimizerConfig{});
        CHECK(m.size() == d);
        CHECK((m.components.transpose() * m.components - MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-8);
      }
    }
  }

  TEST_CASE("two planted groups come out on the first two components") {
    const auto g = testing::planted_groups(1);
    const auto m = aca::fit<double>(g.data, 2, DepthNotion::projection, OptimizerConfig{});
    const MatrixXd s = aca::transform(m, g.data);
    CHECK(aca::auc(column(s, 0), g.group1) == 1.0);
    CHECK(aca::auc(column(s, 1), g.group2) == 1.0);
    CHECK(g.group1[static_cast<std::size_t>(m.anchor_rows[0])]);
    CHECK(g.group2[static_cast<std::size_t>(m.anchor_rows[1])]);
  }

  TEST_CASE("orientation") {
    MatrixXd x(5, 2);
    x << 0, 0, 1, 0, 2, 0, 3, 0, 4, 0;
    VectorXd u(2), anchor(2);
    u << 1, 0;
    anchor << 4, 0;
    CHECK(aca::orient(u, anchor, x) == u);
    anchor << 0, 0;
    CHECK(aca::orient(u, anchor, x) == -u);
    anchor << 2, 5;
    CHECK(aca::orient(u, anchor, x) == u);
  }

  TEST_CASE("fitted components point toward their anchors") {
    std::mt19937_64 rng(2);
    const MatrixXd x = testing::gaussian(80, 4, rng);
    const auto m = aca::fit<double>(x, 4, DepthNotion::projection, OptimizerConfig{});
    for (Index i = 0; i < m.size(); ++i) {
      const auto p = testing::project(x, m.components.col(i));
      CHECK(p[static_cast<std::size_t>(m.anchor_rows[static_cast<std::size_t>(i)])] >= testing::ref_median(p));
    }
  }

  TEST_CASE("stored depths are those of the anchors") {
    std::mt19937_64 rng(3);
    const MatrixXd x = testing::gaussian(70, 3, rng);
    for (auto notion : {DepthNotion::projection, DepthNotion::asymmetric_projection}) {
      const auto m = aca::fit<double>(x, 3, notion, OptimizerConfig{});
      for (Index i = 0; i < m.size(); ++i) {
        const Index a = m.anchor_rows[static_cast<std::size_t>(i)];
        const auto p = testing::project(x, m.components.col(i));
        const double z = p[static_cast<std::size_t>(a)];
        const double expect =
            notion == DepthNotion::projection ? testing::ref_depth_pd(z, p) : testing::ref_depth_apd(z, p);
        CHECK(std::abs(m.min_depths[i] - expect) < 1e-10);
        CHECK(m.min_depths[i] > 0);
        CHECK(m.min_depths[i] <= 1);
      }
      // Later searches run in smaller spaces and cannot find much shallower rows.
      for (Index i = 1; i < m.size(); ++i) CHECK(m.min_depths[i] >= m.min_depths[0] - 0.02);
    }
  }

  TEST_CASE("transform") {
    std::mt19937_64 rng(4);
    const MatrixXd x = testing::gaussian(30, 4, rng);
    const auto m = aca::fit<double>(x, 4, DepthNotion::projection, OptimizerConfig{});
    const MatrixXd s = aca::transform(m, x);
    for (Index a = 0; a < x.rows(); ++a)
      for (Index b = a + 1; b < x.rows(); ++b)
        CHECK(std::abs((s.row(a) - s.row(b)).norm() - (x.row(a) - x.row(b)).norm()) < 1e-8);

    const MatrixXd u1 = m.components.col(0).transpose();
    const MatrixXd one = aca::transform(m, u1);
    CHECK(std::abs(one(0, 0) - 1) < 1e-8);
    for (Index j = 1; j < 4; ++j) CHECK(std::abs(one(0, j)) < 1e-8);

    CHECK_THROWS_AS(aca::transform(m, MatrixXd(MatrixXd::Zero(3, 5))), aca::InvalidInput);
  }

  TEST_CASE("planted outliers score above the median on AC1") {
    std::mt19937_64 rng(5);
    MatrixXd x(105, 3);
    x.topRows(100) = testing::gaussian(100, 3, rng);
    for (Index i = 100; i < 105; ++i) x.row(i) = 0.1 * testing::gaussian(1, 3, rng) + MatrixXd::Constant(1, 3, 6.0);
    const auto m = aca::fit<double>(x, 1, DepthNotion::projection, OptimizerConfig{});
    const MatrixXd s = aca::transform(m, x);
    std::vector<double> normal(s.col(0).data(), s.col(0).data() + 100);
    const double med = testing::ref_median(normal);
    for (Index i = 100; i < 105; ++i) CHECK(s(i, 0) > med);
  }

  TEST_CASE("fits are deterministic") {
    std::mt19937_64 rng(6);
    const MatrixXd x = testing::gaussian(60, 5, rng);
    OptimizerConfig cfg;
    cfg.seed = 1234;
    const auto a = aca::fit<double>(x, 3, DepthNotion::asymmetric_projection, cfg);
    const auto b = aca::fit<double>(x, 3, DepthNotion::asymmetric_projection, cfg);
    CHECK(a.components == b.components);
    CHECK(a.min_depths == b.min_depths);
    CHECK(a.anchor_rows == b.anchor_rows);
  }

  TEST_CASE("scaling the data leaves the fit unchanged") {
    std::mt19937_64 rng(7);
    const MatrixXd x = testing::gaussian(60, 3, rng);
    const auto a = aca::fit<double>(x, 2, DepthNotion::projection, OptimizerConfig{});
    for (double c : {0.25, 8.0}) {
      const auto b = aca::fit<double>(MatrixXd(c * x), 2, DepthNotion::projection, OptimizerConfig{});
      CHECK((a.min_depths - b.min_depths).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((a.components - b.components).cwiseAbs().maxCoeff() < 1e-9);
    }
  }

  TEST_CASE("fit input validation") {
    const MatrixXd x = MatrixXd::Random(10, 3);
    CHECK_THROWS_AS(aca::fit<double>(x, 4, DepthNotion::projection, OptimizerConfig{}), aca::InvalidInput);
    CHECK_THROWS_AS(aca::fit<double>(x, 0, DepthNotion::projection, OptimizerConfig{}), aca::InvalidInput);
    CHECK_THROWS_AS(aca::fit<double>(x.topRows(1), 1, DepthNotion::projection, OptimizerConfig{}), aca::InvalidInput);
    MatrixXd bad = x;
    bad(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(aca::fit<double>(bad, 1, DepthNotion::projection, OptimizerConfig{}), aca::InvalidInput);
  }
}
