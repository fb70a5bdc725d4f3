#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <vector>

#include "bnpfc/core/errors.hpp"
#include "bnpfc/core/random.hpp"
#include "bnpfc/eval/scores.hpp"
#include "bnpfc/eval/tables.hpp"

using namespace bnpfc;
using namespace bnpfc::eval;

namespace {

DrawMixtures single_gaussians(const std::vector<double>& means, double var) {
  DrawMixtures m;
  for (double mu : means) {
    m.add_component(1.0, mu, var);
    m.close_draw();
  }
  return m;
}

ScorePanel synthetic_panel(const std::string& name, int n, double scale, std::uint64_t seed) {
  ScorePanel p;
  p.model = name;
  RandomStream rng(seed);
  Quarter d = Quarter::from_year_quarter(1980, 1);
  for (int i = 0; i < n; ++i) {
    p.dates.push_back(d);
    d = Quarter::from_ordinal(d.ordinal() + 1);
    const double e = scale * rng.normal();
    p.realized.push_back(e);
    p.point.push_back(0.0);
    p.sq_error.push_back(e * e);
    p.lpl.push_back(-0.5 * e * e);
    p.pit.push_back(rng.uniform());
    for (std::size_t k = 0; k < p.p_grid.size(); ++k) p.qs[k].push_back(scale * (1.0 + rng.uniform()));
  }
  return p;
}

}  // namespace

TEST_CASE("tick loss") {
  CHECK(quantile_score(1.0, 0.0, 0.9) == doctest::Approx(0.9));
  CHECK(quantile_score(-1.0, 0.0, 0.9) == doctest::Approx(0.1));
  CHECK(quantile_score(2.0, 2.0, 0.3) == 0.0);
  CHECK(quantile_score(0.0, 1.0, 0.05) == doctest::Approx(0.95));
  CHECK_THROWS_AS(quantile_score(0.0, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(quantile_score(0.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("type-7 quantiles") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  CHECK(sorted_quantile(x, 0.5) == doctest::Approx(2.5));
  CHECK(sorted_quantile(x, 0.0) == 1.0);
  CHECK(sorted_quantile(x, 1.0) == 4.0);
  CHECK(sorted_quantile(x, 0.25) == doctest::Approx(1.75));
  const auto q = sample_quantiles({4.0, 1.0, 3.0, 2.0}, std::vector<double>{0.5});
  CHECK(q[0] == doctest::Approx(2.5));
}

TEST_CASE("the sample quantile minimizes the empirical tick loss") {
  RandomStream rng(3);
  std::vector<double> y(201);
  for (double& v : y) v = rng.normal() + 0.3 * rng.normal() * rng.normal();
  std::vector<double> sorted = y;
  std::sort(sorted.begin(), sorted.end());
  for (double p : kQuantileGrid) {
    auto loss = [&](double q) {
      double s = 0.0;
      for (double v : y) s += quantile_score(v, q, p);
      return s;
    };
    double best = loss(sorted[0]);
    for (double c : sorted) best = std::min(best, loss(c));
    // With n p non-integer the minimizer is the order statistic ceil(n p).
    const double q = sorted[static_cast<std::size_t>(std::ceil(201 * p)) - 1];
    CHECK(loss(q) == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("log predictive likelihood") {
  SUBCASE("standard normal at zero") {
    const auto m = single_gaussians({0.0}, 1.0);
    CHECK(log_pred_likelihood(m, 0.0) == doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi)).epsilon(1e-12));
  }
  SUBCASE("duplicating draws leaves the value unchanged") {
    const auto a = single_gaussians({0.1, -0.4, 2.0}, 0.7);
    const auto b = single_gaussians({0.1, -0.4, 2.0, 0.1, -0.4, 2.0}, 0.7);
    CHECK(log_pred_likelihood(a, 0.3) == doctest::Approx(log_pred_likelihood(b, 0.3)).epsilon(1e-12));
  }
  SUBCASE("three-draw mixture against direct summation") {
    DrawMixtures m;
    m.add_component(0.3, -1.0, 0.5);
    m.add_component(0.7, 1.0, 2.0);
    m.close_draw();
    m.add_component(1.0, 0.0, 1.0);
    m.close_draw();
    m.add_component(0.5, 3.0, 0.1);
    m.add_component(0.5, -3.0, 0.1);
    m.close_draw();
    auto phi = [](double y, double mu, double v) {
      return std::exp(-0.5 * (y - mu) * (y - mu) / v) / std::sqrt(2.0 * std::numbers::pi * v);
    };
    for (double y : {-2.0, 0.0, 0.5, 2.9}) {
      const double direct =
          (0.3 * phi(y, -1, 0.5) + 0.7 * phi(y, 1, 2) + phi(y, 0, 1) + 0.5 * phi(y, 3, 0.1) + 0.5 * phi(y, -3, 0.1)) /
          3.0;
      CHECK(log_pred_likelihood(m, y) == doctest::Approx(std::log(direct)).epsilon(1e-12));
    }
  }
  SUBCASE("far tails stay finite") {
    const auto m = single_gaussians({0.0}, 1e-4);
    CHECK(std::isfinite(log_pred_likelihood(m, 10.0)));
  }
}

TEST_CASE("PIT") {
  RandomStream rng(1);
  const std::vector<double> d{1.0, 2.0, 3.0, 4.0};
  CHECK(pit_value(d, 0.0, rng) == 0.0);
  CHECK(pit_value(d, 5.0, rng) == 1.0);
  CHECK(pit_value(d, 2.5, rng) == doctest::Approx(0.5));
  const std::vector<double> tied{1.0, 1.0, 1.0, 1.0};
  double s = 0.0;
  for (int i = 0; i < 4000; ++i) {
    const double v = pit_value(tied, 1.0, rng);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    s += v;
  }
  CHECK(s / 4000.0 == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("calibration curves") {
  CHECK(kolmogorov_critical(0.05) == doctest::Approx(1.3581).epsilon(1e-4));
  CHECK(kolmogorov_critical(0.01) == doctest::Approx(1.6276).epsilon(1e-4));
  const std::vector<double> pits(100, 0.5);
  const auto grid = unit_grid();
  REQUIRE(grid.size() == 101);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == 1.0);
  const auto c = rs_diagnostic(pits, grid);
  CHECK(c.band == doctest::Approx(0.1358).epsilon(1e-3));
  CHECK_FALSE(c.inside());

  RandomStream rng(8);
  std::vector<double> u(400);
  for (double& v : u) v = rng.uniform();
  CHECK(rs_diagnostic(u, grid).inside());
  CHECK(ks_uniform_pvalue(u) > 0.01);
  CHECK(ks_uniform_pvalue(pits) < 1e-6);
}

TEST_CASE("KS p-values are uniform under the null") {
  RandomStream rng(21);
  int rejections = 0;
  const int reps = 2000;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> u(60);
    for (double& v : u) v = rng.uniform();
    if (ks_uniform_pvalue(u) < 0.05) ++rejections;
  }
  CHECK(rejections / static_cast<double>(reps) == doctest::Approx(0.05).epsilon(0.3));
}

TEST_CASE("add_score") {
  ScorePanel p;
  p.model = "m";
  RandomStream rng(2);
  std::vector<double> draws{0.0, 1.0, 2.0, 3.0, 4.0};
  const auto mix = single_gaussians(draws, 1.0);
  add_score(p, Quarter::from_year_quarter(2000, 1), 2.5, draws, mix, rng);
  p.check();
  CHECK(p.point[0] == doctest::Approx(2.0));
  CHECK(p.sq_error[0] == doctest::Approx(0.25));
  CHECK(p.pit[0] == doctest::Approx(0.6));
  CHECK(p.qs[2][0] == doctest::Approx(quantile_score(2.5, 2.0, 0.5)));
  CHECK(p.lpl[0] == doctest::Approx(log_pred_likelihood(mix, 2.5)));
}

TEST_CASE("relative table") {
  const auto b = synthetic_panel("UC-SV", 60, 1.0, 4);
  SUBCASE("self comparison gives unit ratios and zero LPL gap") {
    const auto r = relative_row(b, b);
    CHECK(r.mse == doctest::Approx(1.0));
    CHECK(r.lpl == doctest::Approx(0.0));
    for (double q : r.qs) CHECK(q == doctest::Approx(1.0));
  }
  SUBCASE("halving every error quarters the MSE ratio") {
    ScorePanel m = b;
    m.model = "half";
    for (double& e : m.sq_error) e *= 0.25;
    for (auto& q : m.qs)
      for (double& v : q) v *= 0.5;
    const auto r = relative_row(m, b);
    CHECK(r.mse == doctest::Approx(0.25));
    for (double q : r.qs) CHECK(q == doctest::Approx(0.5));
  }
  SUBCASE("misaligned panels are rejected") {
    ScorePanel m = b;
    m.dates.pop_back();
    CHECK_THROWS_AS(relative_row(m, b), DataError);
  }
  const auto lv = level_row(b);
  CHECK(lv.benchmark);
  CHECK(lv.mse == doctest::Approx(mse(b.sq_error)));
}

TEST_CASE("cumulative paths") {
  const std::vector<double> m(10, 1.0), b(10, 1.1);
  const auto qs = cumulative_path(m, b, true);
  CHECK(qs.back() == doctest::Approx(1.0));
  const auto lpl = cumulative_path(b, m, false);
  CHECK(lpl.back() == doctest::Approx(1.0));
  CHECK(lpl[4] == doctest::Approx(0.5));
}

TEST_CASE("subsample averages") {
  const auto b = synthetic_panel("UC-SV", 160, 1.0, 5);
  const auto m = synthetic_panel("GP-SV", 160, 0.8, 6);
  const std::vector<Window> all{{"all", b.dates.front(), b.dates.back()}};
  const auto rows = subsample_average(m, b, all);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].count == 160);
  const auto r = relative_row(m, b);
  for (std::size_t k = 0; k < r.qs.size(); ++k) CHECK(rows[0].qs_ratio[k] == doctest::Approx(r.qs[k]).epsilon(1e-12));

  const auto split = subsample_average(m, b, default_subsample_windows());
  int total = 0;
  for (const auto& row : split) total += row.count;
  CHECK(total == 160);
  const std::vector<Window> empty{{"none", Quarter::from_year_quarter(1950, 1), Quarter::from_year_quarter(1951, 1)}};
  CHECK(subsample_average(m, b, empty).empty());
}

TEST_CASE("score files round-trip") {
  const auto p = synthetic_panel("GP-DPM", 12, 1.0, 7);
  const auto path = std::filesystem::temp_directory_path() / "bnpfc_scores_roundtrip.csv";
  write_scores_csv(p, path);
  const auto q = read_scores_csv(path, "GP-DPM");
  CHECK(q.dates == p.dates);
  CHECK(q.p_grid == p.p_grid);
  CHECK(q.lpl == p.lpl);
  CHECK(q.qs == p.qs);
  std::filesystem::remove(path);
}
