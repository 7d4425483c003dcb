#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "drfed/analysis.hpp"

TEST_CASE("aggregate: mean and normal CI half-width") {
  // Two runs, constant series 0 and 2: mean 1, sd = sqrt(2),
  // half-width = 1.96 * sqrt(2) / sqrt(2) = 1.96.
  const std::vector<std::vector<double>> runs = {{0.0, 0.0}, {2.0, 2.0}};
  const auto agg = drfed::aggregate(runs);
  REQUIRE(agg.t.size() == 2);
  CHECK(agg.run_count == 2);
  CHECK(agg.t[0] == 1);
  CHECK(agg.t[1] == 2);
  CHECK(agg.mean[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(agg.half_width[0] == doctest::Approx(1.96).epsilon(1e-12));

  // A single run has no spread estimate.
  const auto solo = drfed::aggregate({{3.0, 4.0, 5.0}});
  CHECK(solo.run_count == 1);
  for (const double hw : solo.half_width) CHECK(hw == 0.0);
  CHECK(solo.mean[2] == 5.0);

  // Four identical runs: zero half-width, exact mean.
  const auto same = drfed::aggregate(std::vector<std::vector<double>>(4, {7.0}));
  CHECK(same.mean[0] == 7.0);
  CHECK(same.half_width[0] == 0.0);

  CHECK_THROWS_WITH_AS(drfed::aggregate({}), doctest::Contains("at least one run"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(drfed::aggregate({{1.0, 2.0}, {1.0}}),
                       doctest::Contains("grid mismatch"), std::invalid_argument);
  CHECK_THROWS_AS(drfed::aggregate({{}}), std::invalid_argument);
}

TEST_CASE("fit_log_regret: recovers a planted logarithmic curve exactly") {
  drfed::AggregateSeries series;
  for (std::int64_t t = 1; t <= 500; ++t) {
    series.t.push_back(t);
    series.mean.push_back(3.0 * std::log(static_cast<double>(t)) + 2.0);
    series.half_width.push_back(0.0);
  }
  series.run_count = 1;
  const auto fit = drfed::fit_log_regret(series, 10);
  CHECK(fit.slope == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(fit.intercept == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-9));

  // t_min restricts the window: only points with t >= t_min participate, so a
  // curve that is logarithmic only in its tail still fits perfectly there.
  drfed::AggregateSeries tail = series;
  for (std::size_t i = 0; i < 50; ++i) tail.mean[i] = 100.0;  // corrupt the head
  const auto tail_fit = drfed::fit_log_regret(tail, 51);
  CHECK(tail_fit.slope == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(tail_fit.r_squared == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("fit_log_regret: discriminates linear growth from logarithmic") {
  drfed::AggregateSeries series;
  for (std::int64_t t = 100; t <= 5000; ++t) {
    series.t.push_back(t);
    series.mean.push_back(0.01 * static_cast<double>(t));
  }
  series.run_count = 1;
  const auto fit = drfed::fit_log_regret(series, 100);
  // Frozen reference: R^2 of a linear-in-t series against ln t on this window.
  CHECK(fit.r_squared == doctest::Approx(0.8481689716899788).epsilon(1e-9));
  CHECK(fit.r_squared < 0.9);
}

TEST_CASE("fit_log_regret: window and degeneracy errors") {
  drfed::AggregateSeries series;
  for (std::int64_t t = 1; t <= 20; ++t) {
    series.t.push_back(t);
    series.mean.push_back(std::log(static_cast<double>(t)));
  }
  series.run_count = 1;
  CHECK_NOTHROW(drfed::fit_log_regret(series, 11));  // exactly 10 points
  CHECK_THROWS_WITH_AS(drfed::fit_log_regret(series, 12),
                       doctest::Contains(">= 10 points"), std::invalid_argument);

  drfed::AggregateSeries flat;
  for (std::int64_t t = 1; t <= 50; ++t) {
    flat.t.push_back(t);
    flat.mean.push_back(4.5);
  }
  flat.run_count = 1;
  CHECK_THROWS_WITH_AS(drfed::fit_log_regret(flat, 1), doctest::Contains("degenerate"),
                       std::domain_error);
}

TEST_CASE("tail_exceedance counts strict violations only") {
  const std::vector<drfed::DeviationSample> samples = {
      {0.5, 10, 100}, {0.1, 20, 100}, {0.3, 30, 100}, {0.31, 40, 100}};
  const auto fixed_bound = [](std::int64_t, std::int64_t) { return 0.3; };
  CHECK(drfed::tail_exceedance(samples, fixed_bound) == doctest::Approx(0.5));

  const auto generous = [](std::int64_t, std::int64_t) { return 1.0; };
  CHECK(drfed::tail_exceedance(samples, generous) == 0.0);
  CHECK(drfed::tail_exceedance({}, generous) == 0.0);

  // The bound sees each sample's pull count: 1/sqrt(n) admits large-n samples
  // only when their deviation shrank accordingly.
  const auto shrinking = [](std::int64_t n, std::int64_t) {
    return 1.0 / std::sqrt(static_cast<double>(n));
  };
  const std::vector<drfed::DeviationSample> pairs = {{0.2, 100, 1}, {0.2, 16, 1}};
  CHECK(drfed::tail_exceedance(pairs, shrinking) == doctest::Approx(0.5));
}

TEST_CASE("sweep_summary: ordering, slack, and verdicts") {
  const std::vector<drfed::SweepPoint> increasing = {
      {0.3, 9.0, 0.2}, {0.1, 5.0, 0.2}, {0.2, 7.0, 0.2}};  // deliberately shuffled
  auto up = drfed::sweep_summary(increasing, drfed::SweepDirection::non_decreasing);
  REQUIRE(up.points.size() == 3);
  CHECK(up.points[0].param_value == 0.1);
  CHECK(up.points[2].param_value == 0.3);
  CHECK(up.consistent);
  CHECK(up.verdict.find("consistent") != std::string::npos);

  // Same data, opposite claim: clearly violated.
  auto down = drfed::sweep_summary(increasing, drfed::SweepDirection::non_increasing);
  CHECK_FALSE(down.consistent);
  CHECK(down.verdict.find("VIOLATED") != std::string::npos);

  // A small dip within one pooled CI half-width does not break the claim.
  const std::vector<drfed::SweepPoint> noisy = {
      {1.0, 5.00, 0.3}, {2.0, 4.85, 0.3}, {3.0, 6.00, 0.3}};
  const double slack = std::sqrt(0.3 * 0.3 + 0.3 * 0.3);  // ~0.424 > 0.15 dip
  CHECK(slack > 0.15);
  CHECK(drfed::sweep_summary(noisy, drfed::SweepDirection::non_decreasing).consistent);

  // The same dip with tight CIs is a real violation.
  const std::vector<drfed::SweepPoint> tight = {
      {1.0, 5.00, 0.01}, {2.0, 4.85, 0.01}, {3.0, 6.00, 0.01}};
  CHECK_FALSE(
      drfed::sweep_summary(tight, drfed::SweepDirection::non_decreasing).consistent);

  // Input order never matters: verdicts are computed on the sorted points.
  const std::vector<drfed::SweepPoint> reversed(tight.rbegin(), tight.rend());
  const auto a = drfed::sweep_summary(tight, drfed::SweepDirection::non_decreasing);
  const auto b = drfed::sweep_summary(reversed, drfed::SweepDirection::non_decreasing);
  CHECK(a.consistent == b.consistent);
  CHECK(a.verdict == b.verdict);

  const auto none = drfed::sweep_summary(tight, drfed::SweepDirection::none);
  CHECK(none.consistent);
  CHECK(none.verdict.find("table only") != std::string::npos);

  const auto single =
      drfed::sweep_summary({{1.0, 2.0, 0.1}}, drfed::SweepDirection::non_decreasing);
  CHECK(single.consistent);
  CHECK(single.verdict.find("single point") != std::string::npos);
}

TEST_CASE("series_auc: trapezoid on the unit grid") {
  CHECK(drfed::series_auc({}) == 0.0);
  CHECK(drfed::series_auc({5.0}) == 0.0);
  CHECK(drfed::series_auc({0.0, 1.0, 2.0}) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(drfed::series_auc({2.0, 2.0, 2.0}) == doctest::Approx(4.0).epsilon(1e-12));
  // Linearity in the values.
  const std::vector<double> s = {0.5, 1.5, 4.0, 4.5};
  std::vector<double> doubled;
  for (const double v : s) doubled.push_back(2.0 * v);
  CHECK(drfed::series_auc(doubled) ==
        doctest::Approx(2.0 * drfed::series_auc(s)).epsilon(1e-12));
}
