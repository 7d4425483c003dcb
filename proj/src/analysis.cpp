#include "drfed/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace drfed {

AggregateSeries aggregate(const std::vector<std::vector<double>>& regret_series) {
  if (regret_series.empty())
    throw std::invalid_argument("aggregate: need at least one run");
  const std::size_t len = regret_series.front().size();
  if (len == 0) throw std::invalid_argument("aggregate: empty series");
  for (const auto& s : regret_series)
    if (s.size() != len) throw std::invalid_argument("aggregate: grid mismatch");

  const int runs = static_cast<int>(regret_series.size());
  AggregateSeries out;
  out.run_count = runs;
  out.t.resize(len);
  out.mean.resize(len);
  out.half_width.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    out.t[i] = static_cast<std::int64_t>(i) + 1;
    double sum = 0.0;
    for (const auto& s : regret_series) sum += s[i];
    const double mean = sum / runs;
    out.mean[i] = mean;
    if (runs < 2) {
      out.half_width[i] = 0.0;
      continue;
    }
    double ss = 0.0;
    for (const auto& s : regret_series) ss += (s[i] - mean) * (s[i] - mean);
    const double sd = std::sqrt(ss / (runs - 1));
    out.half_width[i] = 1.96 * sd / std::sqrt(static_cast<double>(runs));
  }
  return out;
}

LogFit fit_log_regret(const AggregateSeries& series, std::int64_t t_min) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < series.t.size(); ++i)
    if (series.t[i] >= t_min) {
      xs.push_back(std::log(static_cast<double>(series.t[i])));
      ys.push_back(series.mean[i]);
    }
  if (xs.size() < 10)
    throw std::invalid_argument("fit_log_regret: need >= 10 points with t >= t_min");
  const std::size_t n = xs.size();
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (syy == 0.0 || sxx == 0.0)
    throw std::domain_error("fit_log_regret: degenerate (constant) series");
  LogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = (sxy * sxy) / (sxx * syy);
  return fit;
}

double tail_exceedance(const std::vector<DeviationSample>& samples,
                       const std::function<double(std::int64_t, std::int64_t)>& bound_fn) {
  if (samples.empty()) return 0.0;
  std::size_t exceed = 0;
  for (const DeviationSample& s : samples)
    if (s.deviation > bound_fn(s.n, s.t)) ++exceed;
  return static_cast<double>(exceed) / static_cast<double>(samples.size());
}

SweepSummary sweep_summary(std::vector<SweepPoint> points, SweepDirection claimed) {
  std::sort(points.begin(), points.end(),
            [](const SweepPoint& a, const SweepPoint& b) {
              return a.param_value < b.param_value;
            });
  SweepSummary out;
  out.points = std::move(points);
  out.claimed = claimed;
  if (claimed == SweepDirection::none || out.points.size() < 2) {
    out.consistent = true;
    out.verdict = out.points.size() < 2 ? "single point, no verdict"
                                        : "no direction claimed, table only";
    return out;
  }
  bool ok = true;
  for (std::size_t i = 0; i + 1 < out.points.size(); ++i) {
    const SweepPoint& a = out.points[i];
    const SweepPoint& b = out.points[i + 1];
    const double slack = std::sqrt(a.final_half_width * a.final_half_width +
                                   b.final_half_width * b.final_half_width);
    const double step = b.final_mean - a.final_mean;
    if (claimed == SweepDirection::non_decreasing && step < -slack) ok = false;
    if (claimed == SweepDirection::non_increasing && step > slack) ok = false;
  }
  out.consistent = ok;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s within one pooled CI half-width: %s",
                claimed == SweepDirection::non_decreasing ? "non-decreasing"
                                                          : "non-increasing",
                ok ? "consistent" : "VIOLATED");
  out.verdict = buf;
  return out;
}

double series_auc(const std::vector<double>& series) {
  if (series.size() < 2) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < series.size(); ++i)
    acc += 0.5 * (series[i] + series[i + 1]);
  return acc;
}

}  // namespace drfed
