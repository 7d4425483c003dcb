#pragma once

// Multi-run aggregation and shape checks: mean curves with normal 95% CIs,
// least-squares fits of regret against ln t, concentration-tail exceedance
// rates, and parameter-sweep monotonicity summaries.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace drfed {

struct AggregateSeries {
  std::vector<std::int64_t> t;      // common grid, 1-based rounds
  std::vector<double> mean;
  std::vector<double> half_width;   // 1.96 * sample std / sqrt(runs); 0 for 1 run
  int run_count = 0;
};

/// Pointwise mean and 95% normal-approximation CI over runs. All series must
/// share one length (the common t grid 1..T); throws std::invalid_argument
/// ("grid mismatch") otherwise or when empty.
AggregateSeries aggregate(const std::vector<std::vector<double>>& regret_series);

struct LogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares of series values against ln t over t >= t_min.
/// Needs >= 10 such points; throws std::invalid_argument when the window is
/// too short and std::domain_error when the series is degenerate (constant).
LogFit fit_log_regret(const AggregateSeries& series, std::int64_t t_min);

struct DeviationSample {
  double deviation = 0.0;  // |tilde - mu|
  std::int64_t n = 0;      // pull count behind the estimate
  std::int64_t t = 0;      // round of the snapshot
};

/// Fraction of samples whose deviation exceeds bound_fn(n, t).
double tail_exceedance(const std::vector<DeviationSample>& samples,
                       const std::function<double(std::int64_t, std::int64_t)>& bound_fn);

enum class SweepDirection { non_decreasing, non_increasing, none };

struct SweepPoint {
  double param_value = 0.0;
  double final_mean = 0.0;
  double final_half_width = 0.0;
};

struct SweepSummary {
  std::vector<SweepPoint> points;        // sorted by param value
  SweepDirection claimed = SweepDirection::none;
  bool consistent = true;   // true when no verdict is claimed
  std::string verdict;      // human-readable table conclusion
};

/// Orders the points by parameter value and, when a direction is claimed,
/// checks monotonicity of the final mean regret with a slack of one pooled
/// CI half-width (sqrt(hw_a^2 + hw_b^2)) per adjacent pair.
SweepSummary sweep_summary(std::vector<SweepPoint> points, SweepDirection claimed);

/// Trapezoidal area under a cumulative series on the grid t = 1..T
/// (exported for external benchmark comparisons).
double series_auc(const std::vector<double>& series);

}  // namespace drfed
