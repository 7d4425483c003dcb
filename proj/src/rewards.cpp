#include "drfed/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace drfed {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

// Probability that a draw of the given family lands in [0, 1] (the rejection
// sampler's acceptance rate). Calibration refuses locations that would make
// sampling pathologically slow.
constexpr double kMinAcceptance = 1e-4;

double gaussian_acceptance(double centre, double sigma) {
  return norm_cdf((1.0 - centre) / sigma) - norm_cdf((0.0 - centre) / sigma);
}

double exponential_acceptance(double shift, double alpha) {
  const double a = std::max(0.0, -shift);
  const double b = 1.0 - shift;
  if (b <= a) return 0.0;
  return std::exp(-a / alpha) - std::exp(-b / alpha);
}

// Generic rising-function bisection on [lo, hi]; f must be monotone
// increasing with f(lo) <= target <= f(hi).
template <typename F>
double bisect_increasing(F f, double lo, double hi, double target) {
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double solve_gaussian_centre(double mu, double sigma) {
  double lo = 0.0, hi = 1.0;
  int guard = 0;
  while (truncated_gaussian_mean(lo, sigma) > mu) {
    lo -= std::max(sigma, 0.5);
    if (gaussian_acceptance(lo, sigma) < kMinAcceptance || ++guard > 64)
      throw std::domain_error(
          "calibration failure: truncated Gaussian mean unreachable at usable "
          "acceptance rate");
  }
  guard = 0;
  while (truncated_gaussian_mean(hi, sigma) < mu) {
    hi += std::max(sigma, 0.5);
    if (gaussian_acceptance(hi, sigma) < kMinAcceptance || ++guard > 64)
      throw std::domain_error(
          "calibration failure: truncated Gaussian mean unreachable at usable "
          "acceptance rate");
  }
  const double centre = bisect_increasing(
      [sigma](double c) { return truncated_gaussian_mean(c, sigma); }, lo, hi, mu);
  if (std::abs(truncated_gaussian_mean(centre, sigma) - mu) > 1e-9 ||
      gaussian_acceptance(centre, sigma) < kMinAcceptance)
    throw std::domain_error("calibration failure: truncated Gaussian solve did not converge");
  return centre;
}

double solve_exponential_shift(double mu, double alpha) {
  double lo = 0.0;
  const double hi = 1.0 - 1e-9;
  int guard = 0;
  while (truncated_shifted_exponential_mean(lo, alpha) > mu) {
    lo -= 0.5;
    if (exponential_acceptance(lo, alpha) < kMinAcceptance || ++guard > 64)
      throw std::domain_error(
          "calibration failure: truncated shifted exponential cannot reach mean " +
          std::to_string(mu) + " with scale " + std::to_string(alpha));
  }
  if (truncated_shifted_exponential_mean(hi, alpha) < mu)
    throw std::domain_error(
        "calibration failure: requested mean too close to 1 for the exponential family");
  const double shift = bisect_increasing(
      [alpha](double s) { return truncated_shifted_exponential_mean(s, alpha); }, lo, hi,
      mu);
  if (std::abs(truncated_shifted_exponential_mean(shift, alpha) - mu) > 1e-9 ||
      exponential_acceptance(shift, alpha) < kMinAcceptance)
    throw std::domain_error(
        "calibration failure: truncated shifted exponential solve did not converge");
  return shift;
}

}  // namespace

MeanMatrix build_heterogeneous_means(int client_count, int arm_count, double gap_scale,
                                     double base) {
  if (client_count < 1 || arm_count < 1)
    throw std::invalid_argument("build_heterogeneous_means: need M >= 1 and K >= 1");
  if (base < 0.0 || gap_scale < 0.0 || base + gap_scale > 1.0)
    throw std::invalid_argument(
        "build_heterogeneous_means: need base >= 0, h >= 0, base + h <= 1");
  MeanMatrix means;
  means.client_count = client_count;
  means.arm_count = arm_count;
  means.mu.resize(static_cast<std::size_t>(client_count) * arm_count);
  for (int m = 0; m < client_count; ++m)
    for (int i = 0; i < arm_count; ++i)
      means.at(m, i) = base + (i + 1) * gap_scale * (2 * m + 1) /
                                  (2.0 * arm_count * client_count);
  return means;
}

GlobalStats global_stats(const MeanMatrix& means) {
  if (means.client_count < 1 || means.arm_count < 1)
    throw std::invalid_argument("global_stats: empty mean matrix");
  GlobalStats stats;
  stats.global_means.resize(means.arm_count, 0.0);
  for (int i = 0; i < means.arm_count; ++i) {
    double acc = 0.0;
    for (int m = 0; m < means.client_count; ++m) acc += means.at(m, i);
    stats.global_means[static_cast<std::size_t>(i)] = acc / means.client_count;
  }
  stats.optimal_arm = 0;
  for (int i = 1; i < means.arm_count; ++i)
    if (stats.global_means[static_cast<std::size_t>(i)] >
        stats.global_means[static_cast<std::size_t>(stats.optimal_arm)])
      stats.optimal_arm = i;
  stats.gaps.resize(means.arm_count);
  for (int i = 0; i < means.arm_count; ++i)
    stats.gaps[static_cast<std::size_t>(i)] =
        stats.global_means[static_cast<std::size_t>(stats.optimal_arm)] -
        stats.global_means[static_cast<std::size_t>(i)];
  return stats;
}

double truncated_gaussian_mean(double centre, double sigma) {
  if (sigma == 0.0) return centre;
  const double a = (0.0 - centre) / sigma;
  const double b = (1.0 - centre) / sigma;
  const double z = norm_cdf(b) - norm_cdf(a);
  if (z < 1e-300)
    throw std::domain_error("truncated_gaussian_mean: window mass underflow");
  return centre + sigma * (norm_pdf(a) - norm_pdf(b)) / z;
}

double truncated_shifted_exponential_mean(double shift, double alpha) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("truncated_shifted_exponential_mean: alpha must be > 0");
  if (shift >= 1.0)
    throw std::domain_error("truncated_shifted_exponential_mean: empty window");
  const double a = std::max(0.0, -shift);
  const double b = 1.0 - shift;
  const double w = b - a;
  if (w < 1e-12) return shift + a + 0.5 * w;  // narrow-window limit
  const double q = std::exp(-w / alpha);
  const double conditional = alpha + (a - b * q) / (1.0 - q);
  return shift + conditional;
}

RewardModel make_reward_model(Regime regime, RewardFamily family, MeanMatrix means,
                              double sigma, double alpha) {
  for (const double mu : means.mu)
    if (!(mu >= 0.0) || !(mu <= 1.0))
      throw std::invalid_argument("make_reward_model: means must lie in [0, 1]");
  RewardModel model;
  model.regime = regime;
  model.family = family;
  model.sigma = sigma;
  model.alpha = alpha;
  model.means = std::move(means);
  const std::size_t cells = model.means.mu.size();
  model.location.assign(cells, 0.0);
  switch (family) {
    case RewardFamily::bernoulli:
      break;
    case RewardFamily::truncated_gaussian:
      if (sigma < 0.0)
        throw std::invalid_argument("make_reward_model: sigma must be >= 0");
      for (std::size_t c = 0; c < cells; ++c)
        model.location[c] =
            sigma == 0.0 ? model.means.mu[c] : solve_gaussian_centre(model.means.mu[c], sigma);
      break;
    case RewardFamily::truncated_shifted_exponential:
      if (!(alpha > 0.0))
        throw std::invalid_argument("make_reward_model: alpha must be > 0");
      for (std::size_t c = 0; c < cells; ++c)
        model.location[c] = solve_exponential_shift(model.means.mu[c], alpha);
      break;
  }
  return model;
}

double sample_reward(const RewardModel& model, int m, int i, RngStream& rng) {
  const std::size_t cell =
      static_cast<std::size_t>(m) * model.means.arm_count + static_cast<std::size_t>(i);
  const double mu = model.means.mu[cell];
  switch (model.family) {
    case RewardFamily::bernoulli:
      return rng.next_double() < mu ? 1.0 : 0.0;
    case RewardFamily::truncated_gaussian: {
      if (model.sigma == 0.0) return mu;
      const double centre = model.location[cell];
      for (int it = 0; it < 1000000; ++it) {
        const double x = centre + model.sigma * rng.next_gaussian();
        if (x >= 0.0 && x <= 1.0) return x;
      }
      throw std::runtime_error("sample_reward: Gaussian rejection loop stalled");
    }
    case RewardFamily::truncated_shifted_exponential: {
      const double shift = model.location[cell];
      for (int it = 0; it < 1000000; ++it) {
        const double x = shift + rng.next_exponential(model.alpha);
        if (x >= 0.0 && x <= 1.0) return x;
      }
      throw std::runtime_error("sample_reward: exponential rejection loop stalled");
    }
  }
  throw std::logic_error("sample_reward: unknown family");
}

std::string means_to_csv(const MeanMatrix& means) {
  std::string out = "client,arm,mu\n";
  char buf[64];
  for (int m = 0; m < means.client_count; ++m)
    for (int i = 0; i < means.arm_count; ++i) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g\n", m, i, means.at(m, i));
      out += buf;
    }
  return out;
}

MeanMatrix means_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != "client,arm,mu")
    throw std::invalid_argument("means_from_csv: missing 'client,arm,mu' header");
  struct Cell {
    int m, i;
    double mu;
  };
  std::vector<Cell> cells;
  int max_m = -1, max_i = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Cell c{};
    char extra = 0;
    if (std::sscanf(line.c_str(), "%d,%d,%lf%c", &c.m, &c.i, &c.mu, &extra) != 3 ||
        c.m < 0 || c.i < 0)
      throw std::invalid_argument("means_from_csv: malformed row: " + line);
    max_m = std::max(max_m, c.m);
    max_i = std::max(max_i, c.i);
    cells.push_back(c);
  }
  if (max_m < 0)
    throw std::invalid_argument("means_from_csv: no data rows");
  MeanMatrix means;
  means.client_count = max_m + 1;
  means.arm_count = max_i + 1;
  means.mu.assign(static_cast<std::size_t>(means.client_count) * means.arm_count,
                  std::nan(""));
  for (const auto& c : cells) means.at(c.m, c.i) = c.mu;
  if (cells.size() != means.mu.size() ||
      std::any_of(means.mu.begin(), means.mu.end(),
                  [](double v) { return std::isnan(v); }))
    throw std::invalid_argument("means_from_csv: dimension mismatch (missing cells)");
  return means;
}

}  // namespace drfed
