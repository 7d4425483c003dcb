#pragma once

// Reward models: heterogeneous per-client arm means on [0, 1] and bounded
// reward families (Bernoulli, truncated Gaussian, truncated shifted
// exponential), each calibrated so that the post-truncation mean of cell
// (client m, arm i) is exactly the configured mu[m][i].

#include <string>
#include <vector>

#include "drfed/rng.hpp"

namespace drfed {

/// Per-client arm means: mu[m*K + i] for client m, arm i; all in [0, 1].
struct MeanMatrix {
  int client_count = 0;  // M
  int arm_count = 0;     // K
  std::vector<double> mu;

  double at(int m, int i) const {
    return mu[static_cast<std::size_t>(m) * arm_count + i];
  }
  double& at(int m, int i) {
    return mu[static_cast<std::size_t>(m) * arm_count + i];
  }
};

/// Spread construction: client m's mean for arm i is the midpoint
/// base + (i+1) * h * (2m+1) / (2*K*M), so clients disagree on levels while
/// every client ranks the arms identically and the global mean of arm i is
/// base + (i+1) * h / (2K). Requires base >= 0 and base + h <= 1.
MeanMatrix build_heterogeneous_means(int client_count, int arm_count, double gap_scale,
                                     double base = 0.1);

/// Global (across clients) means, the optimal arm, and the gap vector.
struct GlobalStats {
  std::vector<double> global_means;
  int optimal_arm = 0;
  std::vector<double> gaps;  // global_means[optimal] - global_means[i]
};
GlobalStats global_stats(const MeanMatrix& means);

enum class Regime { sub_gaussian, sub_exponential };
enum class RewardFamily { bernoulli, truncated_gaussian, truncated_shifted_exponential };

/// A fully calibrated model; construct via make_reward_model.
struct RewardModel {
  Regime regime = Regime::sub_gaussian;
  RewardFamily family = RewardFamily::bernoulli;
  MeanMatrix means;
  double sigma = 0.5;  // Gaussian scale before truncation (0 = point mass)
  double alpha = 0.08; // exponential scale before truncation
  // Per-cell location parameter solved at build time: Gaussian centre or
  // exponential shift. Unused for Bernoulli.
  std::vector<double> location;
};

/// Builds the model and solves the per-cell calibration. Throws
/// std::domain_error ("calibration failure") when a requested mean is
/// unreachable for the family/scale, e.g. a truncated shifted exponential
/// with mean below its minimum attainable conditional mean.
RewardModel make_reward_model(Regime regime, RewardFamily family, MeanMatrix means,
                              double sigma, double alpha);

/// One reward draw for (client m, arm i); always in [0, 1].
double sample_reward(const RewardModel& model, int m, int i, RngStream& rng);

/// Mean of a Gaussian(centre, sigma) conditioned on [0, 1] (exposed for tests).
double truncated_gaussian_mean(double centre, double sigma);
/// Mean of shift + Exp(alpha) conditioned on [0, 1] (exposed for tests).
double truncated_shifted_exponential_mean(double shift, double alpha);

/// CSV round-trip for mean matrices: header "client,arm,mu", one row per
/// cell, means printed with 17 significant digits so the round-trip is exact.
std::string means_to_csv(const MeanMatrix& means);
MeanMatrix means_from_csv(const std::string& csv);

}  // namespace drfed
