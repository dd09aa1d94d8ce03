#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace mcdtsf::schedule {

// Precomputed diffusion-step quantities, 1-indexed by step k. alpha_bar(0) is
// defined as 1 and is what makes the k=1 and k_prev=0 boundaries exact.
// Immutable after construction; safe to share across workers.
struct NoiseSchedule {
  int K = 0;
  std::vector<double> betas;       // [k], k = 1..K; index 0 unused
  std::vector<double> alphas;      // 1 - beta_k
  std::vector<double> alpha_bars;  // prod_{i<=k} alpha_i; alpha_bars[0] = 1

  double alpha_bar(int k) const { return alpha_bars[k]; }
};

// beta_k = (sqrt(beta_min) + (k-1)/(K-1) * (sqrt(beta_max)-sqrt(beta_min)))^2.
// Throws std::invalid_argument unless K >= 2 and 0 < beta_min < beta_max < 1.
NoiseSchedule build_quadratic_schedule(int K, double beta_min, double beta_max);

// sqrt(abar_k) * y0 + sqrt(1 - abar_k) * eps.
std::vector<double> forward_sample(const NoiseSchedule& s,
                                   std::span<const double> y0, int k,
                                   std::span<const double> eps);

std::vector<double> posterior_mean(const NoiseSchedule& s,
                                   std::span<const double> y_k,
                                   std::span<const double> y0_hat, int k);

// Default reverse-step variance: the posterior form
// (1 - abar_{k-1}) / (1 - abar_k) * beta_k.
double posterior_variance(const NoiseSchedule& s, int k);
// Alternative fixed variance beta_k, selectable via SampleConfig.
double fixed_beta_variance(const NoiseSchedule& s, int k);

std::vector<double> ddim_step(const NoiseSchedule& s,
                              std::span<const double> y_k,
                              std::span<const double> y0_hat, int k, int k_prev,
                              double eta, std::span<const double> eps_draw);

// S strictly increasing step indices in [1, K], spaced as rounded squares of
// a linear ramp and always ending at K. Visited in descending order when
// sampling.
std::vector<int> quadratic_subsequence(int K, int S);

// CSV table: k, beta, alpha, alpha_bar, posterior_var.
void dump_schedule_csv(const NoiseSchedule& s, std::ostream& os);

}  // namespace mcdtsf::schedule
