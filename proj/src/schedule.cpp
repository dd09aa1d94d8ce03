#include "mcdtsf/schedule.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace mcdtsf::schedule {

namespace {
void check_step(const NoiseSchedule& s, int k) {
  if (k < 1 || k > s.K) throw std::out_of_range("diffusion step out of range");
}
void check_shapes(std::span<const double> a, std::span<const double> b,
                  const char* what) {
  if (a.size() != b.size()) throw std::invalid_argument(what);
}
}  // namespace

NoiseSchedule build_quadratic_schedule(int K, double beta_min, double beta_max) {
  if (K < 2) throw std::invalid_argument("schedule needs K >= 2");
  if (!(beta_min > 0.0 && beta_min < beta_max && beta_max < 1.0))
    throw std::invalid_argument("schedule needs 0 < beta_min < beta_max < 1");
  NoiseSchedule s;
  s.K = K;
  s.betas.assign(K + 1, 0.0);
  s.alphas.assign(K + 1, 0.0);
  s.alpha_bars.assign(K + 1, 0.0);
  s.alpha_bars[0] = 1.0;
  const double lo = std::sqrt(beta_min);
  const double hi = std::sqrt(beta_max);
  for (int k = 1; k <= K; ++k) {
    double r = lo + (static_cast<double>(k - 1) / (K - 1)) * (hi - lo);
    s.betas[k] = r * r;
    s.alphas[k] = 1.0 - s.betas[k];
    s.alpha_bars[k] = s.alpha_bars[k - 1] * s.alphas[k];
  }
  return s;
}

std::vector<double> forward_sample(const NoiseSchedule& s,
                                   std::span<const double> y0, int k,
                                   std::span<const double> eps) {
  check_step(s, k);
  check_shapes(y0, eps, "forward_sample: eps must be shaped like y0");
  const double a = std::sqrt(s.alpha_bar(k));
  const double b = std::sqrt(1.0 - s.alpha_bar(k));
  std::vector<double> out(y0.size());
  for (size_t i = 0; i < y0.size(); ++i) out[i] = a * y0[i] + b * eps[i];
  return out;
}

std::vector<double> posterior_mean(const NoiseSchedule& s,
                                   std::span<const double> y_k,
                                   std::span<const double> y0_hat, int k) {
  check_step(s, k);
  check_shapes(y_k, y0_hat, "posterior_mean: shape mismatch");
  const double ab = s.alpha_bar(k);
  const double ab_prev = s.alpha_bar(k - 1);
  const double c_yk = std::sqrt(ab) * (1.0 - ab_prev) / (std::sqrt(ab_prev) * (1.0 - ab));
  const double c_y0 = (ab_prev - ab) / (std::sqrt(ab_prev) * (1.0 - ab));
  std::vector<double> out(y_k.size());
  for (size_t i = 0; i < y_k.size(); ++i) out[i] = c_yk * y_k[i] + c_y0 * y0_hat[i];
  return out;
}

double posterior_variance(const NoiseSchedule& s, int k) {
  check_step(s, k);
  return (1.0 - s.alpha_bar(k - 1)) / (1.0 - s.alpha_bar(k)) * s.betas[k];
}

double fixed_beta_variance(const NoiseSchedule& s, int k) {
  check_step(s, k);
  return s.betas[k];
}

std::vector<double> ddim_step(const NoiseSchedule& s,
                              std::span<const double> y_k,
                              std::span<const double> y0_hat, int k, int k_prev,
                              double eta, std::span<const double> eps_draw) {
  check_step(s, k);
  if (k_prev < 0 || k_prev >= k)
    throw std::invalid_argument("ddim_step: need 0 <= k_prev < k");
  check_shapes(y_k, y0_hat, "ddim_step: shape mismatch");
  check_shapes(y_k, eps_draw, "ddim_step: shape mismatch");
  const double ab = s.alpha_bar(k);
  const double ab_prev = s.alpha_bar(k_prev);
  const double sigma =
      eta * std::sqrt((1.0 - ab_prev) / (1.0 - ab) * (1.0 - ab / ab_prev));
  const double c_eps_hat = std::sqrt(std::max(0.0, 1.0 - ab_prev - sigma * sigma));
  const double inv_noise = 1.0 / std::sqrt(1.0 - ab);
  const double sq_ab = std::sqrt(ab);
  const double sq_ab_prev = std::sqrt(ab_prev);
  std::vector<double> out(y_k.size());
  for (size_t i = 0; i < y_k.size(); ++i) {
    double eps_hat = (y_k[i] - sq_ab * y0_hat[i]) * inv_noise;
    out[i] = sq_ab_prev * y0_hat[i] + c_eps_hat * eps_hat + sigma * eps_draw[i];
  }
  return out;
}

std::vector<int> quadratic_subsequence(int K, int S) {
  if (S < 1 || S > K) throw std::invalid_argument("need 1 <= S <= K");
  if (S == 1) return {K};
  std::vector<int> out(S);
  for (int i = 0; i < S; ++i) {
    double r = static_cast<double>(i) / (S - 1);
    out[i] = static_cast<int>(std::lround(1.0 + (K - 1) * r * r));
  }
  // Rounding can collide at the dense end; restore strict monotonicity while
  // keeping the endpoints pinned at 1-or-later and exactly K.
  for (int i = 1; i < S; ++i) out[i] = std::max(out[i], out[i - 1] + 1);
  out[S - 1] = K;
  for (int i = S - 2; i >= 0; --i) out[i] = std::min(out[i], out[i + 1] - 1);
  return out;
}

void dump_schedule_csv(const NoiseSchedule& s, std::ostream& os) {
  os << "k,beta,alpha,alpha_bar,posterior_var\n";
  os.precision(17);
  for (int k = 1; k <= s.K; ++k) {
    os << k << ',' << s.betas[k] << ',' << s.alphas[k] << ',' << s.alpha_bars[k]
       << ',' << posterior_variance(s, k) << '\n';
  }
}

}  // namespace mcdtsf::schedule
