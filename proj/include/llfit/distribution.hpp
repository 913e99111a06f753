#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace llfit {

/**
 * Log-logistic distribution with scale alpha and shape beta, conditioned on
 * X > x_L.  x_L = 0 is the untruncated family.
 *
 * Besides (alpha, beta, x_L) the class caches the working quantities used by
 * the likelihood code:
 *   lambda = alpha^beta          (held as ln lambda = beta ln alpha)
 *   eta    = (x_L / alpha)^beta  (the truncated mass is eta / (1 + eta))
 *
 * All densities and probabilities are evaluated through
 * z = beta (ln x - ln alpha) so that x^beta is never formed.
 */
class TruncatedLogLogistic
{
public:
  /// @throws InvalidParameter unless alpha > 0, beta > 0, x_l >= 0 (all finite).
  TruncatedLogLogistic(double alpha, double beta, double x_l = 0.0);

  /// Build from the (ln lambda, beta) parametrization.
  static TruncatedLogLogistic from_log_lambda(double log_lambda, double beta, double x_l);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double x_l() const noexcept { return x_l_; }
  bool truncated() const noexcept { return x_l_ > 0.0; }

  double log_alpha() const noexcept { return log_alpha_; }
  double log_lambda() const noexcept { return beta_ * log_alpha_; }
  double lambda() const noexcept;
  double eta() const noexcept;

  /// beta (ln x - ln alpha)
  double z(double x) const noexcept;
  /// z(x_L); -inf when untruncated.
  double z_l() const noexcept { return z_l_; }

  /// Truncated mass F(x_L) of the parent distribution, eta / (1 + eta).
  double truncation_fraction() const noexcept;

  friend bool operator==(const TruncatedLogLogistic&, const TruncatedLogLogistic&) = default;

private:
  double alpha_;
  double beta_;
  double x_l_;
  double log_alpha_;
  double z_l_;
};

double pdf(const TruncatedLogLogistic& d, double x);
double log_pdf(const TruncatedLogLogistic& d, double x);
double cdf(const TruncatedLogLogistic& d, double x);
/// 1 - cdf, computed without cancellation in the upper tail.
double survival(const TruncatedLogLogistic& d, double x);
double quantile(const TruncatedLogLogistic& d, double u);

/// n inverse-transform draws from the stream seeded by `seed` (see rng.hpp).
std::vector<double> sample(const TruncatedLogLogistic& d, std::size_t n, std::uint64_t seed);

/// Distribution of kX when X ~ d: (k alpha, beta, k x_L).
TruncatedLogLogistic rescale(const TruncatedLogLogistic& d, double k);

/// Pareto density beta0 / x_L (x / x_L)^-(1 + beta0) on (x_L, inf): the limit of
/// the truncated family as alpha -> 0 with beta fixed.
class ParetoTail
{
public:
  ParetoTail(double beta0, double x_l);

  double beta0() const noexcept { return beta0_; }
  double x_l() const noexcept { return x_l_; }

private:
  double beta0_;
  double x_l_;
};

double pareto_pdf(const ParetoTail& p, double x);
double pareto_log_pdf(const ParetoTail& p, double x);
double pareto_cdf(const ParetoTail& p, double x);

}  // namespace llfit
