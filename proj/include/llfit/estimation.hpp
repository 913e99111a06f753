#pragma once

#include "llfit/distribution.hpp"

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace llfit {

/// Observations strictly above a known truncation point, sorted ascending.
class Sample
{
public:
  /// @throws InvalidParameter if empty, if any value is not finite or not > x_l, or x_l < 0.
  Sample(std::vector<double> values, double x_l);

  std::span<const double> values() const noexcept { return values_; }
  double x_l() const noexcept { return x_l_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool truncated() const noexcept { return x_l_ > 0.0; }

private:
  std::vector<double> values_;
  double x_l_;
};

/**
 * A sample mapped to unit truncation point, with the statistics that decide
 * whether an interior maximum exists.
 *
 * Truncated samples are divided by x_L, so logs s_i = ln(X_i / x_L) > 0,
 * beta0 = N / sum(s_i) and beta_c solves mean(exp(-beta s_i)) = 1/2.
 *
 * Untruncated samples (x_L = 0) are divided by their geometric mean for
 * conditioning; sum(s_i) is then zero up to rounding and beta0 and beta_c
 * are reported as 0.
 */
class NormalizedSample
{
public:
  /// @throws InvalidParameter when the sample has fewer than two observations.
  explicit NormalizedSample(const Sample& s);

  std::span<const double> logs() const noexcept { return logs_; }
  std::size_t size() const noexcept { return logs_.size(); }
  double sum_logs() const noexcept { return sum_logs_; }
  double beta0() const noexcept { return beta0_; }
  double beta_c() const noexcept { return beta_c_; }
  bool all_equal() const noexcept { return all_equal_; }
  bool truncated() const noexcept { return truncated_; }
  /// Divisor applied to the original data: x_L, or the geometric mean if untruncated.
  double scale() const noexcept { return scale_; }
  double x_l() const noexcept { return x_l_; }

private:
  std::vector<double> logs_;
  double sum_logs_ = 0.0;
  double beta0_ = 0.0;
  double beta_c_ = 0.0;
  bool all_equal_ = false;
  bool truncated_ = false;
  double scale_ = 1.0;
  double x_l_ = 0.0;
};

NormalizedSample normalize(const Sample& s);

/// q(beta) = mean(exp(-beta s_i)), strictly decreasing from 1 to 0 for a truncated sample.
double tail_mean(const NormalizedSample& ns, double beta);

/// Root of tail_mean(beta) = 1/2 (relative tolerance 1e-12).
/// @throws DomainError for an untruncated sample.
double beta_c(const NormalizedSample& ns);

/// ln Lambda(beta): log of the positive root of the lambda score equation, or -inf
/// where only the boundary root lambda = 0 exists (beta <= beta_c).
double log_lambda_profile(const NormalizedSample& ns, double beta);

/// Lambda(beta) in normalized units.
double lambda_profile(const NormalizedSample& ns, double beta);

/// phi(lambda, beta): the normalized log-likelihood plus sum(s_i).
double objective(const NormalizedSample& ns, double lambda, double beta);

/// d phi / d lambda in closed form.
double objective_dlambda(const NormalizedSample& ns, double lambda, double beta);

/// phi(Lambda(beta), beta); equals N ln beta - beta S on (0, beta_c].
double profile_likelihood(const NormalizedSample& ns, double beta);

/// N/beta + S - 2 sum s_i X_i^beta / (Lambda(beta) + X_i^beta), the derivative of
/// the profile likelihood. @throws DomainError for beta <= beta_c.
double master_residual(const NormalizedSample& ns, double beta);

struct RegularFit
{
  double alpha_hat;
  double beta_hat;
  double lambda_hat;      ///< alpha_hat^beta_hat; may be inf when that overflows
  double log_lambda_hat;  ///< always finite
  double loglik;

  TruncatedLogLogistic distribution(double x_l) const { return {alpha_hat, beta_hat, x_l}; }
};

/// Likelihood maximized on the lambda = 0 boundary: Pareto density with shape beta0.
struct ParetoBoundary
{
  double beta0;
  double loglik;
};

/// All observations equal: the profile likelihood increases without bound.
struct NoFiniteMaximum
{
  double x1;
};

struct FitDiagnostics
{
  double beta0 = 0.0;
  double beta_c = 0.0;
  std::size_t n = 0;
  double x_l = 0.0;
  double eta_hat = 0.0;
  /// Bracket used for the master-equation solve (normalized units); zero if not solved.
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  /// Sign changes of the master residual over the scan grid; -1 when no scan ran.
  int sign_changes = -1;
};

struct FitOutcome
{
  std::variant<RegularFit, ParetoBoundary, NoFiniteMaximum> result;
  FitDiagnostics diagnostics;

  bool is_regular() const noexcept { return std::holds_alternative<RegularFit>(result); }
  bool is_pareto() const noexcept { return std::holds_alternative<ParetoBoundary>(result); }
  bool is_degenerate() const noexcept { return std::holds_alternative<NoFiniteMaximum>(result); }
  const RegularFit& regular() const { return std::get<RegularFit>(result); }
  const ParetoBoundary& pareto() const { return std::get<ParetoBoundary>(result); }
};

struct FitOptions
{
  /// Evaluate the master residual on a 512-point grid over the bracket and count sign changes.
  bool scan = false;
  int scan_points = 512;
};

/**
 * Maximum likelihood fit by the one-dimensional profile reduction.
 *
 *   all observations equal     -> NoFiniteMaximum
 *   truncated, beta0 <= beta_c -> ParetoBoundary (lambda = 0, beta = beta0)
 *   otherwise                  -> RegularFit: master residual solved on
 *                                 (beta_c, inf), lambda = Lambda(beta)
 *
 * Results are reported in the units of the input sample.
 *
 * @throws InvalidParameter for fewer than two observations.
 * @throws ConvergenceError if no sign change of the master residual is found
 *         within 200 doublings of the upper bracket.
 */
FitOutcome fit(const Sample& s, const FitOptions& options = {});

}  // namespace llfit
