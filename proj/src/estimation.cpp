#include "llfit/estimation.hpp"

#include "llfit/detail/logmath.hpp"
#include "llfit/errors.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

namespace llfit {

using detail::log_add_exp;
using detail::logistic;
using detail::softplus;

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();
constexpr int max_doublings = 200;
constexpr std::uintmax_t max_solver_iterations = 200;

// Terminates a bracketing solve once the bracket is 1e-12 relative (1e-13
// absolute near zero, which only matters for ln lambda).
struct ArgumentTolerance
{
  double relative;
  bool operator()(double a, double b) const
  {
    return std::abs(b - a) <= relative * std::max(1.0, std::max(std::abs(a), std::abs(b)));
  }
};

template <class F>
double solve_bracketed(F f, double lo, double hi, double f_lo, double f_hi, double relative)
{
  if (f_lo == 0.0)
    return lo;
  if (f_hi == 0.0)
    return hi;
  std::uintmax_t iterations = max_solver_iterations;
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, ArgumentTolerance{relative},
                                                        iterations);
  if (iterations >= max_solver_iterations)
    throw ConvergenceError("bracketing root solve did not converge");
  return 0.5 * (a + b);
}

void require_positive(double v, const char* what)
{
  if (!(v > 0.0) || !std::isfinite(v))
    throw DomainError(std::string(what) + " must be positive and finite");
}

// Offset in phi and in the lambda score from the truncation term:
// ln(1 + lambda) when truncated at 1, ln(lambda) when untruncated.
double truncation_term(const NormalizedSample& ns, double log_lambda)
{
  return ns.truncated() ? softplus(log_lambda) : log_lambda;
}

// Lambda score scaled to be strictly decreasing in u = ln lambda:
//   1 - (2/N) sum (c + lambda) / (lambda + X_i^beta),  c = 1 truncated, 0 untruncated.
// Its positive root is Lambda(beta); at u -> -inf it tends to 1 - 2 q(beta).
double lambda_score(const NormalizedSample& ns, double beta, double u)
{
  const double head = truncation_term(ns, u);
  double acc = 0.0;
  for (double s : ns.logs())
    acc += std::exp(head - log_add_exp(u, beta * s));
  return 1.0 - 2.0 * acc / static_cast<double>(ns.size());
}

}  // namespace

Sample::Sample(std::vector<double> values, double x_l) : values_(std::move(values)), x_l_(x_l)
{
  if (!std::isfinite(x_l) || x_l < 0.0)
    throw InvalidParameter("truncation point must be non-negative and finite");
  if (values_.empty())
    throw InvalidParameter("sample is empty");
  for (double v : values_) {
    if (!std::isfinite(v) || !(v > x_l))
      throw InvalidParameter("observation " + std::to_string(v) + " does not exceed the truncation point " +
                             std::to_string(x_l));
  }
  std::sort(values_.begin(), values_.end());
}

NormalizedSample::NormalizedSample(const Sample& s) : truncated_(s.truncated()), x_l_(s.x_l())
{
  const auto values = s.values();
  if (values.size() < 2)
    throw InvalidParameter("fitting requires at least two observations");

  all_equal_ = values.front() == values.back();
  logs_.reserve(values.size());
  if (truncated_) {
    scale_ = x_l_;
    for (double v : values)
      logs_.push_back(std::log1p((v - x_l_) / x_l_));
  } else {
    double mean_log = 0.0;
    for (double v : values)
      mean_log += std::log(v);
    mean_log /= static_cast<double>(values.size());
    scale_ = std::exp(mean_log);
    for (double v : values)
      logs_.push_back(std::log(v) - mean_log);
  }
  sum_logs_ = std::accumulate(logs_.begin(), logs_.end(), 0.0);
  if (truncated_) {
    beta0_ = static_cast<double>(logs_.size()) / sum_logs_;
    beta_c_ = llfit::beta_c(*this);
  }
}

NormalizedSample normalize(const Sample& s) { return NormalizedSample(s); }

double tail_mean(const NormalizedSample& ns, double beta)
{
  double acc = 0.0;
  for (double s : ns.logs())
    acc += std::exp(-beta * s);
  return acc / static_cast<double>(ns.size());
}

double beta_c(const NormalizedSample& ns)
{
  if (!ns.truncated())
    throw DomainError("beta_c is defined for truncated samples only");
  const auto [min_it, max_it] = std::minmax_element(ns.logs().begin(), ns.logs().end());
  constexpr double ln2 = 0.69314718055994530942;
  // Every term exp(-beta s_i) is >= 1/2 at ln2/max(s) and <= 1/2 at ln2/min(s).
  const double lo = ln2 / *max_it;
  const double hi = ln2 / *min_it;
  if (lo == hi)
    return lo;
  auto f = [&](double beta) { return tail_mean(ns, beta) - 0.5; };
  return solve_bracketed(f, lo, hi, f(lo), f(hi), 1e-13);
}

double log_lambda_profile(const NormalizedSample& ns, double beta)
{
  require_positive(beta, "shape");
  if (ns.truncated() && beta <= ns.beta_c())
    return neg_inf;

  auto f = [&](double u) { return lambda_score(ns, beta, u); };

  double mean_t = beta * ns.sum_logs() / static_cast<double>(ns.size());
  double lo = mean_t - 1.0;
  double hi = mean_t + 1.0;
  double f_lo = f(lo);
  double f_hi = f(hi);
  for (double step = 1.0; f_lo <= 0.0; step *= 2.0) {
    hi = lo;
    f_hi = f_lo;
    lo -= step;
    if (lo < -2000.0)
      return neg_inf;  // score is non-positive down to lambda ~ e^-2000: numerically on the boundary
    f_lo = f(lo);
  }
  for (double step = 1.0; f_hi >= 0.0; step *= 2.0) {
    lo = hi;
    f_lo = f_hi;
    hi += step;
    if (hi > 1e6)
      throw ConvergenceError("no upper bracket for Lambda(beta)");
    f_hi = f(hi);
  }
  return solve_bracketed(f, lo, hi, f_lo, f_hi, 1e-13);
}

double lambda_profile(const NormalizedSample& ns, double beta) { return std::exp(log_lambda_profile(ns, beta)); }

double objective(const NormalizedSample& ns, double lambda, double beta)
{
  require_positive(lambda, "lambda");
  require_positive(beta, "shape");
  const double u = std::log(lambda);
  const double n = static_cast<double>(ns.size());
  // N ln(1+lambda) + N ln beta + beta S - 2 sum ln(lambda + X_i^beta), which is
  // the usual form with the ln lambda terms collected.
  double acc = 0.0;
  for (double s : ns.logs())
    acc += log_add_exp(u, beta * s);
  return n * truncation_term(ns, u) + n * std::log(beta) + beta * ns.sum_logs() - 2.0 * acc;
}

double objective_dlambda(const NormalizedSample& ns, double lambda, double beta)
{
  require_positive(lambda, "lambda");
  require_positive(beta, "shape");
  const double u = std::log(lambda);
  const double n = static_cast<double>(ns.size());
  // (N/lambda) { (2/N) sum 1/(1 + lambda/X_i^beta) - 1 - 1/(1+lambda) }
  double acc = 0.0;
  for (double s : ns.logs())
    acc += logistic(beta * s - u);
  const double boundary = ns.truncated() ? 1.0 / (1.0 + lambda) : 0.0;
  return n / lambda * (2.0 * acc / n - 1.0 - boundary);
}

double profile_likelihood(const NormalizedSample& ns, double beta)
{
  require_positive(beta, "shape");
  const double u = log_lambda_profile(ns, beta);
  if (u == neg_inf)
    return static_cast<double>(ns.size()) * std::log(beta) - beta * ns.sum_logs();
  return objective(ns, std::exp(u), beta);
}

double master_residual(const NormalizedSample& ns, double beta)
{
  require_positive(beta, "shape");
  if (ns.truncated() && beta <= ns.beta_c())
    throw DomainError("master residual is defined for shape above beta_c only");
  const double u = log_lambda_profile(ns, beta);
  double acc = 0.0;
  for (double s : ns.logs())
    acc += s * logistic(beta * s - u);
  return static_cast<double>(ns.size()) / beta + ns.sum_logs() - 2.0 * acc;
}

FitOutcome fit(const Sample& s, const FitOptions& options)
{
  const NormalizedSample ns(s);
  FitOutcome out{NoFiniteMaximum{s.values().front()}, {}};
  auto& diag = out.diagnostics;
  diag.beta0 = ns.beta0();
  diag.beta_c = ns.beta_c();
  diag.n = ns.size();
  diag.x_l = s.x_l();

  if (ns.all_equal())
    return out;

  if (ns.truncated() && ns.beta0() <= ns.beta_c()) {
    const ParetoTail tail(ns.beta0(), s.x_l());
    double loglik = 0.0;
    for (double x : s.values())
      loglik += pareto_log_pdf(tail, x);
    out.result = ParetoBoundary{ns.beta0(), loglik};
    return out;
  }

  auto residual = [&](double beta) { return master_residual(ns, beta); };

  double lo = 0.0;
  double f_lo = 0.0;
  if (ns.truncated()) {
    // The residual tends to N (1/beta_c - 1/beta0) > 0 as beta -> beta_c+.
    const double beta_c = ns.beta_c();
    double gap = beta_c * 1e-6;
    lo = beta_c + gap;
    f_lo = residual(lo);
    for (int i = 0; f_lo <= 0.0 && i < 60; ++i) {
      gap *= 0.5;
      lo = beta_c + gap;
      f_lo = residual(lo);
    }
    if (f_lo <= 0.0)
      throw ConvergenceError("master residual is not positive just above beta_c");
  } else {
    // N/beta dominates as beta -> 0+.
    lo = 1.0;
    f_lo = residual(lo);
    for (int i = 0; f_lo <= 0.0; ++i) {
      if (i == max_doublings)
        throw ConvergenceError("no lower bracket for the master equation");
      lo *= 0.5;
      f_lo = residual(lo);
    }
  }

  double hi = 2.0 * lo;
  double f_hi = residual(hi);
  for (int i = 0; f_hi >= 0.0; ++i) {
    if (i == max_doublings)
      throw ConvergenceError("master residual keeps its sign over 200 doublings of the bracket");
    lo = hi;
    f_lo = f_hi;
    hi *= 2.0;
    f_hi = residual(hi);
  }
  diag.bracket_lo = lo;
  diag.bracket_hi = hi;

  if (options.scan) {
    const int points = std::max(options.scan_points, 2);
    int changes = 0;
    double previous = f_lo;
    for (int k = 1; k < points; ++k) {
      const double beta = lo + (hi - lo) * k / (points - 1);
      const double r = k == points - 1 ? f_hi : residual(beta);
      if ((r < 0.0) != (previous < 0.0))
        ++changes;
      previous = r;
    }
    diag.sign_changes = changes;
  }

  const double beta_hat = solve_bracketed(residual, lo, hi, f_lo, f_hi, 1e-13);
  const double u = log_lambda_profile(ns, beta_hat);
  if (u == neg_inf)
    throw ConvergenceError("master equation root landed on the lambda = 0 boundary");

  const double log_alpha = std::log(ns.scale()) + u / beta_hat;
  RegularFit regular{};
  regular.beta_hat = beta_hat;
  regular.alpha_hat = std::exp(log_alpha);
  regular.log_lambda_hat = beta_hat * log_alpha;
  regular.lambda_hat = std::exp(regular.log_lambda_hat);
  const TruncatedLogLogistic fitted(regular.alpha_hat, beta_hat, s.x_l());
  regular.loglik = 0.0;
  for (double x : s.values())
    regular.loglik += log_pdf(fitted, x);

  diag.eta_hat = ns.truncated() ? std::exp(-u) : 0.0;
  out.result = regular;
  return out;
}

}  // namespace llfit
