#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kmplab/graph.hpp"

namespace kmplab {

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

/// Sample mean and its standard error sqrt(s^2 / n).
Estimate estimate_mean(std::span<const double> xs);

/// Streaming means and covariances of a fixed-dimension vector (Welford,
/// merged with Chan's pairwise update).
class MomentAccumulator {
 public:
  explicit MomentAccumulator(std::size_t dim = 0);

  void add(std::span<const double> x);
  void merge(const MomentAccumulator& other);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t count() const noexcept { return n_; }
  double mean(std::size_t i) const { return mean_[i]; }
  /// Unbiased sample covariance.
  double covariance(std::size_t i, std::size_t j) const;
  double variance(std::size_t i) const { return covariance(i, i); }
  double mean_se(std::size_t i) const;

 private:
  std::size_t dim_;
  std::size_t n_ = 0;
  std::vector<double> mean_;
  std::vector<double> comoment_;  // dim x dim, sum of centered products
};

/// Sample covariance of columns i and j of `rows` with a delta-method
/// standard error sqrt((m22 - c^2) / n).
Estimate covariance_estimate(const std::vector<std::vector<double>>& rows, std::size_t i, std::size_t j);

struct KsResult {
  double d = 0.0;
  std::size_t n = 0;  // effective sample size
  double p_value = 1.0;
  bool reject_05 = false;
  bool reject_01 = false;
};

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

/// One-sample KS statistic with asymptotic critical values 1.358/sqrt(n)
/// (0.05) and 1.628/sqrt(n) (0.01). Needs at least 30 samples.
KsResult ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Two-sample KS with effective size n1 n2 / (n1 + n2).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct ChiSquareResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  bool reject_01 = false;
};

/// Goodness of fit of integer-category counts to probabilities. Adjacent
/// categories are pooled until every expected count is at least 5.
ChiSquareResult chi_square_gof(std::span<const double> observed, std::span<const double> probs);

/// Homogeneity of two count histograms over the same categories, pooled the
/// same way.
ChiSquareResult chi_square_two_sample(std::span<const double> a, std::span<const double> b);

/// Histogram of nonnegative integers; the last bin collects values >= bins-1.
std::vector<double> count_histogram(std::span<const std::int64_t> values, std::size_t bins);

/// (1/N) sum_{k=0..N} psi_k o_k for a configuration on path_graph(N).
double pair_empirical(std::span<const double> o, std::span<const double> psi);

/// psi tables at lattice points k/N.
std::vector<double> psi_one(std::size_t n);
std::vector<double> psi_identity(std::size_t n);

struct HydrostaticRow {
  std::size_t n = 0;
  double mean = 0.0;
  double mean_se = 0.0;
  double expected = 0.0;        // (1/N) sum psi_k m_k
  double variance = 0.0;        // sample variance of the pair empirical
  double variance_se = 0.0;     // from the fourth central moment
  double bound = 0.0;           // (1/N^2) sum_{k,l=1..N} psi_k psi_l C~_kl
  double exact_variance = 0.0;  // same sum with the solved covariance
};

/// Stationary pair-empirical statistics on path_graph(N) for every N in ns,
/// each from `replicas` coupling-from-the-past samples.
std::vector<HydrostaticRow> hydrostatic_experiment(
    std::span<const std::size_t> ns, std::size_t replicas,
    const std::function<std::vector<double>(std::size_t)>& psi, double t_minus, double t_plus,
    std::uint64_t seed);

struct IndependenceReport {
  std::vector<VertexId> vertices;
  std::vector<double> correlations;  // corr(exp(-X_i), T_i)
  double band = 0.0;                 // 3 / sqrt(R)
  std::size_t replicas = 0;
  bool consistent = true;
};

/// Sample correlations between exp(-X_i) and T_i across replicas; consistent
/// with independence iff every correlation lies inside the 3 sigma band.
IndependenceReport independence_report(const std::vector<std::vector<double>>& x,
                                       const std::vector<std::vector<double>>& t,
                                       std::span<const VertexId> vertices);

}  // namespace kmplab
