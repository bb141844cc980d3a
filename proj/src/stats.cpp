#include "kmplab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "kmplab/events.hpp"
#include "kmplab/exact.hpp"
#include "kmplab/opinion.hpp"
#include "kmplab/replicas.hpp"

namespace kmplab {

Estimate estimate_mean(std::span<const double> xs) {
  MomentAccumulator acc(1);
  for (double x : xs) acc.add({&x, 1});
  Estimate e;
  e.n = xs.size();
  if (e.n == 0) return e;
  e.mean = acc.mean(0);
  e.se = e.n > 1 ? acc.mean_se(0) : 0.0;
  return e;
}

MomentAccumulator::MomentAccumulator(std::size_t dim)
    : dim_(dim), mean_(dim, 0.0), comoment_(dim * dim, 0.0) {}

void MomentAccumulator::add(std::span<const double> x) {
  if (x.size() != dim_) throw std::invalid_argument("accumulator dimension mismatch");
  ++n_;
  const double inv = 1.0 / static_cast<double>(n_);
  std::vector<double> before(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    before[i] = x[i] - mean_[i];
    mean_[i] += before[i] * inv;
  }
  for (std::size_t i = 0; i < dim_; ++i) {
    const double after = x[i] - mean_[i];
    for (std::size_t j = 0; j < dim_; ++j) comoment_[i * dim_ + j] += after * before[j];
  }
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.dim_ != dim_) throw std::invalid_argument("accumulator dimension mismatch");
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double n = na + nb;
  std::vector<double> delta(dim_);
  for (std::size_t i = 0; i < dim_; ++i) delta[i] = other.mean_[i] - mean_[i];
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) {
      comoment_[i * dim_ + j] += other.comoment_[i * dim_ + j] + delta[i] * delta[j] * na * nb / n;
    }
  }
  for (std::size_t i = 0; i < dim_; ++i) mean_[i] += delta[i] * nb / n;
  n_ += other.n_;
}

double MomentAccumulator::covariance(std::size_t i, std::size_t j) const {
  if (n_ < 2) return 0.0;
  return comoment_[i * dim_ + j] / static_cast<double>(n_ - 1);
}

double MomentAccumulator::mean_se(std::size_t i) const {
  if (n_ < 2) return 0.0;
  return std::sqrt(variance(i) / static_cast<double>(n_));
}

Estimate covariance_estimate(const std::vector<std::vector<double>>& rows, std::size_t i, std::size_t j) {
  const std::size_t n = rows.size();
  if (n < 2) throw std::invalid_argument("covariance needs at least two rows");
  double mi = 0.0;
  double mj = 0.0;
  for (const auto& r : rows) {
    mi += r[i];
    mj += r[j];
  }
  mi /= static_cast<double>(n);
  mj /= static_cast<double>(n);
  double c = 0.0;
  double m22 = 0.0;
  for (const auto& r : rows) {
    const double p = (r[i] - mi) * (r[j] - mj);
    c += p;
    m22 += p * p;
  }
  Estimate e;
  e.n = n;
  e.mean = c / static_cast<double>(n - 1);
  const double cb = c / static_cast<double>(n);
  m22 /= static_cast<double>(n);
  e.se = std::sqrt(std::max(m22 - cb * cb, 0.0) / static_cast<double>(n));
  return e;
}

double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

KsResult ks_finish(double d, double n_eff) {
  KsResult r;
  r.d = d;
  r.n = static_cast<std::size_t>(std::llround(n_eff));
  const double sq = std::sqrt(n_eff);
  r.p_value = kolmogorov_q((sq + 0.12 + 0.11 / sq) * d);
  r.reject_05 = d > 1.358 / sq;
  r.reject_01 = d > 1.628 / sq;
  return r;
}

}  // namespace

KsResult ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  const std::size_t n = samples.size();
  if (n < 30) throw std::invalid_argument("KS test needs at least 30 samples, got " + std::to_string(n));
  std::sort(samples.begin(), samples.end());
  const double nn = static_cast<double>(n);
  double d = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double f = cdf(samples[k]);
    d = std::max({d, static_cast<double>(k + 1) / nn - f, f - static_cast<double>(k) / nn});
  }
  return ks_finish(d, nn);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.size() < 30 || b.size() < 30) throw std::invalid_argument("KS test needs at least 30 samples per side");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return ks_finish(d, na * nb / (na + nb));
}

namespace {

ChiSquareResult chi_finish(double stat, int df) {
  ChiSquareResult r;
  r.statistic = stat;
  r.df = df;
  r.p_value = df > 0 ? boost::math::gamma_q(df / 2.0, stat / 2.0) : 1.0;
  r.reject_01 = r.p_value < 0.01;
  return r;
}

// Groups of consecutive categories whose weight reaches `minimum`; a short
// tail joins the last group.
std::vector<std::pair<std::size_t, std::size_t>> pool(std::span<const double> weight, double minimum) {
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  std::size_t start = 0;
  double acc = 0.0;
  for (std::size_t k = 0; k < weight.size(); ++k) {
    acc += weight[k];
    if (acc >= minimum) {
      groups.emplace_back(start, k + 1);
      start = k + 1;
      acc = 0.0;
    }
  }
  if (start < weight.size()) {
    if (groups.empty()) {
      groups.emplace_back(start, weight.size());
    } else {
      groups.back().second = weight.size();
    }
  }
  return groups;
}

double group_sum(std::span<const double> v, std::pair<std::size_t, std::size_t> g) {
  double s = 0.0;
  for (std::size_t k = g.first; k < g.second; ++k) s += v[k];
  return s;
}

}  // namespace

ChiSquareResult chi_square_gof(std::span<const double> observed, std::span<const double> probs) {
  if (observed.size() != probs.size() || observed.empty()) {
    throw std::invalid_argument("chi-square: observed and probabilities differ in length");
  }
  double n = 0.0;
  for (double o : observed) n += o;
  std::vector<double> expected(probs.size());
  for (std::size_t k = 0; k < probs.size(); ++k) expected[k] = n * probs[k];
  const auto groups = pool(expected, 5.0);
  double stat = 0.0;
  for (const auto& g : groups) {
    const double e = group_sum(expected, g);
    const double o = group_sum(observed, g);
    if (e > 0.0) stat += (o - e) * (o - e) / e;
  }
  return chi_finish(stat, static_cast<int>(groups.size()) - 1);
}

ChiSquareResult chi_square_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("chi-square: histograms differ in length");
  double na = 0.0;
  double nb = 0.0;
  for (double x : a) na += x;
  for (double x : b) nb += x;
  if (!(na > 0.0) || !(nb > 0.0)) throw std::invalid_argument("chi-square: empty histogram");
  // pool on the smaller expected side
  std::vector<double> weight(a.size());
  const double frac = std::min(na, nb) / (na + nb);
  for (std::size_t k = 0; k < a.size(); ++k) weight[k] = (a[k] + b[k]) * frac;
  const auto groups = pool(weight, 5.0);
  const double ra = std::sqrt(nb / na);
  const double rb = std::sqrt(na / nb);
  double stat = 0.0;
  for (const auto& g : groups) {
    const double x = group_sum(a, g);
    const double y = group_sum(b, g);
    if (x + y > 0.0) stat += (ra * x - rb * y) * (ra * x - rb * y) / (x + y);
  }
  return chi_finish(stat, static_cast<int>(groups.size()) - 1);
}

std::vector<double> count_histogram(std::span<const std::int64_t> values, std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("histogram needs at least one bin");
  std::vector<double> h(bins, 0.0);
  for (std::int64_t v : values) {
    if (v < 0) throw std::invalid_argument("histogram of negative value");
    const auto k = std::min(static_cast<std::size_t>(v), bins - 1);
    h[k] += 1.0;
  }
  return h;
}

double pair_empirical(std::span<const double> o, std::span<const double> psi) {
  if (o.size() != psi.size() || o.size() < 3) throw std::invalid_argument("pair_empirical: size mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < o.size(); ++k) s += psi[k] * o[k];
  return s / static_cast<double>(o.size() - 1);
}

std::vector<double> psi_one(std::size_t n) { return std::vector<double>(n + 1, 1.0); }

std::vector<double> psi_identity(std::size_t n) {
  std::vector<double> p(n + 1);
  for (std::size_t k = 0; k <= n; ++k) p[k] = static_cast<double>(k) / static_cast<double>(n);
  return p;
}

std::vector<HydrostaticRow> hydrostatic_experiment(
    std::span<const std::size_t> ns, std::size_t replicas,
    const std::function<std::vector<double>(std::size_t)>& psi, double t_minus, double t_plus,
    std::uint64_t seed) {
  if (replicas < 2) throw std::invalid_argument("hydrostatic experiment needs at least two replicas");
  for (std::size_t k = 1; k < ns.size(); ++k) {
    if (ns[k] <= ns[k - 1]) throw std::invalid_argument("hydrostatic sizes must be increasing");
  }
  std::vector<HydrostaticRow> rows;
  for (std::size_t n : ns) {
    const Graph g = path_graph(n, t_minus, t_plus, TemperaturePolicy::nonnegative);
    const std::vector<double> p = psi(n);
    if (p.size() != n + 1) throw std::invalid_argument("psi table has the wrong length");
    auto values = map_replicas(replicas, [&](std::size_t r) {
      EventStream s(g, seed, substream(n, r));
      return pair_empirical(sample_stationary_opinion(g, s), p);
    });
    HydrostaticRow row;
    row.n = n;
    const Estimate e = estimate_mean(values);
    row.mean = e.mean;
    row.mean_se = e.se;
    MomentAccumulator acc(1);
    for (double v : values) acc.add({&v, 1});
    row.variance = acc.variance(0);
    double m4 = 0.0;
    for (double v : values) m4 += std::pow(v - e.mean, 4);
    m4 /= static_cast<double>(values.size());
    row.variance_se = std::sqrt(std::max(0.0, m4 - row.variance * row.variance) / static_cast<double>(values.size()));

    const std::vector<double> m = mean_profile(n, t_minus, t_plus);
    const double nn = static_cast<double>(n);
    for (std::size_t k = 0; k <= n; ++k) row.expected += p[k] * m[k];
    row.expected /= nn;

    const Eigen::MatrixXd ct = tilde_correlations(n, t_minus, t_plus);
    const Eigen::MatrixXd c = solve_second_moments(n, t_minus, t_plus).covariance();
    for (std::size_t k = 0; k <= n; ++k) {
      for (std::size_t l = 0; l <= n; ++l) {
        const auto a = static_cast<Eigen::Index>(k);
        const auto b = static_cast<Eigen::Index>(l);
        if (k >= 1 && l >= 1) row.bound += p[k] * p[l] * ct(a, b);
        row.exact_variance += p[k] * p[l] * c(a, b);
      }
    }
    row.bound /= nn * nn;
    row.exact_variance /= nn * nn;
    rows.push_back(row);
  }
  return rows;
}

IndependenceReport independence_report(const std::vector<std::vector<double>>& x,
                                       const std::vector<std::vector<double>>& t,
                                       std::span<const VertexId> vertices) {
  if (x.size() != t.size() || x.size() < 2) throw std::invalid_argument("independence: replica count mismatch");
  IndependenceReport rep;
  rep.replicas = x.size();
  rep.band = 3.0 / std::sqrt(static_cast<double>(x.size()));
  for (VertexId v : vertices) {
    MomentAccumulator acc(2);
    for (std::size_t r = 0; r < x.size(); ++r) {
      const double pair[2] = {std::exp(-x[r].at(v)), t[r].at(v)};
      acc.add(pair);
    }
    const double denom = std::sqrt(acc.variance(0) * acc.variance(1));
    const double corr = denom > 0.0 ? acc.covariance(0, 1) / denom : 0.0;
    rep.vertices.push_back(v);
    rep.correlations.push_back(corr);
    if (std::abs(corr) > rep.band) rep.consistent = false;
  }
  return rep;
}

}  // namespace kmplab
