#include "kmplab/exact.hpp"

#include <stdexcept>
#include <string>

#include <Eigen/SparseLU>

namespace kmplab {

namespace {

void require_size(std::size_t n) {
  if (n < 2) throw std::invalid_argument("moment systems need N >= 2");
}

}  // namespace

Eigen::MatrixXd MomentTable::covariance() const {
  Eigen::MatrixXd c = second;
  for (Eigen::Index k = 0; k < c.rows(); ++k) {
    for (Eigen::Index l = 0; l < c.cols(); ++l) c(k, l) -= first[k] * first[l];
  }
  return c;
}

std::vector<double> mean_profile(std::size_t n, double t_minus, double t_plus) {
  require_size(n);
  std::vector<double> m(n + 1);
  const double nn = static_cast<double>(n);
  for (std::size_t k = 0; k <= n; ++k) m[k] = t_minus + static_cast<double>(k) * (t_plus - t_minus) / nn;
  m[n] = t_plus;
  return m;
}

std::vector<double> mean_profile_solve(std::size_t n, double t_minus, double t_plus) {
  require_size(n);
  // 2 m_k - m_{k-1} - m_{k+1} = 0 for interior k
  const std::size_t len = n - 1;
  Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(len), static_cast<Eigen::Index>(len));
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(len));
  for (std::size_t r = 0; r < len; ++r) {
    const auto row = static_cast<Eigen::Index>(r);
    trip.emplace_back(row, row, 2.0);
    if (r > 0) trip.emplace_back(row, row - 1, -1.0);
    if (r + 1 < len) trip.emplace_back(row, row + 1, -1.0);
  }
  b(0) += t_minus;
  b(static_cast<Eigen::Index>(len) - 1) += t_plus;
  a.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw std::runtime_error("mean profile factorization failed");
  Eigen::VectorXd x = lu.solve(b);
  std::vector<double> m(n + 1);
  m[0] = t_minus;
  m[n] = t_plus;
  for (std::size_t k = 1; k < n; ++k) m[k] = x(static_cast<Eigen::Index>(k - 1));
  return m;
}

SecondMomentSystem assemble_second_moment_system(std::size_t n, double t_minus, double t_plus,
                                                 std::optional<Corners> corners) {
  require_size(n);
  SecondMomentSystem sys;
  sys.n = n;
  const auto size = static_cast<Eigen::Index>(sys.unknowns());
  sys.a.resize(size, size);
  sys.b = Eigen::VectorXd::Zero(size);
  const std::vector<double> m = mean_profile(n, t_minus, t_plus);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(size) * 5);

  auto id = [](std::size_t k, std::size_t l) {
    return static_cast<Eigen::Index>(SecondMomentSystem::index(k, l));
  };
  for (std::size_t l = 0; l <= n; ++l) {
    for (std::size_t k = 0; k <= l; ++k) {
      const Eigen::Index row = id(k, l);
      trip.emplace_back(row, row, 1.0);
      if (k == 0) {
        sys.b(row) = t_minus * m[l];
      } else if (l == n) {
        sys.b(row) = m[k] * t_plus;
      } else if (k == l) {
        trip.emplace_back(row, id(k - 1, k - 1), -0.25);
        trip.emplace_back(row, id(k - 1, k), -0.25);
        trip.emplace_back(row, id(k + 1, k + 1), -0.25);
        trip.emplace_back(row, id(k, k + 1), -0.25);
      } else if (k + 1 == l) {
        trip.emplace_back(row, id(l - 2, l), -0.3);
        trip.emplace_back(row, id(l - 1, l + 1), -0.3);
        trip.emplace_back(row, id(l - 1, l - 1), -0.2);
        trip.emplace_back(row, id(l, l), -0.2);
      } else {
        trip.emplace_back(row, id(k - 1, l), -0.25);
        trip.emplace_back(row, id(k + 1, l), -0.25);
        trip.emplace_back(row, id(k, l - 1), -0.25);
        trip.emplace_back(row, id(k, l + 1), -0.25);
      }
    }
  }
  if (corners) {
    sys.b(id(0, 0)) = corners->low;
    sys.b(id(n, n)) = corners->high;
  }
  sys.a.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

namespace {

MomentTable solve_system(const SecondMomentSystem& sys, double t_minus, double t_plus) {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(sys.a);
  lu.factorize(sys.a);
  if (lu.info() != Eigen::Success) {
    throw std::runtime_error("second moment system is singular: " + lu.lastErrorMessage());
  }
  const Eigen::VectorXd x = lu.solve(sys.b);
  MomentTable t;
  t.n = sys.n;
  t.first = mean_profile(sys.n, t_minus, t_plus);
  const auto dim = static_cast<Eigen::Index>(sys.n + 1);
  t.second.resize(dim, dim);
  for (std::size_t l = 0; l <= sys.n; ++l) {
    for (std::size_t k = 0; k <= l; ++k) {
      const double v = x(static_cast<Eigen::Index>(SecondMomentSystem::index(k, l)));
      t.second(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = v;
      t.second(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) = v;
    }
  }
  t.provenance = Provenance::exact_solve;
  return t;
}

}  // namespace

MomentTable solve_second_moments(std::size_t n, double t_minus, double t_plus) {
  return solve_system(assemble_second_moment_system(n, t_minus, t_plus), t_minus, t_plus);
}

MomentTable solve_second_moments(std::size_t n, double t_minus, double t_plus, Corners corners) {
  return solve_system(assemble_second_moment_system(n, t_minus, t_plus, corners), t_minus, t_plus);
}

double second_moment_residual(const SecondMomentSystem& sys, const MomentTable& table) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(sys.unknowns()));
  for (std::size_t l = 0; l <= sys.n; ++l) {
    for (std::size_t k = 0; k <= l; ++k) {
      x(static_cast<Eigen::Index>(SecondMomentSystem::index(k, l))) =
          table.second(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
    }
  }
  return (sys.a * x - sys.b).cwiseAbs().maxCoeff();
}

MomentTable tilde_moments(std::size_t n, double t_minus, double t_plus) {
  require_size(n);
  const double nn = static_cast<double>(n);
  const double d = t_plus - t_minus;
  const double ca = d * (t_plus + nn * t_minus) / (nn * (nn + 1.0));
  const double cb = t_minus * d / nn;
  const double cc = d * d / (nn * (nn + 1.0));
  const double cd = t_minus * t_minus;
  const double ce = d * d / (2.0 * nn * (nn + 1.0)) + t_minus * t_minus;

  MomentTable t;
  t.n = n;
  t.first = mean_profile(n, t_minus, t_plus);
  const auto dim = static_cast<Eigen::Index>(n + 1);
  t.second.resize(dim, dim);
  for (Eigen::Index l = 0; l < dim; ++l) {
    for (Eigen::Index k = 0; k <= l; ++k) {
      const double kk = static_cast<double>(k);
      const double ll = static_cast<double>(l);
      const double v = k < l ? ca * kk + cb * ll + cc * kk * ll + cd : cc * kk * kk + (ca + cb) * kk + ce;
      t.second(k, l) = v;
      t.second(l, k) = v;
    }
  }
  t.provenance = Provenance::analytic;
  return t;
}

Eigen::MatrixXd tilde_correlations(std::size_t n, double t_minus, double t_plus) {
  require_size(n);
  const double nn = static_cast<double>(n);
  const double d2 = (t_plus - t_minus) * (t_plus - t_minus);
  const auto dim = static_cast<Eigen::Index>(n + 1);
  Eigen::MatrixXd c(dim, dim);
  for (Eigen::Index l = 0; l < dim; ++l) {
    for (Eigen::Index k = 0; k <= l; ++k) {
      const double x = static_cast<double>(k) / nn;
      const double y = static_cast<double>(l) / nn;
      double v = d2 / (nn + 1.0) * x * (1.0 - y);
      if (k == l) v += d2 / (2.0 * nn * (nn + 1.0));
      c(k, l) = v;
      c(l, k) = v;
    }
  }
  return c;
}

CornerValues modified_corner_values(std::size_t n, double t_minus, double t_plus) {
  require_size(n);
  const double nn = static_cast<double>(n);
  const double sigma2 = (t_plus - t_minus) * (t_plus - t_minus) / (2.0 * nn * (nn + 1.0));
  return {sigma2 + t_minus * t_minus, sigma2 + t_plus * t_plus, t_minus * t_plus};
}

}  // namespace kmplab
