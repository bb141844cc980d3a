#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace kmplab {

enum class Provenance { exact_solve, analytic, monte_carlo };

/// First and second stationary moments of the opinion process on path_graph(N).
/// `second` is the full symmetric (N+1)x(N+1) matrix; `second_se` is filled
/// only for Monte Carlo tables.
struct MomentTable {
  std::size_t n = 0;
  std::vector<double> first;
  Eigen::MatrixXd second;
  Eigen::MatrixXd second_se;
  Provenance provenance = Provenance::exact_solve;

  /// C_kl = M_kl - m_k m_l.
  Eigen::MatrixXd covariance() const;
};

/// m_k = T- + k (T+ - T-)/N, k = 0..N.
std::vector<double> mean_profile(std::size_t n, double t_minus, double t_plus);

/// Same profile from a tridiagonal solve of the discrete harmonic problem.
std::vector<double> mean_profile_solve(std::size_t n, double t_minus, double t_plus);

/// Linear system for the second moments over the triangle 0 <= k <= l <= N.
/// Boundary lines are identity rows. Optional corner overrides replace the
/// values at (0,0) and (N,N).
struct SecondMomentSystem {
  std::size_t n = 0;
  Eigen::SparseMatrix<double> a;
  Eigen::VectorXd b;

  static std::size_t index(std::size_t k, std::size_t l) { return l * (l + 1) / 2 + k; }
  std::size_t unknowns() const { return (n + 1) * (n + 2) / 2; }
};

struct Corners {
  double low;   // value at (0,0)
  double high;  // value at (N,N)
};

SecondMomentSystem assemble_second_moment_system(std::size_t n, double t_minus, double t_plus,
                                                 std::optional<Corners> corners = std::nullopt);

/// Sparse LU solve of the second-moment system.
MomentTable solve_second_moments(std::size_t n, double t_minus, double t_plus);
MomentTable solve_second_moments(std::size_t n, double t_minus, double t_plus, Corners corners);

/// max |A x - b| for the table's triangle values.
double second_moment_residual(const SecondMomentSystem& sys, const MomentTable& table);

/// Closed-form moments of the modified model: A k + B l + C k l + D off the
/// diagonal, C k^2 + (A+B) k + E on it.
MomentTable tilde_moments(std::size_t n, double t_minus, double t_plus);

/// Covariances of the modified model:
/// (T+ - T-)^2/(N+1) (k/N)(1 - l/N) for k <= l, plus (T+ - T-)^2/(2N(N+1)) on
/// the diagonal.
Eigen::MatrixXd tilde_correlations(std::size_t n, double t_minus, double t_plus);

struct CornerValues {
  double low;    // F(0,0)
  double high;   // F(N,N)
  double cross;  // F(0,N) = F(N,0)
};

CornerValues modified_corner_values(std::size_t n, double t_minus, double t_plus);

}  // namespace kmplab
