#pragma once

// Shared fixtures and test-side oracles. Nothing here calls the library's
// own solvers, so the oracles stay independent of the code under test.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <vector>

#include "kmplab/events.hpp"
#include "kmplab/graph.hpp"

namespace kmptest {

using namespace kmplab;

constexpr std::uint64_t kSeed = 20240611;

/// Star with interior center 0, `interior_leaves` interior leaves and
/// `boundary_leaves` boundary leaves at temperatures 1, 2, ...
inline Graph star(std::size_t interior_leaves, std::size_t boundary_leaves,
                  TemperaturePolicy policy = TemperaturePolicy::positive) {
  const std::size_t n = 1 + interior_leaves + boundary_leaves;
  std::vector<VertexId> vertices(n);
  std::vector<VertexId> interior{0};
  std::vector<Edge> edges;
  std::map<VertexId, double> temps;
  for (VertexId v = 0; v < n; ++v) vertices[v] = v;
  for (VertexId v = 1; v < n; ++v) {
    edges.push_back({0, v});
    if (v <= interior_leaves) {
      interior.push_back(v);
    } else {
      temps[v] = static_cast<double>(v - interior_leaves);
    }
  }
  return build_graph(vertices, interior, edges, temps, policy);
}

/// 3x3 interior grid (ids 0..8, row-major). The left column is attached to
/// boundary vertices 9..11 at t_left, the right column to 12..14 at t_right.
inline Graph grid3(double t_left = 1.0, double t_right = 2.0) {
  std::vector<VertexId> vertices(15);
  for (VertexId v = 0; v < 15; ++v) vertices[v] = v;
  std::vector<VertexId> interior{0, 1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<Edge> edges;
  for (VertexId r = 0; r < 3; ++r) {
    for (VertexId c = 0; c < 3; ++c) {
      const VertexId v = 3 * r + c;
      if (c < 2) edges.push_back({v, v + 1});
      if (r < 2) edges.push_back({v, v + 3});
    }
  }
  std::map<VertexId, double> temps;
  for (VertexId r = 0; r < 3; ++r) {
    edges.push_back({3 * r, 9 + r});
    edges.push_back({3 * r + 2, 12 + r});
    temps[9 + r] = t_left;
    temps[12 + r] = t_right;
  }
  return build_graph(vertices, interior, edges, temps);
}

/// Hand-built event on edge `e` with the given marks.
inline MarkedEvent event_on(const Graph& g, EdgeId e, double U, double V = 0.5, double B = 1.0,
                            double Uprime = 0.5, std::uint64_t key = 7) {
  MarkedEvent ev;
  ev.time = 1.0;
  ev.edge = e;
  ev.boundary = g.is_boundary_edge(e);
  ev.U = U;
  ev.B = ev.boundary ? B : 0.0;
  ev.V = V;
  ev.Uprime = Uprime;
  ev.extra_key = key;
  return ev;
}

/// Polynomial a + b V in the uniform mark; E[V] = 1/2, E[V^2] = 1/3.
struct Lin {
  double a = 0.0;
  double b = 0.0;
};

inline double expect_product(Lin p, Lin q) {
  return p.a * q.a + (p.a * q.b + p.b * q.a) / 2.0 + p.b * q.b / 3.0;
}

/// Post-event value of a vertex: sum_c coef[c] O_c + one + fresh F, each
/// coefficient linear in the event's uniform mark.
struct Form {
  std::vector<Lin> coef;  // indexed by interior position
  Lin one;
  Lin fresh;
};

/// Exact stationary first and second moments of the opinion process on any
/// connected graph with boundary, obtained by solving the dense moment
/// equations of the generator. On boundary edges the interior endpoint moves
/// to V O_i + (1-V) F where F has mean T_j and variance `fresh_var(j)`
/// (0 for the plain opinion model). Returns (m, M) over all vertices.
struct OracleMoments {
  std::vector<double> m;
  Eigen::MatrixXd M;
};

template <class FreshVar>
OracleMoments opinion_moment_oracle(const Graph& g, FreshVar fresh_var) {
  const std::size_t n = g.vertex_count();
  std::vector<int> pos(n, -1);
  const auto interior = g.interior();
  const std::size_t q = interior.size();
  for (std::size_t k = 0; k < q; ++k) pos[interior[k]] = static_cast<int>(k);

  auto identity_form = [&](VertexId v) {
    Form f;
    f.coef.assign(q, Lin{});
    if (pos[v] >= 0) {
      f.coef[pos[v]].a = 1.0;
    } else {
      f.one.a = g.temperatures()[v];
    }
    return f;
  };

  // Post-event forms of every vertex for every edge.
  struct EdgeForms {
    std::vector<Form> after;
    double mu = 0.0;
    double var = 0.0;
  };
  std::vector<EdgeForms> per_edge;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    EdgeForms ef;
    for (VertexId v = 0; v < n; ++v) ef.after.push_back(identity_form(v));
    Form w;
    w.coef.assign(q, Lin{});
    if (g.is_boundary_edge(e)) {
      w.coef[pos[ed.first]] = {0.0, 1.0};
      w.fresh = {1.0, -1.0};
      ef.mu = g.temperatures()[ed.second];
      ef.var = fresh_var(ed.second);
      ef.after[ed.first] = w;
    } else {
      w.coef[pos[ed.first]] = {0.0, 1.0};
      w.coef[pos[ed.second]] = {1.0, -1.0};
      ef.after[ed.first] = w;
      ef.after[ed.second] = w;
    }
    per_edge.push_back(std::move(ef));
  }

  // First moments: sum over edges of (E[after] - before) = 0.
  Eigen::MatrixXd A1 = Eigen::MatrixXd::Zero(q, q);
  Eigen::VectorXd b1 = Eigen::VectorXd::Zero(q);
  for (const auto& ef : per_edge) {
    for (std::size_t k = 0; k < q; ++k) {
      const Form& f = ef.after[interior[k]];
      for (std::size_t c = 0; c < q; ++c) A1(k, c) += f.coef[c].a + f.coef[c].b / 2.0;
      A1(k, k) -= 1.0;
      b1(k) -= f.one.a + f.one.b / 2.0 + (f.fresh.a + f.fresh.b / 2.0) * ef.mu;
    }
  }
  const Eigen::VectorXd mi = A1.fullPivLu().solve(b1);

  // Second moments over ordered interior pairs (k, l).
  const std::size_t qq = q * q;
  Eigen::MatrixXd A2 = Eigen::MatrixXd::Zero(qq, qq);
  Eigen::VectorXd b2 = Eigen::VectorXd::Zero(qq);
  for (const auto& ef : per_edge) {
    const double mu2 = ef.mu * ef.mu + ef.var;
    for (std::size_t k = 0; k < q; ++k) {
      for (std::size_t l = 0; l < q; ++l) {
        const std::size_t row = k * q + l;
        const Form& f = ef.after[interior[k]];
        const Form& h = ef.after[interior[l]];
        for (std::size_t c = 0; c < q; ++c) {
          for (std::size_t d = 0; d < q; ++d) A2(row, c * q + d) += expect_product(f.coef[c], h.coef[d]);
        }
        A2(row, row) -= 1.0;
        double rhs = expect_product(f.one, h.one) + expect_product(f.fresh, h.fresh) * mu2 +
                     (expect_product(f.one, h.fresh) + expect_product(f.fresh, h.one)) * ef.mu;
        for (std::size_t c = 0; c < q; ++c) {
          rhs += (expect_product(f.coef[c], h.one) + expect_product(f.one, h.coef[c])) * mi(c);
          rhs += (expect_product(f.coef[c], h.fresh) + expect_product(f.fresh, h.coef[c])) * mi(c) * ef.mu;
        }
        b2(row) -= rhs;
      }
    }
  }
  const Eigen::VectorXd Mi = A2.fullPivLu().solve(b2);

  OracleMoments out;
  out.m.assign(n, 0.0);
  for (VertexId v = 0; v < n; ++v) out.m[v] = pos[v] >= 0 ? mi(pos[v]) : g.temperatures()[v];
  out.M = Eigen::MatrixXd::Zero(n, n);
  for (VertexId a = 0; a < n; ++a) {
    for (VertexId b = 0; b < n; ++b) {
      if (pos[a] >= 0 && pos[b] >= 0) {
        out.M(a, b) = Mi(pos[a] * q + pos[b]);
      } else {
        out.M(a, b) = out.m[a] * out.m[b];
      }
    }
  }
  return out;
}

inline OracleMoments opinion_moment_oracle(const Graph& g) {
  return opinion_moment_oracle(g, [](VertexId) { return 0.0; });
}

/// Integral of g(y) against the arc-sine density on [tm, tp], after the
/// substitution y = tm + (tp - tm) sin^2(theta). The transformed integrand is
/// smooth, even and periodic in theta, so the midpoint rule converges
/// geometrically.
template <class Density, class G>
double arcsine_integral(Density density, G g, double tm, double tp, int panels = 400) {
  const double d = tp - tm;
  const double h = std::numbers::pi / 2 / panels;
  double sum = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double th = (k + 0.5) * h;
    const double s = std::sin(th);
    const double c = std::cos(th);
    const double y = tm + d * s * s;
    sum += density(y) * g(y) * 2.0 * d * s * c;
  }
  return sum * h;
}

inline double binomial_se(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

}  // namespace kmptest
