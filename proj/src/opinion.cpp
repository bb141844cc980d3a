#include "kmplab/opinion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace kmplab {

OpinionConfig pinned_opinion(const Graph& g, double interior_value) {
  OpinionConfig o(g.vertex_count(), interior_value);
  for (VertexId b : g.boundary()) o[b] = g.temperatures()[b];
  return o;
}

void step_opinion(OpinionConfig& o, const MarkedEvent& ev, const Graph& g) {
  if (ev.refresh) return;
  const Edge& e = g.edge(ev.edge);
  const double w = mix(ev.V, o[e.first], o[e.second]);
  o[e.first] = w;
  if (!ev.boundary) o[e.second] = w;
}

double modified_boundary_spread(std::size_t n, double t_minus, double t_plus) {
  const double nn = static_cast<double>(n);
  return std::abs(t_plus - t_minus) / std::sqrt(2.0 * nn * (nn + 1.0));
}

void step_modified_opinion(OpinionConfig& o, const MarkedEvent& ev, const Graph& g, std::size_t n) {
  if (ev.refresh) return;
  if (!ev.boundary) {
    step_opinion(o, ev, g);
    return;
  }
  const Edge& e = g.edge(ev.edge);
  const double spread = modified_boundary_spread(n, g.min_temperature(), g.max_temperature());
  Rng x = ev.extras();
  const double fresh = g.temperatures()[e.second] + (x.uniform() < 0.5 ? -spread : spread);
  o[e.first] = ev.U * o[e.first] + (1.0 - ev.U) * fresh;
}

double arcsine_density(double y, double t_minus, double t_plus) {
  if (!(t_minus < t_plus)) throw std::domain_error("arc-sine law needs T- < T+");
  if (y < t_minus || y > t_plus) throw std::domain_error("arc-sine density outside its support");
  if (y == t_minus || y == t_plus) return std::numeric_limits<double>::infinity();
  return 1.0 / (std::numbers::pi * std::sqrt((y - t_minus) * (t_plus - y)));
}

double arcsine_cdf(double y, double t_minus, double t_plus) {
  if (!(t_minus < t_plus)) throw std::domain_error("arc-sine law needs T- < T+");
  if (y <= t_minus) return 0.0;
  if (y >= t_plus) return 1.0;
  return 2.0 / std::numbers::pi * std::asin(std::sqrt((y - t_minus) / (t_plus - t_minus)));
}

VertexId dual_walk_step(VertexId pos, const MarkedEvent& ev, const Graph& g) {
  if (ev.refresh || g.is_boundary(pos)) return pos;
  const Edge& e = g.edge(ev.edge);
  if (pos != e.first && pos != e.second) return pos;
  return ev.Uprime < ev.V ? e.first : e.second;
}

AffineState::AffineState(const Graph& g) : g_(&g), n_(g.vertex_count()), w_(n_ * n_, 0.0) {
  for (std::size_t k = 0; k < n_; ++k) w_[k * n_ + k] = 1.0;
}

void AffineState::apply(const MarkedEvent& ev) {
  if (ev.refresh) return;
  const Edge& e = g_->edge(ev.edge);
  double* ri = &w_[e.first * n_];
  const double* rj = &w_[e.second * n_];
  const double v = ev.V;
  for (std::size_t s = 0; s < n_; ++s) ri[s] = v * ri[s] + (1.0 - v) * rj[s];
  if (!ev.boundary) std::copy(ri, ri + n_, &w_[e.second * n_]);
}

double AffineState::interior_mass(VertexId k) const {
  double m = 0.0;
  for (VertexId s : g_->interior()) m += w_[k * n_ + s];
  return m;
}

double AffineState::row_sum(VertexId k) const {
  double m = 0.0;
  for (std::size_t s = 0; s < n_; ++s) m += w_[k * n_ + s];
  return m;
}

OpinionConfig AffineState::evaluate(const OpinionConfig& initial) const {
  OpinionConfig out(n_, 0.0);
  for (std::size_t k = 0; k < n_; ++k) {
    double acc = 0.0;
    for (std::size_t s = 0; s < n_; ++s) acc += w_[k * n_ + s] * initial[s];
    out[k] = acc;
  }
  return out;
}

}  // namespace kmplab
