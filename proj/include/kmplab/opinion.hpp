#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "kmplab/events.hpp"
#include "kmplab/graph.hpp"

namespace kmplab {

/// Opinions indexed by vertex id; boundary entries hold T_j.
using OpinionConfig = std::vector<double>;

/// v*a + (1-v)*b clamped to the segment [a, b]. Returns `a` unchanged when
/// a == b, so averaging equal values is exact.
inline double mix(double v, double a, double b) noexcept {
  if (a == b) return a;
  const double w = v * a + (1.0 - v) * b;
  const double lo = a < b ? a : b;
  const double hi = a < b ? b : a;
  return w < lo ? lo : (w > hi ? hi : w);
}

/// Boundary entries set to T_j, interior entries to `interior_value`.
OpinionConfig pinned_opinion(const Graph& g, double interior_value);

/// Interior edge: both endpoints get mix(V, O_i, O_j). Boundary edge: only the
/// interior endpoint moves, to mix(V, O_i, T_j). Refresh events are ignored.
void step_opinion(OpinionConfig& o, const MarkedEvent& ev, const Graph& g);

/// Standard deviation of the modified boundary refresh, (T+ - T-)/sqrt(2N(N+1)).
double modified_boundary_spread(std::size_t n, double t_minus, double t_plus);

/// Modified opinion model. Interior edges as step_opinion. On a boundary edge
/// a fresh value T_j +- spread (fair sign from the event extras) is drawn and
/// O_i becomes U O_i + (1-U) O'_j; the stored boundary value stays T_j.
void step_modified_opinion(OpinionConfig& o, const MarkedEvent& ev, const Graph& g, std::size_t n);

/// Arc-sine density on (t_minus, t_plus). Infinite at the endpoints, throws
/// std::domain_error outside the closed support.
double arcsine_density(double y, double t_minus, double t_plus);
double arcsine_cdf(double y, double t_minus, double t_plus);

/// One backward step of a dual walk: on the event edge {i,j}, an interior
/// walker moves to i if U' < V and to j otherwise. Boundary positions and
/// positions off the edge are unchanged.
VertexId dual_walk_step(VertexId pos, const MarkedEvent& ev, const Graph& g);

/// Dense affine representation of the opinion flow over a window: row k holds
/// the weights of vertex k's value on the values at the window start.
class AffineState {
 public:
  explicit AffineState(const Graph& g);

  void apply(const MarkedEvent& ev);
  double weight(VertexId k, VertexId source) const { return w_[k * n_ + source]; }
  /// Total weight of row k on interior sources.
  double interior_mass(VertexId k) const;
  double row_sum(VertexId k) const;
  /// Row-times-vector: the configuration reached from `initial`.
  OpinionConfig evaluate(const OpinionConfig& initial) const;

 private:
  const Graph* g_;
  std::size_t n_;
  std::vector<double> w_;
};

struct CftpOptions {
  double initial_window = 1.0;  // time units, i.e. |E| expected events
  int max_doublings = 40;
  double tolerance = 0x1.0p-56; // max interior mass accepted as coalesced
};

struct CftpDiagnostics {
  double window = 0.0;
  std::size_t events = 0;
  int doublings = 0;
  double residual = 0.0;
};

class CftpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Stationary opinion sample by coupling from the past. Events from `stream`
/// are read as ages into the past; the window doubles until the interior mass
/// of every row is below the tolerance.
OpinionConfig sample_stationary_opinion(const Graph& g, EventStream& stream,
                                        const CftpOptions& options = {},
                                        CftpDiagnostics* diag = nullptr);

}  // namespace kmplab
