#include <algorithm>
#include <string>

#include "kmplab/opinion.hpp"

namespace kmplab {

namespace {

struct PastEvent {
  VertexId first;
  VertexId second;
  bool boundary;
  double v;
};

}  // namespace

// Compact form of AffineState: o_k is the row applied to an initial state
// with every interior value at min T, r_k is the row's interior mass. Once
// max r_k is below the tolerance, o differs from the limit by at most
// r_k (max T - min T).
OpinionConfig sample_stationary_opinion(const Graph& g, EventStream& stream,
                                        const CftpOptions& options, CftpDiagnostics* diag) {
  if (g.boundary().empty()) throw CftpError("stationary sampler needs a boundary vertex");
  if (!g.is_connected()) throw CftpError("stationary sampler needs a connected graph");
  if (!(options.initial_window > 0.0)) throw CftpError("initial window must be positive");

  const std::size_t n = g.vertex_count();
  const auto temps = g.temperatures();
  const double start = stream.cursor();
  std::vector<PastEvent> past;  // ascending age
  std::vector<double> o(n);
  std::vector<double> r(n);
  double window = options.initial_window;

  for (int d = 0;; ++d) {
    MarkedEvent ev;
    while (stream.next_event_until(start + window, ev)) {
      if (!ev.refresh) {
        const Edge& e = g.edge(ev.edge);
        past.push_back({e.first, e.second, ev.boundary, ev.V});
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      const bool b = g.is_boundary(static_cast<VertexId>(k));
      o[k] = b ? temps[k] : g.min_temperature();
      r[k] = b ? 0.0 : 1.0;
    }
    for (auto it = past.rbegin(); it != past.rend(); ++it) {
      const double v = it->v;
      const double w = mix(v, o[it->first], o[it->second]);
      const double m = v * r[it->first] + (1.0 - v) * r[it->second];
      o[it->first] = w;
      r[it->first] = m;
      if (!it->boundary) {
        o[it->second] = w;
        r[it->second] = m;
      }
    }
    const double residual = *std::max_element(r.begin(), r.end());
    if (residual <= options.tolerance) {
      if (diag) *diag = {window, past.size(), d, residual};
      return o;
    }
    if (d >= options.max_doublings) {
      throw CftpError("coupling from the past did not coalesce after " + std::to_string(d) +
                      " doublings (window " + std::to_string(window) + ", residual " +
                      std::to_string(residual) + ")");
    }
    window *= 2.0;
  }
}

}  // namespace kmplab
