#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kmplab/graph.hpp"
#include "kmplab/rng.hpp"

namespace kmplab {

/// One clock ring with its marks. Marks are drawn in a fixed order:
/// time gap, clock index, U, B (boundary edge or refresh only), V, U', extra key.
///
/// Marks only some processes need (remix points, fresh Poisson points,
/// geometric refresh uniforms) come from `extras()`, a generator seeded by the
/// event's own key, so consuming them never shifts later events.
struct MarkedEvent {
  double time = 0.0;
  EdgeId edge = 0;
  VertexId vertex = 0;   // boundary vertex of a refresh event
  bool refresh = false;  // boundary vertex refresh (original KMP variant)
  bool boundary = false; // boundary edge; B is present
  double U = 0.0;
  double B = 0.0;
  double V = 0.0;
  double Uprime = 0.0;
  std::uint64_t extra_key = 0;

  Rng extras() const noexcept { return Rng(extra_key, 0x6578747261ULL); }
};

struct StreamOptions {
  /// Attach rate-one refresh clocks to each boundary vertex.
  bool boundary_refresh = false;
};

/// Superposition of rate-one marked Poisson clocks, one per edge (and one per
/// boundary vertex with `boundary_refresh`). Deterministic in (graph, seed,
/// substream).
class EventStream {
 public:
  EventStream(const Graph& g, std::uint64_t seed, std::uint64_t substream = 0,
              StreamOptions options = {});

  MarkedEvent next_event();

  /// Writes the next event into `out` if its time is <= horizon; otherwise
  /// keeps it pending, moves the cursor to horizon and returns false.
  bool next_event_until(double horizon, MarkedEvent& out);

  /// All events with time <= horizon, in increasing time order.
  std::vector<MarkedEvent> events_until(double horizon);

  double cursor() const noexcept { return cursor_; }
  double total_rate() const noexcept { return rate_; }
  const Graph& graph() const noexcept { return *g_; }
  const StreamOptions& options() const noexcept { return options_; }

 private:
  MarkedEvent draw();

  const Graph* g_;
  Rng rng_;
  StreamOptions options_;
  double rate_ = 0.0;
  double cursor_ = 0.0;
  double clock_ = 0.0;
  std::optional<MarkedEvent> pending_;
};

}  // namespace kmplab
