#include "kmplab/events.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kmplab {

EventStream::EventStream(const Graph& g, std::uint64_t seed, std::uint64_t substream,
                         StreamOptions options)
    : g_(&g), rng_(seed, substream), options_(options) {
  rate_ = static_cast<double>(g.edge_count());
  if (options_.boundary_refresh) rate_ += static_cast<double>(g.boundary().size());
  if (!(rate_ > 0.0)) throw std::invalid_argument("event stream needs at least one clock");
}

MarkedEvent EventStream::draw() {
  MarkedEvent ev;
  clock_ += rng_.exponential() / rate_;
  ev.time = clock_;
  const std::uint64_t m = g_->edge_count();
  const std::uint64_t clocks = options_.boundary_refresh ? m + g_->boundary().size() : m;
  const std::uint64_t idx = rng_.below(clocks);
  if (idx < m) {
    ev.edge = static_cast<EdgeId>(idx);
    ev.boundary = g_->is_boundary_edge(ev.edge);
  } else {
    ev.refresh = true;
    ev.vertex = g_->boundary()[idx - m];
  }
  ev.U = rng_.uniform();
  if (ev.boundary || ev.refresh) ev.B = rng_.exponential();
  ev.V = rng_.uniform();
  ev.Uprime = rng_.uniform();
  ev.extra_key = rng_();
  return ev;
}

MarkedEvent EventStream::next_event() {
  MarkedEvent ev;
  if (pending_) {
    ev = *pending_;
    pending_.reset();
  } else {
    ev = draw();
  }
  cursor_ = ev.time;
  return ev;
}

bool EventStream::next_event_until(double horizon, MarkedEvent& out) {
  if (!std::isfinite(horizon)) throw std::invalid_argument("event horizon must be finite");
  if (horizon < cursor_) {
    throw std::invalid_argument("horizon " + std::to_string(horizon) + " is before the stream cursor");
  }
  if (!pending_) pending_ = draw();
  if (pending_->time > horizon) {
    cursor_ = horizon;
    return false;
  }
  out = *pending_;
  pending_.reset();
  cursor_ = out.time;
  return true;
}

std::vector<MarkedEvent> EventStream::events_until(double horizon) {
  std::vector<MarkedEvent> out;
  MarkedEvent ev;
  while (next_event_until(horizon, ev)) out.push_back(ev);
  return out;
}

}  // namespace kmplab
