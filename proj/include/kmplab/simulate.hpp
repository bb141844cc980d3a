#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kmplab/events.hpp"
#include "kmplab/graph.hpp"

namespace kmplab {

template <class Config>
struct Trajectory {
  std::vector<double> times;
  std::vector<Config> states;
};

/// Runs `step` over every event of `stream` up to `horizon`. When
/// `sample_times` is given, `traj` receives the configuration after the last
/// event at or before each sample time.
template <class Config, class Step>
Config simulate(Config c, EventStream& stream, double horizon, Step&& step,
                std::span<const double> sample_times = {}, Trajectory<Config>* traj = nullptr) {
  std::vector<double> samples(sample_times.begin(), sample_times.end());
  std::sort(samples.begin(), samples.end());
  if (!samples.empty() && (samples.front() < stream.cursor() || samples.back() > horizon)) {
    throw std::invalid_argument("sample times must lie between the stream cursor and the horizon");
  }
  std::size_t next = 0;
  MarkedEvent ev;
  const Graph& g = stream.graph();
  while (stream.next_event_until(horizon, ev)) {
    while (next < samples.size() && samples[next] < ev.time) {
      if (traj) {
        traj->times.push_back(samples[next]);
        traj->states.push_back(c);
      }
      ++next;
    }
    step(c, ev, g);
  }
  for (; next < samples.size(); ++next) {
    if (traj) {
      traj->times.push_back(samples[next]);
      traj->states.push_back(c);
    }
  }
  return c;
}

/// Applies exactly `count` events.
template <class Config, class Step>
Config simulate_events(Config c, EventStream& stream, std::size_t count, Step&& step) {
  const Graph& g = stream.graph();
  for (std::size_t k = 0; k < count; ++k) step(c, stream.next_event(), g);
  return c;
}

}  // namespace kmplab
