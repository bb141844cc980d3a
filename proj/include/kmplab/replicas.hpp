#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <type_traits>
#include <vector>

namespace kmplab {

/// f(0), ..., f(n-1) evaluated serially. Reference for map_replicas.
template <class F>
auto map_replicas_serial(std::size_t n, F&& f) {
  using T = std::decay_t<decltype(f(std::size_t{0}))>;
  std::vector<T> out(n);
  for (std::size_t r = 0; r < n; ++r) out[r] = f(r);
  return out;
}

/// f(0), ..., f(n-1) evaluated across OpenMP threads. Results are stored by
/// index, so the output does not depend on scheduling as long as f(r) only
/// uses randomness derived from r. If any replica throws, the exception of the
/// lowest failing index is rethrown.
template <class F>
auto map_replicas(std::size_t n, F&& f) {
  using T = std::decay_t<decltype(f(std::size_t{0}))>;
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long long r = 0; r < count; ++r) {
    try {
      out[static_cast<std::size_t>(r)] = f(static_cast<std::size_t>(r));
    } catch (...) {
      errors[static_cast<std::size_t>(r)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

/// Substream id for replica r of a named experiment stage.
constexpr std::uint64_t substream(std::uint64_t stage, std::uint64_t r) noexcept {
  return (stage << 40) ^ r;
}

}  // namespace kmplab
