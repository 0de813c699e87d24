#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <span>
#include <thread>
#include <type_traits>
#include <vector>

namespace ted {

/// Applies `fn` to every element using up to `workers` threads. Elements are
/// split into contiguous chunks and results are stored by index, so the
/// output is identical for any worker count.
template <typename T, typename Fn>
auto parallel_map(std::span<const T> items, Fn&& fn, std::size_t workers)
    -> std::vector<std::invoke_result_t<Fn&, const T&>> {
  using R = std::invoke_result_t<Fn&, const T&>;
  std::vector<R> out(items.size());
  workers = std::max<std::size_t>(1, std::min(workers, items.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < items.size(); ++i) out[i] = fn(items[i]);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (items.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(items.size(), begin + chunk);
      pool.emplace_back([&, w, begin, end] {
        try {
          for (std::size_t i = begin; i < end; ++i) out[i] = fn(items[i]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

} // namespace ted
