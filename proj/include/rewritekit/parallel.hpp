#ifndef REWRITEKIT_PARALLEL_HPP
#define REWRITEKIT_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rewritekit {

/// Number of worker threads for a --jobs value; 0 means hardware concurrency.
inline unsigned resolve_jobs(unsigned jobs) {
  if (jobs > 0) return jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Applies fn to every element and returns results in input order. The first
/// exception thrown by any worker is rethrown after all workers stop.
template <class In, class Fn>
auto parallel_map(const std::vector<In>& items, unsigned jobs, Fn fn)
    -> std::vector<decltype(fn(items.front()))> {
  using Out = decltype(fn(items.front()));
  std::vector<Out> out(items.size());
  const unsigned workers =
      std::min<std::size_t>(resolve_jobs(jobs), std::max<std::size_t>(items.size(), 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < items.size(); ++i) out[i] = fn(items[i]);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= items.size() || failed.load()) return;
      try {
        out[i] = fn(items[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

/// Streams a reader through fn in fixed-size batches so memory stays bounded
/// by the batch, handing each batch's results to sink in input order.
/// `next()` returns an optional item; `sink(item, result)` is called serially.
template <class Next, class Fn, class Sink>
void parallel_stream(Next next, unsigned jobs, std::size_t batch_size, Fn fn, Sink sink) {
  using Item = typename decltype(next())::value_type;
  std::vector<Item> batch;
  batch.reserve(batch_size);
  auto flush = [&] {
    auto results = parallel_map(batch, jobs, fn);
    for (std::size_t i = 0; i < batch.size(); ++i) sink(batch[i], results[i]);
    batch.clear();
  };
  while (auto item = next()) {
    batch.push_back(std::move(*item));
    if (batch.size() >= batch_size) flush();
  }
  if (!batch.empty()) flush();
}

}  // namespace rewritekit

#endif  // REWRITEKIT_PARALLEL_HPP
