#ifndef STIRAP_SWEEP_HPP
#define STIRAP_SWEEP_HPP

// Work-queue execution of independent cells. Results are always stored and
// reduced by cell index, so output never depends on the worker count or on
// scheduling. Long sweeps can checkpoint completed cells to a text file and
// resume from it.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace stirap {

/// Calls fn(i) for every i in [0, n) using up to `workers` threads. The first
/// exception (lowest index) is rethrown after all workers stop.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const std::size_t pool = std::clamp<std::size_t>(workers < 1 ? 1 : workers, 1, std::max<std::size_t>(n, 1));
  if (pool == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> threads;
  threads.reserve(pool);
  for (std::size_t w = 0; w < pool; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct CellResult {
  std::vector<double> values;
  std::string error;  // empty on success
  bool done = false;

  bool ok() const { return done && error.empty(); }
};

struct SweepOptions {
  int workers = 1;
  std::filesystem::path checkpoint;  // empty: no checkpointing
  std::size_t checkpoint_every = 256;
  std::size_t stop_after = 0;  // stop after this many newly computed cells (0: run to completion)
};

struct SweepOutcome {
  std::vector<CellResult> cells;
  std::size_t computed = 0;  // cells evaluated in this run
  std::size_t resumed = 0;   // cells restored from the checkpoint
  bool complete = false;
};

using CellTask = std::function<std::vector<double>(std::size_t)>;

/// Evaluates `task` for each of `cells` cells. A throwing cell is recorded as
/// failed with its message and does not stop the sweep. With a checkpoint
/// path, completed cells are flushed every `checkpoint_every` completions and
/// restored on the next call; the checkpoint is removed once the sweep
/// completes.
SweepOutcome run_sweep(std::size_t cells, const CellTask& task, const SweepOptions& opts);

}  // namespace stirap

#endif  // STIRAP_SWEEP_HPP
