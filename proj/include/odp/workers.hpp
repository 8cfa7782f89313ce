#pragma once

#include <cstddef>
#include <functional>

namespace odp {

// Index-range parallelism. With one worker everything runs inline, which is
// also the deterministic reference behavior; results must never depend on
// the worker count (callers give each index its own rng and output slot).
class WorkerPool {
  public:
    explicit WorkerPool(std::size_t n_workers = 1) : n_(n_workers == 0 ? 1 : n_workers) {}

    std::size_t size() const { return n_; }

    void parallel_for(std::size_t n_items, const std::function<void(std::size_t)>& fn) const;

  private:
    std::size_t n_;
};

} // namespace odp
