#pragma once

#include <cstddef>

#include "odp/tensor.hpp"

namespace odp {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;
};

// Adam with bias correction and decoupled weight decay (AdamW style:
// decay applied directly to params, not folded into the gradient).
class Adam {
  public:
    Adam(std::size_t n, AdamConfig cfg);

    void step(Vec& params, const Vec& grads);
    void reset();

    std::size_t t() const { return t_; }
    const AdamConfig& config() const { return cfg_; }
    void set_lr(double lr) { cfg_.lr = lr; }

  private:
    AdamConfig cfg_;
    Vec m_;
    Vec v_;
    std::size_t t_ = 0;
};

} // namespace odp
