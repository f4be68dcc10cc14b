#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace specsense {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam over a flat parameter vector.
class Adam {
 public:
  Adam(std::size_t size, AdamConfig cfg);

  void step(std::span<double> params, std::span<const double> grads);
  std::size_t steps() const noexcept { return t_; }

 private:
  AdamConfig cfg_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::size_t t_ = 0;
};

}  // namespace specsense
