#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mcdtsf/tensor.hpp"

namespace mcdtsf {

enum class Init { Zero, Glorot, One };

struct Parameter {
  std::string name;
  Tensor value;
};

// Named, slot-indexed parameter set. Initialization draws from a stream keyed
// by (seed, name hash), so identical names get identical values regardless of
// creation order; ablation variants that share a parameter therefore share
// its initial value.
class ParamStore {
 public:
  explicit ParamStore(uint64_t init_seed = 0) : seed_(init_seed) {}

  int add(const std::string& name, int rows, int cols, Init init);
  int size() const { return static_cast<int>(items_.size()); }
  Parameter& operator[](int slot) { return items_[slot]; }
  const Parameter& operator[](int slot) const { return items_[slot]; }
  int find(const std::string& name) const;  // -1 if absent
  size_t scalar_count() const;
  std::vector<std::string> names() const;

 private:
  uint64_t seed_;
  std::vector<Parameter> items_;
};

// Per-slot gradient accumulator; one per worker chunk, reduced in chunk order.
struct GradBuffer {
  std::vector<Tensor> g;
  void init_like(const ParamStore& store);
  void reset();
  void add(const GradBuffer& other);
  void scale(double s);
  double squared_norm() const;
};

class AdamOptimizer {
 public:
  AdamOptimizer(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(ParamStore& store, const GradBuffer& grads);
  double learning_rate() const { return lr_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  int t_ = 0;
  std::vector<Tensor> m_, v_;
};

}  // namespace mcdtsf
