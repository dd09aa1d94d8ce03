#include "mcdtsf/nn.hpp"

#include <cmath>
#include <stdexcept>

#include "mcdtsf/rng.hpp"

namespace mcdtsf {

namespace {
uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}
}  // namespace

int ParamStore::add(const std::string& name, int rows, int cols, Init init) {
  if (find(name) >= 0) throw std::invalid_argument("duplicate parameter: " + name);
  Tensor t(rows, cols);
  switch (init) {
    case Init::Zero:
      break;
    case Init::One:
      t.fill(1.0);
      break;
    case Init::Glorot: {
      Rng rng = Rng::derive(seed_, fnv1a(name));
      double limit = std::sqrt(6.0 / (rows + cols));
      for (double& v : t.data) v = (2.0 * rng.uniform() - 1.0) * limit;
      break;
    }
  }
  items_.push_back(Parameter{name, std::move(t)});
  return static_cast<int>(items_.size()) - 1;
}

int ParamStore::find(const std::string& name) const {
  for (size_t i = 0; i < items_.size(); ++i)
    if (items_[i].name == name) return static_cast<int>(i);
  return -1;
}

size_t ParamStore::scalar_count() const {
  size_t n = 0;
  for (const auto& p : items_) n += p.value.size();
  return n;
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  out.reserve(items_.size());
  for (const auto& p : items_) out.push_back(p.name);
  return out;
}

void GradBuffer::init_like(const ParamStore& store) {
  g.clear();
  g.reserve(store.size());
  for (int i = 0; i < store.size(); ++i)
    g.emplace_back(store[i].value.rows, store[i].value.cols);
}

void GradBuffer::reset() {
  for (Tensor& t : g) t.fill(0.0);
}

void GradBuffer::add(const GradBuffer& other) {
  for (size_t i = 0; i < g.size(); ++i) add_inplace(g[i], other.g[i]);
}

void GradBuffer::scale(double s) {
  for (Tensor& t : g)
    for (double& v : t.data) v *= s;
}

double GradBuffer::squared_norm() const {
  double n = 0.0;
  for (const Tensor& t : g)
    for (double v : t.data) n += v * v;
  return n;
}

void AdamOptimizer::step(ParamStore& store, const GradBuffer& grads) {
  if (m_.empty()) {
    for (int i = 0; i < store.size(); ++i) {
      m_.emplace_back(store[i].value.rows, store[i].value.cols);
      v_.emplace_back(store[i].value.rows, store[i].value.cols);
    }
  }
  ++t_;
  double bc1 = 1.0 - std::pow(beta1_, t_);
  double bc2 = 1.0 - std::pow(beta2_, t_);
  for (int i = 0; i < store.size(); ++i) {
    Tensor& w = store[i].value;
    const Tensor& gr = grads.g[i];
    Tensor& m = m_[i];
    Tensor& v = v_[i];
    for (size_t j = 0; j < w.data.size(); ++j) {
      double gj = gr.data[j];
      m.data[j] = beta1_ * m.data[j] + (1.0 - beta1_) * gj;
      v.data[j] = beta2_ * v.data[j] + (1.0 - beta2_) * gj * gj;
      double mhat = m.data[j] / bc1;
      double vhat = v.data[j] / bc2;
      w.data[j] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
  }
}

}  // namespace mcdtsf
