#include "mcdtsf/autodiff.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace mcdtsf::ad {

namespace {
constexpr double kLayerNormEps = 1e-5;
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluA = 0.044715;
}  // namespace

VarId Tape::push(Tensor v, std::function<void(Tape&)> back) {
  nodes_.push_back(Node{std::move(v), std::move(back)});
  grads_.emplace_back();
  return static_cast<VarId>(nodes_.size() - 1);
}

Tensor& Tape::gbuf(VarId id) {
  Tensor& g = grads_[id];
  if (g.data.empty()) g = Tensor(nodes_[id].val.rows, nodes_[id].val.cols);
  return g;
}

VarId Tape::input(Tensor v) { return push(std::move(v)); }

VarId Tape::param(int slot, const Tensor& value) {
  VarId id = push(value);
  param_nodes_.emplace_back(slot, id);
  return id;
}

VarId Tape::matmul(VarId a, VarId b) {
  VarId out = push(mcdtsf::matmul(nodes_[a].val, nodes_[b].val));
  nodes_[out].back = [out, a, b](Tape& t) {
    const Tensor& dc = t.grads_[out];
    add_inplace(t.gbuf(a), mcdtsf::matmul_nt(dc, t.nodes_[b].val));
    add_inplace(t.gbuf(b), mcdtsf::matmul_tn(t.nodes_[a].val, dc));
  };
  return out;
}

VarId Tape::matmul_nt(VarId a, VarId b) {
  VarId out = push(mcdtsf::matmul_nt(nodes_[a].val, nodes_[b].val));
  nodes_[out].back = [out, a, b](Tape& t) {
    const Tensor& dc = t.grads_[out];
    add_inplace(t.gbuf(a), mcdtsf::matmul(dc, t.nodes_[b].val));
    add_inplace(t.gbuf(b), mcdtsf::matmul_tn(dc, t.nodes_[a].val));
  };
  return out;
}

VarId Tape::add(VarId a, VarId b) {
  const Tensor& ta = nodes_[a].val;
  const Tensor& tb = nodes_[b].val;
  if (!ta.same_shape(tb)) throw std::invalid_argument("add: shape mismatch");
  Tensor c = ta;
  add_inplace(c, tb);
  VarId out = push(std::move(c));
  nodes_[out].back = [out, a, b](Tape& t) {
    add_inplace(t.gbuf(a), t.grads_[out]);
    add_inplace(t.gbuf(b), t.grads_[out]);
  };
  return out;
}

VarId Tape::sub(VarId a, VarId b) {
  const Tensor& ta = nodes_[a].val;
  const Tensor& tb = nodes_[b].val;
  if (!ta.same_shape(tb)) throw std::invalid_argument("sub: shape mismatch");
  Tensor c = ta;
  for (size_t i = 0; i < c.data.size(); ++i) c.data[i] -= tb.data[i];
  VarId out = push(std::move(c));
  nodes_[out].back = [out, a, b](Tape& t) {
    add_inplace(t.gbuf(a), t.grads_[out]);
    axpy_inplace(t.gbuf(b), -1.0, t.grads_[out]);
  };
  return out;
}

VarId Tape::mul(VarId a, VarId b) {
  const Tensor& ta = nodes_[a].val;
  const Tensor& tb = nodes_[b].val;
  if (!ta.same_shape(tb)) throw std::invalid_argument("mul: shape mismatch");
  Tensor c = ta;
  for (size_t i = 0; i < c.data.size(); ++i) c.data[i] *= tb.data[i];
  VarId out = push(std::move(c));
  nodes_[out].back = [out, a, b](Tape& t) {
    const Tensor& dc = t.grads_[out];
    Tensor& ga = t.gbuf(a);
    Tensor& gb = t.gbuf(b);
    const Tensor& va = t.nodes_[a].val;
    const Tensor& vb = t.nodes_[b].val;
    for (size_t i = 0; i < dc.data.size(); ++i) {
      ga.data[i] += dc.data[i] * vb.data[i];
      gb.data[i] += dc.data[i] * va.data[i];
    }
  };
  return out;
}

VarId Tape::scale(VarId a, double c) {
  Tensor out_t = nodes_[a].val;
  for (double& v : out_t.data) v *= c;
  VarId out = push(std::move(out_t));
  nodes_[out].back = [out, a, c](Tape& t) {
    axpy_inplace(t.gbuf(a), c, t.grads_[out]);
  };
  return out;
}

VarId Tape::add_rowvec(VarId a, VarId row) {
  const Tensor& ta = nodes_[a].val;
  const Tensor& tr = nodes_[row].val;
  if (tr.rows != 1 || tr.cols != ta.cols)
    throw std::invalid_argument("add_rowvec: row must be 1 x cols(a)");
  Tensor c = ta;
  for (int i = 0; i < c.rows; ++i)
    for (int j = 0; j < c.cols; ++j) c(i, j) += tr(0, j);
  VarId out = push(std::move(c));
  nodes_[out].back = [out, a, row](Tape& t) {
    const Tensor& dc = t.grads_[out];
    add_inplace(t.gbuf(a), dc);
    Tensor& gr = t.gbuf(row);
    for (int i = 0; i < dc.rows; ++i)
      for (int j = 0; j < dc.cols; ++j) gr(0, j) += dc(i, j);
  };
  return out;
}

VarId Tape::concat_rows(VarId a, VarId b) {
  const Tensor& ta = nodes_[a].val;
  const Tensor& tb = nodes_[b].val;
  if (ta.cols != tb.cols) throw std::invalid_argument("concat_rows: cols differ");
  Tensor c(ta.rows + tb.rows, ta.cols);
  std::copy(ta.data.begin(), ta.data.end(), c.data.begin());
  std::copy(tb.data.begin(), tb.data.end(), c.data.begin() + ta.data.size());
  VarId out = push(std::move(c));
  nodes_[out].back = [out, a, b](Tape& t) {
    const Tensor& dc = t.grads_[out];
    Tensor& ga = t.gbuf(a);
    Tensor& gb = t.gbuf(b);
    size_t na = ga.data.size();
    for (size_t i = 0; i < na; ++i) ga.data[i] += dc.data[i];
    for (size_t i = 0; i < gb.data.size(); ++i) gb.data[i] += dc.data[na + i];
  };
  return out;
}

VarId Tape::concat_cols(VarId a, VarId b) {
  const Tensor& ta = nodes_[a].val;
  const Tensor& tb = nodes_[b].val;
  if (ta.rows != tb.rows) throw std::invalid_argument("concat_cols: rows differ");
  Tensor c(ta.rows, ta.cols + tb.cols);
  for (int i = 0; i < ta.rows; ++i) {
    for (int j = 0; j < ta.cols; ++j) c(i, j) = ta(i, j);
    for (int j = 0; j < tb.cols; ++j) c(i, ta.cols + j) = tb(i, j);
  }
  VarId out = push(std::move(c));
  int ca = ta.cols;
  nodes_[out].back = [out, a, b, ca](Tape& t) {
    const Tensor& dc = t.grads_[out];
    Tensor& ga = t.gbuf(a);
    Tensor& gb = t.gbuf(b);
    for (int i = 0; i < dc.rows; ++i) {
      for (int j = 0; j < ga.cols; ++j) ga(i, j) += dc(i, j);
      for (int j = 0; j < gb.cols; ++j) gb(i, j) += dc(i, ca + j);
    }
  };
  return out;
}

VarId Tape::slice_rows(VarId a, int r0, int r1) {
  const Tensor& ta = nodes_[a].val;
  if (r0 < 0 || r1 > ta.rows || r0 >= r1)
    throw std::invalid_argument("slice_rows: bad range");
  Tensor c(r1 - r0, ta.cols);
  std::copy(ta.data.begin() + static_cast<size_t>(r0) * ta.cols,
            ta.data.begin() + static_cast<size_t>(r1) * ta.cols, c.data.begin());
  VarId out = push(std::move(c));
  nodes_[out].back = [out, a, r0](Tape& t) {
    const Tensor& dc = t.grads_[out];
    Tensor& ga = t.gbuf(a);
    for (int i = 0; i < dc.rows; ++i)
      for (int j = 0; j < dc.cols; ++j) ga(r0 + i, j) += dc(i, j);
  };
  return out;
}

VarId Tape::slice_cols(VarId a, int c0, int c1) {
  const Tensor& ta = nodes_[a].val;
  if (c0 < 0 || c1 > ta.cols || c0 >= c1)
    throw std::invalid_argument("slice_cols: bad range");
  Tensor c(ta.rows, c1 - c0);
  for (int i = 0; i < ta.rows; ++i)
    for (int j = c0; j < c1; ++j) c(i, j - c0) = ta(i, j);
  VarId out = push(std::move(c));
  nodes_[out].back = [out, a, c0](Tape& t) {
    const Tensor& dc = t.grads_[out];
    Tensor& ga = t.gbuf(a);
    for (int i = 0; i < dc.rows; ++i)
      for (int j = 0; j < dc.cols; ++j) ga(i, c0 + j) += dc(i, j);
  };
  return out;
}

VarId Tape::reshape(VarId a, int r, int c) {
  const Tensor& ta = nodes_[a].val;
  if (static_cast<size_t>(r) * c != ta.data.size())
    throw std::invalid_argument("reshape: element count differs");
  Tensor out_t(r, c);
  out_t.data = ta.data;
  VarId out = push(std::move(out_t));
  nodes_[out].back = [out, a](Tape& t) {
    const Tensor& dc = t.grads_[out];
    Tensor& ga = t.gbuf(a);
    for (size_t i = 0; i < dc.data.size(); ++i) ga.data[i] += dc.data[i];
  };
  return out;
}

VarId Tape::softmax_rows(VarId a) {
  const Tensor& ta = nodes_[a].val;
  Tensor p(ta.rows, ta.cols);
  for (int i = 0; i < ta.rows; ++i) {
    double mx = ta(i, 0);
    for (int j = 1; j < ta.cols; ++j) mx = std::max(mx, ta(i, j));
    double sum = 0.0;
    for (int j = 0; j < ta.cols; ++j) {
      double e = std::exp(ta(i, j) - mx);
      p(i, j) = e;
      sum += e;
    }
    for (int j = 0; j < ta.cols; ++j) p(i, j) /= sum;
  }
  VarId out = push(std::move(p));
  nodes_[out].back = [out, a](Tape& t) {
    const Tensor& dp = t.grads_[out];
    const Tensor& pv = t.nodes_[out].val;
    Tensor& ga = t.gbuf(a);
    for (int i = 0; i < dp.rows; ++i) {
      double dot = 0.0;
      for (int j = 0; j < dp.cols; ++j) dot += dp(i, j) * pv(i, j);
      for (int j = 0; j < dp.cols; ++j)
        ga(i, j) += pv(i, j) * (dp(i, j) - dot);
    }
  };
  return out;
}

VarId Tape::layernorm_rows(VarId x, VarId gain, VarId bias) {
  const Tensor& tx = nodes_[x].val;
  const Tensor& tg = nodes_[gain].val;
  const Tensor& tb = nodes_[bias].val;
  if (tg.rows != 1 || tb.rows != 1 || tg.cols != tx.cols || tb.cols != tx.cols)
    throw std::invalid_argument("layernorm_rows: gain/bias must be 1 x cols(x)");
  const int n = tx.cols;
  Tensor y(tx.rows, n);
  for (int i = 0; i < tx.rows; ++i) {
    double mu = 0.0;
    for (int j = 0; j < n; ++j) mu += tx(i, j);
    mu /= n;
    double var = 0.0;
    for (int j = 0; j < n; ++j) {
      double d = tx(i, j) - mu;
      var += d * d;
    }
    var /= n;
    double inv = 1.0 / std::sqrt(var + kLayerNormEps);
    for (int j = 0; j < n; ++j)
      y(i, j) = (tx(i, j) - mu) * inv * tg(0, j) + tb(0, j);
  }
  VarId out = push(std::move(y));
  nodes_[out].back = [out, x, gain, bias](Tape& t) {
    const Tensor& dy = t.grads_[out];
    const Tensor& tx = t.nodes_[x].val;
    const Tensor& tg = t.nodes_[gain].val;
    Tensor& gx = t.gbuf(x);
    Tensor& gg = t.gbuf(gain);
    Tensor& gb = t.gbuf(bias);
    const int n = tx.cols;
    for (int i = 0; i < tx.rows; ++i) {
      double mu = 0.0;
      for (int j = 0; j < n; ++j) mu += tx(i, j);
      mu /= n;
      double var = 0.0;
      for (int j = 0; j < n; ++j) {
        double d = tx(i, j) - mu;
        var += d * d;
      }
      var /= n;
      double inv = 1.0 / std::sqrt(var + kLayerNormEps);
      // dxhat, plus reductions for the mean/variance terms
      double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
      for (int j = 0; j < n; ++j) {
        double xhat = (tx(i, j) - mu) * inv;
        double dxhat = dy(i, j) * tg(0, j);
        sum_dxhat += dxhat;
        sum_dxhat_xhat += dxhat * xhat;
        gg(0, j) += dy(i, j) * xhat;
        gb(0, j) += dy(i, j);
      }
      for (int j = 0; j < n; ++j) {
        double xhat = (tx(i, j) - mu) * inv;
        double dxhat = dy(i, j) * tg(0, j);
        gx(i, j) += inv * (dxhat - sum_dxhat / n - xhat * sum_dxhat_xhat / n);
      }
    }
  };
  return out;
}

VarId Tape::gelu(VarId a) {
  const Tensor& ta = nodes_[a].val;
  Tensor y = ta;
  for (double& v : y.data) {
    double u = kGeluC * (v + kGeluA * v * v * v);
    v = 0.5 * v * (1.0 + std::tanh(u));
  }
  VarId out = push(std::move(y));
  nodes_[out].back = [out, a](Tape& t) {
    const Tensor& dc = t.grads_[out];
    const Tensor& tx = t.nodes_[a].val;
    Tensor& ga = t.gbuf(a);
    for (size_t i = 0; i < dc.data.size(); ++i) {
      double xv = tx.data[i];
      double u = kGeluC * (xv + kGeluA * xv * xv * xv);
      double th = std::tanh(u);
      double sech2 = 1.0 - th * th;
      double du = kGeluC * (1.0 + 3.0 * kGeluA * xv * xv);
      double d = 0.5 * (1.0 + th) + 0.5 * xv * sech2 * du;
      ga.data[i] += dc.data[i] * d;
    }
  };
  return out;
}

VarId Tape::square(VarId a) {
  Tensor y = nodes_[a].val;
  for (double& v : y.data) v *= v;
  VarId out = push(std::move(y));
  nodes_[out].back = [out, a](Tape& t) {
    const Tensor& dc = t.grads_[out];
    const Tensor& tx = t.nodes_[a].val;
    Tensor& ga = t.gbuf(a);
    for (size_t i = 0; i < dc.data.size(); ++i)
      ga.data[i] += 2.0 * tx.data[i] * dc.data[i];
  };
  return out;
}

VarId Tape::mean_all(VarId a) {
  const Tensor& ta = nodes_[a].val;
  double m = 0.0;
  for (double v : ta.data) m += v;
  m /= static_cast<double>(ta.data.size());
  VarId out = push(Tensor(1, 1, m));
  nodes_[out].back = [out, a](Tape& t) {
    double g = t.grads_[out](0, 0) / static_cast<double>(t.nodes_[a].val.data.size());
    Tensor& ga = t.gbuf(a);
    for (double& v : ga.data) v += g;
  };
  return out;
}

VarId Tape::sum_all(VarId a) {
  const Tensor& ta = nodes_[a].val;
  double m = 0.0;
  for (double v : ta.data) m += v;
  VarId out = push(Tensor(1, 1, m));
  nodes_[out].back = [out, a](Tape& t) {
    double g = t.grads_[out](0, 0);
    Tensor& ga = t.gbuf(a);
    for (double& v : ga.data) v += g;
  };
  return out;
}

VarId Tape::gather_rows(VarId table, std::vector<int> ids) {
  const Tensor& tt = nodes_[table].val;
  Tensor y(static_cast<int>(ids.size()), tt.cols);
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= tt.rows)
      throw std::invalid_argument("gather_rows: id out of range");
    for (int j = 0; j < tt.cols; ++j) y(static_cast<int>(i), j) = tt(ids[i], j);
  }
  VarId out = push(std::move(y));
  nodes_[out].back = [out, table, ids = std::move(ids)](Tape& t) {
    const Tensor& dc = t.grads_[out];
    Tensor& gt = t.gbuf(table);
    for (size_t i = 0; i < ids.size(); ++i)
      for (int j = 0; j < dc.cols; ++j) gt(ids[i], j) += dc(static_cast<int>(i), j);
  };
  return out;
}

void Tape::backward(VarId root) {
  const Tensor& rv = nodes_[root].val;
  if (rv.rows != 1 || rv.cols != 1)
    throw std::invalid_argument("backward: root must be a scalar");
  gbuf(root)(0, 0) = 1.0;
  for (int id = root; id >= 0; --id) {
    if (!has_grad(id)) continue;
    if (nodes_[id].back) nodes_[id].back(*this);
  }
}

Tensor Tape::grad_of(VarId id) const {
  if (has_grad(id)) return grads_[id];
  return Tensor(nodes_[id].val.rows, nodes_[id].val.cols);
}

void Tape::export_param_grads(std::vector<Tensor>& out) const {
  for (const auto& [slot, id] : param_nodes_) {
    if (!has_grad(id)) continue;
    add_inplace(out[slot], grads_[id]);
  }
}

VarId linear(Tape& t, VarId x, VarId w, VarId b) {
  return t.add_rowvec(t.matmul(x, w), b);
}

}  // namespace mcdtsf::ad
