#pragma once

#include <functional>
#include <vector>

#include "mcdtsf/tensor.hpp"

namespace mcdtsf::ad {

using VarId = int;

// Reverse-mode tape over 2-D tensors. A tape is built per forward pass and
// discarded afterwards; it is not thread-safe, use one tape per worker.
class Tape {
 public:
  VarId input(Tensor v);
  // Leaf tied to an external parameter slot; gradients for all uses of the
  // slot are summed on export.
  VarId param(int slot, const Tensor& value);

  const Tensor& val(VarId id) const { return nodes_[id].val; }
  int rows(VarId id) const { return nodes_[id].val.rows; }
  int cols(VarId id) const { return nodes_[id].val.cols; }

  VarId matmul(VarId a, VarId b);
  VarId matmul_nt(VarId a, VarId b);  // a @ b^T
  VarId add(VarId a, VarId b);
  VarId sub(VarId a, VarId b);
  VarId mul(VarId a, VarId b);  // elementwise
  VarId scale(VarId a, double c);
  VarId add_rowvec(VarId a, VarId row);  // broadcast 1 x c over rows of a
  VarId concat_rows(VarId a, VarId b);
  VarId concat_cols(VarId a, VarId b);
  VarId slice_rows(VarId a, int r0, int r1);  // half-open
  VarId slice_cols(VarId a, int c0, int c1);
  VarId reshape(VarId a, int r, int c);
  VarId softmax_rows(VarId a);
  VarId layernorm_rows(VarId x, VarId gain, VarId bias);
  VarId gelu(VarId a);
  VarId square(VarId a);
  VarId mean_all(VarId a);  // 1 x 1
  VarId sum_all(VarId a);   // 1 x 1
  // Select rows of a table (embedding lookup); backward scatter-adds.
  VarId gather_rows(VarId table, std::vector<int> ids);

  // Seeds d(root)=1 (root must be 1 x 1) and sweeps the tape in reverse.
  void backward(VarId root);

  // Gradient of a node after backward(); zero tensor if it never received one.
  Tensor grad_of(VarId id) const;

  // Adds each parameter node's gradient into out[slot]. out tensors must be
  // pre-shaped; call after backward().
  void export_param_grads(std::vector<Tensor>& out) const;

  size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor val;
    std::function<void(Tape&)> back;  // empty for leaves
  };

  VarId push(Tensor v, std::function<void(Tape&)> back = {});
  // Accumulation buffer for node id, allocated on first touch.
  Tensor& gbuf(VarId id);
  bool has_grad(VarId id) const { return !grads_[id].data.empty(); }

  std::vector<Node> nodes_;
  std::vector<Tensor> grads_;
  std::vector<std::pair<int, VarId>> param_nodes_;
};

// Convenience: x @ W + b with b broadcast over rows.
VarId linear(Tape& t, VarId x, VarId w, VarId b);

}  // namespace mcdtsf::ad
