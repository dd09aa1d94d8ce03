#include "mcdtsf/head.hpp"

#include <cmath>
#include <stdexcept>

namespace mcdtsf::head {

ad::VarId layer_pool(ad::Tape& tape, const std::vector<ad::VarId>& layers) {
  if (layers.empty()) throw std::invalid_argument("layer_pool: empty layer list");
  ad::VarId sum = layers[0];
  for (size_t l = 1; l < layers.size(); ++l) sum = tape.add(sum, layers[l]);
  return tape.scale(sum, 1.0 / std::sqrt(static_cast<double>(layers.size())));
}

std::pair<ad::VarId, ad::VarId> predict_head(ad::Tape& tape,
                                             const fusion::ParamNodeFn& pn,
                                             const ConvHeadSlots& slots,
                                             ad::VarId avg, int history,
                                             int future) {
  if (tape.rows(avg) != history + future)
    throw std::invalid_argument("predict_head: expected H+F positions");
  ad::VarId hidden = tape.gelu(ad::linear(tape, avg, pn(slots.w1), pn(slots.b1)));
  ad::VarId out = ad::linear(tape, hidden, pn(slots.w2), pn(slots.b2));  // (H+F) x 1
  return {tape.slice_rows(out, 0, history),
          tape.slice_rows(out, history, history + future)};
}

ad::VarId fusion_weights(ad::Tape& tape, const fusion::ParamNodeFn& pn,
                         const FusionMlpSlots& slots, ad::VarId x_hat_u,
                         ad::VarId x, int history, int future,
                         bool raw_logits) {
  if (tape.rows(x_hat_u) != history || tape.rows(x) != history ||
      tape.cols(x_hat_u) != 1 || tape.cols(x) != 1)
    throw std::invalid_argument("fusion_weights: residual inputs must be H x 1");
  ad::VarId residual = tape.reshape(tape.sub(x_hat_u, x), 1, history);
  ad::VarId hidden =
      tape.gelu(ad::linear(tape, residual, pn(slots.w1), pn(slots.b1)));
  ad::VarId logits = ad::linear(tape, hidden, pn(slots.w2), pn(slots.b2));
  logits = tape.reshape(logits, future, 2);
  return raw_logits ? logits : tape.softmax_rows(logits);
}

ad::VarId fuse_predictions(ad::Tape& tape, ad::VarId y_s, ad::VarId y_u,
                           ad::VarId weights) {
  int f = tape.rows(weights);
  if (tape.cols(weights) != 2 || tape.rows(y_s) != f || tape.rows(y_u) != f ||
      tape.cols(y_s) != 1 || tape.cols(y_u) != 1)
    throw std::invalid_argument("fuse_predictions: shape mismatch");
  ad::VarId ws = tape.slice_cols(weights, 0, 1);
  ad::VarId wu = tape.slice_cols(weights, 1, 2);
  return tape.add(tape.mul(ws, y_s), tape.mul(wu, y_u));
}

}  // namespace mcdtsf::head
