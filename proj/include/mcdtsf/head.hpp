#pragma once

#include <vector>

#include "mcdtsf/autodiff.hpp"
#include "mcdtsf/fusion.hpp"

namespace mcdtsf::head {

struct ConvHeadSlots {
  int w1 = -1, b1 = -1;  // d x d
  int w2 = -1, b2 = -1;  // d x 1
};

struct FusionMlpSlots {
  int w1 = -1, b1 = -1;  // H x 2H
  int w2 = -1, b2 = -1;  // 2H x 2F
};

// (1/sqrt(L)) * sum of the per-layer representations.
ad::VarId layer_pool(ad::Tape& tape, const std::vector<ad::VarId>& layers);

// Two-stage per-position (1x1 convolution) head mapping width d to a scalar,
// split into the history part (first H rows) and the future part (last F).
std::pair<ad::VarId, ad::VarId> predict_head(ad::Tape& tape,
                                             const fusion::ParamNodeFn& pn,
                                             const ConvHeadSlots& slots,
                                             ad::VarId avg, int history,
                                             int future);

// MLP over the history residual (x_hat_u - x), emitting one weight pair per
// future step. Rows are softmax-normalized into convex pairs unless
// raw_logits is set.
ad::VarId fusion_weights(ad::Tape& tape, const fusion::ParamNodeFn& pn,
                         const FusionMlpSlots& slots, ad::VarId x_hat_u,
                         ad::VarId x, int history, int future,
                         bool raw_logits = false);

// Per-step blend: out[f] = W[f,0]*y_s[f] + W[f,1]*y_u[f].
ad::VarId fuse_predictions(ad::Tape& tape, ad::VarId y_s, ad::VarId y_u,
                           ad::VarId weights);

}  // namespace mcdtsf::head
