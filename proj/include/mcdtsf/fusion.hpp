#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mcdtsf/autodiff.hpp"

namespace mcdtsf::fusion {

enum class FusionOrder { TaaFirst, TtfFirst };

FusionOrder parse_fusion_order(const std::string& name);
std::string fusion_order_name(FusionOrder o);

// Attention probabilities captured during a forward pass, for debugging and
// the row-stochasticity checks.
struct AttentionRecord {
  std::string kind;  // "taa" or "ttf"
  int layer = 0;
  int head = 0;
  Tensor probs;  // queries x keys, rows sum to 1
};

struct AttnSink {
  std::vector<AttentionRecord> records;
  void record(const char* kind, int layer, int head, const Tensor& p) {
    records.push_back({kind, layer, head, p});
  }
};

// Maps a parameter slot to its node on the active tape (memoized by the
// caller so repeated uses share one node).
using ParamNodeFn = std::function<ad::VarId(int)>;

struct MhaSlots {
  int wq = -1, bq = -1;
  int wk = -1, bk = -1;
  int wv = -1, bv = -1;
  int wo = -1, bo = -1;
};

struct LayerSlots {
  MhaSlots taa;
  int ln1_g = -1, ln1_b = -1;
  MhaSlots ttf;
  int ln2_g = -1, ln2_b = -1;
  int ffn_w1 = -1, ffn_b1 = -1, ffn_w2 = -1, ffn_b2 = -1;
  int ln3_g = -1, ln3_b = -1;
};

struct FusionConfig {
  int layers = 6;
  int hidden = 64;
  int heads = 8;
  double lambda = 1.0;
  bool use_taa = true;
  bool use_ttf = true;
  FusionOrder order = FusionOrder::TaaFirst;
};

ad::VarId multihead_attention(ad::Tape& tape, const ParamNodeFn& pn,
                              const MhaSlots& slots, ad::VarId q_in,
                              ad::VarId kv_in, int heads,
                              AttnSink* sink = nullptr,
                              const char* kind = "attn", int layer = 0);

// Pre-norm self-attention over the token-axis stack [s; lambda*u] with a
// residual connection, split back into the two streams. Pass u_prev = -1 to
// run plain self-attention over the series stream only (timestamps omitted).
std::pair<ad::VarId, ad::VarId> taa_layer(ad::Tape& tape, const ParamNodeFn& pn,
                                          const LayerSlots& slots,
                                          ad::VarId s_prev, ad::VarId u_prev,
                                          double lambda, int heads,
                                          AttnSink* sink = nullptr,
                                          int layer = 0);

// Pre-norm cross-attention (series queries, text keys/values) with residual,
// then the position-wise feed-forward block.
ad::VarId ttf_layer(ad::Tape& tape, const ParamNodeFn& pn,
                    const LayerSlots& slots, ad::VarId s_enh, ad::VarId text,
                    int heads, AttnSink* sink = nullptr, int layer = 0);

// Feed-forward block alone; used by variants that skip the cross-attention.
ad::VarId ffn_block(ad::Tape& tape, const ParamNodeFn& pn,
                    const LayerSlots& slots, ad::VarId s);

struct FusionState {
  std::vector<ad::VarId> s_layers;
  std::vector<ad::VarId> u_layers;  // empty when timestamps are omitted
};

// Iterates the configured number of layers, collecting every per-layer series
// and timestamp representation for the output pooling. u0/text may be -1 when
// the matching modality is disabled by the variant.
FusionState fusion_stack(ad::Tape& tape, const ParamNodeFn& pn,
                         const std::vector<LayerSlots>& slots, ad::VarId s0,
                         ad::VarId u0, ad::VarId text,
                         const FusionConfig& config,
                         AttnSink* sink = nullptr);

}  // namespace mcdtsf::fusion
