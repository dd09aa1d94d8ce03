#include "mcdtsf/fusion.hpp"

#include <cmath>
#include <stdexcept>

namespace mcdtsf::fusion {

FusionOrder parse_fusion_order(const std::string& name) {
  if (name == "taa-first" || name == "TAA-first") return FusionOrder::TaaFirst;
  if (name == "ttf-first" || name == "TTF-first") return FusionOrder::TtfFirst;
  throw std::invalid_argument("unknown fusion order: " + name);
}

std::string fusion_order_name(FusionOrder o) {
  return o == FusionOrder::TaaFirst ? "taa-first" : "ttf-first";
}

ad::VarId multihead_attention(ad::Tape& tape, const ParamNodeFn& pn,
                              const MhaSlots& slots, ad::VarId q_in,
                              ad::VarId kv_in, int heads, AttnSink* sink,
                              const char* kind, int layer) {
  ad::VarId q = ad::linear(tape, q_in, pn(slots.wq), pn(slots.bq));
  ad::VarId k = ad::linear(tape, kv_in, pn(slots.wk), pn(slots.bk));
  ad::VarId v = ad::linear(tape, kv_in, pn(slots.wv), pn(slots.bv));
  const int d = tape.cols(q);
  if (d % heads != 0)
    throw std::invalid_argument("attention width not divisible by head count");
  const int dh = d / heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
  ad::VarId merged = -1;
  for (int h = 0; h < heads; ++h) {
    ad::VarId qh = tape.slice_cols(q, h * dh, (h + 1) * dh);
    ad::VarId kh = tape.slice_cols(k, h * dh, (h + 1) * dh);
    ad::VarId vh = tape.slice_cols(v, h * dh, (h + 1) * dh);
    ad::VarId scores = tape.scale(tape.matmul_nt(qh, kh), inv_sqrt);
    ad::VarId probs = tape.softmax_rows(scores);
    if (sink) sink->record(kind, layer, h, tape.val(probs));
    ad::VarId oh = tape.matmul(probs, vh);
    merged = (merged < 0) ? oh : tape.concat_cols(merged, oh);
  }
  return ad::linear(tape, merged, pn(slots.wo), pn(slots.bo));
}

std::pair<ad::VarId, ad::VarId> taa_layer(ad::Tape& tape, const ParamNodeFn& pn,
                                          const LayerSlots& slots,
                                          ad::VarId s_prev, ad::VarId u_prev,
                                          double lambda, int heads,
                                          AttnSink* sink, int layer) {
  if (lambda < 0.0) throw std::invalid_argument("taa_layer: lambda must be >= 0");
  const int n = tape.rows(s_prev);
  ad::VarId joint = s_prev;
  if (u_prev >= 0) {
    if (tape.rows(u_prev) != n || tape.cols(u_prev) != tape.cols(s_prev))
      throw std::invalid_argument("taa_layer: stream shape mismatch");
    joint = tape.concat_rows(s_prev, tape.scale(u_prev, lambda));
  }
  ad::VarId normed = tape.layernorm_rows(joint, pn(slots.ln1_g), pn(slots.ln1_b));
  ad::VarId attn =
      multihead_attention(tape, pn, slots.taa, normed, normed, heads, sink, "taa", layer);
  ad::VarId mixed = tape.add(joint, attn);
  if (u_prev < 0) return {mixed, -1};
  return {tape.slice_rows(mixed, 0, n), tape.slice_rows(mixed, n, 2 * n)};
}

ad::VarId ffn_block(ad::Tape& tape, const ParamNodeFn& pn,
                    const LayerSlots& slots, ad::VarId s) {
  ad::VarId normed = tape.layernorm_rows(s, pn(slots.ln3_g), pn(slots.ln3_b));
  ad::VarId hidden =
      tape.gelu(ad::linear(tape, normed, pn(slots.ffn_w1), pn(slots.ffn_b1)));
  ad::VarId out = ad::linear(tape, hidden, pn(slots.ffn_w2), pn(slots.ffn_b2));
  return tape.add(s, out);
}

ad::VarId ttf_layer(ad::Tape& tape, const ParamNodeFn& pn,
                    const LayerSlots& slots, ad::VarId s_enh, ad::VarId text,
                    int heads, AttnSink* sink, int layer) {
  if (tape.rows(text) < 1)
    throw std::invalid_argument("ttf_layer: text context needs >= 1 token");
  ad::VarId normed = tape.layernorm_rows(s_enh, pn(slots.ln2_g), pn(slots.ln2_b));
  ad::VarId attn =
      multihead_attention(tape, pn, slots.ttf, normed, text, heads, sink, "ttf", layer);
  ad::VarId mixed = tape.add(s_enh, attn);
  return ffn_block(tape, pn, slots, mixed);
}

FusionState fusion_stack(ad::Tape& tape, const ParamNodeFn& pn,
                         const std::vector<LayerSlots>& slots, ad::VarId s0,
                         ad::VarId u0, ad::VarId text,
                         const FusionConfig& config, AttnSink* sink) {
  if (config.layers < 1) throw std::invalid_argument("fusion_stack: L >= 1");
  if (static_cast<int>(slots.size()) != config.layers)
    throw std::invalid_argument("fusion_stack: slot count != layer count");
  if (config.use_ttf && text < 0)
    throw std::invalid_argument("fusion_stack: text context required");
  FusionState state;
  ad::VarId s = s0;
  ad::VarId u = config.use_taa ? u0 : -1;
  for (int l = 0; l < config.layers; ++l) {
    const LayerSlots& ls = slots[l];
    if (config.order == FusionOrder::TaaFirst) {
      auto [s_enh, u_next] =
          taa_layer(tape, pn, ls, s, u, config.lambda, config.heads, sink, l);
      s = config.use_ttf ? ttf_layer(tape, pn, ls, s_enh, text, config.heads, sink, l)
                         : ffn_block(tape, pn, ls, s_enh);
      u = u_next;
    } else {
      ad::VarId s_text = config.use_ttf
                             ? ttf_layer(tape, pn, ls, s, text, config.heads, sink, l)
                             : ffn_block(tape, pn, ls, s);
      auto [s_next, u_next] =
          taa_layer(tape, pn, ls, s_text, u, config.lambda, config.heads, sink, l);
      s = s_next;
      u = u_next;
    }
    state.s_layers.push_back(s);
    if (u >= 0) state.u_layers.push_back(u);
  }
  return state;
}

}  // namespace mcdtsf::fusion
