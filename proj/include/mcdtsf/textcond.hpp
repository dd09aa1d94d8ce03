#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mcdtsf/autodiff.hpp"
#include "mcdtsf/date.hpp"
#include "mcdtsf/nn.hpp"
#include "mcdtsf/tensor.hpp"

namespace mcdtsf::textcond {

struct TextDocument {
  Date start_date;
  Date end_date;
  std::string report;
};

// JSON-lines, one object per line: {"start_date": "...", "end_date": "...",
// "report": "..."} with ISO dates. Throws on malformed rows.
std::vector<TextDocument> load_text_jsonl(const std::string& path);

// Renders the report-summary prompt: a header naming the history span, the
// target variable and the requested horizon, followed by one
// "<start> to <end>: <report>." line per document in the given order.
std::string assemble_prompt(const std::vector<TextDocument>& docs,
                            int history_length,
                            const std::string& sampling_period,
                            const std::string& target_variable,
                            int prediction_length);

// Selects the documents whose closed date ranges intersect the 36 most recent
// intervals before (and including) the history end date, then assembles the
// prompt. An empty doc list yields the header-only prompt.
std::string attach_text(const std::vector<TextDocument>& docs,
                        const Date& history_end, Frequency freq,
                        int history_length, const std::string& sampling_period,
                        const std::string& target_variable,
                        int prediction_length, int intervals = 36);

// Token-level embedding sequence; is_null marks the unconditional context,
// whose single learned vector lives with the model parameters.
struct TextContext {
  Tensor emb;  // n_tokens x d_text (unused when is_null)
  bool is_null = false;
  int n_tokens() const { return is_null ? 1 : emb.rows; }
};

// Text-embedding source. A trainable provider registers its parameters with
// the owning model's store; a provider instance therefore binds to one model.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual int dim() const = 0;
  virtual bool trainable() const { return false; }
  virtual void register_params(ParamStore&) {}
  // Embedding of non-empty text under the provider's current state. `key`
  // identifies the document for table-based providers.
  virtual Tensor embed_tokens(const std::string& text,
                              const std::string& key) const = 0;
  // Graph hook used inside the denoiser; param_node maps a store slot to its
  // node on the tape. Default: constant embedding, no gradient.
  virtual ad::VarId embed_on_tape(
      ad::Tape& tape, const std::function<ad::VarId(int)>& param_node,
      const std::string& text, const std::string& key) const;
  // Optional provider-supplied initial value for the learned null context.
  virtual bool null_init(Tensor*) const { return false; }
};

// Returns the null context for empty text, otherwise the provider's token
// sequence.
TextContext embed_text(const EmbeddingProvider& provider,
                       const std::string& text, const std::string& key = "");

// Deterministic bag-of-hashed-tokens provider: each whitespace/punctuation
// delimited token selects one row of a learned vocab x dim table. Contexts are
// capped at max_tokens, dropping the oldest report lines first.
class HashTokenProvider : public EmbeddingProvider {
 public:
  HashTokenProvider(int vocab, int dim, int max_tokens = 512)
      : vocab_(vocab), dim_(dim), max_tokens_(max_tokens) {}

  int dim() const override { return dim_; }
  bool trainable() const override { return true; }
  void register_params(ParamStore& store) override;
  Tensor embed_tokens(const std::string& text, const std::string& key) const override;
  ad::VarId embed_on_tape(ad::Tape& tape,
                          const std::function<ad::VarId(int)>& param_node,
                          const std::string& text,
                          const std::string& key) const override;

  std::vector<int> token_ids(const std::string& text) const;
  int vocab() const { return vocab_; }
  int table_slot() const { return table_slot_; }

 private:
  int vocab_, dim_, max_tokens_;
  int table_slot_ = -1;
  const ParamStore* store_ = nullptr;
};

// Embeddings produced offline by an external encoder, keyed by document id.
// CSV columns: id, token_index, e0..e{dim-1}; the reserved id "__null__" must
// be present and provides the initial null-context vector.
class PrecomputedProvider : public EmbeddingProvider {
 public:
  explicit PrecomputedProvider(const std::string& csv_path);

  int dim() const override { return dim_; }
  Tensor embed_tokens(const std::string& text, const std::string& key) const override;
  bool null_init(Tensor* out) const override;
  bool has(const std::string& id) const { return table_.count(id) > 0; }

 private:
  int dim_ = 0;
  std::map<std::string, Tensor> table_;
};

}  // namespace mcdtsf::textcond
