#include "mcdtsf/textcond.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "nlohmann/json.hpp"

namespace mcdtsf::textcond {

using nlohmann::json;

std::vector<TextDocument> load_text_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open text file: " + path);
  std::vector<TextDocument> docs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    TextDocument d;
    d.start_date = parse_date(j.at("start_date").get<std::string>());
    d.end_date = parse_date(j.at("end_date").get<std::string>());
    d.report = j.at("report").get<std::string>();
    if (compare_dates(d.start_date, d.end_date) > 0)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": start_date after end_date");
    if (d.report.empty())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty report");
    docs.push_back(std::move(d));
  }
  std::stable_sort(docs.begin(), docs.end(), [](const auto& a, const auto& b) {
    return compare_dates(a.start_date, b.start_date) < 0;
  });
  return docs;
}

std::string assemble_prompt(const std::vector<TextDocument>& docs,
                            int history_length,
                            const std::string& sampling_period,
                            const std::string& target_variable,
                            int prediction_length) {
  std::ostringstream os;
  os << "Below is historical reporting information over the past "
     << history_length << " " << sampling_period << "s concerning the "
     << target_variable << ". Based on these reports, predict the potential "
     << "trends and anomalies of the " << target_variable << " for the next "
     << prediction_length << " " << sampling_period << "s.";
  for (const auto& d : docs) {
    std::string report = d.report;
    while (!report.empty() && std::isspace(static_cast<unsigned char>(report.back())))
      report.pop_back();
    os << "\n" << to_iso(d.start_date) << " to " << to_iso(d.end_date) << ": "
       << report;
    if (report.empty() || report.back() != '.') os << ".";
  }
  return os.str();
}

std::string attach_text(const std::vector<TextDocument>& docs,
                        const Date& history_end, Frequency freq,
                        int history_length, const std::string& sampling_period,
                        const std::string& target_variable,
                        int prediction_length, int intervals) {
  // The covered span is the `intervals` most recent sampling intervals: from
  // the date `intervals-1` steps back through the day before the next sample.
  Date span_start = add_step(history_end, freq, -(intervals - 1));
  Date span_end = add_days(add_step(history_end, freq, 1), -1);
  std::vector<TextDocument> selected;
  for (const auto& d : docs) {
    bool overlaps = compare_dates(d.start_date, span_end) <= 0 &&
                    compare_dates(d.end_date, span_start) >= 0;
    if (overlaps) selected.push_back(d);
  }
  std::stable_sort(selected.begin(), selected.end(),
                   [](const auto& a, const auto& b) {
                     return compare_dates(a.start_date, b.start_date) < 0;
                   });
  return assemble_prompt(selected, history_length, sampling_period,
                         target_variable, prediction_length);
}

ad::VarId EmbeddingProvider::embed_on_tape(
    ad::Tape& tape, const std::function<ad::VarId(int)>&,
    const std::string& text, const std::string& key) const {
  return tape.input(embed_tokens(text, key));
}

TextContext embed_text(const EmbeddingProvider& provider,
                       const std::string& text, const std::string& key) {
  if (text.empty()) return TextContext{Tensor(), true};
  return TextContext{provider.embed_tokens(text, key), false};
}

// ---------------------------------------------------------------------------
// HashTokenProvider

namespace {
uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}
}  // namespace

void HashTokenProvider::register_params(ParamStore& store) {
  table_slot_ = store.add("text/hash_table", vocab_, dim_, Init::Glorot);
  store_ = &store;
}

std::vector<int> HashTokenProvider::token_ids(const std::string& text) const {
  // Header block first, then one report line per '\n'. When over the cap,
  // the oldest report lines are dropped first; the header is kept.
  std::vector<std::vector<int>> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    std::vector<int> ids;
    ids.reserve(toks.size());
    for (const auto& t : toks)
      ids.push_back(static_cast<int>(fnv1a(t) % static_cast<uint64_t>(vocab_)));
    lines.push_back(std::move(ids));
  }
  if (lines.empty()) return {};
  size_t total = 0;
  for (const auto& l : lines) total += l.size();
  size_t cap = static_cast<size_t>(max_tokens_);
  size_t first = 1;  // header line index 0 is always kept
  while (total > cap && first < lines.size()) {
    total -= lines[first].size();
    lines[first].clear();
    ++first;
  }
  std::vector<int> out;
  out.reserve(std::min(total, cap));
  for (const auto& l : lines)
    for (int id : l) {
      if (out.size() >= cap) return out;
      out.push_back(id);
    }
  return out;
}

Tensor HashTokenProvider::embed_tokens(const std::string& text,
                                       const std::string&) const {
  if (!store_ || table_slot_ < 0)
    throw std::logic_error("hash provider not registered with a model");
  auto ids = token_ids(text);
  if (ids.empty()) throw std::invalid_argument("embed_tokens: no tokens in text");
  const Tensor& table = (*store_)[table_slot_].value;
  Tensor out(static_cast<int>(ids.size()), dim_);
  for (size_t i = 0; i < ids.size(); ++i)
    for (int j = 0; j < dim_; ++j) out(static_cast<int>(i), j) = table(ids[i], j);
  return out;
}

ad::VarId HashTokenProvider::embed_on_tape(
    ad::Tape& tape, const std::function<ad::VarId(int)>& param_node,
    const std::string& text, const std::string&) const {
  auto ids = token_ids(text);
  if (ids.empty()) throw std::invalid_argument("embed_on_tape: no tokens in text");
  return tape.gather_rows(param_node(table_slot_), std::move(ids));
}

// ---------------------------------------------------------------------------
// PrecomputedProvider

PrecomputedProvider::PrecomputedProvider(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open embedding file: " + csv_path);
  std::string header;
  if (!std::getline(in, header))
    throw std::runtime_error("empty embedding file: " + csv_path);
  int n_cols = 1 + static_cast<int>(std::count(header.begin(), header.end(), ','));
  dim_ = n_cols - 2;
  if (dim_ < 1 || header.rfind("id,token_index,", 0) != 0)
    throw std::runtime_error("embedding file header must be id,token_index,e0,...: " +
                             csv_path);
  std::map<std::string, std::vector<std::pair<int, std::vector<double>>>> rows;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string id, tok, cell;
    std::getline(ls, id, ',');
    std::getline(ls, tok, ',');
    std::vector<double> vals;
    vals.reserve(dim_);
    while (std::getline(ls, cell, ',')) vals.push_back(std::stod(cell));
    if (static_cast<int>(vals.size()) != dim_)
      throw std::runtime_error(csv_path + ":" + std::to_string(lineno) +
                               ": wrong embedding width");
    rows[id].emplace_back(std::stoi(tok), std::move(vals));
  }
  for (auto& [id, toks] : rows) {
    std::sort(toks.begin(), toks.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Tensor t(static_cast<int>(toks.size()), dim_);
    for (size_t i = 0; i < toks.size(); ++i)
      for (int j = 0; j < dim_; ++j) t(static_cast<int>(i), j) = toks[i].second[j];
    table_[id] = std::move(t);
  }
  if (table_.find("__null__") == table_.end())
    throw std::runtime_error("embedding file lacks the reserved __null__ id: " +
                             csv_path);
}

Tensor PrecomputedProvider::embed_tokens(const std::string& text,
                                         const std::string& key) const {
  const std::string& id = key.empty() ? text : key;
  auto it = table_.find(id);
  if (it == table_.end()) throw std::out_of_range("unknown document id: " + id);
  return it->second;
}

bool PrecomputedProvider::null_init(Tensor* out) const {
  const Tensor& t = table_.at("__null__");
  *out = Tensor(1, dim_);
  for (int j = 0; j < dim_; ++j) (*out)(0, j) = t(0, j);
  return true;
}

}  // namespace mcdtsf::textcond
