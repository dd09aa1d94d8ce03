#include "mcdtsf/featenc.hpp"

#include <cmath>
#include <stdexcept>

namespace mcdtsf::featenc {

namespace {
double clamp_half(double v) { return std::min(0.5, std::max(-0.5, v)); }
}  // namespace

std::vector<double> encode_timestamp(const Date& d, Frequency f) {
  if (!is_valid_date(d)) throw std::invalid_argument("invalid date");
  switch (f) {
    case Frequency::Daily: {
      double dow = weekday_mon0(d) / 6.0 - 0.5;
      double dom = (d.day - 1) / 30.0 - 0.5;
      double doy = (day_of_year(d) - 1) / 365.0 - 0.5;
      return {clamp_half(dow), clamp_half(dom), clamp_half(doy)};
    }
    case Frequency::Weekly: {
      double dom = (d.day - 1) / 30.0 - 0.5;
      double woy = (iso_week(d) - 1) / 52.0 - 0.5;
      return {clamp_half(dom), clamp_half(woy)};
    }
    case Frequency::Monthly: {
      double moy = (d.month - 1) / 11.0 - 0.5;
      return {clamp_half(moy)};
    }
  }
  return {};
}

Tensor timestamp_feature_matrix(const Date& start, Frequency f, int count) {
  int dim = timestamp_feature_dim(f);
  Tensor out(count, dim);
  for (int i = 0; i < count; ++i) {
    auto feat = encode_timestamp(add_step(start, f, i), f);
    for (int j = 0; j < dim; ++j) out(i, j) = feat[j];
  }
  return out;
}

std::vector<double> temporal_embedding(int m, int dim, double tau) {
  if (dim <= 0 || dim % 2 != 0)
    throw std::invalid_argument("temporal_embedding: dim must be even");
  const int half = dim / 2;
  std::vector<double> out(dim);
  for (int j = 0; j < half; ++j) {
    double freq = std::pow(tau, static_cast<double>(j) / half);
    out[j] = std::sin(m / freq);
    out[half + j] = std::cos(m / freq);
  }
  return out;
}

Tensor temporal_embedding_matrix(int count, int dim, double tau) {
  Tensor out(count, dim);
  for (int m = 0; m < count; ++m) {
    auto e = temporal_embedding(m, dim, tau);
    for (int j = 0; j < dim; ++j) out(m, j) = e[j];
  }
  return out;
}

ad::VarId embed_series(ad::Tape& tape, std::span<const double> values,
                       std::span<const double> observed_mask,
                       const Tensor& positions, const Tensor& step_embed,
                       ad::VarId value_w, ad::VarId value_b, ad::VarId pos_w,
                       ad::VarId step_w) {
  if (values.size() != observed_mask.size())
    throw std::invalid_argument("embed_series: mask must be shaped like values");
  if (positions.rows != static_cast<int>(values.size()))
    throw std::invalid_argument("embed_series: position matrix row mismatch");
  Tensor in(static_cast<int>(values.size()), 2);
  for (size_t i = 0; i < values.size(); ++i) {
    in(static_cast<int>(i), 0) = values[i];
    in(static_cast<int>(i), 1) = observed_mask[i];
  }
  ad::VarId x = tape.input(std::move(in));
  ad::VarId s = ad::linear(tape, x, value_w, value_b);
  ad::VarId pos = tape.matmul(tape.input(positions), pos_w);
  s = tape.add(s, pos);
  ad::VarId step = tape.matmul(tape.input(step_embed), step_w);  // 1 x d
  return tape.add_rowvec(s, step);
}

}  // namespace mcdtsf::featenc
