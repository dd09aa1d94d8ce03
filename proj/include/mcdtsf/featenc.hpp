#pragma once

#include <span>
#include <vector>

#include "mcdtsf/autodiff.hpp"
#include "mcdtsf/date.hpp"
#include "mcdtsf/tensor.hpp"

namespace mcdtsf::featenc {

// Calendar features normalized into [-0.5, 0.5].
//   Daily:   [day_of_week/6 - 0.5, (day_of_month-1)/30 - 0.5, (day_of_year-1)/365 - 0.5]
//   Weekly:  [(day_of_month-1)/30 - 0.5, (iso_week-1)/52 - 0.5]
//   Monthly: [month_index/11 - 0.5]   (January = 0)
// Day-of-week counts Monday as 0. Values are clamped to the stated range so
// calendar edge cases cannot leak past 0.5.
std::vector<double> encode_timestamp(const Date& d, Frequency f);

// Rows are encode_timestamp over consecutive dates starting at `start`.
Tensor timestamp_feature_matrix(const Date& start, Frequency f, int count);

// Sinusoidal embedding: entry j = sin(m / tau^(j/(dim/2))) for j < dim/2,
// then the matching cosines. dim must be even.
std::vector<double> temporal_embedding(int m, int dim = 128, double tau = 10000.0);

// Positions 0..count-1 stacked as rows.
Tensor temporal_embedding_matrix(int count, int dim = 128, double tau = 10000.0);

// Per-position linear map of [value, observed_mask] to the hidden width, plus
// the projected position embedding and the projected diffusion-step embedding
// broadcast over positions. `positions` ((H+F) x e) and `step_embed` (1 x e)
// are precomputed temporal_embedding constants; the VarIds are parameter
// nodes already on the tape (value_w: 2 x d, value_b: 1 x d, pos_w/step_w:
// e x d).
ad::VarId embed_series(ad::Tape& tape, std::span<const double> values,
                       std::span<const double> observed_mask,
                       const Tensor& positions, const Tensor& step_embed,
                       ad::VarId value_w, ad::VarId value_b, ad::VarId pos_w,
                       ad::VarId step_w);

}  // namespace mcdtsf::featenc
