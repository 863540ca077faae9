#pragma once

#include <torch/torch.h>

#include "dsdr/common.hpp"
#include "dsdr/data.hpp"
#include "dsdr/networks.hpp"

namespace dsdr::train {

// Every intermediate of the two-stage graph. Stage 1 swaps styles between
// the streams (U carries A's semantics with B's style, Q the reverse);
// stage 2 re-encodes U and Q with the same networks and swaps back.
struct TwoStageArtifacts {
  // stage 1
  nets::StyleCode a_style, b_style;
  nets::SemanticMap a_sem, b_sem;
  nets::FeatureVector a_feat, b_feat;
  torch::Tensor a_bar, b_bar, u, q;
  // stage 2
  nets::StyleCode u_style, q_style;
  nets::SemanticMap u_sem, q_sem;
  nets::FeatureVector u_feat, q_feat;
  torch::Tensor a_prime, b_prime;
  // predictions over the four feature vectors
  nets::PredictiveDistribution a_pred, b_pred, u_pred, q_pred;
};

namespace detail {

inline void check_finite(const torch::Tensor& t, const char* name) {
  if (!t.isfinite().all().item<bool>())
    throw NumericalError(std::string("forward_two_stage: non-finite artifact '") + name + "'");
}

}  // namespace detail

// Runs the full graph. Model must provide extract_style / encode /
// generate / classify with the Networks signatures; tests substitute toy
// models to verify the wiring independently of the learned components.
//
// Dual-stream calls are batched (A and B stacked) which keeps the math
// identical per row while halving dispatch overhead.
template <typename Model>
TwoStageArtifacts forward_two_stage(Model& model, const data::PairBatch& batch) {
  if (!batch.images_a.sizes().equals(batch.images_b.sizes()))
    throw ShapeError("forward_two_stage: images_a and images_b must share a shape");
  const int64_t b = batch.images_a.size(0);

  TwoStageArtifacts art;
  auto ab = torch::cat({batch.images_a, batch.images_b});

  // stage 1: disentangle
  auto style_ab = model.extract_style(ab);
  art.a_style = {style_ab.mean.narrow(0, 0, b), style_ab.std.narrow(0, 0, b)};
  art.b_style = {style_ab.mean.narrow(0, b, b), style_ab.std.narrow(0, b, b)};
  auto [sem_ab, feat_ab] = model.encode(ab);
  art.a_sem = {sem_ab.values.narrow(0, 0, b)};
  art.b_sem = {sem_ab.values.narrow(0, b, b)};
  art.a_feat = {feat_ab.values.narrow(0, 0, b)};
  art.b_feat = {feat_ab.values.narrow(0, b, b)};

  // stage 1: reconstruct self (A-bar, B-bar) and swapped (U, Q)
  nets::SemanticMap gen_sem{torch::cat(
      {art.a_sem.values, art.b_sem.values, art.a_sem.values, art.b_sem.values})};
  nets::StyleCode gen_style{
      torch::cat({art.a_style.mean, art.b_style.mean, art.b_style.mean, art.a_style.mean}),
      torch::cat({art.a_style.std, art.b_style.std, art.b_style.std, art.a_style.std})};
  auto gen_out = model.generate(gen_sem, gen_style);
  art.a_bar = gen_out.narrow(0, 0, b);
  art.b_bar = gen_out.narrow(0, b, b);
  art.u = gen_out.narrow(0, 2 * b, b);
  art.q = gen_out.narrow(0, 3 * b, b);
  detail::check_finite(art.a_bar, "A-bar");
  detail::check_finite(art.b_bar, "B-bar");
  detail::check_finite(art.u, "U");
  detail::check_finite(art.q, "Q");

  // stage 2: re-disentangle the swapped images
  auto uq = torch::cat({art.u, art.q});
  auto style_uq = model.extract_style(uq);
  art.u_style = {style_uq.mean.narrow(0, 0, b), style_uq.std.narrow(0, 0, b)};
  art.q_style = {style_uq.mean.narrow(0, b, b), style_uq.std.narrow(0, b, b)};
  auto [sem_uq, feat_uq] = model.encode(uq);
  art.u_sem = {sem_uq.values.narrow(0, 0, b)};
  art.q_sem = {sem_uq.values.narrow(0, b, b)};
  art.u_feat = {feat_uq.values.narrow(0, 0, b)};
  art.q_feat = {feat_uq.values.narrow(0, b, b)};

  // stage 2: swap back — A' = G(U_sem, Q_style), B' = G(Q_sem, U_style)
  nets::SemanticMap cyc_sem{torch::cat({art.u_sem.values, art.q_sem.values})};
  nets::StyleCode cyc_style{torch::cat({art.q_style.mean, art.u_style.mean}),
                            torch::cat({art.q_style.std, art.u_style.std})};
  auto cyc_out = model.generate(cyc_sem, cyc_style);
  art.a_prime = cyc_out.narrow(0, 0, b);
  art.b_prime = cyc_out.narrow(0, b, b);
  detail::check_finite(art.a_prime, "A-prime");
  detail::check_finite(art.b_prime, "B-prime");

  // predictions for all four streams
  nets::FeatureVector all_feat{torch::cat(
      {art.a_feat.values, art.b_feat.values, art.u_feat.values, art.q_feat.values})};
  auto preds = model.classify(all_feat);
  detail::check_finite(preds.logits, "predictions");
  art.a_pred = {preds.logits.narrow(0, 0, b), preds.probabilities.narrow(0, 0, b)};
  art.b_pred = {preds.logits.narrow(0, b, b), preds.probabilities.narrow(0, b, b)};
  art.u_pred = {preds.logits.narrow(0, 2 * b, b), preds.probabilities.narrow(0, 2 * b, b)};
  art.q_pred = {preds.logits.narrow(0, 3 * b, b), preds.probabilities.narrow(0, 3 * b, b)};
  return art;
}

}  // namespace dsdr::train
