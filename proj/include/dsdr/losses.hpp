#pragma once

#include <torch/torch.h>

#include "dsdr/networks.hpp"

namespace dsdr::losses {

using nets::FeatureVector;
using nets::PredictiveDistribution;

// Weights for intra, inter, recon, cycle, adv, kl, ce in that order.
struct LossWeights {
  double intra = 1.0;
  double inter = 1.0;
  double recon = 1.0;
  double cycle = 1.0;
  double adv = 1.0;
  double kl = 8.0;
  double ce = 0.5;

  void validate() const;
  bool operator==(const LossWeights&) const = default;
};

// Per-step scalar view of every loss component. adv is split into the
// discriminator-side and generator-side objectives.
struct LossReport {
  double intra = 0, inter = 0, recon = 0, cycle = 0;
  double adv_d = 0, adv_g = 0, kl = 0, ce = 0, total = 0;
};

// mean(1 - cos(a_f, u_f)) + mean(1 - cos(b_f, q_f)); each term in [0, 2]
torch::Tensor intra_instance_loss(const FeatureVector& a_f, const FeatureVector& u_f,
                                  const FeatureVector& b_f, const FeatureVector& q_f);

// mean |cos(a_f, b_f) - cos(u_f, q_f)|, in [0, 2]
torch::Tensor inter_instance_loss(const FeatureVector& a_f, const FeatureVector& b_f,
                                  const FeatureVector& u_f, const FeatureVector& q_f);

// mae(a, a_bar) + mae(b, b_bar), mean over all elements
torch::Tensor reconstruction_loss(const torch::Tensor& a, const torch::Tensor& a_bar,
                                  const torch::Tensor& b, const torch::Tensor& b_bar);

// same contract applied to the second-stage reconstructions
torch::Tensor cycle_loss(const torch::Tensor& a, const torch::Tensor& a_prime,
                         const torch::Tensor& b, const torch::Tensor& b_prime);

// standard two-sided objective: d_loss trains the discriminator on real
// {A^f, B^f} vs synthesized {U^f, Q^f} scores; g_loss is the
// non-saturating generator view
std::pair<torch::Tensor, torch::Tensor> adversarial_losses(const torch::Tensor& d_scores_real,
                                                           const torch::Tensor& d_scores_fake);

// mean (1/K) KL(p_a || p_u) + mean (1/K) KL(p_b || p_q); originals are
// fixed references (no gradient through p_a / p_b)
torch::Tensor kl_loss(const PredictiveDistribution& p_a, const PredictiveDistribution& p_u,
                      const PredictiveDistribution& p_b, const PredictiveDistribution& p_q);

// four-stream cross entropy; U inherits A's labels, Q inherits B's
torch::Tensor classification_loss(const PredictiveDistribution& p_a,
                                  const PredictiveDistribution& p_b,
                                  const PredictiveDistribution& p_u,
                                  const PredictiveDistribution& p_q,
                                  const torch::Tensor& labels_a, const torch::Tensor& labels_b);

struct LossTerms {
  torch::Tensor intra, inter, recon, cycle, adv_g, kl, ce;
};

// weighted sum of the seven components; the adversarial term is the
// generator-side view (the discriminator-side objective is optimized
// separately). Throws NumericalError naming the first non-finite component.
torch::Tensor total_loss(const LossTerms& terms, const LossWeights& weights);

}  // namespace dsdr::losses
