#include "dsdr/losses.hpp"

#include <cmath>

#include "dsdr/common.hpp"

namespace dsdr::losses {

namespace {

constexpr double kNormEps = 1e-8;   // added to vector norms
constexpr double kProbEps = 1e-7;   // probability clamp for logs

void check_same_shape(const torch::Tensor& x, const torch::Tensor& y, const char* who) {
  if (!x.sizes().equals(y.sizes()))
    throw ShapeError(std::string(who) + ": shape mismatch " + c10::str(x.sizes()) + " vs " +
                     c10::str(y.sizes()));
}

torch::Tensor cosine_rows(const torch::Tensor& x, const torch::Tensor& y) {
  auto nx = x.norm(2, /*dim=*/1) + kNormEps;
  auto ny = y.norm(2, /*dim=*/1) + kNormEps;
  return (x * y).sum(1) / (nx * ny);
}

}  // namespace

void LossWeights::validate() const {
  for (double w : {intra, inter, recon, cycle, adv, kl, ce}) {
    if (!std::isfinite(w) || w < 0)
      throw ConfigError("loss weights must be finite and non-negative");
  }
}

torch::Tensor intra_instance_loss(const FeatureVector& a_f, const FeatureVector& u_f,
                                  const FeatureVector& b_f, const FeatureVector& q_f) {
  check_same_shape(a_f.values, u_f.values, "intra_instance_loss");
  check_same_shape(b_f.values, q_f.values, "intra_instance_loss");
  auto stream_a = (1 - cosine_rows(a_f.values, u_f.values)).mean();
  auto stream_b = (1 - cosine_rows(b_f.values, q_f.values)).mean();
  return stream_a + stream_b;
}

torch::Tensor inter_instance_loss(const FeatureVector& a_f, const FeatureVector& b_f,
                                  const FeatureVector& u_f, const FeatureVector& q_f) {
  check_same_shape(a_f.values, b_f.values, "inter_instance_loss");
  check_same_shape(u_f.values, q_f.values, "inter_instance_loss");
  if (a_f.values.size(0) != u_f.values.size(0))
    throw ShapeError("inter_instance_loss: batch mismatch between originals and reconstructions");
  return (cosine_rows(a_f.values, b_f.values) - cosine_rows(u_f.values, q_f.values)).abs().mean();
}

torch::Tensor reconstruction_loss(const torch::Tensor& a, const torch::Tensor& a_bar,
                                  const torch::Tensor& b, const torch::Tensor& b_bar) {
  check_same_shape(a, a_bar, "reconstruction_loss");
  check_same_shape(b, b_bar, "reconstruction_loss");
  return (a - a_bar).abs().mean() + (b - b_bar).abs().mean();
}

torch::Tensor cycle_loss(const torch::Tensor& a, const torch::Tensor& a_prime,
                         const torch::Tensor& b, const torch::Tensor& b_prime) {
  check_same_shape(a, a_prime, "cycle_loss");
  check_same_shape(b, b_prime, "cycle_loss");
  return (a - a_prime).abs().mean() + (b - b_prime).abs().mean();
}

std::pair<torch::Tensor, torch::Tensor> adversarial_losses(const torch::Tensor& d_scores_real,
                                                           const torch::Tensor& d_scores_fake) {
  if (d_scores_real.numel() == 0 || d_scores_fake.numel() == 0)
    throw ConfigError("adversarial_losses: empty score arrays");
  auto p_real = torch::sigmoid(d_scores_real).clamp(kProbEps, 1 - kProbEps);
  auto p_fake = torch::sigmoid(d_scores_fake).clamp(kProbEps, 1 - kProbEps);
  auto d_loss = -p_real.log().mean() - (1 - p_fake).log().mean();
  auto g_loss = -p_fake.log().mean();  // non-saturating
  return {d_loss, g_loss};
}

torch::Tensor kl_loss(const PredictiveDistribution& p_a, const PredictiveDistribution& p_u,
                      const PredictiveDistribution& p_b, const PredictiveDistribution& p_q) {
  check_same_shape(p_a.probabilities, p_u.probabilities, "kl_loss");
  check_same_shape(p_b.probabilities, p_q.probabilities, "kl_loss");
  const auto classes = p_a.probabilities.size(1);

  auto normalized = [](const torch::Tensor& p) {
    auto c = p.clamp(kProbEps, 1 - kProbEps);
    return c / c.sum(1, /*keepdim=*/true);
  };
  auto stream = [&](const torch::Tensor& ref, const torch::Tensor& moving) {
    auto p = normalized(ref).detach();  // original predictions are the fixed reference
    auto q = normalized(moving);
    auto kl = (p * (p.log() - q.log())).sum(1);
    return kl.mean() / static_cast<double>(classes);
  };
  return stream(p_a.probabilities, p_u.probabilities) +
         stream(p_b.probabilities, p_q.probabilities);
}

torch::Tensor classification_loss(const PredictiveDistribution& p_a,
                                  const PredictiveDistribution& p_b,
                                  const PredictiveDistribution& p_u,
                                  const PredictiveDistribution& p_q,
                                  const torch::Tensor& labels_a, const torch::Tensor& labels_b) {
  const auto classes = p_a.logits.size(1);
  auto check_labels = [&](const torch::Tensor& l) {
    if (l.numel() == 0) throw ConfigError("classification_loss: empty labels");
    const auto lo = l.min().item<int64_t>();
    const auto hi = l.max().item<int64_t>();
    if (lo < 0 || hi >= classes)
      throw ConfigError("classification_loss: label " + std::to_string(lo < 0 ? lo : hi) +
                        " outside [0, " + std::to_string(classes) + ")");
  };
  check_labels(labels_a);
  check_labels(labels_b);

  auto nll = [](const PredictiveDistribution& p, const torch::Tensor& labels) {
    auto log_probs = torch::log_softmax(p.logits, 1);
    return -log_probs.gather(1, labels.unsqueeze(1)).squeeze(1).mean();
  };
  return nll(p_a, labels_a) + nll(p_b, labels_b) + nll(p_u, labels_a) + nll(p_q, labels_b);
}

torch::Tensor total_loss(const LossTerms& terms, const LossWeights& weights) {
  weights.validate();
  const std::pair<const char*, const torch::Tensor*> comps[] = {
      {"intra", &terms.intra}, {"inter", &terms.inter}, {"recon", &terms.recon},
      {"cycle", &terms.cycle}, {"adv_g", &terms.adv_g}, {"kl", &terms.kl},
      {"ce", &terms.ce},
  };
  for (const auto& [name, t] : comps) {
    if (t->defined() && !t->isfinite().all().item<bool>())
      throw NumericalError(std::string("total_loss: non-finite component '") + name + "'");
  }

  auto total = torch::zeros({}, terms.ce.defined() ? terms.ce.options() : torch::kFloat32);
  const std::pair<double, const torch::Tensor*> weighted[] = {
      {weights.intra, &terms.intra}, {weights.inter, &terms.inter},
      {weights.recon, &terms.recon}, {weights.cycle, &terms.cycle},
      {weights.adv, &terms.adv_g},   {weights.kl, &terms.kl},
      {weights.ce, &terms.ce},
  };
  for (const auto& [w, t] : weighted) {
    if (w != 0) {
      if (!t->defined()) throw ConfigError("total_loss: weighted component is undefined");
      total = total + w * (*t);
    }
  }
  return total;
}

}  // namespace dsdr::losses
