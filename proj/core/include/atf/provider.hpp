#pragma once
// Linear potential provider: maps per-frame feature vectors to the frame's
// potential tables.  This is the learned part of the model (the stand-in
// for the CNN trunk): every table entry is an affine function of the
// features, trained with the closed-form table-space gradients folded
// through the chain rule.
//
// Two parametrizations of the joint (C,O,A,P) term exist:
//   Joint              one weight row per seen config (the full model)
//   IndependentUnaries separate per-variable unary heads u_c,u_o,u_a,u_p
//                      whose sum scores a config (structure-free variant)
//
// The provider is sized for one label space at construction but does not
// retain a reference; callers pass the space to realize().

#include <span>
#include <string>
#include <vector>

#include "atf/potentials.hpp"

namespace atf {

struct LinearHead {
  std::size_t rows = 0;  // table entries produced
  std::size_t cols = 0;  // feature dimension
  std::vector<double> w;  // [rows x cols]
  std::vector<double> b;  // [rows]

  static LinearHead zeros(std::size_t rows, std::size_t cols) {
    return LinearHead{rows, cols, std::vector<double>(rows * cols, 0.0),
                      std::vector<double>(rows, 0.0)};
  }

  void forward(std::span<const double> features,
               std::span<double> out) const;

  friend bool operator==(const LinearHead&, const LinearHead&) = default;
};

enum class ProviderVariant { Joint, IndependentUnaries };

struct FramePotentials {
  SemanticPotentials semantic;
  FrameIntentPotential intent;  // [n_object x n_intent]
};

class PotentialProvider {
 public:
  PotentialProvider() = default;
  PotentialProvider(const LabelSpace& space, int feature_dim,
                    ProviderVariant variant = ProviderVariant::Joint);

  int feature_dim() const { return static_cast<int>(feature_dim_); }
  ProviderVariant variant() const { return variant_; }

  // `space` must be the space the provider was sized for (checked).
  FramePotentials realize(const LabelSpace& space,
                          std::span<const double> features) const;

  // Heads, exposed for the optimizer and serialization.
  LinearHead& op() { return op_; }
  LinearHead& ap() { return ap_; }
  LinearHead& os() { return os_; }
  LinearHead& coap() { return coap_; }  // Joint variant only
  LinearHead& unary(int variable);      // IndependentUnaries: 0=c 1=o 2=a 3=p
  LinearHead& xi() { return xi_; }
  const LinearHead& op() const { return op_; }
  const LinearHead& ap() const { return ap_; }
  const LinearHead& os() const { return os_; }
  const LinearHead& coap() const { return coap_; }
  const LinearHead& unary(int variable) const;
  const LinearHead& xi() const { return xi_; }

  // All heads in a fixed order (for generic parameter loops).
  std::vector<LinearHead*> heads();
  std::vector<const LinearHead*> heads() const;
  static std::vector<std::string> head_names(ProviderVariant variant);

  friend bool operator==(const PotentialProvider&,
                         const PotentialProvider&) = default;

 private:
  void check_space(const LabelSpace& space) const;

  std::size_t feature_dim_ = 0;
  ProviderVariant variant_ = ProviderVariant::Joint;
  LinearHead op_, ap_, os_, xi_;
  LinearHead coap_;                            // Joint
  LinearHead u_cat_, u_obj_, u_act_, u_prog_;  // IndependentUnaries
};

}  // namespace atf
