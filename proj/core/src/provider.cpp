#include "atf/provider.hpp"

namespace atf {

void LinearHead::forward(std::span<const double> features,
                         std::span<double> out) const {
  if (features.size() != cols || out.size() != rows)
    throw std::invalid_argument("linear head: size mismatch");
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = b[r];
    const double* wr = &w[r * cols];
    for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * features[c];
    out[r] = acc;
  }
}

PotentialProvider::PotentialProvider(const LabelSpace& space, int feature_dim,
                                     ProviderVariant variant)
    : feature_dim_(static_cast<std::size_t>(feature_dim)), variant_(variant) {
  if (feature_dim <= 0)
    throw std::invalid_argument("provider: feature_dim must be > 0");
  auto head = [&](int rows) {
    return LinearHead::zeros(static_cast<std::size_t>(rows), feature_dim_);
  };
  op_ = head(space.n_object() * space.n_progress());
  ap_ = head(space.n_action() * space.n_progress());
  os_ = head(space.n_object() * space.n_scene());
  xi_ = head(space.n_object() * space.n_intent());
  if (variant_ == ProviderVariant::Joint) {
    coap_ = head(space.n_configs());
  } else {
    u_cat_ = head(space.n_category());
    u_obj_ = head(space.n_object());
    u_act_ = head(space.n_action());
    u_prog_ = head(space.n_progress());
  }
}

void PotentialProvider::check_space(const LabelSpace& space) const {
  bool ok =
      op_.rows == static_cast<std::size_t>(space.n_object() *
                                           space.n_progress()) &&
      ap_.rows == static_cast<std::size_t>(space.n_action() *
                                           space.n_progress()) &&
      os_.rows ==
          static_cast<std::size_t>(space.n_object() * space.n_scene()) &&
      xi_.rows ==
          static_cast<std::size_t>(space.n_object() * space.n_intent());
  if (ok && variant_ == ProviderVariant::Joint)
    ok = coap_.rows == static_cast<std::size_t>(space.n_configs());
  if (ok && variant_ == ProviderVariant::IndependentUnaries)
    ok = u_cat_.rows == static_cast<std::size_t>(space.n_category()) &&
         u_obj_.rows == static_cast<std::size_t>(space.n_object()) &&
         u_act_.rows == static_cast<std::size_t>(space.n_action()) &&
         u_prog_.rows == static_cast<std::size_t>(space.n_progress());
  if (!ok)
    throw std::invalid_argument("provider: label space does not match heads");
}

LinearHead& PotentialProvider::unary(int variable) {
  if (variant_ != ProviderVariant::IndependentUnaries)
    throw std::invalid_argument("provider: unary heads not present");
  switch (variable) {
    case 0: return u_cat_;
    case 1: return u_obj_;
    case 2: return u_act_;
    case 3: return u_prog_;
  }
  throw std::invalid_argument("provider: unary index out of range");
}

const LinearHead& PotentialProvider::unary(int variable) const {
  return const_cast<PotentialProvider*>(this)->unary(variable);
}

std::vector<LinearHead*> PotentialProvider::heads() {
  std::vector<LinearHead*> hs{&op_, &ap_, &os_, &xi_};
  if (variant_ == ProviderVariant::Joint) {
    hs.push_back(&coap_);
  } else {
    hs.push_back(&u_cat_);
    hs.push_back(&u_obj_);
    hs.push_back(&u_act_);
    hs.push_back(&u_prog_);
  }
  return hs;
}

std::vector<const LinearHead*> PotentialProvider::heads() const {
  auto hs = const_cast<PotentialProvider*>(this)->heads();
  return {hs.begin(), hs.end()};
}

std::vector<std::string> PotentialProvider::head_names(
    ProviderVariant variant) {
  if (variant == ProviderVariant::Joint)
    return {"op", "ap", "os", "xi", "coap"};
  return {"op", "ap", "os", "xi", "u_cat", "u_obj", "u_act", "u_prog"};
}

FramePotentials PotentialProvider::realize(
    const LabelSpace& space, std::span<const double> features) const {
  check_space(space);
  FramePotentials out;
  out.semantic = SemanticPotentials::zeros(space);
  out.intent = Table2D(space.n_object(), space.n_intent());

  op_.forward(features, {out.semantic.op.data(), op_.rows});
  ap_.forward(features, {out.semantic.ap.data(), ap_.rows});
  os_.forward(features, {out.semantic.os.data(), os_.rows});
  xi_.forward(features, {out.intent.data(), xi_.rows});

  if (variant_ == ProviderVariant::Joint) {
    coap_.forward(features, out.semantic.coap);
  } else {
    std::vector<double> uc(space.n_category()), uo(space.n_object()),
        ua(space.n_action()), up(space.n_progress());
    u_cat_.forward(features, uc);
    u_obj_.forward(features, uo);
    u_act_.forward(features, ua);
    u_prog_.forward(features, up);
    for (int kidx = 0; kidx < space.n_configs(); ++kidx) {
      const SeenConfig& t = space.seen_configs()[kidx];
      out.semantic.coap[kidx] = uc[t[0]] + uo[t[1]] + ua[t[2]] + up[t[3]];
    }
  }
  return out;
}

}  // namespace atf
