#include "atf/synthetic.hpp"

#include <cmath>

#include "atf/config_text.hpp"

namespace atf {
namespace {

// Scoring scaffolding for conditional sampling (independent of the oracle's
// enumeration code on purpose; this is the generator's own copy).
struct SamplerContext {
  const VideoModel* model;
  int T, support, intent;
  std::vector<std::vector<double>> phi;  // semantic + intent tie per frame
  std::vector<int> obj;
  std::vector<double> wk;  // [i*T+j], i<j

  SamplerContext(const VideoModel& m, int intent_value)
      : model(&m), intent(intent_value) {
    const LabelSpace& space = *m.space;
    T = m.n_frames();
    support = space.support_size();
    phi.reserve(T);
    for (int i = 0; i < T; ++i) {
      std::vector<double> p = support_scores(space, m.semantic[i]);
      for (int s = 0; s < support; ++s)
        p[s] += m.intent[i].at(space.support_object(s), intent);
      phi.push_back(std::move(p));
    }
    obj.resize(support);
    for (int s = 0; s < support; ++s) obj[s] = space.support_object(s);
    wk.assign(static_cast<std::size_t>(T) * T, 0.0);
    for (int i = 0; i < T; ++i)
      for (int j = i + 1; j < T; ++j)
        wk[i * T + j] = weighted_kernel(m.positions[i], m.positions[j],
                                        m.kernel);
  }

  double score(const std::vector<int>& s) const {
    double total = 0.0;
    for (int i = 0; i < T; ++i) total += phi[i][s[i]];
    for (int i = 0; i < T; ++i)
      for (int j = i + 1; j < T; ++j)
        total += model->mu.at(obj[s[i]], obj[s[j]]) * wk[i * T + j];
    return total;
  }

  bool advance(std::vector<int>& s) const {
    int i = T - 1;
    while (i >= 0 && ++s[i] == support) s[i--] = 0;
    return i >= 0;
  }
};

int sample_categorical(const std::vector<double>& probs,
                       std::mt19937_64& rng) {
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;  // roundoff fallback
}

std::vector<int> sample_by_enumeration(const SamplerContext& ctx,
                                       std::mt19937_64& rng) {
  // Pass 1: conditional log partition.
  std::vector<int> s(ctx.T, 0);
  double max_seen = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  do {
    double v = ctx.score(s);
    if (v <= max_seen) {
      sum += std::exp(v - max_seen);
    } else {
      sum = sum * std::exp(max_seen - v) + 1.0;
      max_seen = v;
    }
  } while (ctx.advance(s));
  double log_z = max_seen + std::log(sum);

  // Pass 2: inverse-CDF walk in enumeration order.
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  std::vector<int> last(ctx.T, 0);
  s.assign(ctx.T, 0);
  double acc = 0.0;
  do {
    acc += std::exp(ctx.score(s) - log_z);
    last = s;
    if (u < acc) return s;
  } while (ctx.advance(s));
  return last;  // roundoff fallback
}

std::vector<int> sample_by_gibbs(const SamplerContext& ctx,
                                 const GeneratorConfig& cfg,
                                 std::mt19937_64& rng) {
  std::uniform_int_distribution<int> uniform_support(0, ctx.support - 1);
  std::vector<int> s(ctx.T);
  for (int i = 0; i < ctx.T; ++i) s[i] = uniform_support(rng);

  std::vector<double> logits(ctx.support);
  for (int sweep = 0; sweep < cfg.gibbs_burn_in; ++sweep) {
    for (int i = 0; i < ctx.T; ++i) {
      for (int v = 0; v < ctx.support; ++v) {
        double l = ctx.phi[i][v];
        int ov = ctx.obj[v];
        for (int j = 0; j < ctx.T; ++j) {
          if (j == i) continue;
          if (j > i)
            l += ctx.model->mu.at(ov, ctx.obj[s[j]]) * ctx.wk[i * ctx.T + j];
          else
            l += ctx.model->mu.at(ctx.obj[s[j]], ov) * ctx.wk[j * ctx.T + i];
        }
        logits[v] = l;
      }
      softmax_inplace(logits);
      s[i] = sample_categorical(logits, rng);
    }
  }
  return s;
}

}  // namespace

GeneratorConfig generator_config_from_config(const ConfigText& cfg) {
  GeneratorConfig g;
  g.train_videos = static_cast<int>(cfg.get_int("train_videos", g.train_videos));
  g.test_videos = static_cast<int>(cfg.get_int("test_videos", g.test_videos));
  g.frames_per_video =
      static_cast<int>(cfg.get_int("frames_per_video", g.frames_per_video));
  g.fps = cfg.get_double("fps", g.fps);
  g.sigma = cfg.get_double("sigma", g.sigma);
  g.kernel_weight = cfg.get_double("kernel_weight", g.kernel_weight);
  g.sem_scale = cfg.get_double("sem_scale", g.sem_scale);
  g.mu_diag = cfg.get_double("mu_diag", g.mu_diag);
  g.mu_offdiag = cfg.get_double("mu_offdiag", g.mu_offdiag);
  g.mu_chain = cfg.get_double("mu_chain", g.mu_chain);
  g.xi_window = cfg.get_double("xi_window", g.xi_window);
  g.xi_pattern = cfg.get_string("xi_pattern", g.xi_pattern);
  g.xi_strength = cfg.get_double("xi_strength", g.xi_strength);
  g.feature_gain = cfg.get_double("feature_gain", g.feature_gain);
  g.feature_noise = cfg.get_double("feature_noise", g.feature_noise);
  g.enum_budget = cfg.get_double("enum_budget", g.enum_budget);
  g.gibbs_burn_in =
      static_cast<int>(cfg.get_int("gibbs_burn_in", g.gibbs_burn_in));
  g.gibbs_thinning =
      static_cast<int>(cfg.get_int("gibbs_thinning", g.gibbs_thinning));
  return g;
}

void generator_config_to_config(const GeneratorConfig& g, ConfigText& cfg) {
  cfg.set_int("train_videos", g.train_videos);
  cfg.set_int("test_videos", g.test_videos);
  cfg.set_int("frames_per_video", g.frames_per_video);
  cfg.set_double("fps", g.fps);
  cfg.set_double("sigma", g.sigma);
  cfg.set_double("kernel_weight", g.kernel_weight);
  cfg.set_double("sem_scale", g.sem_scale);
  cfg.set_double("mu_diag", g.mu_diag);
  cfg.set_double("mu_offdiag", g.mu_offdiag);
  cfg.set_double("mu_chain", g.mu_chain);
  cfg.set_double("xi_window", g.xi_window);
  cfg.set("xi_pattern", g.xi_pattern);
  cfg.set_double("xi_strength", g.xi_strength);
  cfg.set_double("feature_gain", g.feature_gain);
  cfg.set_double("feature_noise", g.feature_noise);
  cfg.set_double("enum_budget", g.enum_budget);
  cfg.set_int("gibbs_burn_in", g.gibbs_burn_in);
  cfg.set_int("gibbs_thinning", g.gibbs_thinning);
}

int feature_dim_for(const LabelSpace& space) {
  return space.n_category() + space.n_object() + space.n_action() +
         space.n_progress() + space.n_scene();
}

std::vector<FrameAssignment> sample_labeling(const VideoModel& model,
                                             int intent,
                                             const GeneratorConfig& cfg,
                                             std::mt19937_64& rng) {
  model.validate();
  if (intent < 0 || intent >= model.space->n_intent())
    throw std::domain_error("sample_labeling: intent out of range");
  SamplerContext ctx(model, intent);
  double states = std::pow(static_cast<double>(ctx.support), ctx.T);
  std::vector<int> s = states <= cfg.enum_budget
                           ? sample_by_enumeration(ctx, rng)
                           : sample_by_gibbs(ctx, cfg, rng);
  std::vector<FrameAssignment> out;
  out.reserve(ctx.T);
  for (int v : s) out.push_back(model.space->support_assignment(v));
  return out;
}

GeneratedData generate_synthetic(const LabelSpace& space,
                                 const GeneratorConfig& cfg,
                                 std::uint64_t seed) {
  if (space.n_progress() != 3)
    throw std::invalid_argument(
        "generate_synthetic: presets use 3 progress phases");
  if (cfg.frames_per_video <= 0 || cfg.train_videos < 0 ||
      cfg.test_videos < 0)
    throw std::invalid_argument("generate_synthetic: bad video counts");

  std::mt19937_64 master(seed);
  std::normal_distribution<double> sem_noise(0.0, cfg.sem_scale);

  // ---- generating tables ----
  SemanticPotentials sem = SemanticPotentials::zeros(space);
  if (cfg.sem_scale > 0.0) {
    for (double& v : sem.op.values()) v = sem_noise(master);
    for (double& v : sem.ap.values()) v = sem_noise(master);
    for (double& v : sem.os.values()) v = sem_noise(master);
    for (double& v : sem.coap) v = sem_noise(master);
  }
  AffinityTable mu(space.n_object(), space.n_object(), cfg.mu_offdiag);
  for (int o = 0; o < space.n_object(); ++o) mu.at(o, o) += cfg.mu_diag;
  if (space.n_object() > 1)
    for (int o = 0; o < space.n_object(); ++o)
      mu.at(o, (o + 1) % space.n_object()) += cfg.mu_chain;
  FrameIntentPotential fi(space.n_object(), space.n_intent(), 0.0);
  if (cfg.xi_pattern == "round_robin") {
    for (int o = 0; o < space.n_object(); ++o)
      fi.at(o, o % space.n_intent()) = cfg.xi_strength;
  } else if (cfg.xi_pattern == "overlap_pair") {
    for (int I = 0; I < space.n_intent(); ++I) {
      fi.at(I % space.n_object(), I) = cfg.xi_strength;
      fi.at((I + 1) % space.n_object(), I) = cfg.xi_strength;
    }
  } else {
    throw std::invalid_argument("generate_synthetic: unknown xi_pattern '" +
                                cfg.xi_pattern + "'");
  }

  KernelConfig kernel{cfg.sigma, cfg.kernel_weight};
  VideoModel field = VideoModel::homogeneous(space, kernel, mu, sem, fi,
                                             cfg.frames_per_video);
  if (cfg.xi_window > 0.0) {
    int edge = static_cast<int>(cfg.xi_window * cfg.frames_per_video);
    Table2D neutral(space.n_object(), space.n_intent(), 0.0);
    for (int i = edge; i < cfg.frames_per_video - edge; ++i)
      field.intent[i] = neutral;
  }

  GeneratedData out;
  out.used_enumeration =
      std::pow(static_cast<double>(space.support_size()),
               cfg.frames_per_video) <= cfg.enum_budget;

  // Generating model as a checkpointable bundle: constant tables, i.e. a
  // provider with zero feature weights and the tables in the biases.
  out.generating_model =
      TrainedModel::fresh(space, feature_dim_for(space), kernel);
  out.generating_model.mu = mu;
  out.generating_model.provider.op().b = sem.op.values();
  out.generating_model.provider.ap().b = sem.ap.values();
  out.generating_model.provider.os().b = sem.os.values();
  out.generating_model.provider.coap().b = sem.coap;
  out.generating_model.provider.xi().b = fi.values();

  // ---- dataset ----
  Dataset& ds = out.dataset;
  ds.space = space;
  ds.feature_dim = feature_dim_for(space);
  std::uniform_int_distribution<int> intent_draw(0, space.n_intent() - 1);
  std::normal_distribution<double> feat_noise(0.0, cfg.feature_noise);

  int total = cfg.train_videos + cfg.test_videos;
  for (int v = 0; v < total; ++v) {
    bool train = v < cfg.train_videos;
    std::mt19937_64 rng(master());  // per-video stream, fixed order
    VideoRecord video;
    char idbuf[32];
    std::snprintf(idbuf, sizeof(idbuf), "%s_%04d", train ? "train" : "test",
                  train ? v : v - cfg.train_videos);
    video.id = idbuf;
    video.split = train ? "train" : "test";
    video.gen_intent = intent_draw(rng);

    std::vector<FrameAssignment> labels =
        sample_labeling(field, video.gen_intent, cfg, rng);
    video.frames.reserve(labels.size());
    for (int i = 0; i < cfg.frames_per_video; ++i) {
      Frame f;
      f.index = i;
      f.timestamp = i / cfg.fps;
      f.label = labels[i];
      f.features.assign(ds.feature_dim, 0.0);
      int off = 0;
      auto mark = [&](int value, int size) {
        f.features[off + value] += cfg.feature_gain;
        off += size;
      };
      mark(labels[i].category, space.n_category());
      mark(labels[i].object, space.n_object());
      mark(labels[i].action, space.n_action());
      mark(labels[i].progress, space.n_progress());
      mark(labels[i].scene, space.n_scene());
      if (cfg.feature_noise > 0.0)
        for (double& x : f.features) x += feat_noise(rng);
      video.frames.push_back(std::move(f));
    }
    ds.videos.push_back(std::move(video));
  }
  ds.validate();
  return out;
}

TrainedModel ideal_decoder_model(const LabelSpace& space, KernelConfig kernel,
                                 double gain) {
  TrainedModel m = TrainedModel::fresh(space, feature_dim_for(space), kernel);
  const int cat_off = 0;
  const int obj_off = cat_off + space.n_category();
  const int act_off = obj_off + space.n_object();
  const int prog_off = act_off + space.n_action();
  const int scene_off = prog_off + space.n_progress();
  const int F = feature_dim_for(space);

  auto set = [&](LinearHead& head, int row, int col, double v) {
    head.w[row * F + col] += v;
  };
  for (int o = 0; o < space.n_object(); ++o)
    for (int p = 0; p < space.n_progress(); ++p) {
      int row = o * space.n_progress() + p;
      set(m.provider.op(), row, obj_off + o, gain);
      set(m.provider.op(), row, prog_off + p, gain);
    }
  for (int a = 0; a < space.n_action(); ++a)
    for (int p = 0; p < space.n_progress(); ++p) {
      int row = a * space.n_progress() + p;
      set(m.provider.ap(), row, act_off + a, gain);
      set(m.provider.ap(), row, prog_off + p, gain);
    }
  for (int o = 0; o < space.n_object(); ++o)
    for (int sc = 0; sc < space.n_scene(); ++sc) {
      int row = o * space.n_scene() + sc;
      set(m.provider.os(), row, obj_off + o, gain);
      set(m.provider.os(), row, scene_off + sc, gain);
    }
  for (int k = 0; k < space.n_configs(); ++k) {
    const SeenConfig& t = space.seen_configs()[k];
    set(m.provider.coap(), k, cat_off + t[0], gain);
    set(m.provider.coap(), k, obj_off + t[1], gain);
    set(m.provider.coap(), k, act_off + t[2], gain);
    set(m.provider.coap(), k, prog_off + t[3], gain);
  }
  return m;
}

}  // namespace atf
