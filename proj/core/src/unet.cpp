// Copyright (c) 2026 The foleysynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "foley/unet.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "foley/errors.h"
#include "foley/nn/ops.h"

namespace foley {

std::vector<double> sigma_embedding(double t, int dim) {
  if (dim < 2 || dim % 2 != 0) throw DomainError("sigma embedding width must be even and >= 2");
  const int half = dim / 2;
  std::vector<double> e(dim);
  for (int k = 0; k < half; ++k) {
    const double w = half == 1 ? 1.0 : std::exp(std::log(500.0) * k / (half - 1));
    e[k] = std::sin(w * t);
    e[half + k] = std::cos(w * t);
  }
  return e;
}

namespace detail {

template <typename T>
Block<T>::Block(nn::ParamStore<T>& store, const std::string& name, bool up, int in_ch,
                int out_ch, int stride, const ModelConfig& cfg, bool temporal, nn::Rng& rng)
    : up_(up),
      in_ch_(in_ch),
      out_ch_(out_ch),
      stride_(stride),
      act_(cfg.activation),
      temporal_(temporal ? cfg.cond_mode : CondMode::kNone) {
  const int k = cfg.kernel;
  if (up_) {
    crop_offset_ = (k - stride) / 2;
    up_conv_ = nn::ConvTranspose1d<T>(store, name + ".conv_a", {in_ch, out_ch, k, stride, 0}, rng);
  } else {
    down_conv_ = nn::Conv1d<T>(store, name + ".conv_a",
                               {in_ch, out_ch, k, stride, (k - stride + 1) / 2}, rng);
  }
  const int cond_width = cfg.sigma_embed_dim + cfg.class_embed_dim;
  film_ = cond::Film<T>(store, name + ".film", cond_width, cfg.film_hidden, out_ch, rng);
  conv_b_ = nn::Conv1d<T>(store, name + ".conv_b", {out_ch, out_ch, k, 1, k / 2}, rng);
  switch (temporal_) {
    case CondMode::kNone:
      break;
    case CondMode::kFilm:
      t_film_ = cond::Film<T>(store, name + ".temporal", cfg.frames(), cfg.temporal_hidden,
                              out_ch, rng);
      break;
    case CondMode::kTfilm:
      t_tfilm_ = cond::Tfilm<T>(store, name + ".temporal", 1, cfg.temporal_hidden, out_ch, rng);
      break;
    case CondMode::kBfilm:
      t_bfilm_ = cond::Bfilm<T>(store, name + ".temporal", 1, cfg.temporal_hidden, out_ch, rng);
      break;
  }
}

template <typename T>
Tensor<T> Block<T>::forward(const Tensor<T>& in, const Tensor<T>& cond_vec,
                            const Tensor<T>* events, int blocks, Cache* cache) const {
  Tensor<T> conv;
  int conv_len = 0;
  if (up_) {
    Tensor<T> full = up_conv_.forward(in);
    conv_len = full.length;
    conv = nn::crop(full, crop_offset_, in.length * stride_);
  } else {
    conv = down_conv_.forward(in);
  }
  Tensor<T> a_pre = film_.forward(conv, cond_vec, cache ? &cache->film : nullptr);
  Tensor<T> a = nn::activate(act_, a_pre);
  Tensor<T> b_conv = conv_b_.forward(a);

  const bool apply = temporal_ != CondMode::kNone && events != nullptr;
  Tensor<T> b_pre;
  if (!apply) {
    b_pre = b_conv;
  } else if (temporal_ == CondMode::kFilm) {
    Tensor<T> vec(events->length, 1);
    std::copy(events->data.begin(), events->data.end(), vec.data.begin());
    b_pre = t_film_.forward(b_conv, vec, cache ? &cache->t_film : nullptr);
  } else if (temporal_ == CondMode::kTfilm) {
    b_pre = t_tfilm_.forward(b_conv, *events, blocks, cache ? &cache->t_tfilm : nullptr);
  } else {
    b_pre = t_bfilm_.forward(b_conv, *events, blocks, cache ? &cache->t_bfilm : nullptr);
  }
  Tensor<T> out = nn::activate(act_, b_pre);
  nn::add_inplace(out, a);

  if (cache) {
    cache->in = in;
    cache->conv_len = conv_len;
    cache->a_pre = std::move(a_pre);
    cache->a = std::move(a);
    cache->b_conv = std::move(b_conv);
    cache->b_pre = std::move(b_pre);
    cache->temporal_applied = apply;
  }
  return out;
}

template <typename T>
Tensor<T> Block<T>::backward(const Cache& cache, const Tensor<T>& grad_out, Tensor<T>& grad_cond,
                             Tensor<T>* grad_events) {
  Tensor<T> g_b = nn::activate_backward(act_, cache.b_pre, grad_out);
  if (cache.temporal_applied) {
    cond::LayerGrads<T> tg;
    if (temporal_ == CondMode::kFilm) {
      tg = t_film_.backward(cache.t_film, g_b);
      // The film-mode condition is the event sequence laid out as a column.
      Tensor<T> row(1, tg.cond.channels);
      std::copy(tg.cond.data.begin(), tg.cond.data.end(), row.data.begin());
      tg.cond = std::move(row);
    } else if (temporal_ == CondMode::kTfilm) {
      tg = t_tfilm_.backward(cache.t_tfilm, g_b);
    } else {
      tg = t_bfilm_.backward(cache.t_bfilm, g_b);
    }
    g_b = std::move(tg.x);
    if (grad_events) nn::add_inplace(*grad_events, tg.cond);
  }
  Tensor<T> g_a = conv_b_.backward(cache.a, g_b);
  nn::add_inplace(g_a, grad_out);
  Tensor<T> g_a_pre = nn::activate_backward(act_, cache.a_pre, g_a);
  cond::LayerGrads<T> fg = film_.backward(cache.film, g_a_pre);
  nn::add_inplace(grad_cond, fg.cond);
  if (up_) {
    return up_conv_.backward(cache.in, nn::crop_backward(fg.x, cache.conv_len, crop_offset_));
  }
  return down_conv_.backward(cache.in, fg.x);
}

template class Block<float>;
template class Block<double>;

}  // namespace detail

template <typename T>
UNet<T>::UNet(ModelConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  nn::Rng rng(cfg_.init_seed);
  const int n = cfg_.levels();
  const bool any_temporal = cfg_.cond_mode != CondMode::kNone;
  const bool down_temporal =
      any_temporal && cfg_.placement == TemporalPlacement::kEveryBlock;

  int in_ch = 1;
  for (int i = 0; i < n; ++i) {
    down_.emplace_back(store_, "down" + std::to_string(i), false, in_ch, cfg_.channels[i],
                       cfg_.strides[i], cfg_, down_temporal, rng);
    in_ch = cfg_.channels[i];
  }
  const int deep = cfg_.channels[n - 1];
  lstm_ = nn::BiLstm<T>(store_, "bottleneck.lstm", deep, cfg_.bottleneck_hidden, rng);
  proj_ = nn::Conv1d<T>(store_, "bottleneck.proj", {2 * cfg_.bottleneck_hidden, deep, 1, 1, 0},
                        rng);
  nn::fill(proj_.weight(), T(0));
  nn::fill(proj_.bias(), T(0));

  up_.resize(n);
  for (int i = n - 1; i >= 0; --i) {
    const int out_ch = i > 0 ? cfg_.channels[i - 1] : cfg_.channels[0];
    up_[i] = detail::Block<T>(store_, "up" + std::to_string(i), true, 2 * cfg_.channels[i],
                              out_ch, cfg_.strides[i], cfg_, any_temporal, rng);
  }
  head_ = nn::Conv1d<T>(store_, "head", {cfg_.channels[0], 1, 1, 1, 0}, rng);
  nn::fill(head_.weight(), T(0));
  nn::fill(head_.bias(), T(0));

  class_embed_ = &store_.add("class_embed", {cfg_.class_count + 1, cfg_.class_embed_dim});
  for (T& v : class_embed_->value) v = static_cast<T>(rng.uniform(-1.0, 1.0));
  if (any_temporal) null_events_ = &store_.add("null_events", {1, cfg_.frames()});
}

template <typename T>
Tensor<T> UNet<T>::make_cond_vec(double t, int class_row) const {
  const auto s = sigma_embedding(t, cfg_.sigma_embed_dim);
  Tensor<T> v(cfg_.sigma_embed_dim + cfg_.class_embed_dim, 1);
  for (int i = 0; i < cfg_.sigma_embed_dim; ++i) v.data[i] = static_cast<T>(s[i]);
  const T* row = class_embed_->value.data() + static_cast<std::size_t>(class_row) * cfg_.class_embed_dim;
  std::copy_n(row, cfg_.class_embed_dim, v.data.begin() + cfg_.sigma_embed_dim);
  return v;
}

template <typename T>
Tensor<T> UNet<T>::bottleneck(const Tensor<T>& h, BottleneckCache* cache) const {
  Tensor<T> seq = lstm_.forward(h, cache ? &cache->lstm : nullptr);
  Tensor<T> out = proj_.forward(seq);
  nn::add_inplace(out, h);
  if (cache) cache->lstm_out = std::move(seq);
  return out;
}

template <typename T>
Tensor<T> UNet<T>::bottleneck_backward(const BottleneckCache& cache, const Tensor<T>& grad_out) {
  Tensor<T> g_seq = proj_.backward(cache.lstm_out, grad_out);
  Tensor<T> g_h = lstm_.backward(cache.lstm, g_seq);
  nn::add_inplace(g_h, grad_out);
  return g_h;
}

template <typename T>
Tensor<T> UNet<T>::forward(const Tensor<T>& x, double t, const Condition<T>& cond,
                           Tape* tape) const {
  if (x.channels != 1 || x.length != cfg_.sample_len) {
    throw ShapeError("model input " + x.shape_str() + ", expected [1 x " +
                     std::to_string(cfg_.sample_len) + "]");
  }
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("diffusion time outside [0, 1]");
  int class_row = cfg_.class_count;
  if (cond.class_id) {
    if (*cond.class_id < 0 || *cond.class_id >= cfg_.class_count) {
      throw DomainError("unknown class id " + std::to_string(*cond.class_id) + " (model has " +
                        std::to_string(cfg_.class_count) + " classes)");
    }
    class_row = *cond.class_id;
  }
  const Tensor<T> cond_vec = make_cond_vec(t, class_row);

  const bool temporal_on = cfg_.cond_mode != CondMode::kNone && !cond.bypass_temporal;
  Tensor<T> null_seq;
  const Tensor<T>* events = nullptr;
  if (temporal_on) {
    if (cond.events) {
      if (cond.events->channels != 1 || cond.events->length != cfg_.frames()) {
        throw ShapeError("event feature " + cond.events->shape_str() + ", model expects [1 x " +
                         std::to_string(cfg_.frames()) + "]");
      }
      events = cond.events;
    } else {
      null_seq = Tensor<T>(1, cfg_.frames());
      null_seq.data = null_events_->value;
      events = &null_seq;
    }
  }

  const int n = cfg_.levels();
  if (tape) {
    tape->down.assign(n, {});
    tape->up.assign(n, {});
    tape->up_input_split.assign(n, 0);
  }
  std::vector<Tensor<T>> skips;
  skips.reserve(n);
  Tensor<T> h = x;
  for (int i = 0; i < n; ++i) {
    h = down_[i].forward(h, cond_vec, events, cfg_.blocks, tape ? &tape->down[i] : nullptr);
    skips.push_back(h);
  }
  Tensor<T> u = bottleneck(h, tape ? &tape->bottleneck : nullptr);
  for (int i = n - 1; i >= 0; --i) {
    if (tape) tape->up_input_split[i] = u.channels;
    u = up_[i].forward(nn::concat_channels(u, skips[i]), cond_vec, events, cfg_.blocks,
                       tape ? &tape->up[i] : nullptr);
  }
  Tensor<T> out = head_.forward(u);
  if (tape) {
    tape->cond_vec = cond_vec;
    tape->class_row = class_row;
    tape->temporal_on = temporal_on;
    tape->null_events = temporal_on && cond.events == nullptr;
    tape->events = events ? *events : Tensor<T>();
    tape->head_in = std::move(u);
  }
  return out;
}

template <typename T>
typename UNet<T>::InputGrads UNet<T>::backward(const Tape& tape, const Tensor<T>& grad_out) {
  const int n = cfg_.levels();
  Tensor<T> g_cond(tape.cond_vec.channels, 1);
  Tensor<T> g_events;
  if (tape.temporal_on) g_events = Tensor<T>(1, tape.events.length);
  Tensor<T>* ge = tape.temporal_on ? &g_events : nullptr;

  Tensor<T> g = head_.backward(tape.head_in, grad_out);
  std::vector<Tensor<T>> g_skips(n);
  for (int i = 0; i < n; ++i) {
    Tensor<T> g_in = up_[i].backward(tape.up[i], g, g_cond, ge);
    auto [g_u, g_skip] = nn::split_channels(g_in, tape.up_input_split[i]);
    g_skips[i] = std::move(g_skip);
    g = std::move(g_u);
  }
  g = bottleneck_backward(tape.bottleneck, g);
  for (int i = n - 1; i >= 0; --i) {
    nn::add_inplace(g, g_skips[i]);
    g = down_[i].backward(tape.down[i], g, g_cond, ge);
  }

  T* row = class_embed_->grad.data() + static_cast<std::size_t>(tape.class_row) * cfg_.class_embed_dim;
  for (int k = 0; k < cfg_.class_embed_dim; ++k) row[k] += g_cond.data[cfg_.sigma_embed_dim + k];

  InputGrads out;
  out.x = std::move(g);
  if (tape.temporal_on) {
    if (tape.null_events) {
      for (std::size_t i = 0; i < g_events.size(); ++i) null_events_->grad[i] += g_events.data[i];
    } else {
      out.events = std::move(g_events);
    }
  }
  return out;
}

template <typename T>
std::vector<std::pair<std::string, std::size_t>> UNet<T>::module_param_counts() const {
  std::vector<std::pair<std::string, std::size_t>> groups;
  for (const nn::Param<T>* p : store_.params()) {
    std::string key = p->name.substr(0, p->name.find('.'));
    if (groups.empty() || groups.back().first != key) groups.emplace_back(key, 0);
    groups.back().second += p->size();
  }
  return groups;
}

template class UNet<float>;
template class UNet<double>;

ModelDescription describe(const ModelConfig& cfg) {
  UNet<float> model(cfg);
  ModelDescription d;
  d.modules = model.module_param_counts();
  d.total_params = model.params().count();
  std::ostringstream out;
  out << "cond_mode " << cond_mode_name(cfg.cond_mode) << ", placement "
      << placement_name(cfg.placement) << ", blocks " << cfg.blocks << "\n"
      << "sample_len " << cfg.sample_len << " @ " << cfg.sample_rate << " Hz, feature W="
      << cfg.feature_window << " h=" << cfg.feature_hop << " (" << cfg.frames() << " frames)\n"
      << "levels " << cfg.levels() << ": channels [" << join_ints(cfg.channels) << "], strides ["
      << join_ints(cfg.strides) << "], kernel " << cfg.kernel << "\n";
  int len = cfg.sample_len;
  out << "length trace: " << len;
  for (int i = 0; i < cfg.levels(); ++i) {
    len /= cfg.strides[i];
    out << " -> " << len;
  }
  out << " (mirrored on the way up)\n";
  for (const auto& [name, count] : d.modules) out << "  " << name << ": " << count << "\n";
  out << "total trainable parameters: " << d.total_params << "\n";
  d.text = out.str();
  return d;
}

}  // namespace foley
