// Copyright (c) 2026 The asdkit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "asdkit/nn.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "asdkit/error.hpp"

namespace asdkit::nn {

namespace {

using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRow = Eigen::Map<RowMat>;
using ConstMapRow = Eigen::Map<const RowMat>;

constexpr float kBnEps = 1e-5f;
constexpr float kBnMomentum = 0.1f;

void HeInit(std::vector<float>& w, int fan_in, Rng& rng) {
  const double std = std::sqrt(2.0 / fan_in);
  for (auto& v : w) v = static_cast<float>(std * Gaussian(rng));
}

}  // namespace

// --- LogCompress ----------------------------------------------------------

Tensor LogCompress::Infer(const Tensor& x) const {
  Tensor y = x;
  for (auto& v : y.data) v = std::log1p(std::max(v, 0.0f));
  return y;
}

Tensor LogCompress::Forward(const Tensor& x) {
  input_ = x;
  return Infer(x);
}

Tensor LogCompress::Backward(const Tensor& g) {
  Tensor dx = g;
  for (std::size_t i = 0; i < dx.size(); ++i)
    dx.data[i] = input_.data[i] > 0.0f ? g.data[i] / (1.0f + input_.data[i]) : 0.0f;
  return dx;
}

// --- BatchNorm ------------------------------------------------------------

BatchNorm::BatchNorm(int channels)
    : channels_(channels),
      gamma_{"gamma", std::vector<float>(channels, 1.0f), std::vector<float>(channels, 0.0f)},
      beta_{"beta", std::vector<float>(channels, 0.0f), std::vector<float>(channels, 0.0f)},
      running_mean_(channels, 0.0f),
      running_var_(channels, 1.0f) {}

Tensor BatchNorm::Infer(const Tensor& x) const {
  Require(x.c == channels_, Errc::kShapeMismatch, "batchnorm: channel mismatch");
  Tensor y = x;
  const int plane = x.h * x.w;
  for (int i = 0; i < x.n; ++i)
    for (int c = 0; c < x.c; ++c) {
      const float scale = gamma_.value[c] / std::sqrt(running_var_[c] + kBnEps);
      const float shift = beta_.value[c] - running_mean_[c] * scale;
      float* p = y.Sample(i) + c * plane;
      for (int k = 0; k < plane; ++k) p[k] = p[k] * scale + shift;
    }
  return y;
}

Tensor BatchNorm::Forward(const Tensor& x) {
  Require(x.c == channels_, Errc::kShapeMismatch, "batchnorm: channel mismatch");
  const int plane = x.h * x.w;
  const double count = static_cast<double>(x.n) * plane;
  normalized_ = Tensor(x.n, x.c, x.h, x.w);
  inv_std_.assign(channels_, 0.0f);
  Tensor y(x.n, x.c, x.h, x.w);
  for (int c = 0; c < channels_; ++c) {
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < x.n; ++i) {
      const float* p = x.Sample(i) + c * plane;
      for (int k = 0; k < plane; ++k) sum += p[k];
    }
    const double mean = sum / count;
    for (int i = 0; i < x.n; ++i) {
      const float* p = x.Sample(i) + c * plane;
      for (int k = 0; k < plane; ++k) sq += (p[k] - mean) * (p[k] - mean);
    }
    const double var = sq / count;
    const float inv = static_cast<float>(1.0 / std::sqrt(var + kBnEps));
    inv_std_[c] = inv;
    for (int i = 0; i < x.n; ++i) {
      const float* p = x.Sample(i) + c * plane;
      float* q = normalized_.Sample(i) + c * plane;
      float* o = y.Sample(i) + c * plane;
      for (int k = 0; k < plane; ++k) {
        q[k] = static_cast<float>((p[k] - mean) * inv);
        o[k] = gamma_.value[c] * q[k] + beta_.value[c];
      }
    }
    const double unbiased = count > 1 ? var * count / (count - 1) : var;
    running_mean_[c] = (1 - kBnMomentum) * running_mean_[c] + kBnMomentum * static_cast<float>(mean);
    running_var_[c] = (1 - kBnMomentum) * running_var_[c] + kBnMomentum * static_cast<float>(unbiased);
  }
  return y;
}

Tensor BatchNorm::Backward(const Tensor& g) {
  const int plane = g.h * g.w;
  const double count = static_cast<double>(g.n) * plane;
  Tensor dx(g.n, g.c, g.h, g.w);
  for (int c = 0; c < channels_; ++c) {
    double sum_g = 0.0, sum_gx = 0.0;
    for (int i = 0; i < g.n; ++i) {
      const float* gp = g.Sample(i) + c * plane;
      const float* xp = normalized_.Sample(i) + c * plane;
      for (int k = 0; k < plane; ++k) {
        sum_g += gp[k];
        sum_gx += gp[k] * xp[k];
      }
    }
    gamma_.grad[c] += static_cast<float>(sum_gx);
    beta_.grad[c] += static_cast<float>(sum_g);
    const double scale = gamma_.value[c] * inv_std_[c];
    const double mean_g = sum_g / count, mean_gx = sum_gx / count;
    for (int i = 0; i < g.n; ++i) {
      const float* gp = g.Sample(i) + c * plane;
      const float* xp = normalized_.Sample(i) + c * plane;
      float* dp = dx.Sample(i) + c * plane;
      for (int k = 0; k < plane; ++k)
        dp[k] = static_cast<float>(scale * (gp[k] - mean_g - xp[k] * mean_gx));
    }
  }
  return dx;
}

// --- Conv2d ---------------------------------------------------------------

Conv2d::Conv2d(int in_channels, int out_channels, int kernel_h, int kernel_w, int stride_h,
               int stride_w, Rng& rng)
    : in_(in_channels), out_(out_channels), kh_(kernel_h), kw_(kernel_w), sh_(stride_h),
      sw_(stride_w) {
  Require(in_ > 0 && out_ > 0 && kh_ > 0 && kw_ > 0 && sh_ > 0 && sw_ > 0,
          Errc::kInvalidArgument, "conv2d: all sizes must be positive");
  const int k = in_ * kh_ * kw_;
  weight_ = {"weight", std::vector<float>(static_cast<std::size_t>(out_) * k),
             std::vector<float>(static_cast<std::size_t>(out_) * k, 0.0f)};
  bias_ = {"bias", std::vector<float>(out_, 0.0f), std::vector<float>(out_, 0.0f)};
  HeInit(weight_.value, k, rng);
}

void Conv2d::Im2Col(const float* sample, int h, int w, std::vector<float>& cols) const {
  const int oh = OutHeight(h), ow = OutWidth(w);
  const int p = oh * ow;
  cols.resize(static_cast<std::size_t>(in_) * kh_ * kw_ * p);
  std::size_t row = 0;
  for (int c = 0; c < in_; ++c)
    for (int i = 0; i < kh_; ++i)
      for (int j = 0; j < kw_; ++j, ++row) {
        float* dst = cols.data() + row * p;
        for (int y = 0; y < oh; ++y) {
          const float* src = sample + (static_cast<std::size_t>(c) * h + y * sh_ + i) * w + j;
          for (int x = 0; x < ow; ++x) dst[y * ow + x] = src[x * sw_];
        }
      }
}

Tensor Conv2d::Apply(const Tensor& x, std::vector<std::vector<float>>* cache) const {
  Require(x.c == in_, Errc::kShapeMismatch,
          "conv2d: expected " + std::to_string(in_) + " channels, got " + std::to_string(x.c));
  Require(x.h >= kh_ && x.w >= kw_, Errc::kShapeMismatch, "conv2d: input smaller than kernel");
  const int oh = OutHeight(x.h), ow = OutWidth(x.w), p = oh * ow;
  const int k = in_ * kh_ * kw_;
  Tensor y(x.n, out_, oh, ow);
  ConstMapRow wmat(weight_.value.data(), out_, k);
  Eigen::Map<const Eigen::VectorXf> b(bias_.value.data(), out_);
  std::vector<float> local;
  if (cache) cache->resize(x.n);
  for (int i = 0; i < x.n; ++i) {
    std::vector<float>& cols = cache ? (*cache)[i] : local;
    Im2Col(x.Sample(i), x.h, x.w, cols);
    MapRow out(y.Sample(i), out_, p);
    out.noalias() = wmat * ConstMapRow(cols.data(), k, p);
    out.colwise() += b;
  }
  return y;
}

Tensor Conv2d::Infer(const Tensor& x) const { return Apply(x, nullptr); }

Tensor Conv2d::Forward(const Tensor& x) {
  in_h_ = x.h;
  in_w_ = x.w;
  return Apply(x, &cols_);
}

Tensor Conv2d::Backward(const Tensor& g) {
  const int oh = g.h, ow = g.w, p = oh * ow;
  const int k = in_ * kh_ * kw_;
  Tensor dx(g.n, in_, in_h_, in_w_);
  ConstMapRow wmat(weight_.value.data(), out_, k);
  MapRow dw(weight_.grad.data(), out_, k);
  Eigen::Map<Eigen::VectorXf> db(bias_.grad.data(), out_);
  RowMat dcols(k, p);
  for (int i = 0; i < g.n; ++i) {
    ConstMapRow gout(g.Sample(i), out_, p);
    ConstMapRow cols(cols_[i].data(), k, p);
    dw.noalias() += gout * cols.transpose();
    db += gout.rowwise().sum();
    dcols.noalias() = wmat.transpose() * gout;
    float* dst = dx.Sample(i);
    std::size_t row = 0;
    for (int c = 0; c < in_; ++c)
      for (int a = 0; a < kh_; ++a)
        for (int b = 0; b < kw_; ++b, ++row) {
          const float* src = dcols.data() + row * p;
          for (int y = 0; y < oh; ++y) {
            float* d = dst + (static_cast<std::size_t>(c) * in_h_ + y * sh_ + a) * in_w_ + b;
            for (int x = 0; x < ow; ++x) d[x * sw_] += src[y * ow + x];
          }
        }
  }
  return dx;
}

// --- Relu -----------------------------------------------------------------

Tensor Relu::Infer(const Tensor& x) const {
  Tensor y = x;
  for (auto& v : y.data) v = v > 0.0f ? v : 0.0f;
  return y;
}

Tensor Relu::Forward(const Tensor& x) {
  output_ = Infer(x);
  return output_;
}

Tensor Relu::Backward(const Tensor& g) {
  Tensor dx = g;
  for (std::size_t i = 0; i < dx.size(); ++i)
    if (output_.data[i] <= 0.0f) dx.data[i] = 0.0f;
  return dx;
}

// --- MeanPoolH ------------------------------------------------------------

Tensor MeanPoolH::Infer(const Tensor& x) const {
  Tensor y(x.n, x.c, 1, x.w);
  const float inv = 1.0f / static_cast<float>(x.h);
  for (int i = 0; i < x.n; ++i)
    for (int c = 0; c < x.c; ++c) {
      const float* src = x.Sample(i) + static_cast<std::size_t>(c) * x.h * x.w;
      float* dst = y.Sample(i) + static_cast<std::size_t>(c) * x.w;
      for (int r = 0; r < x.h; ++r)
        for (int k = 0; k < x.w; ++k) dst[k] += src[r * x.w + k];
      for (int k = 0; k < x.w; ++k) dst[k] *= inv;
    }
  return y;
}

Tensor MeanPoolH::Forward(const Tensor& x) {
  in_h_ = x.h;
  return Infer(x);
}

Tensor MeanPoolH::Backward(const Tensor& g) {
  Tensor dx(g.n, g.c, in_h_, g.w);
  const float inv = 1.0f / static_cast<float>(in_h_);
  for (int i = 0; i < g.n; ++i)
    for (int c = 0; c < g.c; ++c) {
      const float* src = g.Sample(i) + static_cast<std::size_t>(c) * g.w;
      float* dst = dx.Sample(i) + static_cast<std::size_t>(c) * in_h_ * g.w;
      for (int r = 0; r < in_h_; ++r)
        for (int k = 0; k < g.w; ++k) dst[r * g.w + k] = src[k] * inv;
    }
  return dx;
}

// --- Linear ---------------------------------------------------------------

Linear::Linear(int in_features, int out_features, Rng& rng) : in_(in_features), out_(out_features) {
  Require(in_ > 0 && out_ > 0, Errc::kInvalidArgument, "linear: sizes must be positive");
  weight_ = {"weight", std::vector<float>(static_cast<std::size_t>(out_) * in_),
             std::vector<float>(static_cast<std::size_t>(out_) * in_, 0.0f)};
  bias_ = {"bias", std::vector<float>(out_, 0.0f), std::vector<float>(out_, 0.0f)};
  // Glorot-style scale keeps the embedding magnitude O(1) at init.
  const double std = std::sqrt(1.0 / in_);
  for (auto& v : weight_.value) v = static_cast<float>(std * Gaussian(rng));
}

Tensor Linear::Infer(const Tensor& x) const {
  Require(static_cast<int>(x.SampleSize()) == in_, Errc::kShapeMismatch,
          "linear: expected " + std::to_string(in_) + " inputs, got " +
              std::to_string(x.SampleSize()));
  Tensor y(x.n, out_, 1, 1);
  ConstMapRow xin(x.data.data(), x.n, in_);
  ConstMapRow wmat(weight_.value.data(), out_, in_);
  MapRow out(y.data.data(), x.n, out_);
  out.noalias() = xin * wmat.transpose();
  out.rowwise() += Eigen::Map<const Eigen::RowVectorXf>(bias_.value.data(), out_);
  return y;
}

Tensor Linear::Forward(const Tensor& x) {
  input_ = x;
  return Infer(x);
}

Tensor Linear::Backward(const Tensor& g) {
  ConstMapRow gout(g.data.data(), g.n, out_);
  ConstMapRow xin(input_.data.data(), input_.n, in_);
  MapRow dw(weight_.grad.data(), out_, in_);
  dw.noalias() += gout.transpose() * xin;
  Eigen::Map<Eigen::RowVectorXf>(bias_.grad.data(), out_) += gout.colwise().sum();
  Tensor dx(input_.n, input_.c, input_.h, input_.w);
  MapRow dxm(dx.data.data(), input_.n, in_);
  dxm.noalias() = gout * ConstMapRow(weight_.value.data(), out_, in_);
  return dx;
}

// --- Sequential -----------------------------------------------------------

Sequential::Sequential(const Sequential& other) {
  for (const auto& l : other.layers_) layers_.push_back(l->Clone());
}

Sequential& Sequential::operator=(const Sequential& other) {
  if (this != &other) {
    layers_.clear();
    for (const auto& l : other.layers_) layers_.push_back(l->Clone());
  }
  return *this;
}

Tensor Sequential::Infer(const Tensor& x) const {
  Tensor y = x;
  for (const auto& l : layers_) y = l->Infer(y);
  return y;
}

Tensor Sequential::Forward(const Tensor& x) {
  Tensor y = x;
  for (auto& l : layers_) y = l->Forward(y);
  return y;
}

Tensor Sequential::Backward(const Tensor& g) {
  Tensor d = g;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) d = (*it)->Backward(d);
  return d;
}

std::vector<Param*> Sequential::Params() {
  std::vector<Param*> out;
  for (auto& l : layers_)
    for (Param* p : l->Params()) out.push_back(p);
  return out;
}

std::vector<std::vector<float>*> Sequential::Buffers() {
  std::vector<std::vector<float>*> out;
  for (auto& l : layers_)
    for (auto* b : l->Buffers()) out.push_back(b);
  return out;
}

std::size_t Sequential::ParameterCount() const {
  std::size_t n = 0;
  for (const auto& l : layers_)
    for (Param* p : const_cast<Layer&>(*l).Params()) n += p->value.size();
  return n;
}

}  // namespace asdkit::nn
