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

// Minimal layer library with explicit backward passes. Every layer has a
// const inference path (Infer) and a caching training path
// (Forward/Backward); only the latter mutates layer state.

#ifndef ASDKIT_NN_HPP_
#define ASDKIT_NN_HPP_

#include <memory>
#include <string>
#include <vector>

#include "asdkit/util.hpp"

namespace asdkit::nn {

/// Dense NCHW float tensor.
struct Tensor {
  int n = 0, c = 0, h = 0, w = 0;
  std::vector<float> data;

  Tensor() = default;
  Tensor(int n_, int c_, int h_, int w_)
      : n(n_), c(c_), h(h_), w(w_), data(static_cast<std::size_t>(n_) * c_ * h_ * w_, 0.0f) {}

  std::size_t size() const { return data.size(); }
  std::size_t SampleSize() const { return static_cast<std::size_t>(c) * h * w; }
  float* Sample(int i) { return data.data() + i * SampleSize(); }
  const float* Sample(int i) const { return data.data() + i * SampleSize(); }
  bool SameShape(const Tensor& o) const { return n == o.n && c == o.c && h == o.h && w == o.w; }
};

struct Param {
  std::string name;
  std::vector<float> value;
  std::vector<float> grad;

  void ZeroGrad() { std::fill(grad.begin(), grad.end(), 0.0f); }
};

class Layer {
 public:
  virtual ~Layer() = default;
  virtual std::string Kind() const = 0;
  virtual Tensor Infer(const Tensor& x) const = 0;
  virtual Tensor Forward(const Tensor& x) = 0;
  /// Accumulates parameter gradients and returns the input gradient.
  virtual Tensor Backward(const Tensor& grad_out) = 0;
  virtual std::vector<Param*> Params() { return {}; }
  /// Non-trainable state that must survive checkpointing (e.g. running stats).
  virtual std::vector<std::vector<float>*> Buffers() { return {}; }
  virtual std::unique_ptr<Layer> Clone() const = 0;
};

class LogCompress final : public Layer {
 public:
  std::string Kind() const override { return "log1p"; }
  Tensor Infer(const Tensor& x) const override;
  Tensor Forward(const Tensor& x) override;
  Tensor Backward(const Tensor& grad_out) override;
  std::unique_ptr<Layer> Clone() const override { return std::make_unique<LogCompress>(*this); }

 private:
  Tensor input_;
};

class BatchNorm final : public Layer {
 public:
  explicit BatchNorm(int channels);
  std::string Kind() const override { return "batchnorm"; }
  Tensor Infer(const Tensor& x) const override;
  Tensor Forward(const Tensor& x) override;
  Tensor Backward(const Tensor& grad_out) override;
  std::vector<Param*> Params() override { return {&gamma_, &beta_}; }
  std::vector<std::vector<float>*> Buffers() override { return {&running_mean_, &running_var_}; }
  std::unique_ptr<Layer> Clone() const override { return std::make_unique<BatchNorm>(*this); }

 private:
  int channels_;
  Param gamma_, beta_;
  std::vector<float> running_mean_, running_var_;
  Tensor normalized_;
  std::vector<float> inv_std_;
};

class Conv2d final : public Layer {
 public:
  Conv2d(int in_channels, int out_channels, int kernel_h, int kernel_w, int stride_h,
         int stride_w, Rng& rng);
  std::string Kind() const override { return "conv2d"; }
  Tensor Infer(const Tensor& x) const override;
  Tensor Forward(const Tensor& x) override;
  Tensor Backward(const Tensor& grad_out) override;
  std::vector<Param*> Params() override { return {&weight_, &bias_}; }
  std::unique_ptr<Layer> Clone() const override { return std::make_unique<Conv2d>(*this); }

  int OutHeight(int h) const { return (h - kh_) / sh_ + 1; }
  int OutWidth(int w) const { return (w - kw_) / sw_ + 1; }

 private:
  void Im2Col(const float* sample, int h, int w, std::vector<float>& cols) const;
  Tensor Apply(const Tensor& x, std::vector<std::vector<float>>* cols_cache) const;

  int in_, out_, kh_, kw_, sh_, sw_;
  Param weight_, bias_;  // weight: out x (in*kh*kw), row-major
  std::vector<std::vector<float>> cols_;
  int in_h_ = 0, in_w_ = 0;
};

class Relu final : public Layer {
 public:
  std::string Kind() const override { return "relu"; }
  Tensor Infer(const Tensor& x) const override;
  Tensor Forward(const Tensor& x) override;
  Tensor Backward(const Tensor& grad_out) override;
  std::unique_ptr<Layer> Clone() const override { return std::make_unique<Relu>(*this); }

 private:
  Tensor output_;
};

/// Averages over the H (time) axis: NCHW -> NC1W.
class MeanPoolH final : public Layer {
 public:
  std::string Kind() const override { return "meanpool_h"; }
  Tensor Infer(const Tensor& x) const override;
  Tensor Forward(const Tensor& x) override;
  Tensor Backward(const Tensor& grad_out) override;
  std::unique_ptr<Layer> Clone() const override { return std::make_unique<MeanPoolH>(*this); }

 private:
  int in_h_ = 0;
};

/// Fully connected layer on the flattened sample (C*H*W) -> (out,1,1).
class Linear final : public Layer {
 public:
  Linear(int in_features, int out_features, Rng& rng);
  std::string Kind() const override { return "linear"; }
  Tensor Infer(const Tensor& x) const override;
  Tensor Forward(const Tensor& x) override;
  Tensor Backward(const Tensor& grad_out) override;
  std::vector<Param*> Params() override { return {&weight_, &bias_}; }
  std::unique_ptr<Layer> Clone() const override { return std::make_unique<Linear>(*this); }

 private:
  int in_, out_;
  Param weight_, bias_;  // weight: out x in, row-major
  Tensor input_;
};

class Sequential {
 public:
  Sequential() = default;
  Sequential(const Sequential& other);
  Sequential& operator=(const Sequential& other);
  Sequential(Sequential&&) noexcept = default;
  Sequential& operator=(Sequential&&) noexcept = default;

  void Add(std::unique_ptr<Layer> layer) { layers_.push_back(std::move(layer)); }
  Tensor Infer(const Tensor& x) const;
  Tensor Forward(const Tensor& x);
  Tensor Backward(const Tensor& grad_out);
  std::vector<Param*> Params();
  std::vector<std::vector<float>*> Buffers();
  std::size_t ParameterCount() const;
  std::size_t size() const { return layers_.size(); }
  const Layer& layer(std::size_t i) const { return *layers_[i]; }

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

}  // namespace asdkit::nn

#endif  // ASDKIT_NN_HPP_
