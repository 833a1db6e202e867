#pragma once

// Feed-forward Q network over a single-channel T x N spectrum waterfall.
//
// The architecture is data: a list of convolution (valid padding), ReLU and dense
// layers. All weights live in one flat parameter vector in layer order (for each
// layer: weights, then biases), which is also the checkpoint order. Activations are
// column-per-sample matrices so a whole minibatch runs through each layer as one
// matrix product.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hidjam/types.hpp"

namespace hidjam::dqn {

struct Shape3 {
  int channels = 1;
  int height = 1;
  int width = 1;

  int size() const { return channels * height * width; }
  friend bool operator==(const Shape3&, const Shape3&) = default;
};

enum class LayerKind : int { conv = 1, relu = 2, dense = 3 };

struct LayerSpec {
  LayerKind kind = LayerKind::relu;
  int out_channels = 0;  // conv filters
  int kernel_h = 0;
  int kernel_w = 0;
  int stride_h = 1;
  int stride_w = 1;
  int units = 0;  // dense outputs

  static LayerSpec conv(int filters, int kh, int kw, int sh, int sw) {
    return {LayerKind::conv, filters, kh, kw, sh, sw, 0};
  }
  static LayerSpec relu() { return {LayerKind::relu}; }
  static LayerSpec dense(int units) { return {LayerKind::dense, 0, 0, 0, 1, 1, units}; }

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct Architecture {
  Shape3 input;
  std::vector<LayerSpec> layers;

  // conv 8@5x3/(2,1) -> relu -> conv 16@3x3/(2,1) -> relu -> dense 64 -> relu -> dense N
  static Architecture waterfall(int history, int channels) {
    return {{1, history, channels},
            {LayerSpec::conv(8, 5, 3, 2, 1), LayerSpec::relu(), LayerSpec::conv(16, 3, 3, 2, 1),
             LayerSpec::relu(), LayerSpec::dense(64), LayerSpec::relu(), LayerSpec::dense(channels)}};
  }

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

struct LayerPlan {
  LayerSpec spec;
  Shape3 in;
  Shape3 out;
  std::size_t weight_offset = 0;
  std::size_t weight_count = 0;
  std::size_t bias_offset = 0;
  std::size_t bias_count = 0;
  int fan_in = 0;
  int fan_out = 0;
};

// Resolves every layer's input/output shape and parameter slice.
inline std::vector<LayerPlan> plan_layers(const Architecture& arch) {
  if (arch.input.size() <= 0) throw std::invalid_argument("architecture: empty input shape");
  std::vector<LayerPlan> plans;
  Shape3 shape = arch.input;
  std::size_t offset = 0;
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    const LayerSpec& s = arch.layers[i];
    LayerPlan p;
    p.spec = s;
    p.in = shape;
    switch (s.kind) {
      case LayerKind::conv: {
        if (s.out_channels <= 0 || s.kernel_h <= 0 || s.kernel_w <= 0 || s.stride_h <= 0 || s.stride_w <= 0)
          throw std::invalid_argument("architecture: bad conv parameters at layer " + std::to_string(i));
        if (s.kernel_h > shape.height || s.kernel_w > shape.width)
          throw std::invalid_argument("architecture: conv kernel larger than input at layer " + std::to_string(i));
        p.out = {s.out_channels, (shape.height - s.kernel_h) / s.stride_h + 1,
                 (shape.width - s.kernel_w) / s.stride_w + 1};
        p.fan_in = shape.channels * s.kernel_h * s.kernel_w;
        p.fan_out = s.out_channels * s.kernel_h * s.kernel_w;
        p.weight_count = static_cast<std::size_t>(s.out_channels) * p.fan_in;
        p.bias_count = static_cast<std::size_t>(s.out_channels);
        break;
      }
      case LayerKind::relu:
        p.out = shape;
        break;
      case LayerKind::dense: {
        if (s.units <= 0) throw std::invalid_argument("architecture: bad dense width at layer " + std::to_string(i));
        p.out = {s.units, 1, 1};
        p.fan_in = shape.size();
        p.fan_out = s.units;
        p.weight_count = static_cast<std::size_t>(s.units) * shape.size();
        p.bias_count = static_cast<std::size_t>(s.units);
        break;
      }
      default:
        throw std::invalid_argument("architecture: unknown layer kind at layer " + std::to_string(i));
    }
    p.weight_offset = offset;
    offset += p.weight_count;
    p.bias_offset = offset;
    offset += p.bias_count;
    plans.push_back(p);
    shape = p.out;
  }
  return plans;
}

template <typename Scalar>
class QNetwork {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  // Per-layer activations kept for the backward pass; acts[0] is the input batch.
  struct Cache {
    std::vector<Matrix> acts;
    std::vector<Matrix> cols;  // im2col buffers of conv layers
  };

  explicit QNetwork(Architecture arch) : arch_(std::move(arch)), plans_(plan_layers(arch_)) {
    const Shape3 out = plans_.empty() ? arch_.input : plans_.back().out;
    num_outputs_ = out.size();
    std::size_t total = 0;
    for (const auto& p : plans_) total += p.weight_count + p.bias_count;
    params_ = Vector::Zero(static_cast<Eigen::Index>(total));
  }

  const Architecture& architecture() const { return arch_; }
  const std::vector<LayerPlan>& layer_plans() const { return plans_; }
  int input_size() const { return arch_.input.size(); }
  int num_outputs() const { return num_outputs_; }
  std::size_t num_params() const { return static_cast<std::size_t>(params_.size()); }

  const Vector& params() const { return params_; }
  Vector& params() { return params_; }

  // Uniform in [-r, r], r = sqrt(6 / (fan_in + fan_out)); biases start at zero.
  void init_uniform(Rng& rng) {
    params_.setZero();
    for (const auto& p : plans_) {
      if (p.weight_count == 0) continue;
      const double r = std::sqrt(6.0 / static_cast<double>(p.fan_in + p.fan_out));
      std::uniform_real_distribution<double> dist(-r, r);
      for (std::size_t i = 0; i < p.weight_count; ++i)
        params_[static_cast<Eigen::Index>(p.weight_offset + i)] = static_cast<Scalar>(dist(rng));
    }
  }

  // inputs: input_size() x batch. Returns num_outputs() x batch.
  Matrix forward(const Matrix& inputs) const {
    Cache cache;
    return forward(inputs, cache);
  }

  Matrix forward(const Matrix& inputs, Cache& cache) const {
    if (inputs.rows() != input_size())
      throw std::domain_error("QNetwork: input has " + std::to_string(inputs.rows()) + " rows, expected " +
                              std::to_string(input_size()));
    cache.acts.assign(plans_.size() + 1, Matrix());
    cache.cols.assign(plans_.size(), Matrix());
    cache.acts[0] = inputs;
    for (std::size_t l = 0; l < plans_.size(); ++l) {
      const LayerPlan& p = plans_[l];
      const Matrix& x = cache.acts[l];
      Matrix& y = cache.acts[l + 1];
      switch (p.spec.kind) {
        case LayerKind::conv:
          conv_forward(p, x, cache.cols[l], y);
          break;
        case LayerKind::relu:
          y = x.cwiseMax(Scalar(0));
          break;
        case LayerKind::dense:
          y = (weights(p) * x).colwise() + biases(p);
          break;
      }
    }
    return cache.acts.back();
  }

  Vector forward_one(std::span<const Scalar> state) const {
    if (static_cast<int>(state.size()) != input_size())
      throw std::domain_error("QNetwork: state has " + std::to_string(state.size()) + " values, expected " +
                              std::to_string(input_size()));
    Matrix in = Eigen::Map<const Vector>(state.data(), static_cast<Eigen::Index>(state.size()));
    return forward(in).col(0);
  }

  // Gradient of sum_{k,b} d_out(k,b) * out(k,b) with respect to the parameters,
  // given the cache of the forward pass that produced `out`.
  Vector backward(const Cache& cache, const Matrix& d_out) const {
    Vector grad = Vector::Zero(params_.size());
    Matrix delta = d_out;
    for (std::size_t l = plans_.size(); l-- > 0;) {
      const LayerPlan& p = plans_[l];
      const Matrix& x = cache.acts[l];
      switch (p.spec.kind) {
        case LayerKind::conv:
          delta = conv_backward(p, x, cache.cols[l], delta, grad, l > 0);
          break;
        case LayerKind::relu:
          delta = (cache.acts[l + 1].array() > Scalar(0)).select(delta, Scalar(0));
          break;
        case LayerKind::dense: {
          Eigen::Map<Matrix> gw(grad.data() + p.weight_offset, p.spec.units, p.in.size());
          gw.noalias() += delta * x.transpose();
          Eigen::Map<Vector>(grad.data() + p.bias_offset, p.spec.units) += delta.rowwise().sum();
          if (l > 0) delta = weights(p).transpose() * delta;
          break;
        }
      }
    }
    return grad;
  }

 private:
  Eigen::Map<const Matrix> weights(const LayerPlan& p) const {
    const auto rows = p.spec.kind == LayerKind::conv ? p.spec.out_channels : p.spec.units;
    return {params_.data() + p.weight_offset, rows, static_cast<Eigen::Index>(p.weight_count / rows)};
  }
  Eigen::Map<const Vector> biases(const LayerPlan& p) const {
    return {params_.data() + p.bias_offset, static_cast<Eigen::Index>(p.bias_count)};
  }

  // Column (b * P + pos) of `col` holds the receptive field of output position `pos`
  // of sample b; row index is c * kh * kw + i * kw + j.
  static void im2col(const LayerPlan& p, const Matrix& x, Matrix& col) {
    const auto& s = p.spec;
    const int positions = p.out.height * p.out.width;
    const auto batch = x.cols();
    col.resize(p.fan_in, batch * positions);
    for (Eigen::Index b = 0; b < batch; ++b) {
      const Scalar* src = x.col(b).data();
      for (int oy = 0; oy < p.out.height; ++oy) {
        for (int ox = 0; ox < p.out.width; ++ox) {
          Scalar* dst = col.col(b * positions + oy * p.out.width + ox).data();
          int r = 0;
          for (int c = 0; c < p.in.channels; ++c) {
            const Scalar* plane = src + static_cast<std::ptrdiff_t>(c) * p.in.height * p.in.width;
            for (int i = 0; i < s.kernel_h; ++i) {
              const Scalar* row = plane + (oy * s.stride_h + i) * p.in.width + ox * s.stride_w;
              for (int j = 0; j < s.kernel_w; ++j) dst[r++] = row[j];
            }
          }
        }
      }
    }
  }

  void conv_forward(const LayerPlan& p, const Matrix& x, Matrix& col, Matrix& y) const {
    im2col(p, x, col);
    const int positions = p.out.height * p.out.width;
    const Matrix z = (weights(p) * col).colwise() + biases(p);  // filters x (batch * positions)
    y.resize(p.out.size(), x.cols());
    for (Eigen::Index b = 0; b < x.cols(); ++b) {
      // sample layout is filter-major: index = f * positions + pos
      Eigen::Map<Matrix>(y.col(b).data(), positions, p.spec.out_channels) =
          z.middleCols(b * positions, positions).transpose();
    }
  }

  Matrix conv_backward(const LayerPlan& p, const Matrix& x, const Matrix& col, const Matrix& delta,
                       Vector& grad, bool need_input_grad) const {
    const int positions = p.out.height * p.out.width;
    const auto batch = x.cols();
    Matrix dz(p.spec.out_channels, batch * positions);
    for (Eigen::Index b = 0; b < batch; ++b) {
      dz.middleCols(b * positions, positions) =
          Eigen::Map<const Matrix>(delta.col(b).data(), positions, p.spec.out_channels).transpose();
    }
    Eigen::Map<Matrix> gw(grad.data() + p.weight_offset, p.spec.out_channels, p.fan_in);
    gw.noalias() += dz * col.transpose();
    Eigen::Map<Vector>(grad.data() + p.bias_offset, p.spec.out_channels) += dz.rowwise().sum();
    if (!need_input_grad) return Matrix();

    const Matrix dcol = weights(p).transpose() * dz;
    Matrix dx = Matrix::Zero(x.rows(), batch);
    const auto& s = p.spec;
    for (Eigen::Index b = 0; b < batch; ++b) {
      Scalar* dst = dx.col(b).data();
      for (int oy = 0; oy < p.out.height; ++oy) {
        for (int ox = 0; ox < p.out.width; ++ox) {
          const Scalar* src = dcol.col(b * positions + oy * p.out.width + ox).data();
          int r = 0;
          for (int c = 0; c < p.in.channels; ++c) {
            Scalar* plane = dst + static_cast<std::ptrdiff_t>(c) * p.in.height * p.in.width;
            for (int i = 0; i < s.kernel_h; ++i) {
              Scalar* row = plane + (oy * s.stride_h + i) * p.in.width + ox * s.stride_w;
              for (int j = 0; j < s.kernel_w; ++j) row[j] += src[r++];
            }
          }
        }
      }
    }
    return dx;
  }

  Architecture arch_;
  std::vector<LayerPlan> plans_;
  int num_outputs_ = 0;
  Vector params_;
};

}  // namespace hidjam::dqn
