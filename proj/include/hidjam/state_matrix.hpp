#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <span>
#include <stdexcept>
#include <vector>

#include "hidjam/spectrum.hpp"

namespace hidjam {

// T x N waterfall of normalized spectrum samples, oldest frame in row 0.
class StateMatrix {
 public:
  StateMatrix() = default;
  StateMatrix(int history, int channels)
      : history_(history), channels_(channels), data_(static_cast<std::size_t>(history) * channels, 0.0) {
    if (history < 1 || channels < 1) throw std::invalid_argument("StateMatrix: shape must be positive");
  }

  int history() const { return history_; }
  int channels() const { return channels_; }
  std::size_t size() const { return data_.size(); }

  double operator()(int row, int channel_index) const { return data_[index(row, channel_index)]; }
  double& operator()(int row, int channel_index) { return data_[index(row, channel_index)]; }

  std::span<const double> values() const { return data_; }
  std::span<double> values() { return data_; }

  bool same_shape(const StateMatrix& o) const { return history_ == o.history_ && channels_ == o.channels_; }

  friend bool operator==(const StateMatrix&, const StateMatrix&) = default;

 private:
  std::size_t index(int row, int c) const { return static_cast<std::size_t>(row) * channels_ + c; }

  int history_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

// Affine dB -> [0, 1] map, clipped at both ends.
struct NormalizationRange {
  double floor_db = -90.0;
  double ceil_db = -20.0;

  double operator()(double db) const {
    return std::clamp((db - floor_db) / (ceil_db - floor_db), 0.0, 1.0);
  }

  void validate() const {
    if (!(ceil_db > floor_db)) throw std::invalid_argument("normalization: ceil_db must exceed floor_db");
  }
};

// Stacks the newest `history` frames oldest-first. Missing rows at the top stay zero.
inline StateMatrix assemble_state(const std::deque<SpectrumFrame>& frames, int history, int channels,
                                  const NormalizationRange& norm) {
  StateMatrix s(history, channels);
  const std::size_t used = std::min(frames.size(), static_cast<std::size_t>(history));
  const std::size_t skip = frames.size() - used;
  const int pad = history - static_cast<int>(used);
  for (std::size_t k = 0; k < used; ++k) {
    const auto& samples = frames[skip + k].samples_db;
    if (static_cast<int>(samples.size()) != channels)
      throw std::invalid_argument("assemble_state: frame width does not match channel count");
    for (int n = 0; n < channels; ++n) s(pad + static_cast<int>(k), n) = norm(samples[n]);
  }
  return s;
}

}  // namespace hidjam
