#pragma once

// Deep Q-learning pieces: epsilon-greedy selection, TD targets, the minibatch
// squared-error step with plain SGD, and the loss-threshold stop rule.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hidjam/dqn/network.hpp"
#include "hidjam/dqn/replay.hpp"
#include "hidjam/jammers.hpp"  // LinearEpsilon
#include "hidjam/state_matrix.hpp"

namespace hidjam::dqn {

struct TrainConfig {
  double discount = 0.8;
  double learning_rate = 3e-5;
  std::size_t batch_size = 32;
  std::size_t replay_capacity = 2000;
  std::size_t train_start_size = 200;
  double loss_threshold = 0.05;
  std::size_t loss_window = 50;
  LinearEpsilon epsilon{1.0, 0.05, 2000};
  // Steps between refreshes of the TD-target snapshot; 1 = weights from before this step.
  std::size_t target_sync_interval = 1;
  // Rescales a step whose gradient norm exceeds this; 0 leaves SGD unclipped.
  double max_grad_norm = 0.0;

  void validate() const {
    if (!(discount >= 0.0 && discount < 1.0)) throw std::invalid_argument("dqn: discount must lie in [0, 1)");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("dqn: learning_rate must be positive");
    if (batch_size == 0) throw std::invalid_argument("dqn: batch_size must be positive");
    if (train_start_size == 0 || train_start_size > replay_capacity)
      throw std::invalid_argument("dqn: train_start_size must lie in [1, replay_capacity]");
    if (!(loss_threshold >= 0.0)) throw std::invalid_argument("dqn: loss_threshold must be non-negative");
    if (loss_window == 0) throw std::invalid_argument("dqn: loss_window must be positive");
    for (double e : {epsilon.start, epsilon.end})
      if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("dqn: epsilon values must lie in [0, 1]");
    if (target_sync_interval == 0) throw std::invalid_argument("dqn: target_sync_interval must be positive");
    if (!(max_grad_norm >= 0.0)) throw std::invalid_argument("dqn: max_grad_norm must be non-negative");
  }
};

// Argmax with lowest-index ties, replaced by a uniform channel with probability epsilon.
template <typename Scalar>
Channel select_action(std::span<const Scalar> q_values, double epsilon, Rng& rng) {
  if (q_values.empty()) throw std::invalid_argument("select_action: no action values");
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (u < epsilon) return uniform_channel(static_cast<int>(q_values.size()), rng);
  return static_cast<Channel>(std::max_element(q_values.begin(), q_values.end()) - q_values.begin()) + 1;
}

template <typename Scalar>
typename QNetwork<Scalar>::Matrix to_batch(std::span<const StateMatrix* const> states, int input_size) {
  typename QNetwork<Scalar>::Matrix m(input_size, static_cast<Eigen::Index>(states.size()));
  for (std::size_t b = 0; b < states.size(); ++b) {
    const auto v = states[b]->values();
    if (static_cast<int>(v.size()) != input_size) throw std::domain_error("state shape does not match network input");
    for (int i = 0; i < input_size; ++i) m(i, static_cast<Eigen::Index>(b)) = static_cast<Scalar>(v[i]);
  }
  return m;
}

template <typename Scalar>
std::vector<Scalar> q_forward(const QNetwork<Scalar>& net, const StateMatrix& state) {
  const StateMatrix* p = &state;
  const auto out = net.forward(to_batch<Scalar>(std::span<const StateMatrix* const>(&p, 1), net.input_size()));
  return std::vector<Scalar>(out.data(), out.data() + out.rows());
}

// eta = r + gamma * max_a Q(next, a; previous weights)
template <typename Scalar>
double td_target(double reward, const StateMatrix& next_state, const QNetwork<Scalar>& previous, double discount) {
  const auto q = q_forward(previous, next_state);
  return reward + discount * static_cast<double>(*std::max_element(q.begin(), q.end()));
}

template <typename Scalar>
struct LossAndGradient {
  double loss = 0.0;
  typename QNetwork<Scalar>::Vector gradient;
};

// Mean squared TD error over the batch; the gradient flows only through the taken
// action's output, the targets come from `target` and are held fixed.
template <typename Scalar>
LossAndGradient<Scalar> batch_loss_and_gradient(const QNetwork<Scalar>& net, const QNetwork<Scalar>& target,
                                                std::span<const Experience* const> batch, double discount) {
  using Matrix = typename QNetwork<Scalar>::Matrix;
  const auto bsz = static_cast<Eigen::Index>(batch.size());
  std::vector<const StateMatrix*> states, next_states;
  for (const Experience* e : batch) {
    states.push_back(&e->state);
    next_states.push_back(&e->next_state);
  }
  const Matrix q_next = target.forward(to_batch<Scalar>(next_states, target.input_size()));
  typename QNetwork<Scalar>::Cache cache;
  const Matrix q = net.forward(to_batch<Scalar>(states, net.input_size()), cache);

  Matrix d_out = Matrix::Zero(q.rows(), bsz);
  double loss = 0.0;
  for (Eigen::Index b = 0; b < bsz; ++b) {
    const Experience& e = *batch[static_cast<std::size_t>(b)];
    const double eta = e.reward + discount * static_cast<double>(q_next.col(b).maxCoeff());
    const double err = eta - static_cast<double>(q(e.action - 1, b));
    loss += err * err;
    d_out(e.action - 1, b) = static_cast<Scalar>(-2.0 * err / static_cast<double>(bsz));
  }
  return {loss / static_cast<double>(bsz), net.backward(cache, d_out)};
}

struct TrainResult {
  bool trained = false;  // false when the buffer is below train_start_size
  double loss = 0.0;
};

// One SGD step on a uniformly sampled minibatch. `target` supplies the TD targets
// and is not touched by the update.
template <typename Scalar>
TrainResult train_step(QNetwork<Scalar>& net, const QNetwork<Scalar>& target, const ReplayBuffer& buffer,
                       const TrainConfig& config, Rng& rng) {
  if (buffer.size() < config.train_start_size) return {};
  const auto batch = buffer.sample(config.batch_size, rng);
  auto lg = batch_loss_and_gradient(net, target, batch, config.discount);
  if (!std::isfinite(lg.loss)) throw std::runtime_error("DQN training diverged: non-finite loss");
  double step = config.learning_rate;
  if (config.max_grad_norm > 0.0) {
    const double norm = static_cast<double>(lg.gradient.norm());
    if (norm > config.max_grad_norm) step *= config.max_grad_norm / norm;
  }
  net.params() -= static_cast<Scalar>(step) * lg.gradient;
  return {true, lg.loss};
}

// Training stays active until the moving average of the last `window` losses drops
// strictly below the threshold; once off it stays off.
class TrainingMonitor {
 public:
  TrainingMonitor(double threshold, std::size_t window) : threshold_(threshold), window_(window) {}

  bool active() const { return active_; }

  bool observe(double loss) {
    if (!active_) return false;
    losses_.push_back(loss);
    sum_ += loss;
    if (losses_.size() > window_) {
      sum_ -= losses_.front();
      losses_.pop_front();
    }
    if (losses_.size() == window_ && sum_ / static_cast<double>(window_) < threshold_) active_ = false;
    return active_;
  }

  std::optional<double> moving_average() const {
    if (losses_.empty()) return std::nullopt;
    return sum_ / static_cast<double>(losses_.size());
  }

 private:
  double threshold_;
  std::size_t window_;
  std::deque<double> losses_;
  double sum_ = 0.0;
  bool active_ = true;
};

}  // namespace hidjam::dqn
