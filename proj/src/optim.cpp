#include "mfdm/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace mfdm {

const char* to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::SGD: return "sgd";
    case OptimizerKind::RMSprop: return "rmsprop";
    case OptimizerKind::AdamW: return "adamw";
  }
  return "?";
}

OptimizerKind optimizer_kind_from_string(const std::string& s) {
  if (s == "sgd") return OptimizerKind::SGD;
  if (s == "rmsprop") return OptimizerKind::RMSprop;
  if (s == "adamw") return OptimizerKind::AdamW;
  throw std::invalid_argument("unknown optimizer kind '" + s + "'");
}

Optimizer::Optimizer(OptimizerConfig config, std::vector<ParamGroup> groups)
    : config_(config), groups_(std::move(groups)) {
  if (groups_.empty()) throw std::invalid_argument("optimizer: need at least one group");
  for (const auto& g : groups_) {
    if (!(g.lr > 0.0) || !std::isfinite(g.lr))
      throw std::invalid_argument("optimizer: group '" + g.id + "' needs a positive finite lr");
    if (g.weight_decay < 0.0)
      throw std::invalid_argument("optimizer: negative weight decay in group '" + g.id + "'");
  }
}

void Optimizer::init_state(std::span<const Matrix* const> params) {
  state_.clear();
  const int buffers = config_.kind == OptimizerKind::AdamW ? 2 : 1;
  for (const Matrix* p : params)
    for (int b = 0; b < buffers; ++b) state_.emplace_back(p->rows(), p->cols());
  step_count_ = 0;
  initialized_ = true;
}

void Optimizer::restore(std::vector<Matrix> state, std::uint64_t step_count) {
  state_ = std::move(state);
  step_count_ = step_count;
  initialized_ = true;
}

void Optimizer::step(std::span<Matrix* const> params, std::span<const Matrix* const> grads,
                     std::span<const int> group_of) {
  if (!initialized_) throw std::logic_error("optimizer: step before init_state");
  if (params.size() != grads.size() || params.size() != group_of.size())
    throw std::invalid_argument("optimizer: params/grads/groups size mismatch");
  const int buffers = config_.kind == OptimizerKind::AdamW ? 2 : 1;
  if (state_.size() != params.size() * buffers)
    throw std::invalid_argument("optimizer: state does not match parameter count");

  ++step_count_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_count_));

  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& p = *params[i];
    const Matrix& g = *grads[i];
    if (g.rows() != p.rows() || g.cols() != p.cols())
      throw std::invalid_argument("optimizer: gradient shape mismatch");
    if (group_of[i] < 0 || static_cast<std::size_t>(group_of[i]) >= groups_.size())
      throw std::invalid_argument("optimizer: bad group index");
    const ParamGroup& group = groups_[group_of[i]];

    switch (config_.kind) {
      case OptimizerKind::SGD: {
        Matrix& v = state_[i];
        if (v.rows() != p.rows() || v.cols() != p.cols())
          throw std::invalid_argument("optimizer: state shape mismatch");
        for (std::size_t k = 0; k < p.size(); ++k) {
          if (group.weight_decay != 0.0) p.data()[k] *= 1.0 - group.lr * group.weight_decay;
          v.data()[k] = config_.momentum * v.data()[k] + g.data()[k];
          p.data()[k] -= group.lr * v.data()[k];
        }
        break;
      }
      case OptimizerKind::RMSprop: {
        Matrix& s = state_[i];
        if (s.rows() != p.rows() || s.cols() != p.cols())
          throw std::invalid_argument("optimizer: state shape mismatch");
        for (std::size_t k = 0; k < p.size(); ++k) {
          if (group.weight_decay != 0.0) p.data()[k] *= 1.0 - group.lr * group.weight_decay;
          const double gk = g.data()[k];
          s.data()[k] = config_.rho * s.data()[k] + (1.0 - config_.rho) * gk * gk;
          p.data()[k] -= group.lr * gk / (std::sqrt(s.data()[k]) + config_.epsilon);
        }
        break;
      }
      case OptimizerKind::AdamW: {
        Matrix& m = state_[2 * i];
        Matrix& v = state_[2 * i + 1];
        if (m.rows() != p.rows() || v.rows() != p.rows() || m.cols() != p.cols() ||
            v.cols() != p.cols())
          throw std::invalid_argument("optimizer: state shape mismatch");
        for (std::size_t k = 0; k < p.size(); ++k) {
          if (group.weight_decay != 0.0) p.data()[k] *= 1.0 - group.lr * group.weight_decay;
          const double gk = g.data()[k];
          m.data()[k] = config_.beta1 * m.data()[k] + (1.0 - config_.beta1) * gk;
          v.data()[k] = config_.beta2 * v.data()[k] + (1.0 - config_.beta2) * gk * gk;
          const double m_hat = m.data()[k] / bc1;
          const double v_hat = v.data()[k] / bc2;
          p.data()[k] -= group.lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
        }
        break;
      }
    }
  }
}

}  // namespace mfdm
