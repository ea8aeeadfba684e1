#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mfdm/matrix.hpp"

namespace mfdm {

enum class OptimizerKind { SGD, RMSprop, AdamW };

const char* to_string(OptimizerKind kind);
OptimizerKind optimizer_kind_from_string(const std::string& s);

// Parameter groups carry per-group learning rates so the model and the mean
// fields can move at very different speeds (1e-4 vs 2e-1 in the reference
// protocol). Weight decay is decoupled for every kind.
struct ParamGroup {
  std::string id;
  double lr = 1e-4;
  double weight_decay = 0.0;
};

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::AdamW;
  double momentum = 0.9;  // SGD
  double rho = 0.99;      // RMSprop smoothing
  double beta1 = 0.9;     // AdamW
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Optimizer {
 public:
  Optimizer(OptimizerConfig config, std::vector<ParamGroup> groups);

  // Allocates moment buffers matching the given parameter shapes.
  void init_state(std::span<const Matrix* const> params);

  // One update. params[i] is assigned to groups[group_of[i]].
  //   SGD:      v <- mu v + g;              p <- p - lr v
  //   RMSprop:  s <- rho s + (1-rho) g^2;   p <- p - lr g / (sqrt(s) + eps)
  //   AdamW:    p <- p (1 - lr wd), then bias-corrected moment step
  void step(std::span<Matrix* const> params, std::span<const Matrix* const> grads,
            std::span<const int> group_of);

  const OptimizerConfig& config() const { return config_; }
  const std::vector<ParamGroup>& groups() const { return groups_; }
  std::uint64_t step_count() const { return step_count_; }

  // Moment buffers in update order, for checkpointing.
  std::vector<Matrix>& state() { return state_; }
  const std::vector<Matrix>& state() const { return state_; }
  void restore(std::vector<Matrix> state, std::uint64_t step_count);

 private:
  OptimizerConfig config_;
  std::vector<ParamGroup> groups_;
  std::vector<Matrix> state_;  // per param: 1 buffer (SGD, RMSprop) or 2 (AdamW)
  std::uint64_t step_count_ = 0;
  bool initialized_ = false;
};

}  // namespace mfdm
