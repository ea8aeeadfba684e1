#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mfdm/matrix.hpp"

namespace mfdm {

// Small trainable backbones with hand-written backprop.
//   Table:  one learnable row per training sample (lookup by index)
//   Linear: features -> embeddings affine map
//   MLP1:   features -> hidden (ReLU) -> embeddings
enum class ModelKind { Table, Linear, MLP1 };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

struct ModelParams {
  ModelKind kind = ModelKind::Linear;
  std::size_t input_dim = 0;      // feature dim, or table row count for Table
  std::size_t hidden_dim = 0;     // MLP1 only
  std::size_t embedding_dim = 0;  // d
  // Table: [table(n x d)]
  // Linear: [W(f x d), b(1 x d)]
  // MLP1:  [W1(f x h), b1(1 x h), W2(h x d), b2(1 x d)]
  std::vector<Matrix> tensors;
};

// Linear/MLP1 weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases
// zero; Table rows uniform on the unit sphere.
ModelParams init_model(ModelKind kind, std::size_t input_dim, std::size_t hidden_dim,
                       std::size_t embedding_dim, std::uint64_t seed);

// Everything backward() needs from the matching forward() call.
struct ForwardCache {
  ModelKind kind = ModelKind::Linear;
  std::vector<int> indices;  // Table
  Matrix inputs;             // Linear/MLP1
  Matrix hidden;             // MLP1 post-activation
};

Matrix forward(const ModelParams& params, const Matrix& features, ForwardCache* cache = nullptr);
Matrix forward(const ModelParams& params, std::span<const int> indices,
               ForwardCache* cache = nullptr);

// Gradients aligned with params.tensors. ReLU subgradient at 0 is 0.
std::vector<Matrix> backward(const ModelParams& params, const ForwardCache& cache,
                             const Matrix& grad_embeddings);

}  // namespace mfdm
