#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfdm/core_numerics.hpp"
#include "mfdm/matrix.hpp"
#include "mfdm/meanfield.hpp"

namespace mfdm {

// One loss evaluation's worth of samples: embeddings row-aligned with labels.
struct Batch {
  Matrix embeddings;        // B x d
  std::vector<int> labels;  // size B, non-negative class ids
};

struct ContrastiveParams {
  double m_p = 0.02;  // positive margin, >= 0
  double m_n = 0.3;   // negative margin, > m_p
};

struct CWMSParams {
  double alpha = 0.01;
  double beta = 80.0;
  double delta = 0.8;
};

struct MFContParams {
  double m_p = 0.02;
  double m_n = 0.3;
  double lambda_mf = 0.0;  // weight of the mean-field separation regularizer
};

struct MFCWMSParams {
  double alpha = 0.01;
  double beta = 80.0;
  double delta = 0.8;
  double lambda_mf = 0.0;
};

struct LossResult {
  double value = 0.0;
  Matrix grad_embeddings;                 // B x d
  std::optional<Matrix> grad_meanfields;  // bank x d; absent for pair-based losses
};

// Pair-based losses. Positive sums run over all ordered same-class pairs
// including the self pair; negative sums over ordered class pairs.
LossResult contrastive_loss(const Batch& batch, const ContrastiveParams& params,
                            DistanceKind kind);
LossResult cwms_loss(const Batch& batch, const CWMSParams& params, DistanceKind kind);

// Mean-field losses. Each sample interacts with the per-class mean fields
// instead of with other samples; negatives range over every bank class, so
// the cost per batch is linear in the batch size.
LossResult mfcont_loss(const Batch& batch, const MeanFieldBank& bank, const MFContParams& params,
                       DistanceKind kind);
LossResult mfcwms_loss(const Batch& batch, const MeanFieldBank& bank, const MFCWMSParams& params,
                       DistanceKind kind);

enum class LossKind { Contrastive, CWMS, MFCont, MFCWMS };

const char* to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& s);
bool uses_meanfields(LossKind kind);

// Flat parameter bundle used by the training engine, CLI, and benchmarks.
// Unused fields for a given kind are ignored.
struct LossSpec {
  LossKind kind = LossKind::MFCont;
  double m_p = 0.02;
  double m_n = 0.3;
  double alpha = 0.01;
  double beta = 80.0;
  double delta = 0.8;
  double lambda_mf = 0.0;

  LossResult evaluate(const Batch& batch, const MeanFieldBank* bank, DistanceKind kind) const;
};

}  // namespace mfdm
