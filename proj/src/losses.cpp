#include "mfdm/losses.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace mfdm {

namespace {

// Batch members grouped by class id, classes in ascending id order so the
// reduction order (and therefore the floating-point result) is fixed.
std::map<int, std::vector<std::size_t>> group_by_class(const Batch& batch) {
  if (batch.embeddings.rows() == 0) throw std::invalid_argument("loss: empty batch");
  if (batch.labels.size() != batch.embeddings.rows())
    throw std::invalid_argument("loss: labels/embeddings row mismatch");
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < batch.labels.size(); ++i) {
    if (batch.labels[i] < 0) throw std::invalid_argument("loss: negative class label");
    groups[batch.labels[i]].push_back(i);
  }
  return groups;
}

void check_bank(const Batch& batch, const MeanFieldBank& bank) {
  if (bank.num_classes() == 0) throw std::invalid_argument("loss: empty mean-field bank");
  if (bank.dim() != batch.embeddings.cols())
    throw std::invalid_argument("loss: bank/embedding dimension mismatch");
  for (int label : batch.labels)
    if (static_cast<std::size_t>(label) >= bank.num_classes())
      throw std::invalid_argument("loss: label outside mean-field bank");
}

void check_margins(double m_p, double m_n) {
  if (!(m_p >= 0.0) || !(m_n > 0.0) || !(m_p < m_n))
    throw std::invalid_argument("loss: margins must satisfy 0 <= m_p < m_n");
}

void check_cwms(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
    throw std::invalid_argument("loss: alpha and beta must be finite and positive");
}

}  // namespace

LossResult contrastive_loss(const Batch& batch, const ContrastiveParams& params,
                            DistanceKind kind) {
  check_margins(params.m_p, params.m_n);
  const auto groups = group_by_class(batch);
  const double num_classes = static_cast<double>(groups.size());
  const Matrix& e = batch.embeddings;

  LossResult out;
  out.grad_embeddings = Matrix(e.rows(), e.cols());

  // positive pairs within each class, all ordered pairs including i == j
  for (const auto& [c, members] : groups) {
    const double w = 1.0 / (2.0 * num_classes * static_cast<double>(members.size()) *
                            static_cast<double>(members.size()));
    for (std::size_t i : members) {
      for (std::size_t j : members) {
        const double arg = distance(e.row(i), e.row(j), kind) - params.m_p;
        if (arg > 0.0) {
          out.value += w * arg;
          accumulate_distance_grad(e.row(i), e.row(j), kind, w, out.grad_embeddings.row(i),
                                   out.grad_embeddings.row(j));
        }
      }
    }
  }

  // negative pairs across ordered class pairs
  for (const auto& [c, mc] : groups) {
    for (const auto& [cp, mcp] : groups) {
      if (c == cp) continue;
      const double w = 1.0 / (2.0 * num_classes * static_cast<double>(mc.size()) *
                              static_cast<double>(mcp.size()));
      for (std::size_t i : mc) {
        for (std::size_t j : mcp) {
          const double arg = params.m_n - distance(e.row(i), e.row(j), kind);
          if (arg > 0.0) {
            out.value += w * arg;
            accumulate_distance_grad(e.row(i), e.row(j), kind, -w, out.grad_embeddings.row(i),
                                     out.grad_embeddings.row(j));
          }
        }
      }
    }
  }
  return out;
}

LossResult cwms_loss(const Batch& batch, const CWMSParams& params, DistanceKind kind) {
  check_cwms(params.alpha, params.beta);
  const auto groups = group_by_class(batch);
  const double num_classes = static_cast<double>(groups.size());
  const Matrix& e = batch.embeddings;

  LossResult out;
  out.grad_embeddings = Matrix(e.rows(), e.cols());

  std::vector<double> u;
  // positive block per class: log[1 + sum_{i,j} e^{alpha(d-delta)} / (2|D_c|^2)]
  for (const auto& [c, members] : groups) {
    const double m = static_cast<double>(members.size());
    const double log_denom = std::log(2.0 * m * m);
    u.clear();
    for (std::size_t i : members)
      for (std::size_t j : members)
        u.push_back(params.alpha * (distance(e.row(i), e.row(j), kind) - params.delta) -
                    log_denom);
    const auto sum = log1p_exp_sum_with_weights(u);
    out.value += sum.value / (params.alpha * num_classes);
    std::size_t t = 0;
    for (std::size_t i : members)
      for (std::size_t j : members)
        accumulate_distance_grad(e.row(i), e.row(j), kind, sum.weights[t++] / num_classes,
                                 out.grad_embeddings.row(i), out.grad_embeddings.row(j));
  }

  // negative block per ordered class pair: log[1 + sum e^{-beta(d-delta)} / (|D_c||D_c'|)]
  for (const auto& [c, mc] : groups) {
    for (const auto& [cp, mcp] : groups) {
      if (c == cp) continue;
      const double log_denom =
          std::log(static_cast<double>(mc.size()) * static_cast<double>(mcp.size()));
      u.clear();
      for (std::size_t i : mc)
        for (std::size_t j : mcp)
          u.push_back(-params.beta * (distance(e.row(i), e.row(j), kind) - params.delta) -
                      log_denom);
      const auto sum = log1p_exp_sum_with_weights(u);
      out.value += sum.value / (2.0 * params.beta * num_classes);
      std::size_t t = 0;
      for (std::size_t i : mc)
        for (std::size_t j : mcp)
          accumulate_distance_grad(e.row(i), e.row(j), kind,
                                   -sum.weights[t++] / (2.0 * num_classes),
                                   out.grad_embeddings.row(i), out.grad_embeddings.row(j));
    }
  }
  return out;
}

LossResult mfcont_loss(const Batch& batch, const MeanFieldBank& bank, const MFContParams& params,
                       DistanceKind kind) {
  check_margins(params.m_p, params.m_n);
  if (params.lambda_mf < 0.0) throw std::invalid_argument("loss: lambda_mf must be >= 0");
  check_bank(batch, bank);
  const auto groups = group_by_class(batch);
  const double num_batch_classes = static_cast<double>(groups.size());
  const std::size_t num_bank = bank.num_classes();
  const Matrix& e = batch.embeddings;

  LossResult out;
  out.grad_embeddings = Matrix(e.rows(), e.cols());
  out.grad_meanfields = Matrix(num_bank, bank.dim());
  Matrix& gm = *out.grad_meanfields;

  for (const auto& [c, members] : groups) {
    const double w = 1.0 / (num_batch_classes * static_cast<double>(members.size()));
    for (std::size_t i : members) {
      // attraction toward the own-class mean field
      const double pos_arg = distance(e.row(i), bank.vectors.row(c), kind) - params.m_p;
      if (pos_arg > 0.0) {
        out.value += w * pos_arg;
        accumulate_distance_grad(e.row(i), bank.vectors.row(c), kind, w,
                                 out.grad_embeddings.row(i), gm.row(c));
      }
      // repulsion from every other bank class
      for (std::size_t cp = 0; cp < num_bank; ++cp) {
        if (static_cast<int>(cp) == c) continue;
        const double neg_arg = params.m_n - distance(e.row(i), bank.vectors.row(cp), kind);
        if (neg_arg > 0.0) {
          out.value += w * neg_arg;
          accumulate_distance_grad(e.row(i), bank.vectors.row(cp), kind, -w,
                                   out.grad_embeddings.row(i), gm.row(cp));
        }
      }
    }
  }

  // squared-hinge separation of the mean fields themselves, over ordered
  // bank pairs and normalized by the bank size (it involves no samples)
  if (params.lambda_mf != 0.0) {
    const double w = params.lambda_mf / static_cast<double>(num_bank);
    for (std::size_t c = 0; c < num_bank; ++c) {
      for (std::size_t cp = 0; cp < num_bank; ++cp) {
        if (c == cp) continue;
        const double h =
            hinge(params.m_n - distance(bank.vectors.row(c), bank.vectors.row(cp), kind));
        if (h > 0.0) {
          out.value += w * h * h;
          accumulate_distance_grad(bank.vectors.row(c), bank.vectors.row(cp), kind, -2.0 * w * h,
                                   gm.row(c), gm.row(cp));
        }
      }
    }
  }
  return out;
}

LossResult mfcwms_loss(const Batch& batch, const MeanFieldBank& bank, const MFCWMSParams& params,
                       DistanceKind kind) {
  check_cwms(params.alpha, params.beta);
  if (params.lambda_mf < 0.0) throw std::invalid_argument("loss: lambda_mf must be >= 0");
  check_bank(batch, bank);
  const auto groups = group_by_class(batch);
  const double num_batch_classes = static_cast<double>(groups.size());
  const std::size_t num_bank = bank.num_classes();
  const Matrix& e = batch.embeddings;

  LossResult out;
  out.grad_embeddings = Matrix(e.rows(), e.cols());
  out.grad_meanfields = Matrix(num_bank, bank.dim());
  Matrix& gm = *out.grad_meanfields;

  std::vector<double> u;
  // positive block: each class's samples against the own mean field
  for (const auto& [c, members] : groups) {
    const double log_m = std::log(static_cast<double>(members.size()));
    u.clear();
    for (std::size_t i : members)
      u.push_back(params.alpha * (distance(e.row(i), bank.vectors.row(c), kind) - params.delta) -
                  log_m);
    const auto sum = log1p_exp_sum_with_weights(u);
    out.value += sum.value / (params.alpha * num_batch_classes);
    std::size_t t = 0;
    for (std::size_t i : members)
      accumulate_distance_grad(e.row(i), bank.vectors.row(c), kind,
                               sum.weights[t++] / num_batch_classes,
                               out.grad_embeddings.row(i), gm.row(c));
  }

  // negative block: ordered bank pairs (c, c'); both directional sample sums
  // share one logarithm, and classes absent from the batch contribute empty
  // sums. Pairs with no batch presence on either side reduce to log(1) = 0.
  const std::vector<std::size_t> kEmpty;
  for (std::size_t c = 0; c < num_bank; ++c) {
    for (std::size_t cp = 0; cp < num_bank; ++cp) {
      if (c == cp) continue;
      auto it_c = groups.find(static_cast<int>(c));
      auto it_cp = groups.find(static_cast<int>(cp));
      const auto& mc = it_c == groups.end() ? kEmpty : it_c->second;
      const auto& mcp = it_cp == groups.end() ? kEmpty : it_cp->second;
      if (mc.empty() && mcp.empty()) continue;
      u.clear();
      const double log_mc = mc.empty() ? 0.0 : std::log(static_cast<double>(mc.size()));
      const double log_mcp = mcp.empty() ? 0.0 : std::log(static_cast<double>(mcp.size()));
      for (std::size_t i : mc)
        u.push_back(-params.beta * (distance(e.row(i), bank.vectors.row(cp), kind) - params.delta) -
                    log_mc);
      for (std::size_t j : mcp)
        u.push_back(-params.beta * (distance(bank.vectors.row(c), e.row(j), kind) - params.delta) -
                    log_mcp);
      const auto sum = log1p_exp_sum_with_weights(u);
      out.value += sum.value / (2.0 * params.beta * static_cast<double>(num_bank));
      std::size_t t = 0;
      for (std::size_t i : mc)
        accumulate_distance_grad(e.row(i), bank.vectors.row(cp), kind,
                                 -sum.weights[t++] / (2.0 * static_cast<double>(num_bank)),
                                 out.grad_embeddings.row(i), gm.row(cp));
      for (std::size_t j : mcp)
        accumulate_distance_grad(bank.vectors.row(c), e.row(j), kind,
                                 -sum.weights[t++] / (2.0 * static_cast<double>(num_bank)),
                                 gm.row(c), out.grad_embeddings.row(j));
    }
  }

  // squared-softplus separation of the mean fields
  if (params.lambda_mf != 0.0) {
    const double w = params.lambda_mf / static_cast<double>(num_bank);
    for (std::size_t c = 0; c < num_bank; ++c) {
      for (std::size_t cp = 0; cp < num_bank; ++cp) {
        if (c == cp) continue;
        const double x =
            -params.beta * (distance(bank.vectors.row(c), bank.vectors.row(cp), kind) -
                            params.delta);
        const double sp = softplus(x);
        out.value += w * sp * sp;
        accumulate_distance_grad(bank.vectors.row(c), bank.vectors.row(cp), kind,
                                 -2.0 * w * sp * sigmoid(x) * params.beta, gm.row(c), gm.row(cp));
      }
    }
  }
  return out;
}

const char* to_string(LossKind kind) {
  switch (kind) {
    case LossKind::Contrastive: return "contrastive";
    case LossKind::CWMS: return "cwms";
    case LossKind::MFCont: return "mfcont";
    case LossKind::MFCWMS: return "mfcwms";
  }
  return "?";
}

LossKind loss_kind_from_string(const std::string& s) {
  if (s == "contrastive") return LossKind::Contrastive;
  if (s == "cwms") return LossKind::CWMS;
  if (s == "mfcont") return LossKind::MFCont;
  if (s == "mfcwms") return LossKind::MFCWMS;
  throw std::invalid_argument("unknown loss kind '" + s + "'");
}

bool uses_meanfields(LossKind kind) {
  return kind == LossKind::MFCont || kind == LossKind::MFCWMS;
}

LossResult LossSpec::evaluate(const Batch& batch, const MeanFieldBank* bank,
                              DistanceKind distance) const {
  switch (kind) {
    case LossKind::Contrastive:
      return contrastive_loss(batch, {m_p, m_n}, distance);
    case LossKind::CWMS:
      return cwms_loss(batch, {alpha, beta, delta}, distance);
    case LossKind::MFCont:
      if (!bank) throw std::invalid_argument("mfcont requires a mean-field bank");
      return mfcont_loss(batch, *bank, {m_p, m_n, lambda_mf}, distance);
    case LossKind::MFCWMS:
      if (!bank) throw std::invalid_argument("mfcwms requires a mean-field bank");
      return mfcwms_loss(batch, *bank, {alpha, beta, delta, lambda_mf}, distance);
  }
  throw std::invalid_argument("unknown loss kind");
}

}  // namespace mfdm
