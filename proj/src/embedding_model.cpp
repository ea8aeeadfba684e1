#include "mfdm/embedding_model.hpp"

#include <cmath>
#include <stdexcept>

#include "mfdm/rng.hpp"

namespace mfdm {

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Table: return "table";
    case ModelKind::Linear: return "linear";
    case ModelKind::MLP1: return "mlp1";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "table") return ModelKind::Table;
  if (s == "linear") return ModelKind::Linear;
  if (s == "mlp1") return ModelKind::MLP1;
  throw std::invalid_argument("unknown model kind '" + s + "'");
}

namespace {

Matrix uniform_init(std::size_t rows, std::size_t cols, double bound, Rng& rng) {
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rng.uniform(-bound, bound);
  return m;
}

}  // namespace

ModelParams init_model(ModelKind kind, std::size_t input_dim, std::size_t hidden_dim,
                       std::size_t embedding_dim, std::uint64_t seed) {
  if (input_dim == 0 || embedding_dim == 0)
    throw std::invalid_argument("init_model: zero input or embedding dimension");
  ModelParams params;
  params.kind = kind;
  params.input_dim = input_dim;
  params.embedding_dim = embedding_dim;
  Rng rng(seed);
  switch (kind) {
    case ModelKind::Table: {
      Matrix table(input_dim, embedding_dim);
      for (std::size_t r = 0; r < input_dim; ++r) {
        double norm2 = 0.0;
        do {
          norm2 = 0.0;
          for (std::size_t c = 0; c < embedding_dim; ++c) {
            table(r, c) = rng.normal();
            norm2 += table(r, c) * table(r, c);
          }
        } while (norm2 == 0.0);
        const double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t c = 0; c < embedding_dim; ++c) table(r, c) *= inv;
      }
      params.tensors.push_back(std::move(table));
      break;
    }
    case ModelKind::Linear: {
      const double bound = 1.0 / std::sqrt(static_cast<double>(input_dim));
      params.tensors.push_back(uniform_init(input_dim, embedding_dim, bound, rng));
      params.tensors.emplace_back(1, embedding_dim);
      break;
    }
    case ModelKind::MLP1: {
      if (hidden_dim == 0) throw std::invalid_argument("init_model: MLP1 needs hidden_dim");
      params.hidden_dim = hidden_dim;
      const double b1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
      const double b2 = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
      params.tensors.push_back(uniform_init(input_dim, hidden_dim, b1, rng));
      params.tensors.emplace_back(1, hidden_dim);
      params.tensors.push_back(uniform_init(hidden_dim, embedding_dim, b2, rng));
      params.tensors.emplace_back(1, embedding_dim);
      break;
    }
  }
  return params;
}

namespace {

// out = X * W + b, with b broadcast over rows
Matrix affine(const Matrix& x, const Matrix& w, const Matrix& b) {
  Matrix out(x.rows(), w.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < w.cols(); ++c) {
      double acc = b(0, c);
      for (std::size_t k = 0; k < x.cols(); ++k) acc += x(r, k) * w(k, c);
      out(r, c) = acc;
    }
  }
  return out;
}

}  // namespace

Matrix forward(const ModelParams& params, const Matrix& features, ForwardCache* cache) {
  if (params.kind == ModelKind::Table)
    throw std::invalid_argument("forward: Table models take indices, not features");
  if (features.cols() != params.input_dim)
    throw std::invalid_argument("forward: feature dimension mismatch");
  if (cache) {
    cache->kind = params.kind;
    cache->inputs = features;
    cache->indices.clear();
  }
  if (params.kind == ModelKind::Linear)
    return affine(features, params.tensors[0], params.tensors[1]);

  Matrix hidden = affine(features, params.tensors[0], params.tensors[1]);
  for (std::size_t r = 0; r < hidden.rows(); ++r)
    for (std::size_t c = 0; c < hidden.cols(); ++c)
      if (hidden(r, c) < 0.0) hidden(r, c) = 0.0;
  Matrix out = affine(hidden, params.tensors[2], params.tensors[3]);
  if (cache) cache->hidden = std::move(hidden);
  return out;
}

Matrix forward(const ModelParams& params, std::span<const int> indices, ForwardCache* cache) {
  if (params.kind != ModelKind::Table)
    throw std::invalid_argument("forward: only Table models take indices");
  const Matrix& table = params.tensors[0];
  Matrix out(indices.size(), table.cols());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] < 0 || static_cast<std::size_t>(indices[r]) >= table.rows())
      throw std::invalid_argument("forward: table index out of range");
    for (std::size_t c = 0; c < table.cols(); ++c) out(r, c) = table(indices[r], c);
  }
  if (cache) {
    cache->kind = params.kind;
    cache->indices.assign(indices.begin(), indices.end());
    cache->inputs = Matrix();
    cache->hidden = Matrix();
  }
  return out;
}

std::vector<Matrix> backward(const ModelParams& params, const ForwardCache& cache,
                             const Matrix& grad_embeddings) {
  if (cache.kind != params.kind) throw std::invalid_argument("backward: cache kind mismatch");
  if (grad_embeddings.cols() != params.embedding_dim)
    throw std::invalid_argument("backward: gradient dimension mismatch");

  std::vector<Matrix> grads;
  switch (params.kind) {
    case ModelKind::Table: {
      if (cache.indices.size() != grad_embeddings.rows())
        throw std::invalid_argument("backward: stale cache (row count changed)");
      Matrix g(params.tensors[0].rows(), params.tensors[0].cols());
      for (std::size_t r = 0; r < cache.indices.size(); ++r)
        for (std::size_t c = 0; c < g.cols(); ++c)
          g(cache.indices[r], c) += grad_embeddings(r, c);
      grads.push_back(std::move(g));
      break;
    }
    case ModelKind::Linear: {
      if (cache.inputs.rows() != grad_embeddings.rows())
        throw std::invalid_argument("backward: stale cache (row count changed)");
      Matrix gw(params.input_dim, params.embedding_dim);
      Matrix gb(1, params.embedding_dim);
      for (std::size_t r = 0; r < cache.inputs.rows(); ++r) {
        for (std::size_t c = 0; c < params.embedding_dim; ++c) {
          const double g = grad_embeddings(r, c);
          gb(0, c) += g;
          for (std::size_t k = 0; k < params.input_dim; ++k)
            gw(k, c) += cache.inputs(r, k) * g;
        }
      }
      grads.push_back(std::move(gw));
      grads.push_back(std::move(gb));
      break;
    }
    case ModelKind::MLP1: {
      if (cache.inputs.rows() != grad_embeddings.rows() ||
          cache.hidden.rows() != grad_embeddings.rows())
        throw std::invalid_argument("backward: stale cache (row count changed)");
      const Matrix& w2 = params.tensors[2];
      Matrix gw1(params.input_dim, params.hidden_dim);
      Matrix gb1(1, params.hidden_dim);
      Matrix gw2(params.hidden_dim, params.embedding_dim);
      Matrix gb2(1, params.embedding_dim);
      Matrix ghidden(grad_embeddings.rows(), params.hidden_dim);
      for (std::size_t r = 0; r < grad_embeddings.rows(); ++r) {
        for (std::size_t c = 0; c < params.embedding_dim; ++c) {
          const double g = grad_embeddings(r, c);
          gb2(0, c) += g;
          for (std::size_t k = 0; k < params.hidden_dim; ++k) {
            gw2(k, c) += cache.hidden(r, k) * g;
            ghidden(r, k) += w2(k, c) * g;
          }
        }
        for (std::size_t k = 0; k < params.hidden_dim; ++k) {
          // ReLU gate: post-activation zero means the unit was clamped
          const double g = cache.hidden(r, k) > 0.0 ? ghidden(r, k) : 0.0;
          if (g == 0.0) continue;
          gb1(0, k) += g;
          for (std::size_t f = 0; f < params.input_dim; ++f)
            gw1(f, k) += cache.inputs(r, f) * g;
        }
      }
      grads.push_back(std::move(gw1));
      grads.push_back(std::move(gb1));
      grads.push_back(std::move(gw2));
      grads.push_back(std::move(gb2));
      break;
    }
  }
  return grads;
}

}  // namespace mfdm
