// SPDX-License-Identifier: Apache-2.0

#ifndef LOGINAE_AUTOENCODER_HPP
#define LOGINAE_AUTOENCODER_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "loginae/encode.hpp"
#include "loginae/error.hpp"
#include "loginae/logdata.hpp"
#include "loginae/loss_stats.hpp"
#include "loginae/util.hpp"

namespace loginae::ae {

/// Similarity 2*sum(p*g) / (sum(p^2) + sum(g^2)); 1 for two all-zero vectors.
inline double dice_coefficient(std::span<const double> p, std::span<const double> g) {
  require(!p.empty(), "dice_coefficient requires non-empty vectors");
  require(p.size() == g.size(), "dice_coefficient requires equal lengths");
  double inter = 0.0, pp = 0.0, gg = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    inter += p[i] * g[i];
    pp += p[i] * p[i];
    gg += g[i] * g[i];
  }
  const double denom = pp + gg;
  if (denom == 0.0) return 1.0;
  return 2.0 * inter / denom;
}

inline double dice_coefficient(const Eigen::VectorXd& p, const Eigen::VectorXd& g) {
  return dice_coefficient(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())),
                          std::span<const double>(g.data(), static_cast<std::size_t>(g.size())));
}

enum class LossMode { kSum, kProduct };

inline std::string_view to_string(LossMode m) { return m == LossMode::kSum ? "sum" : "product"; }
inline LossMode loss_mode_from_string(std::string_view s) {
  if (s == "sum" || s == "SUM") return LossMode::kSum;
  if (s == "product" || s == "PRODUCT") return LossMode::kProduct;
  fail(ErrorCode::kArgument, "unknown loss mode '" + std::string(s) + "'");
}

/// Combines per-feature dissimilarities into one event loss.
inline double combine_losses(std::span<const double> dissimilarity, std::span<const double> weights, LossMode mode) {
  require(dissimilarity.size() == weights.size(), "one weight per feature required");
  if (mode == LossMode::kSum) {
    double s = 0.0;
    for (std::size_t f = 0; f < weights.size(); ++f) s += weights[f] * dissimilarity[f];
    return s;
  }
  double p = 1.0;
  for (std::size_t f = 0; f < weights.size(); ++f) p *= std::pow(dissimilarity[f], weights[f]);
  return p;
}

/// d(combined) / d(dissimilarity_f). In product mode a zero factor with
/// exponent below one takes the zero subgradient.
inline std::vector<double> combine_gradient(std::span<const double> dissimilarity, std::span<const double> weights,
                                            LossMode mode) {
  std::vector<double> grad(weights.begin(), weights.end());
  if (mode == LossMode::kSum) return grad;
  for (std::size_t f = 0; f < weights.size(); ++f) {
    if (weights[f] == 0.0) {
      grad[f] = 0.0;
      continue;
    }
    double others = 1.0;
    for (std::size_t g = 0; g < weights.size(); ++g) {
      if (g != f) others *= std::pow(dissimilarity[g], weights[g]);
    }
    const double d = dissimilarity[f];
    if (d > 0.0) {
      grad[f] = weights[f] * std::pow(d, weights[f] - 1.0) * others;
    } else {
      grad[f] = weights[f] == 1.0 ? others : 0.0;
    }
  }
  return grad;
}

inline constexpr double kDefaultLearningRate = 1.0;

struct TrainConfig {
  int epochs = 100;
  int batch_size = 32;
  double learning_rate = kDefaultLearningRate;
  int hidden_dim = 16;
  int code_dim = 8;
  std::uint64_t seed = 0;
  LossMode loss_mode = LossMode::kSum;
  std::vector<double> feature_weights;  // empty: weight 1 for every feature
};

struct Dense {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;
};

struct TensorView {
  std::string name;
  std::span<double> values;
};

/// Every trainable tensor of the network, embeddings included.
struct Parameters {
  std::vector<encode::EmbeddingMatrix> embeddings;
  Dense encoder_hidden;
  Dense encoder_code;
  Dense decoder_hidden;
  std::vector<Dense> heads;  // one reconstruction head per feature

  std::vector<TensorView> tensors() {
    std::vector<TensorView> out;
    auto add = [&](std::string name, auto& t) {
      out.push_back({std::move(name), std::span<double>(t.data(), static_cast<std::size_t>(t.size()))});
    };
    for (auto& e : embeddings) add("embedding/" + e.feature_name, e.weights);
    auto add_dense = [&](const std::string& name, Dense& d) {
      add(name + "/weight", d.weight);
      add(name + "/bias", d.bias);
    };
    add_dense("encoder_hidden", encoder_hidden);
    add_dense("encoder_code", encoder_code);
    add_dense("decoder_hidden", decoder_hidden);
    for (std::size_t f = 0; f < heads.size(); ++f) add_dense("head/" + std::to_string(f), heads[f]);
    return out;
  }

  Parameters zeros_like() const {
    Parameters z = *this;
    for (auto& t : z.tensors()) std::fill(t.values.begin(), t.values.end(), 0.0);
    return z;
  }

  void set_zero() {
    for (auto& t : tensors()) std::fill(t.values.begin(), t.values.end(), 0.0);
  }
};

/// Per-actor under-complete autoencoder over concatenated entity embeddings.
///
/// input = [EE_1 .. EE_F] -> tanh(hidden) -> tanh(code) -> tanh(hidden) ->
/// one sigmoid head per feature. Each head Rec_f is compared against
/// sigmoid(EE_f) with the dice coefficient.
struct AutoencoderModel {
  std::string actor_id;
  Parameters params;
  std::vector<double> feature_weights;
  LossMode loss_mode = LossMode::kSum;
  double train_mu = 0.0;
  double train_sigma = 0.0;
  std::size_t train_count = 0;
  double chosen_n = 0.0;

  detect::LossStats loss_stats() const { return {train_mu, train_sigma, train_count}; }

  std::size_t feature_count() const { return params.embeddings.size(); }
  int hidden_dim() const { return static_cast<int>(params.encoder_hidden.bias.size()); }
  int code_dim() const { return static_cast<int>(params.encoder_code.bias.size()); }
  int input_dim() const {
    int d = 0;
    for (const auto& e : params.embeddings) d += e.dim();
    return d;
  }
  std::vector<int> vocab_sizes() const {
    std::vector<int> m;
    for (const auto& e : params.embeddings) m.push_back(e.vocab_size());
    return m;
  }

  void validate() const {
    require(!params.embeddings.empty(), "model has no features");
    require(params.heads.size() == feature_count(), "one reconstruction head per feature required");
    require(code_dim() < input_dim(), "autoencoder must be under-complete (code_dim < input_dim)");
    auto shaped = [](const Dense& d, int out, int in) {
      return d.weight.rows() == out && d.weight.cols() == in && d.bias.size() == out;
    };
    bool ok = shaped(params.encoder_hidden, hidden_dim(), input_dim()) &&
              shaped(params.encoder_code, code_dim(), hidden_dim()) &&
              shaped(params.decoder_hidden, hidden_dim(), code_dim());
    for (std::size_t f = 0; ok && f < feature_count(); ++f) {
      ok = params.embeddings[f].weights.rows() >= 1 && shaped(params.heads[f], params.embeddings[f].dim(), hidden_dim());
    }
    require(ok, "inconsistent layer shapes");
    require(feature_weights.size() == feature_count(), "one weight per feature required");
    require(std::all_of(feature_weights.begin(), feature_weights.end(), [](double w) { return w >= 0.0; }) &&
                std::any_of(feature_weights.begin(), feature_weights.end(), [](double w) { return w > 0.0; }),
            "feature weights must be nonnegative with at least one positive");
  }

  static AutoencoderModel create(std::string actor_id, std::span<const int> vocab_sizes, const TrainConfig& cfg) {
    require(!vocab_sizes.empty(), "model needs at least one feature");
    require(cfg.hidden_dim >= 1 && cfg.code_dim >= 1, "layer widths must be positive");
    AutoencoderModel m;
    m.actor_id = std::move(actor_id);
    m.loss_mode = cfg.loss_mode;
    m.feature_weights = cfg.feature_weights.empty() ? std::vector<double>(vocab_sizes.size(), 1.0) : cfg.feature_weights;

    int input_dim = 0;
    for (std::size_t f = 0; f < vocab_sizes.size(); ++f) {
      const int dim = encode::embedding_dim(vocab_sizes[f]);
      const std::string name = f < encode::kFeatureCount ? std::string(encode::kFeatureNames[f]) : "feature" + std::to_string(f);
      m.params.embeddings.push_back(
          encode::init_embedding(vocab_sizes[f], dim, util::derive_seed(cfg.seed, 0x100 + f), name));
      input_dim += dim;
    }

    std::mt19937_64 rng(util::derive_seed(cfg.seed, 0x200));
    auto glorot = [&rng](int out, int in) {
      const double limit = std::sqrt(6.0 / (in + out));
      std::uniform_real_distribution<double> u(-limit, limit);
      Dense d{Eigen::MatrixXd(out, in), Eigen::VectorXd::Zero(out)};
      for (Eigen::Index r = 0; r < d.weight.rows(); ++r) {
        for (Eigen::Index c = 0; c < d.weight.cols(); ++c) d.weight(r, c) = u(rng);
      }
      return d;
    };
    m.params.encoder_hidden = glorot(cfg.hidden_dim, input_dim);
    m.params.encoder_code = glorot(cfg.code_dim, cfg.hidden_dim);
    m.params.decoder_hidden = glorot(cfg.hidden_dim, cfg.code_dim);
    for (const auto& e : m.params.embeddings) m.params.heads.push_back(glorot(e.dim(), cfg.hidden_dim));
    m.validate();
    return m;
  }
};

struct ForwardPass {
  std::vector<Eigen::VectorXd> input_embeddings;  // EE_f as looked up
  std::vector<Eigen::VectorXd> targets;           // sigmoid(EE_f)
  std::vector<Eigen::VectorXd> reconstructions;   // Rec_f
  Eigen::VectorXd input;
  Eigen::VectorXd hidden;
  Eigen::VectorXd code;
  Eigen::VectorXd decoded;
  std::vector<double> dissimilarity;  // 1 - dice per feature
  double loss = 0.0;
};

namespace detail {

inline Eigen::VectorXd sigmoid(const Eigen::VectorXd& z) {
  return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

inline Eigen::VectorXd tanh(const Eigen::VectorXd& z) {
  return z.unaryExpr([](double v) { return std::tanh(v); });
}

}  // namespace detail

inline ForwardPass forward(const AutoencoderModel& model, std::span<const int> indices) {
  const auto& p = model.params;
  if (indices.size() != model.feature_count()) {
    fail(ErrorCode::kModelIncompatible, "event has " + std::to_string(indices.size()) + " features, model expects " +
                                            std::to_string(model.feature_count()));
  }
  ForwardPass fp;
  fp.input = Eigen::VectorXd(model.input_dim());
  Eigen::Index offset = 0;
  for (std::size_t f = 0; f < indices.size(); ++f) {
    const auto& emb = p.embeddings[f];
    if (indices[f] < 0 || indices[f] > emb.vocab_size()) {
      fail(ErrorCode::kModelIncompatible, "index " + std::to_string(indices[f]) + " outside vocabulary of feature '" +
                                              emb.feature_name + "'");
    }
    Eigen::VectorXd e = emb.weights.row(indices[f]).transpose();
    fp.input.segment(offset, e.size()) = e;
    offset += e.size();
    fp.targets.push_back(detail::sigmoid(e));
    fp.input_embeddings.push_back(std::move(e));
  }
  fp.hidden = detail::tanh(p.encoder_hidden.weight * fp.input + p.encoder_hidden.bias);
  fp.code = detail::tanh(p.encoder_code.weight * fp.hidden + p.encoder_code.bias);
  fp.decoded = detail::tanh(p.decoder_hidden.weight * fp.code + p.decoder_hidden.bias);
  for (std::size_t f = 0; f < indices.size(); ++f) {
    fp.reconstructions.push_back(detail::sigmoid(p.heads[f].weight * fp.decoded + p.heads[f].bias));
    fp.dissimilarity.push_back(1.0 - dice_coefficient(fp.reconstructions[f], fp.targets[f]));
  }
  fp.loss = combine_losses(fp.dissimilarity, model.feature_weights, model.loss_mode);
  return fp;
}

inline ForwardPass forward(const AutoencoderModel& model, const encode::EncodedEvent& event) {
  return forward(model, std::span<const int>(event.index));
}

inline double event_loss(const AutoencoderModel& model, std::span<const int> indices) {
  return forward(model, indices).loss;
}

inline double event_loss(const AutoencoderModel& model, const encode::EncodedEvent& event) {
  return forward(model, event).loss;
}

/// Adds `scale` * d(loss)/d(theta) for one event into `grad`.
inline void backward(const AutoencoderModel& model, std::span<const int> indices, const ForwardPass& fp,
                     Parameters& grad, double scale = 1.0) {
  const auto& p = model.params;
  const std::vector<double> dloss = combine_gradient(fp.dissimilarity, model.feature_weights, model.loss_mode);

  Eigen::VectorXd d_decoded = Eigen::VectorXd::Zero(fp.decoded.size());
  std::vector<Eigen::VectorXd> d_target(indices.size());
  for (std::size_t f = 0; f < indices.size(); ++f) {
    const Eigen::VectorXd& rec = fp.reconstructions[f];
    const Eigen::VectorXd& tgt = fp.targets[f];
    const double denom = rec.squaredNorm() + tgt.squaredNorm();
    const double dice = 1.0 - fp.dissimilarity[f];
    // d(1 - dice)/d(rec) and d(1 - dice)/d(target)
    const Eigen::VectorXd g_rec = (-2.0 * dloss[f] / denom) * (tgt - dice * rec);
    const Eigen::VectorXd g_tgt = (-2.0 * dloss[f] / denom) * (rec - dice * tgt);
    const Eigen::VectorXd dz = g_rec.cwiseProduct(rec.cwiseProduct(Eigen::VectorXd::Ones(rec.size()) - rec));
    grad.heads[f].weight.noalias() += scale * dz * fp.decoded.transpose();
    grad.heads[f].bias += scale * dz;
    d_decoded.noalias() += p.heads[f].weight.transpose() * dz;
    d_target[f] = g_tgt.cwiseProduct(tgt.cwiseProduct(Eigen::VectorXd::Ones(tgt.size()) - tgt));
  }

  auto tanh_back = [](const Eigen::VectorXd& upstream, const Eigen::VectorXd& activation) {
    return Eigen::VectorXd(upstream.array() * (1.0 - activation.array().square()));
  };
  const Eigen::VectorXd da3 = tanh_back(d_decoded, fp.decoded);
  grad.decoder_hidden.weight.noalias() += scale * da3 * fp.code.transpose();
  grad.decoder_hidden.bias += scale * da3;
  const Eigen::VectorXd da2 = tanh_back(p.decoder_hidden.weight.transpose() * da3, fp.code);
  grad.encoder_code.weight.noalias() += scale * da2 * fp.hidden.transpose();
  grad.encoder_code.bias += scale * da2;
  const Eigen::VectorXd da1 = tanh_back(p.encoder_code.weight.transpose() * da2, fp.hidden);
  grad.encoder_hidden.weight.noalias() += scale * da1 * fp.input.transpose();
  grad.encoder_hidden.bias += scale * da1;
  const Eigen::VectorXd d_input = p.encoder_hidden.weight.transpose() * da1;

  // The looked-up row feeds both the network input and the dice target.
  Eigen::Index offset = 0;
  for (std::size_t f = 0; f < indices.size(); ++f) {
    const Eigen::Index dim = p.embeddings[f].dim();
    grad.embeddings[f].weights.row(indices[f]) +=
        scale * (d_input.segment(offset, dim) + d_target[f]).transpose();
    offset += dim;
  }
}

inline Parameters analytic_gradient(const AutoencoderModel& model, std::span<const int> indices) {
  Parameters grad = model.params.zeros_like();
  backward(model, indices, forward(model, indices), grad);
  return grad;
}

struct TrainResult {
  AutoencoderModel model;
  std::vector<double> epoch_losses;  // mean training loss per epoch
};

/// Mini-batch gradient descent over embeddings and network weights. Sets the
/// model's training-loss mean and standard deviation when done.
inline TrainResult train(AutoencoderModel model, std::span<const encode::EncodedEvent> dataset, const TrainConfig& cfg) {
  require(!dataset.empty(), "training dataset is empty");
  require(cfg.epochs >= 1, "epochs must be >= 1");
  require(cfg.batch_size >= 1, "batch_size must be >= 1");
  require(cfg.learning_rate > 0.0, "learning_rate must be > 0");
  for (const auto& e : dataset) require(e.actor_id == dataset.front().actor_id, "training data must belong to one actor");
  model.validate();

  TrainResult result;
  Parameters grad = model.params.zeros_like();
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(util::derive_seed(cfg.seed, 0x300));
  const auto batch = static_cast<std::size_t>(cfg.batch_size);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      const double scale = 1.0 / static_cast<double>(end - start);
      grad.set_zero();
      for (std::size_t i = start; i < end; ++i) {
        const auto& ev = dataset[order[i]];
        const std::span<const int> idx(ev.index);
        const ForwardPass fp = forward(model, idx);
        total += fp.loss;
        backward(model, idx, fp, grad, scale);
      }
      auto params = model.params.tensors();
      const auto grads = grad.tensors();
      for (std::size_t t = 0; t < params.size(); ++t) {
        for (std::size_t k = 0; k < params[t].values.size(); ++k) {
          params[t].values[k] -= cfg.learning_rate * grads[t].values[k];
        }
      }
    }
    const double mean = total / static_cast<double>(dataset.size());
    if (!std::isfinite(mean)) {
      fail(ErrorCode::kTrainingDiverged, "non-finite training loss at epoch " + std::to_string(epoch + 1));
    }
    result.epoch_losses.push_back(mean);
  }

  std::vector<double> losses;
  losses.reserve(dataset.size());
  for (const auto& ev : dataset) losses.push_back(event_loss(model, ev));
  const auto stats = detect::loss_stats(losses);
  if (!std::isfinite(stats.mu) || !std::isfinite(stats.sigma)) {
    fail(ErrorCode::kTrainingDiverged, "non-finite loss statistics after training");
  }
  model.train_mu = stats.mu;
  model.train_sigma = stats.sigma;
  model.train_count = stats.count;
  result.model = std::move(model);
  return result;
}

inline TrainResult train(std::span<const encode::EncodedEvent> dataset, std::span<const int> vocab_sizes,
                         const TrainConfig& cfg) {
  require(!dataset.empty(), "training dataset is empty");
  return train(AutoencoderModel::create(dataset.front().actor_id, vocab_sizes, cfg), dataset, cfg);
}

// ---------------------------------------------------------------------------
// Gradient check

/// Gradients smaller than this are compared absolutely rather than relatively.
inline constexpr double kGradientCheckFloor = 1e-8;
inline constexpr double kGradientCheckEpsilon = 1e-3;

struct GradientCheckReport {
  double max_relative_error = 0.0;
  std::string worst_tensor;
  std::size_t worst_offset = 0;
  std::size_t parameters_checked = 0;
};

/// Compares `analytic` against central finite differences of the event loss
/// for every scalar parameter.
inline GradientCheckReport compare_gradients(AutoencoderModel model, std::span<const int> indices,
                                             Parameters analytic, double epsilon = kGradientCheckEpsilon) {
  require(epsilon > 0.0, "epsilon must be > 0");
  GradientCheckReport report;
  auto params = model.params.tensors();
  const auto grads = analytic.tensors();
  require(params.size() == grads.size(), "gradient shape mismatch");
  for (std::size_t t = 0; t < params.size(); ++t) {
    require(params[t].values.size() == grads[t].values.size(), "gradient shape mismatch");
    for (std::size_t k = 0; k < params[t].values.size(); ++k) {
      double& theta = params[t].values[k];
      const double saved = theta;
      auto loss_at = [&](double offset) {
        theta = saved + offset;
        return event_loss(model, indices);
      };
      // Fourth-order central stencil.
      const double numeric = (loss_at(-2.0 * epsilon) - 8.0 * loss_at(-epsilon) + 8.0 * loss_at(epsilon) -
                              loss_at(2.0 * epsilon)) /
                             (12.0 * epsilon);
      theta = saved;
      const double a = grads[t].values[k];
      const double denom = std::max({std::abs(a), std::abs(numeric), kGradientCheckFloor});
      const double rel = std::abs(a - numeric) / denom;
      ++report.parameters_checked;
      if (rel > report.max_relative_error) {
        report.max_relative_error = rel;
        report.worst_tensor = params[t].name;
        report.worst_offset = k;
      }
    }
  }
  return report;
}

inline double gradient_check(const AutoencoderModel& model, std::span<const int> indices, double epsilon = kGradientCheckEpsilon) {
  return compare_gradients(model, indices, analytic_gradient(model, indices), epsilon).max_relative_error;
}

inline double gradient_check(const AutoencoderModel& model, const encode::EncodedEvent& event, double epsilon = kGradientCheckEpsilon) {
  return gradient_check(model, std::span<const int>(event.index), epsilon);
}

// ---------------------------------------------------------------------------
// Serialization

inline constexpr int kModelFormatVersion = 1;

namespace detail {

template <class M>
Json matrix_to_json(const M& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

inline Eigen::MatrixXd matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) fail(ErrorCode::kIntegrity, "matrix size mismatch");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[static_cast<std::size_t>(r * cols + c)].get<double>();
  }
  return m;
}

inline Json dense_to_json(const Dense& d) { return {{"weight", matrix_to_json(d.weight)}, {"bias", matrix_to_json(d.bias)}}; }

inline Dense dense_from_json(const Json& j) {
  Dense d;
  d.weight = matrix_from_json(j.at("weight"));
  const Eigen::MatrixXd b = matrix_from_json(j.at("bias"));
  d.bias = Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
  return d;
}

}  // namespace detail

inline Json to_json(const AutoencoderModel& m) {
  Json j;
  j["version"] = kModelFormatVersion;
  j["actor_id"] = m.actor_id;
  j["loss_mode"] = to_string(m.loss_mode);
  j["feature_weights"] = m.feature_weights;
  j["train_mu"] = m.train_mu;
  j["train_sigma"] = m.train_sigma;
  j["train_count"] = m.train_count;
  j["chosen_n"] = m.chosen_n;
  Json emb = Json::array();
  for (const auto& e : m.params.embeddings) emb.push_back({{"feature", e.feature_name}, {"weights", detail::matrix_to_json(e.weights)}});
  j["embeddings"] = std::move(emb);
  j["encoder_hidden"] = detail::dense_to_json(m.params.encoder_hidden);
  j["encoder_code"] = detail::dense_to_json(m.params.encoder_code);
  j["decoder_hidden"] = detail::dense_to_json(m.params.decoder_hidden);
  Json heads = Json::array();
  for (const auto& h : m.params.heads) heads.push_back(detail::dense_to_json(h));
  j["heads"] = std::move(heads);
  return j;
}

inline AutoencoderModel model_from_json(const Json& j) {
  if (j.at("version").get<int>() != kModelFormatVersion) fail(ErrorCode::kModelIncompatible, "unsupported model version");
  AutoencoderModel m;
  m.actor_id = j.at("actor_id").get<std::string>();
  m.loss_mode = loss_mode_from_string(j.at("loss_mode").get<std::string>());
  m.feature_weights = j.at("feature_weights").get<std::vector<double>>();
  m.train_mu = j.at("train_mu").get<double>();
  m.train_sigma = j.at("train_sigma").get<double>();
  m.train_count = j.at("train_count").get<std::size_t>();
  m.chosen_n = j.at("chosen_n").get<double>();
  for (const auto& e : j.at("embeddings")) {
    m.params.embeddings.push_back({e.at("feature").get<std::string>(), detail::matrix_from_json(e.at("weights"))});
  }
  m.params.encoder_hidden = detail::dense_from_json(j.at("encoder_hidden"));
  m.params.encoder_code = detail::dense_from_json(j.at("encoder_code"));
  m.params.decoder_hidden = detail::dense_from_json(j.at("decoder_hidden"));
  for (const auto& h : j.at("heads")) m.params.heads.push_back(detail::dense_from_json(h));
  try {
    m.validate();
  } catch (const Error& ex) {
    fail(ErrorCode::kIntegrity, std::string("invalid model: ") + ex.what());
  }
  return m;
}

}  // namespace loginae::ae

#endif  // LOGINAE_AUTOENCODER_HPP
