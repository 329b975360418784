#pragma once

#include <cmath>
#include <cstddef>
#include <string_view>
#include <vector>

#include "doconto/encoder/tensor.hpp"
#include "doconto/errors.hpp"

namespace doconto {

enum class OptimizerKind { rmsprop, adam };

inline std::string_view to_string(OptimizerKind k) { return k == OptimizerKind::rmsprop ? "rmsprop" : "adam"; }

inline OptimizerKind parse_optimizer(std::string_view s) {
  if (s == "rmsprop") return OptimizerKind::rmsprop;
  if (s == "adam") return OptimizerKind::adam;
  throw ParameterError("unknown optimizer '" + std::string(s) + "'");
}

struct OptimizerSettings {
  OptimizerKind kind = OptimizerKind::rmsprop;
  double learning_rate = 1e-3;
  double rho = 0.9;  // RMSProp decay
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// RMSProp / Adam over any parameter struct exposing tensors() -> vector<pair<name, Tensor*>>.
class Optimizer {
 public:
  template <class Params>
  Optimizer(const OptimizerSettings& s, Params& like) : s_(s) {
    for (auto& [name, t] : like.tensors()) {
      first_.emplace_back(t->size(), 0.0);
      second_.emplace_back(t->size(), 0.0);
    }
  }

  template <class Params>
  void step(Params& params, Params& grads) {
    auto ps = params.tensors();
    auto gs = grads.tensors();
    ++t_;
    const double bc1 = 1.0 - std::pow(s_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(s_.beta2, static_cast<double>(t_));
    for (std::size_t k = 0; k < ps.size(); ++k) {
      auto& p = ps[k].second->data;
      const auto& g = gs[k].second->data;
      auto& m = first_[k];
      auto& v = second_[k];
      if (s_.kind == OptimizerKind::rmsprop) {
        for (std::size_t i = 0; i < p.size(); ++i) {
          v[i] = s_.rho * v[i] + (1.0 - s_.rho) * g[i] * g[i];
          p[i] -= s_.learning_rate * g[i] / (std::sqrt(v[i]) + s_.eps);
        }
      } else {
        for (std::size_t i = 0; i < p.size(); ++i) {
          m[i] = s_.beta1 * m[i] + (1.0 - s_.beta1) * g[i];
          v[i] = s_.beta2 * v[i] + (1.0 - s_.beta2) * g[i] * g[i];
          p[i] -= s_.learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + s_.eps);
        }
      }
    }
  }

 private:
  OptimizerSettings s_;
  long long t_ = 0;
  std::vector<std::vector<double>> first_;
  std::vector<std::vector<double>> second_;
};

}  // namespace doconto
