#pragma once

// JSON model checkpoints: shape header, hyperparameters, seed, vocabulary and
// row-major tensor payloads.

#include <cstdint>
#include <string>
#include <variant>

#include <json.hpp>

#include "doconto/encoder/cae.hpp"
#include "doconto/encoder/training.hpp"
#include "doconto/encoder/vae.hpp"
#include "doconto/encoder/vocabulary.hpp"
#include "doconto/errors.hpp"

namespace doconto {

struct VaeCheckpoint {
  VaeParameters params;
  Vocabulary vocabulary;
  TrainConfig config;
};

struct CaeCheckpoint {
  CaeParameters params;
  Vocabulary vocabulary;
  TrainConfig config;
};

using Checkpoint = std::variant<VaeCheckpoint, CaeCheckpoint>;

namespace detail {

inline nlohmann::json config_json(const TrainConfig& c) {
  return {{"length", c.length},
          {"embed", c.embed},
          {"hidden", c.hidden},
          {"latent", c.latent},
          {"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"learning_rate", c.learning_rate},
          {"optimizer", std::string(to_string(c.optimizer))},
          {"seed", c.seed},
          {"validation_fraction", c.validation_fraction},
          {"epsilon_std", c.epsilon_std},
          {"channels", c.channels},
          {"width", c.width},
          {"pool", c.pool},
          {"upsample", c.upsample}};
}

inline TrainConfig config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.length = j.at("length");
  c.embed = j.at("embed");
  c.hidden = j.at("hidden");
  c.latent = j.at("latent");
  c.batch_size = j.at("batch_size");
  c.epochs = j.at("epochs");
  c.learning_rate = j.at("learning_rate");
  c.optimizer = parse_optimizer(j.at("optimizer").get<std::string>());
  c.seed = j.at("seed");
  c.validation_fraction = j.at("validation_fraction");
  c.epsilon_std = j.at("epsilon_std");
  c.channels = j.at("channels");
  c.width = j.at("width");
  c.pool = j.at("pool");
  c.upsample = j.at("upsample");
  return c;
}

template <class Params>
nlohmann::json tensors_json(const Params& p) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [name, t] : p.tensors())
    out[std::string(name)] = {{"rows", t->rows}, {"cols", t->cols}, {"data", t->data}};
  return out;
}

template <class Params>
void load_tensors(const nlohmann::json& j, Params& p) {
  for (auto& [name, t] : p.tensors()) {
    const auto& e = j.at(std::string(name));
    if (e.at("rows").get<std::size_t>() != t->rows || e.at("cols").get<std::size_t>() != t->cols)
      throw DataError("checkpoint tensor '" + std::string(name) + "' has the wrong shape");
    t->data = e.at("data").get<std::vector<double>>();
    if (t->data.size() != t->rows * t->cols) throw DataError("checkpoint tensor '" + std::string(name) + "' is truncated");
    require_finite(t->data, std::string(name));
  }
}

}  // namespace detail

inline nlohmann::json to_json(const VaeCheckpoint& c) {
  const auto& s = c.params.shape;
  return {{"model", "vae"},
          {"shape", {{"vocab", s.vocab}, {"embed", s.embed}, {"hidden", s.hidden}, {"latent", s.latent}, {"length", s.length}}},
          {"epsilon_std", c.params.epsilon_std},
          {"seed", c.config.seed},
          {"config", detail::config_json(c.config)},
          {"vocabulary", c.vocabulary.regular_tokens()},
          {"tensors", detail::tensors_json(c.params)}};
}

inline nlohmann::json to_json(const CaeCheckpoint& c) {
  const auto& s = c.params.shape;
  return {{"model", "cae"},
          {"shape",
           {{"vocab", s.vocab},
            {"embed", s.embed},
            {"length", s.length},
            {"channels", s.channels},
            {"width", s.width},
            {"pool", s.pool},
            {"upsample", s.upsample}}},
          {"seed", c.config.seed},
          {"config", detail::config_json(c.config)},
          {"vocabulary", c.vocabulary.regular_tokens()},
          {"tensors", detail::tensors_json(c.params)}};
}

inline Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  try {
    const std::string model = j.at("model");
    const auto& sh = j.at("shape");
    Vocabulary vocab(j.at("vocabulary").get<std::vector<std::string>>());
    TrainConfig cfg = detail::config_from_json(j.at("config"));
    if (model == "vae") {
      VaeShape s{sh.at("vocab"), sh.at("embed"), sh.at("hidden"), sh.at("latent"), sh.at("length")};
      if (s.vocab != vocab.size()) throw DataError("checkpoint vocabulary size does not match shape");
      VaeCheckpoint c{VaeParameters::zeros(s, j.at("epsilon_std").get<double>()), std::move(vocab), cfg};
      detail::load_tensors(j.at("tensors"), c.params);
      return c;
    }
    if (model == "cae") {
      CaeShape s{sh.at("vocab"), sh.at("embed"), sh.at("length"), sh.at("channels"),
                 sh.at("width"), sh.at("pool"),  sh.at("upsample")};
      if (s.vocab != vocab.size()) throw DataError("checkpoint vocabulary size does not match shape");
      CaeCheckpoint c{CaeParameters::zeros(s), std::move(vocab), cfg};
      detail::load_tensors(j.at("tensors"), c.params);
      return c;
    }
    throw DataError("unknown checkpoint model '" + model + "'");
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
}

}  // namespace doconto
