#pragma once

// Central finite differences against the hand-written backward passes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "doconto/encoder.hpp"

namespace doconto::testing {

struct GradCheck {
  double max_rel = 0.0;
  std::size_t checked = 0;
  std::string worst;  // tensor[index] of the worst entry
};

// |a - n| / max(|a|, |n|); entries where both sides are below `floor` count as agreeing.
inline double rel_error(double a, double n, double floor = 1e-9) {
  const double scale = std::max(std::fabs(a), std::fabs(n));
  if (scale < floor) return 0.0;
  return std::fabs(a - n) / scale;
}

template <class Params, class LossFn>
GradCheck compare(Params& params, const Params& analytic, LossFn&& loss, double h = 1e-6) {
  GradCheck out;
  auto ts = params.tensors();
  auto gs = analytic.tensors();
  for (std::size_t k = 0; k < ts.size(); ++k) {
    Tensor& t = *ts[k].second;
    for (std::size_t i = 0; i < t.data.size(); ++i) {
      const double saved = t.data[i];
      t.data[i] = saved + h;
      const double up = loss(params);
      t.data[i] = saved - h;
      const double down = loss(params);
      t.data[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double e = rel_error(gs[k].second->data[i], numeric);
      ++out.checked;
      if (e > out.max_rel) {
        out.max_rel = e;
        out.worst = std::string(ts[k].first) + "[" + std::to_string(i) + "]";
      }
    }
  }
  return out;
}

inline EncodedHeader random_header(std::size_t vocab, std::size_t length, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> tok(2, vocab - 1);
  std::uniform_int_distribution<std::size_t> len(1, length);
  EncodedHeader h;
  h.indices.assign(length, kPad);
  const std::size_t n = len(rng);
  for (std::size_t i = 0; i < n; ++i) h.indices[i] = static_cast<TokenIndex>(tok(rng));
  return h;
}

// Random tiny VAE, one example, fixed eps; biases perturbed away from zero
// so ReLUs are not all on their kink.
inline GradCheck vae_gradcheck(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> V(3, 7), L(1, 4), d(1, 3), small(1, 4);
  VaeShape s{V(rng), small(rng), small(rng) + 1, d(rng), L(rng)};
  VaeParameters p = VaeParameters::initialize(s, rng);
  std::normal_distribution<double> jitter(0.0, 0.3);
  for (auto& [name, t] : p.tensors())
    for (double& v : t->data) v += 0.5 * jitter(rng);
  const EncodedHeader x = random_header(s.vocab, s.length, rng);
  std::vector<double> eps(s.latent);
  std::normal_distribution<double> unit(0.0, 1.0);
  for (double& e : eps) e = unit(rng);

  VaeParameters grad = VaeParameters::zeros(s);
  const auto fwd = vae_forward(p, x, eps);
  vae_backward(p, x, eps, fwd, grad);
  return compare(p, grad, [&](const VaeParameters& q) { return vae_loss(vae_forward(q, x, eps), x).total; });
}

inline GradCheck cae_gradcheck(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> V(3, 7), L(2, 4), small(1, 3), pool(1, 2);
  CaeShape s;
  s.vocab = V(rng);
  s.embed = small(rng);
  s.length = L(rng);
  s.channels = small(rng);
  s.width = small(rng) % 2 == 0 ? 1 : 3;
  s.pool = pool(rng);
  s.upsample = s.pool;
  CaeParameters p = CaeParameters::initialize(s, rng);
  std::normal_distribution<double> jitter(0.0, 0.3);
  for (auto& [name, t] : p.tensors())
    for (double& v : t->data) v += 0.5 * jitter(rng);
  const EncodedHeader x = random_header(s.vocab, s.length, rng);

  CaeParameters grad = CaeParameters::zeros(s);
  cae_backward(p, x, cae_forward(p, x), grad);
  return compare(p, grad, [&](const CaeParameters& q) { return cae_loss(cae_forward(q, x), x); });
}

}  // namespace doconto::testing
