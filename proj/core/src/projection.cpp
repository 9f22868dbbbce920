// Copyright 2026 The embprobe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "embprobe/projection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <fmt/format.h>
#include <json.hpp>

#include "csv.hpp"
#include "embprobe/error.hpp"
#include "embprobe/parallel.hpp"
#include "embprobe/rng.hpp"

namespace embprobe {
namespace {

constexpr int kMaxExpansions = 64;
constexpr int kMaxBisections = 64;
constexpr double kEntropyTolerance = 1e-10;  // nats

Matrix SquaredDistances(const Matrix &x, int threads) {
  const std::size_t n = x.rows();
  Matrix d(n, n);
  ParallelFor(n, threads, [&](std::size_t i) {
    const auto xi = x.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto xj = x.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < xi.size(); ++k) {
        const double diff = xi[k] - xj[k];
        s += diff * diff;
      }
      d(i, j) = s;
    }
  });
  return d;
}

struct RowFit {
  double precision = 0.0;
  double entropy = 0.0;  // nats
};

// Conditional distribution of row i written into `out` (diagonal zero).
RowFit CalibrateRow(std::span<const double> dist, std::size_t self, double target,
                    std::span<double> out) {
  const std::size_t n = dist.size();
  double min_d = std::numeric_limits<double>::infinity(), max_d = 0.0, sum_d = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == self) continue;
    min_d = std::min(min_d, dist[j]);
    max_d = std::max(max_d, dist[j]);
    sum_d += dist[j];
  }
  // Distances are shifted by the row minimum; this rescales every weight by
  // the same factor and keeps exp() away from underflow.
  auto evaluate = [&](double beta) {
    double z = 0.0, weighted = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == self) {
        out[j] = 0.0;
        continue;
      }
      const double shifted = dist[j] - min_d;
      const double w = std::exp(-beta * shifted);
      out[j] = w;
      z += w;
      weighted += shifted * w;
    }
    for (double &v : out) v /= z;
    return std::log(z) + beta * weighted / z;
  };

  if (max_d == min_d) return {0.0, evaluate(0.0)};

  double beta = static_cast<double>(n - 1) / (sum_d - static_cast<double>(n - 1) * min_d);
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  double h = evaluate(beta);
  for (int step = 0; step < kMaxExpansions && std::isinf(hi); ++step) {
    if (std::abs(h - target) <= kEntropyTolerance) return {beta, h};
    if (h > target) {
      lo = beta;
      beta *= 2.0;
    } else {
      hi = beta;
    }
    if (std::isinf(hi)) h = evaluate(beta);
  }
  if (std::isinf(hi)) return {beta, h};
  for (int step = 0; step < kMaxBisections; ++step) {
    beta = lo + (hi - lo) / 2.0;
    h = evaluate(beta);
    if (std::abs(h - target) <= kEntropyTolerance) break;
    (h > target ? lo : hi) = beta;
  }
  return {beta, h};
}

}  // namespace

double MaxPerplexity(std::size_t n) {
  return n == 0 ? 0.0 : static_cast<double>(n - 1) / 3.0;
}

void ValidateConfig(const TsneConfig &config, std::size_t n) {
  if (n < 4) throw Error(ErrorCode::kInvalidArgument, fmt::format("t-SNE needs >= 4 points, got {}", n));
  if (!(config.perplexity >= 1.0) || config.perplexity > MaxPerplexity(n))
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("perplexity {} outside [1, {}] for {} points", config.perplexity,
                            MaxPerplexity(n), n));
  if (config.iterations < 1 || config.kl_interval < 1 || !(config.learning_rate > 0.0) ||
      config.exaggeration_iterations < 0 || config.momentum_switch_iteration < 0)
    throw Error(ErrorCode::kInvalidArgument, "t-SNE iteration settings must be positive");
}

Affinities CalibrateAffinities(const Matrix &x, double perplexity, int threads) {
  const std::size_t n = x.rows();
  TsneConfig probe;
  probe.perplexity = perplexity;
  ValidateConfig(probe, n);
  const Matrix dist = SquaredDistances(x, threads);
  if (std::all_of(dist.data().begin(), dist.data().end(), [](double v) { return v == 0.0; }))
    throw Error(ErrorCode::kDegenerateDistances, "all pairwise distances are zero");

  Matrix conditional(n, n);
  Affinities out;
  out.row_entropy_bits.resize(n);
  out.precision.resize(n);
  const double target = std::log(perplexity);
  ParallelFor(n, threads, [&](std::size_t i) {
    const RowFit fit = CalibrateRow(dist.row(i), i, target, conditional.row(i));
    out.precision[i] = fit.precision;
    out.row_entropy_bits[i] = fit.entropy / std::log(2.0);
  });

  out.joint = Matrix(n, n);
  const double norm = 2.0 * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double p = (conditional(i, j) + conditional(j, i)) / norm;
      out.joint(i, j) = p;
      out.joint(j, i) = p;
    }
  return out;
}

double KlDivergence(const Matrix &joint, const Matrix &coords) {
  const std::size_t n = coords.rows();
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double dx = coords(i, 0) - coords(j, 0), dy = coords(i, 1) - coords(j, 1);
      z += 1.0 / (1.0 + dx * dx + dy * dy);
    }
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double p = joint(i, j);
      if (i == j || p <= 0.0) continue;
      const double dx = coords(i, 0) - coords(j, 0), dy = coords(i, 1) - coords(j, 1);
      const double q = 1.0 / (1.0 + dx * dx + dy * dy) / z;
      kl += p * std::log(p / q);
    }
  return std::max(kl, 0.0);
}

Projection TsneEmbed(const Matrix &x, std::span<const std::string> keys,
                     const TsneConfig &config) {
  const std::size_t n = x.rows();
  if (keys.size() != n) throw Error(ErrorCode::kLengthMismatch, "one key per row required");
  ValidateConfig(config, n);

  // Canonical (key-sorted) order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  for (std::size_t i = 1; i < n; ++i)
    if (keys[order[i]] == keys[order[i - 1]])
      throw Error(ErrorCode::kDuplicateKey, keys[order[i]]);
  Matrix sorted_x(n, x.cols());
  for (std::size_t i = 0; i < n; ++i) {
    const auto src = x.row(order[i]);
    std::copy(src.begin(), src.end(), sorted_x.row(i).begin());
  }

  const Affinities aff = CalibrateAffinities(sorted_x, config.perplexity, config.threads);
  const Matrix &p = aff.joint;

  Matrix y(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(DeriveSeed(config.seed, "tsne-init/" + keys[order[i]]));
    y(i, 0) = 1e-4 * rng.Normal();
    y(i, 1) = 1e-4 * rng.Normal();
  }

  Matrix update(n, 2), gains(n, 2, 1.0), grad(n, 2);
  Matrix num(n, n);
  std::vector<double> row_z(n);
  std::vector<KlCheckpoint> trace;

  for (int it = 0; it < config.iterations; ++it) {
    const double exaggeration =
        it < config.exaggeration_iterations ? config.early_exaggeration : 1.0;
    const double momentum =
        it < config.momentum_switch_iteration ? config.initial_momentum : config.final_momentum;

    ParallelFor(n, config.threads, [&](std::size_t i) {
      double z = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) {
          num(i, j) = 0.0;
          continue;
        }
        const double dx = y(i, 0) - y(j, 0), dy = y(i, 1) - y(j, 1);
        num(i, j) = 1.0 / (1.0 + dx * dx + dy * dy);
        z += num(i, j);
      }
      row_z[i] = z;
    });
    double z = 0.0;
    for (double v : row_z) z += v;

    ParallelFor(n, config.threads, [&](std::size_t i) {
      double gx = 0.0, gy = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double mult = (exaggeration * p(i, j) - num(i, j) / z) * num(i, j);
        gx += mult * (y(i, 0) - y(j, 0));
        gy += mult * (y(i, 1) - y(j, 1));
      }
      grad(i, 0) = 4.0 * gx;
      grad(i, 1) = 4.0 * gy;
    });

    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t d = 0; d < 2; ++d) {
        const bool same_sign = (grad(i, d) > 0.0) == (update(i, d) > 0.0);
        gains(i, d) = same_sign ? gains(i, d) * 0.8 : gains(i, d) + 0.2;
        gains(i, d) = std::max(gains(i, d), 0.01);
        update(i, d) = momentum * update(i, d) - config.learning_rate * gains(i, d) * grad(i, d);
        y(i, d) += update(i, d);
      }
    for (std::size_t d = 0; d < 2; ++d) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += y(i, d);
      mean /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) y(i, d) -= mean;
    }

    const int done = it + 1;
    if (done % config.kl_interval == 0 || done == config.iterations)
      trace.push_back({done, KlDivergence(p, y)});
  }

  Projection out;
  out.keys.assign(keys.begin(), keys.end());
  out.coords = Matrix(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    out.coords(order[i], 0) = y(i, 0);
    out.coords(order[i], 1) = y(i, 1);
  }
  out.kl_trace = std::move(trace);
  return out;
}

void WriteProjection(const Projection &projection, const TsneConfig &config,
                     const std::filesystem::path &csv_path,
                     const std::filesystem::path &json_path) {
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + csv_path.string());
    out << "utterance_key,x,y\n";
    for (std::size_t i = 0; i < projection.keys.size(); ++i)
      out << csv::Escape(projection.keys[i]) << ',' << fmt::format("{}", projection.coords(i, 0))
          << ',' << fmt::format("{}", projection.coords(i, 1)) << '\n';
  }
  nlohmann::ordered_json meta;
  meta["points"] = projection.keys.size();
  meta["config"] = {{"perplexity", config.perplexity},
                    {"iterations", config.iterations},
                    {"learning_rate", config.learning_rate},
                    {"early_exaggeration", config.early_exaggeration},
                    {"exaggeration_iterations", config.exaggeration_iterations},
                    {"initial_momentum", config.initial_momentum},
                    {"final_momentum", config.final_momentum},
                    {"momentum_switch_iteration", config.momentum_switch_iteration},
                    {"seed", config.seed}};
  auto trace = nlohmann::ordered_json::array();
  for (const auto &c : projection.kl_trace)
    trace.push_back({{"iteration", c.iteration}, {"kl", c.kl}});
  meta["kl_trace"] = std::move(trace);
  std::ofstream out(json_path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + json_path.string());
  out << meta.dump(2) << '\n';
}

}  // namespace embprobe
