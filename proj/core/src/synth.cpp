#include "cparls/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "cparls/errors.hpp"
#include "cparls/krp_sampler.hpp"

namespace cparls {

void SynthSpec::validate() const {
  if (shape.size() < 2) throw std::invalid_argument("synthetic tensor needs at least two modes");
  if (rank < 1) throw std::invalid_argument("rank must be at least 1");
  if (concentrated < 0 || concentrated > rank) throw std::invalid_argument("concentrated columns must lie in [0, rank]");
  if (spread < 1) throw std::invalid_argument("spread must be at least 1");
  if (!(magnitude > 0.0)) throw std::invalid_argument("magnitude must be positive");
  if (seed_noise < 0.0) throw std::invalid_argument("seed noise must be nonnegative");
  if (noise < 0.0) throw std::invalid_argument("noise must be nonnegative");
  const index_t min_dim = *std::min_element(shape.begin(), shape.end());
  if (static_cast<index_t>(spread) * concentrated > min_dim) {
    throw std::invalid_argument("spread * concentrated columns (" + std::to_string(spread * concentrated) +
                                ") exceeds the smallest mode size " + std::to_string(min_dim));
  }
}

SynthResult gen_synthetic(const SynthSpec& spec) {
  spec.validate();
  const LinearIndex total = checked_product(spec.shape);
  if (total > (LinearIndex{1} << 28)) throw std::invalid_argument("synthetic tensor is too large to form densely");
  const int m = static_cast<int>(spec.shape.size());
  Rng rng = make_rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> jitter(0.0, spec.seed_noise);

  std::vector<Matrix> factors;
  for (index_t n : spec.shape) {
    Matrix a(n, spec.rank);
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = normal(rng);
    }
    a.leftCols(spec.concentrated).setZero();
    for (int c = 0; c < spec.concentrated; ++c) {
      for (int q = 0; q < spec.spread; ++q) {
        a(c * spec.spread + q, c) = spec.magnitude + (spec.seed_noise > 0.0 ? jitter(rng) : 0.0);
      }
    }
    factors.push_back(std::move(a));
  }
  KruskalModel truth = make_model(std::move(factors));

  const auto n_total = static_cast<std::size_t>(total);
  std::vector<double> dense(n_total);
  std::vector<index_t> multi(m, 0);
  for (std::size_t lin = 0; lin < n_total; ++lin) {
    dense[lin] = truth.value_at(multi);
    for (int k = 0; k < m && ++multi[k] == spec.shape[k]; ++k) multi[k] = 0;
  }
  if (spec.noise > 0.0) {
    std::vector<double> eps(n_total);
    double model_sq = 0.0, eps_sq = 0.0;
    for (std::size_t lin = 0; lin < n_total; ++lin) {
      eps[lin] = normal(rng);
      model_sq += dense[lin] * dense[lin];
      eps_sq += eps[lin] * eps[lin];
    }
    const double scale = spec.noise * std::sqrt(model_sq / eps_sq);
    for (std::size_t lin = 0; lin < n_total; ++lin) dense[lin] += scale * eps[lin];
  }

  std::vector<index_t> coords;
  std::vector<double> values;
  coords.reserve(n_total * m);
  values.reserve(n_total);
  std::fill(multi.begin(), multi.end(), 0);
  for (std::size_t lin = 0; lin < n_total; ++lin) {
    if (dense[lin] != 0.0) {
      coords.insert(coords.end(), multi.begin(), multi.end());
      values.push_back(dense[lin]);
    }
    for (int k = 0; k < m && ++multi[k] == spec.shape[k]; ++k) multi[k] = 0;
  }
  truth.normalize();
  return {SparseTensor(spec.shape, std::move(coords), std::move(values)), std::move(truth)};
}

double factor_match_score(const KruskalModel& a, const KruskalModel& b) {
  if (a.rank() != b.rank()) {
    throw DataError("factor match score needs equal ranks, got " + std::to_string(a.rank()) + " and " +
                    std::to_string(b.rank()));
  }
  if (a.order() != b.order()) throw DataError("factor match score needs models of equal order");
  for (int k = 0; k < a.order(); ++k) {
    if (a.factors[k].rows() != b.factors[k].rows()) throw DataError("factor match score needs equal mode sizes");
  }
  KruskalModel na = a, nb = b;
  na.normalize();
  nb.normalize();
  const int r = a.rank();

  Matrix score(r, r);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      const double la = std::abs(na.lambda(i));
      const double lb = std::abs(nb.lambda(j));
      const double big = std::max(la, lb);
      double s = big > 0.0 ? 1.0 - std::abs(la - lb) / big : 1.0;
      for (int k = 0; k < a.order(); ++k) s *= std::abs(na.factors[k].col(i).dot(nb.factors[k].col(j)));
      score(i, j) = s;
    }
  }

  std::vector<bool> used_a(r, false), used_b(r, false);
  double total = 0.0;
  for (int step = 0; step < r; ++step) {
    int bi = -1, bj = -1;
    double best = -1.0;
    for (int i = 0; i < r; ++i) {
      if (used_a[i]) continue;
      for (int j = 0; j < r; ++j) {
        if (!used_b[j] && score(i, j) > best) {
          best = score(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    used_a[bi] = used_b[bj] = true;
    total += best;
  }
  return total / r;
}

}  // namespace cparls
