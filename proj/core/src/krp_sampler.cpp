#include "cparls/krp_sampler.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "cparls/errors.hpp"

namespace cparls {
namespace {

struct SpanHash {
  std::size_t operator()(const std::vector<index_t>& v) const noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (index_t x : v) {
      h ^= static_cast<std::uint64_t>(x) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

ModeDistribution::ModeDistribution(Vector probs) : probs_(std::move(probs)) {
  if (probs_.size() == 0) throw std::invalid_argument("ModeDistribution: empty distribution");
  cdf_.resize(static_cast<std::size_t>(probs_.size()));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < probs_.size(); ++i) {
    const double p = probs_(i);
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("ModeDistribution: probability " + std::to_string(p) + " outside [0,1]");
    }
    sum += p;
    cdf_[static_cast<std::size_t>(i)] = sum;
    max_ = std::max(max_, p);
  }
  if (std::abs(sum - 1.0) > 1e-10) {
    throw std::invalid_argument("ModeDistribution: probabilities sum to " + std::to_string(sum));
  }
}

ModeDistribution ModeDistribution::from_factor(const Matrix& a) {
  LeverageScores lev = leverage_scores(a);
  if (lev.rank == 0) throw NumericalError("leverage scores of a zero factor matrix are undefined");
  return ModeDistribution(lev.scores / static_cast<double>(lev.rank));
}

index_t ModeDistribution::draw(Rng& rng) const {
  const double u = uniform01(rng) * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  auto i = static_cast<index_t>(it - cdf_.begin());
  return std::min(i, static_cast<index_t>(cdf_.size()) - 1);
}

std::vector<index_t> draw_multi_index(const DistributionRefs& dists, Rng& rng) {
  std::vector<index_t> multi(dists.size());
  for (std::size_t k = 0; k < dists.size(); ++k) multi[k] = dists[k]->draw(rng);
  return multi;
}

double joint_probability(const DistributionRefs& dists, std::span<const index_t> multi) {
  double p = 1.0;
  for (std::size_t k = 0; k < dists.size(); ++k) p *= (*dists[k])[multi[k]];
  return p;
}

DeterministicSet didx(const DistributionRefs& dists, double tau, std::uint64_t candidate_cap) {
  if (!(tau > 0.0)) throw std::invalid_argument("didx: tau must be positive");
  const int d = static_cast<int>(dists.size());
  DeterministicSet out;
  out.idx = MultiIndexTable(d);
  if (d == 0) return out;

  double alpha_star = 1.0;
  for (const ModeDistribution* dist : dists) alpha_star *= dist->max();
  if (alpha_star <= tau) return out;

  // Rows failing the per-mode bound cannot reach tau in any product. The
  // bound is loosened slightly so rounding never prunes a qualifying row;
  // the exact test below decides membership.
  std::vector<std::vector<index_t>> candidates(d);
  std::uint64_t combos = 1;
  for (int k = 0; k < d; ++k) {
    const ModeDistribution& dist = *dists[k];
    const double bound = tau * dist.max() / alpha_star * (1.0 - 1e-12);
    for (index_t i = 0; i < dist.size(); ++i) {
      if (dist[i] > bound) candidates[k].push_back(i);
    }
    if (candidates[k].empty()) return out;
    const auto nk = static_cast<std::uint64_t>(candidates[k].size());
    if (combos > candidate_cap / nk) {
      throw NumericalError("deterministic index search exceeds " + std::to_string(candidate_cap) +
                           " candidates; use a larger tau");
    }
    combos *= nk;
  }

  std::vector<std::size_t> pos(d, 0);
  std::vector<index_t> multi(d);
  std::vector<std::size_t> order;
  MultiIndexTable found(d);
  std::vector<double> probs;
  while (true) {
    for (int k = 0; k < d; ++k) multi[k] = candidates[k][pos[k]];
    const double p = joint_probability(dists, multi);
    if (p > tau) {
      found.push_back(multi);
      probs.push_back(p);
    }
    int k = 0;
    while (k < d && ++pos[k] == candidates[k].size()) pos[k++] = 0;
    if (k == d) break;
  }

  order.resize(probs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Enumeration order is linear-index order, so a stable sort breaks ties by it.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
  out.idx.reserve(order.size());
  out.prob.reserve(order.size());
  for (std::size_t j : order) {
    out.idx.push_back(found[j]);
    out.prob.push_back(probs[j]);
    out.p_det += probs[j];
  }
  return out;
}

RandomRows sidx(const DistributionRefs& dists, std::size_t s_rnd, double tau, double p_det, Rng& rng,
                const SidxOptions& opts) {
  const int d = static_cast<int>(dists.size());
  RandomRows out;
  out.idx = MultiIndexTable(d);
  if (s_rnd == 0) return out;
  const double accept = 1.0 - p_det;
  if (!(accept >= opts.acceptance_floor)) {
    throw NumericalError("random sampling acceptance probability " + std::to_string(accept) +
                         " is below the floor " + std::to_string(opts.acceptance_floor) + "; use a larger tau");
  }
  const double oversample = std::ceil(1.1 / accept);

  out.idx.reserve(s_rnd);
  out.wgt.reserve(s_rnd);
  out.prob.reserve(s_rnd);
  std::vector<index_t> multi(d);
  const double scale = accept / static_cast<double>(s_rnd);
  for (int round = 0; round < opts.max_rounds && out.wgt.size() < s_rnd; ++round) {
    const auto batch = static_cast<std::uint64_t>(oversample * static_cast<double>(s_rnd - out.wgt.size()));
    for (std::uint64_t b = 0; b < batch && out.wgt.size() < s_rnd; ++b) {
      for (int k = 0; k < d; ++k) multi[k] = dists[k]->draw(rng);
      const double p = joint_probability(dists, multi);
      if (p > tau) continue;
      out.idx.push_back(multi);
      out.prob.push_back(p);
      out.wgt.push_back(std::sqrt(scale / p));
    }
  }
  if (out.wgt.size() < s_rnd) {
    throw NumericalError("rejection sampling accepted only " + std::to_string(out.wgt.size()) + " of " +
                         std::to_string(s_rnd) + " rows after " + std::to_string(opts.max_rounds) + " rounds");
  }
  return out;
}

CombinedRows cidx(const MultiIndexTable& idx, std::span<const double> wgt) {
  if (idx.size() != wgt.size()) throw std::invalid_argument("cidx: idx and wgt sizes differ");
  CombinedRows out;
  out.idx = MultiIndexTable(idx.order());
  std::unordered_map<std::vector<index_t>, std::size_t, SpanHash> seen;
  seen.reserve(idx.size());
  std::vector<index_t> key;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    key.assign(idx[j].begin(), idx[j].end());
    auto [it, inserted] = seen.try_emplace(key, out.wgt.size());
    if (inserted) {
      out.idx.push_back(idx[j]);
      out.wgt.push_back(wgt[j]);
      out.count.push_back(1);
    } else {
      ++out.count[it->second];
    }
  }
  for (std::size_t u = 0; u < out.wgt.size(); ++u) {
    out.wgt[u] *= std::sqrt(static_cast<double>(out.count[u]));
  }
  return out;
}

SketchPlan skrp_lev(const DistributionRefs& dists, std::size_t s, const SketchOptions& opts, Rng& rng) {
  if (s < 1) throw std::invalid_argument("skrp_lev: sample count must be at least 1");
  if (!(opts.tau > 0.0 && opts.tau <= 1.0)) throw std::invalid_argument("skrp_lev: tau must lie in (0, 1]");

  DeterministicSet det = didx(dists, opts.tau, opts.candidate_cap);
  SketchPlan plan;
  plan.s_requested = s;
  plan.idx = std::move(det.idx);
  if (det.size() >= s) {
    plan.idx.truncate(s);
    det.prob.resize(s);
    det.p_det = std::accumulate(det.prob.begin(), det.prob.end(), 0.0);
  }
  plan.s_det = det.size();
  plan.p_det = det.p_det;
  plan.wgt.assign(plan.s_det, 1.0);
  plan.count.assign(plan.s_det, 1);

  const std::size_t s_rnd = s - plan.s_det;
  if (s_rnd == 0 || 1.0 - plan.p_det < opts.sidx.acceptance_floor) return plan;

  RandomRows rnd = sidx(dists, s_rnd, opts.tau, plan.p_det, rng, opts.sidx);
  plan.s_rnd = s_rnd;
  if (opts.combine) {
    CombinedRows comb = cidx(rnd.idx, rnd.wgt);
    plan.idx.append(comb.idx);
    plan.wgt.insert(plan.wgt.end(), comb.wgt.begin(), comb.wgt.end());
    plan.count.insert(plan.count.end(), comb.count.begin(), comb.count.end());
  } else {
    plan.idx.append(rnd.idx);
    plan.wgt.insert(plan.wgt.end(), rnd.wgt.begin(), rnd.wgt.end());
    plan.count.insert(plan.count.end(), rnd.wgt.size(), 1);
  }
  return plan;
}

void write_plan_diagnostics(std::ostream& out, const SketchPlan& plan) {
  char buf[32];
  for (std::size_t j = 0; j < plan.size(); ++j) {
    std::string line;
    for (index_t i : plan.idx[j]) line += std::to_string(i + 1) + ' ';
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, plan.wgt[j]);
    line.append(buf, p);
    line += j < plan.s_det ? " det " : " rnd ";
    line += std::to_string(plan.count[j]);
    line.push_back('\n');
    out << line;
  }
}

}  // namespace cparls
