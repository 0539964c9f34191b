#include "cparls/cp_solver.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "cparls/errors.hpp"

namespace cparls {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Stream ids for make_rng.
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kSampleStream = 1;
constexpr std::uint64_t kFitStream = 2;

void check_init(const SparseTensor& t, const KruskalModel& init, int rank) {
  init.validate();
  if (init.order() != t.order()) {
    throw DataError("initial model has " + std::to_string(init.order()) + " factors, tensor has " +
                    std::to_string(t.order()) + " modes");
  }
  if (init.rank() != rank) {
    throw DataError("initial model has rank " + std::to_string(init.rank()) + ", expected " + std::to_string(rank));
  }
  for (int k = 0; k < t.order(); ++k) {
    if (init.factors[k].rows() != t.dim(k)) {
      throw DataError("initial factor " + std::to_string(k + 1) + " has " + std::to_string(init.factors[k].rows()) +
                      " rows, tensor mode has " + std::to_string(t.dim(k)));
    }
  }
}

void append_number(std::string& line, double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  line.append(buf, p);
}

}  // namespace

const char* to_string(FitMode mode) { return mode == FitMode::exact ? "exact" : "estimated"; }
const char* to_string(InitMethod method) { return method == InitMethod::gaussian ? "gaussian" : "rrf"; }

void SolverConfig::validate() const {
  if (rank < 1) throw std::invalid_argument("rank must be at least 1");
  if (samples < 1) throw std::invalid_argument("samples must be at least 1");
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in (0, 1]");
  if (epoch_size < 1) throw std::invalid_argument("epoch size must be at least 1");
  if (fail_epochs < 1) throw std::invalid_argument("fail epochs must be at least 1");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (max_epochs < 1) throw std::invalid_argument("max epochs must be at least 1");
  if (!(fit_alpha > 0.0 && fit_alpha < 1.0)) throw std::invalid_argument("fit alpha must lie in (0, 1)");
  if (fit_mode == FitMode::estimated && fit_samples < 2) throw std::invalid_argument("fit samples must be at least 2");
  if (init == InitMethod::rrf && init_samples < 1) throw std::invalid_argument("init samples must be at least 1");
}

CpResult cp_arls_lev(const SparseTensor& t, const SolverConfig& cfg, const KruskalModel& init,
                     SolverObserver* observer) {
  cfg.validate();
  check_init(t, init, cfg.rank);
  if (!t.has_mode_linearization()) throw std::logic_error("cp_arls_lev: mode linearization missing");
  const int m = t.order();
  if (m < 2) throw DataError("CP decomposition needs a tensor with at least two modes");
  const auto start = Clock::now();
  auto elapsed = [&] { return cfg.record_time ? seconds_since(start) : 0.0; };

  CpResult result;
  result.model = init;
  KruskalModel& model = result.model;
  std::vector<ModeDistribution> dists;
  dists.reserve(m);
  for (int k = 0; k < m; ++k) dists.push_back(ModeDistribution::from_factor(model.factors[k]));

  Rng rng = make_rng(cfg.seed, kSampleStream);
  std::optional<FitEstimator> estimator;
  if (cfg.fit_mode == FitMode::estimated) {
    Rng fit_rng = make_rng(cfg.seed, kFitStream);
    estimator.emplace(t, cfg.fit_samples, cfg.fit_alpha, fit_rng);
  }

  SketchOptions opts;
  opts.tau = cfg.tau;
  opts.combine = cfg.combine;

  std::vector<std::vector<index_t>> other_shapes(m);
  for (int k = 0; k < m; ++k) other_shapes[k] = t.other_modes_shape(k);

  double best = -std::numeric_limits<double>::infinity();
  int fails = 0;
  std::vector<LinearIndex> lin;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::vector<double> sum_sbar(m, 0.0), sum_sdet(m, 0.0), sum_pdet(m, 0.0);
    for (int it = 0; it < cfg.epoch_size; ++it) {
      for (int k = 0; k < m; ++k) {
        DistributionRefs refs;
        for (int j = 0; j < m; ++j) {
          if (j != k) refs.push_back(&dists[j]);
        }
        auto t0 = Clock::now();
        SketchPlan plan = skrp_lev(refs, cfg.samples, opts, rng);
        auto t1 = Clock::now();
        Matrix zs = krp_samp(factor_refs(model.factors, k), plan.idx, plan.wgt);
        auto t2 = Clock::now();
        lin.resize(plan.size());
        for (std::size_t j = 0; j < plan.size(); ++j) lin[j] = to_linear(plan.idx[j], other_shapes[k]);
        SampledRows xs = tnsr_samp(t, k, lin, plan.wgt);
        auto t3 = Clock::now();
        LsqSolution sol = solve_lsq(zs, xs);
        if (!sol.b.allFinite()) {
          throw NumericalError("non-finite factor entries after solving mode " + std::to_string(k + 1) +
                               " in epoch " + std::to_string(epoch));
        }
        if (sol.rank_deficient) ++result.rank_deficient_solves;
        model.factors[k] = std::move(sol.b);
        model.lambda = normalize_columns(model.factors[k]);
        dists[k] = ModeDistribution::from_factor(model.factors[k]);
        auto t4 = Clock::now();
        result.phases.plan += std::chrono::duration<double>(t1 - t0).count();
        result.phases.krp += std::chrono::duration<double>(t2 - t1).count();
        result.phases.gather += std::chrono::duration<double>(t3 - t2).count();
        result.phases.solve += std::chrono::duration<double>(t4 - t3).count();

        sum_sbar[k] += static_cast<double>(plan.size());
        sum_sdet[k] += static_cast<double>(plan.s_det);
        sum_pdet[k] += plan.p_det;
        if (observer) observer->after_solve(k, model, dists);
      }
      ++result.iterations;
    }

    auto tf = Clock::now();
    const double fit = estimator ? estimator->estimated_fit(model) : exact_fit(t, model);
    result.phases.fit += seconds_since(tf);
    if (!std::isfinite(fit)) throw NumericalError("fit is not finite after epoch " + std::to_string(epoch));
    const double now = elapsed();
    for (int k = 0; k < m; ++k) {
      TraceRecord rec;
      rec.epoch = epoch;
      rec.time_s = now;
      rec.fit = fit;
      rec.fit_kind = cfg.fit_mode;
      rec.mode = k;
      rec.s_bar = sum_sbar[k] / cfg.epoch_size;
      rec.s_det = sum_sdet[k] / cfg.epoch_size;
      rec.p_det = sum_pdet[k] / cfg.epoch_size;
      result.trace.push_back(rec);
    }
    result.final_fit = fit;

    if (fit > best + cfg.tol) {
      best = fit;
      fails = 0;
    } else if (++fails >= cfg.fail_epochs) {
      result.converged = true;
      break;
    }
  }
  return result;
}

CpResult cp_als(const SparseTensor& t, const AlsConfig& cfg, const KruskalModel& init) {
  if (cfg.rank < 1) throw std::invalid_argument("rank must be at least 1");
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (cfg.max_iters < 1) throw std::invalid_argument("max iterations must be at least 1");
  check_init(t, init, cfg.rank);
  const int m = t.order();
  const auto start = Clock::now();

  CpResult result;
  result.model = init;
  KruskalModel& model = result.model;
  double prev = 0.0;
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    for (int k = 0; k < m; ++k) {
      const Matrix mt = mttkrp(t, model.factors, k);
      const Matrix v = gram_hadamard(model.factors, k);
      Matrix b;
      Eigen::LLT<Matrix> llt(v);
      if (llt.info() == Eigen::Success) b = llt.solve(mt.transpose()).transpose();
      if (llt.info() != Eigen::Success || !b.allFinite()) {
        b = v.completeOrthogonalDecomposition().pseudoInverse() * mt.transpose();
        b.transposeInPlace();
        ++result.rank_deficient_solves;
      }
      if (!b.allFinite()) {
        throw NumericalError("non-finite factor entries after solving mode " + std::to_string(k + 1) +
                             " in iteration " + std::to_string(iter));
      }
      model.factors[k] = std::move(b);
      model.lambda = normalize_columns(model.factors[k]);
    }
    ++result.iterations;
    const double fit = exact_fit(t, model);
    TraceRecord rec;
    rec.epoch = iter;
    rec.time_s = cfg.record_time ? seconds_since(start) : 0.0;
    rec.fit = fit;
    rec.fit_kind = FitMode::exact;
    result.trace.push_back(rec);
    result.final_fit = fit;
    if (iter > 1 && fit - prev < cfg.tol) {
      result.converged = true;
      break;
    }
    prev = fit;
  }
  return result;
}

KruskalModel gaussian_init(const std::vector<index_t>& shape, int rank, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Matrix> factors;
  factors.reserve(shape.size());
  for (index_t n : shape) {
    Matrix a(n, rank);
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = normal(rng);
    }
    factors.push_back(std::move(a));
  }
  return make_model(std::move(factors));
}

Matrix rrf_init(const SparseTensor& t, int mode, int rank, std::size_t s_init, Rng& rng) {
  if (rank < 1) throw std::invalid_argument("rrf_init: rank must be at least 1");
  if (s_init < 1) throw std::invalid_argument("rrf_init: need at least one fiber sample");
  const auto keys = t.fiber_keys(mode);
  if (keys.empty()) throw DataError("rrf_init: mode " + std::to_string(mode + 1) + " has no nonempty fibers");
  std::uniform_int_distribution<std::size_t> pick(0, keys.size() - 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix out = Matrix::Zero(t.dim(mode), rank);
  Eigen::RowVectorXd g(rank);
  const auto values = t.values();
  for (std::size_t j = 0; j < s_init; ++j) {
    const LinearIndex key = keys[pick(rng)];
    for (Eigen::Index c = 0; c < rank; ++c) g(c) = normal(rng);
    for (std::size_t e : t.fiber(mode, key)) out.row(t.coord(e, mode)) += values[e] * g;
  }
  return out;
}

KruskalModel make_initial_model(const SparseTensor& t, const SolverConfig& cfg, Rng& rng) {
  if (cfg.init == InitMethod::gaussian) return gaussian_init(t.shape(), cfg.rank, rng);
  std::vector<Matrix> factors;
  for (int k = 0; k < t.order(); ++k) factors.push_back(rrf_init(t, k, cfg.rank, cfg.init_samples, rng));
  return make_model(std::move(factors));
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << "epoch,time_s,fit,fit_kind,mode,s_bar,s_det,p_det\n";
  std::string line;
  for (const TraceRecord& rec : trace) {
    line = std::to_string(rec.epoch) + ",";
    append_number(line, rec.time_s);
    line.push_back(',');
    append_number(line, rec.fit);
    line += std::string(",") + to_string(rec.fit_kind) + ",";
    if (rec.mode >= 0) {
      line += std::to_string(rec.mode + 1) + ",";
      append_number(line, rec.s_bar);
      line.push_back(',');
      append_number(line, rec.s_det);
      line.push_back(',');
      append_number(line, rec.p_det);
    } else {
      line += ",,,";
    }
    line.push_back('\n');
    out << line;
  }
}

}  // namespace cparls
