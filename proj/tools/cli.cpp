#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "cparls/cp_solver.hpp"
#include "cparls/errors.hpp"
#include "cparls/fit.hpp"
#include "cparls/kruskal.hpp"
#include "cparls/krp_sampler.hpp"
#include "cparls/synth.hpp"
#include "cparls/version.hpp"

namespace cparls::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

std::string num(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

double seconds(Clock::time_point a, Clock::time_point b) { return std::chrono::duration<double>(b - a).count(); }

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{md[i]};
  return hex.str();
}

std::vector<index_t> parse_shape(const std::string& text) {
  std::vector<index_t> shape;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find_first_of(",x", pos);
    if (end == std::string::npos) end = text.size();
    index_t v = 0;
    auto [p, ec] = std::from_chars(text.data() + pos, text.data() + end, v);
    if (ec != std::errc{} || p != text.data() + end || v < 1) {
      throw std::invalid_argument("invalid shape '" + text + "': expected positive sizes such as 50,50,50");
    }
    shape.push_back(v);
    pos = end + 1;
  }
  return shape;
}

// Tracks files written by a command and deletes them unless the command
// completes.
class OutputSet {
 public:
  explicit OutputSet(const fs::path& dir = {}) {
    if (!dir.empty() && !fs::exists(dir)) {
      fs::create_directories(dir);
      created_dir_ = dir;
    }
  }
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;
  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : files_) fs::remove(f, ec);
    if (!created_dir_.empty() && fs::is_empty(created_dir_, ec)) fs::remove(created_dir_, ec);
  }

  std::ofstream open(const fs::path& path) {
    files_.push_back(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
  }
  void commit() { committed_ = true; }

 private:
  std::vector<fs::path> files_;
  fs::path created_dir_;
  bool committed_ = false;
};

void close_checked(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw DataError("failed writing " + path.string());
}

struct TensorInput {
  std::string path;
  SparseTensor tensor;
  std::size_t dropped_zeros = 0;
  std::string digest;
};

TensorInput load_tensor(const std::string& path) {
  TensorInput in;
  in.path = path;
  in.digest = sha256_file(path);
  auto res = read_frostt_file(path);
  in.tensor = std::move(res.tensor);
  in.dropped_zeros = res.dropped_zeros;
  return in;
}

json input_json(const TensorInput& in) {
  return json{{"path", in.path},
              {"sha256", in.digest},
              {"shape", in.tensor.shape()},
              {"nnz", in.tensor.nnz()},
              {"dropped_zeros", in.dropped_zeros}};
}

KruskalModel load_model(const std::string& path, const SparseTensor& t, const std::string& what) {
  KruskalModel m = read_kruskal_file(path);
  m.validate();
  if (m.order() != t.order()) {
    throw DataError(what + " has " + std::to_string(m.order()) + " factors, tensor has " + std::to_string(t.order()) +
                    " modes");
  }
  for (int k = 0; k < t.order(); ++k) {
    if (m.factors[k].rows() != t.dim(k)) {
      throw DataError(what + " factor " + std::to_string(k + 1) + " has " + std::to_string(m.factors[k].rows()) +
                      " rows, tensor mode has size " + std::to_string(t.dim(k)));
    }
  }
  return m;
}

// decompose

struct DecomposeArgs {
  std::string tensor;
  std::string method = "arls-lev";
  std::string tau = "1";
  std::string fit = "exact";
  std::string init = "gaussian";
  int max_iters = 250;
  int runs = 1;
  std::string out = "cparls_out";
  bool no_timing = false;
  SolverConfig cfg;
};

int cmd_decompose(DecomposeArgs& a, std::ostream& out) {
  SolverConfig& cfg = a.cfg;
  cfg.tau = parse_tau(a.tau, cfg.samples);
  cfg.fit_mode = a.fit == "exact" ? FitMode::exact : FitMode::estimated;
  cfg.init = a.init == "gaussian" ? InitMethod::gaussian : InitMethod::rrf;
  cfg.record_time = !a.no_timing;
  const bool als = a.method == "als";
  cfg.validate();
  if (a.runs < 1) throw std::invalid_argument("--runs must be at least 1");
  if (a.max_iters < 1) throw std::invalid_argument("--max-iters must be at least 1");

  TensorInput in = load_tensor(a.tensor);
  SparseTensor& t = in.tensor;
  if (cfg.init == InitMethod::rrf || !als) t.precompute_mode_linearization();

  const fs::path dir(a.out);
  OutputSet outputs(dir);
  json config{{"method", a.method},
              {"rank", cfg.rank},
              {"samples", cfg.samples},
              {"tau", a.tau},
              {"tau_value", cfg.tau},
              {"combine", cfg.combine},
              {"epoch_size", cfg.epoch_size},
              {"fail_epochs", cfg.fail_epochs},
              {"max_epochs", cfg.max_epochs},
              {"max_iters", a.max_iters},
              {"tol", cfg.tol},
              {"fit", a.fit},
              {"fit_samples", cfg.fit_samples},
              {"fit_alpha", cfg.fit_alpha},
              {"init", a.init},
              {"init_samples", cfg.init_samples},
              {"runs", a.runs},
              {"timing", cfg.record_time}};
  json runs = json::array();

  for (int j = 0; j < a.runs; ++j) {
    SolverConfig run_cfg = cfg;
    run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(j);
    Rng init_rng = make_rng(run_cfg.seed, 0);
    const KruskalModel init = make_initial_model(t, run_cfg, init_rng);
    CpResult res;
    if (als) {
      AlsConfig acfg;
      acfg.rank = cfg.rank;
      acfg.tol = cfg.tol;
      acfg.max_iters = a.max_iters;
      acfg.record_time = cfg.record_time;
      res = cp_als(t, acfg, init);
    } else {
      res = cp_arls_lev(t, run_cfg, init);
    }

    const std::string stem = "run" + std::to_string(j);
    const fs::path model_path = dir / (stem + ".model");
    const fs::path trace_path = dir / (stem + ".trace.csv");
    {
      auto f = outputs.open(model_path);
      write_kruskal(f, res.model);
      close_checked(f, model_path);
    }
    {
      auto f = outputs.open(trace_path);
      write_trace_csv(f, res.trace);
      close_checked(f, trace_path);
    }
    json run{{"seed", run_cfg.seed},
             {"model", model_path.string()},
             {"trace", trace_path.string()},
             {"final_fit", res.final_fit},
             {"iterations", res.iterations},
             {"converged", res.converged},
             {"rank_deficient_solves", res.rank_deficient_solves}};
    if (cfg.record_time && !als) {
      run["phase_seconds"] = json{{"plan", res.phases.plan},
                                  {"krp", res.phases.krp},
                                  {"gather", res.phases.gather},
                                  {"solve", res.phases.solve},
                                  {"fit", res.phases.fit}};
    }
    runs.push_back(std::move(run));
    out << "run " << j << " seed " << run_cfg.seed << " fit " << num(res.final_fit) << " iterations "
        << res.iterations << (res.converged ? " converged" : " stopped at limit") << "\n";
  }

  const fs::path manifest_path = dir / "manifest.json";
  json manifest{{"command", "decompose"},
                {"version", kVersion},
                {"input", input_json(in)},
                {"seed", cfg.seed},
                {"config", config},
                {"runs", runs}};
  auto f = outputs.open(manifest_path);
  f << manifest.dump(2) << "\n";
  close_checked(f, manifest_path);
  outputs.commit();
  return kOk;
}

// sample-bench

struct BenchArgs {
  std::string tensor;
  std::string model;
  int mode = 1;
  std::vector<std::size_t> grid{128, 512, 2048, 8192};
  int reps = 10;
  std::uint64_t seed = 0;
  bool exact = false;
  bool no_timing = false;
  std::string out;
  std::string plan_out;
};

int cmd_sample_bench(BenchArgs& a, std::ostream& out) {
  if (a.reps < 1) throw std::invalid_argument("--reps must be at least 1");
  for (std::size_t s : a.grid) {
    if (s < 1) throw std::invalid_argument("--grid sample counts must be positive");
  }
  TensorInput in = load_tensor(a.tensor);
  SparseTensor& t = in.tensor;
  if (a.mode < 1 || a.mode > t.order()) {
    throw std::invalid_argument("--mode must lie in 1.." + std::to_string(t.order()));
  }
  const int k = a.mode - 1;
  const KruskalModel model = load_model(a.model, t, "model");
  t.precompute_mode_linearization();

  std::vector<ModeDistribution> dists;
  for (int j = 0; j < t.order(); ++j) dists.push_back(ModeDistribution::from_factor(model.factors[j]));
  DistributionRefs refs;
  for (int j = 0; j < t.order(); ++j) {
    if (j != k) refs.push_back(&dists[j]);
  }
  const FactorRefs others = factor_refs(model.factors, k);
  const std::vector<index_t> other_shape = t.other_modes_shape(k);
  std::optional<Matrix> b_exact;
  if (a.exact) b_exact = exact_lsq_solution(t, model.factors, k);

  OutputSet outputs;
  std::ofstream csv_file, plan_file;
  if (!a.out.empty()) csv_file = outputs.open(a.out);
  if (!a.plan_out.empty()) plan_file = outputs.open(a.plan_out);
  std::ostream& csv = a.out.empty() ? out : csv_file;
  csv << "mode,s,tau_kind,tau,combine,rep,s_bar,s_det,p_det,s_rnd,rhs_nnz,rank,"
         "time_plan,time_krp,time_gather,time_solve,rel_diff\n";

  std::vector<LinearIndex> lin;
  for (std::size_t s : a.grid) {
    for (bool hybrid : {false, true}) {
      for (bool combine : {true, false}) {
        SketchOptions opts;
        opts.tau = hybrid ? 1.0 / static_cast<double>(s) : 1.0;
        opts.combine = combine;
        for (int rep = 0; rep < a.reps; ++rep) {
          Rng rng = make_rng(a.seed + static_cast<std::uint64_t>(rep), 1);
          const auto t0 = Clock::now();
          SketchPlan plan = skrp_lev(refs, s, opts, rng);
          const auto t1 = Clock::now();
          Matrix zs = krp_samp(others, plan.idx, plan.wgt);
          const auto t2 = Clock::now();
          lin.resize(plan.size());
          for (std::size_t j = 0; j < plan.size(); ++j) lin[j] = to_linear(plan.idx[j], other_shape);
          SampledRows xs = tnsr_samp(t, k, lin, plan.wgt);
          const auto t3 = Clock::now();
          LsqSolution sol = solve_lsq(zs, xs);
          const auto t4 = Clock::now();
          if (!sol.b.allFinite()) throw NumericalError("sampled solve produced non-finite entries");

          auto time = [&](Clock::time_point x, Clock::time_point y) { return a.no_timing ? 0.0 : seconds(x, y); };
          std::string row = std::to_string(a.mode) + "," + std::to_string(s) + "," + (hybrid ? "1/s" : "1") + "," +
                            num(opts.tau) + "," + (combine ? "on" : "off") + "," + std::to_string(rep) + "," +
                            std::to_string(plan.size()) + "," + std::to_string(plan.s_det) + "," + num(plan.p_det) +
                            "," + std::to_string(plan.s_rnd) + "," + std::to_string(xs.nnz()) + "," +
                            std::to_string(sol.rank) + "," + num(time(t0, t1)) + "," + num(time(t1, t2)) + "," +
                            num(time(t2, t3)) + "," + num(time(t3, t4)) + ",";
          if (b_exact) row += num(residual_rel_diff(t, model.factors, k, sol.b, *b_exact));
          csv << row << "\n";
          if (plan_file.is_open()) {
            plan_file << "# s=" << s << " tau=" << (hybrid ? "1/s" : "1") << " combine=" << (combine ? "on" : "off")
                      << " rep=" << rep << "\n";
            write_plan_diagnostics(plan_file, plan);
          }
        }
      }
    }
  }

  if (!a.out.empty()) {
    close_checked(csv_file, a.out);
    if (plan_file.is_open()) close_checked(plan_file, a.plan_out);
    const fs::path manifest_path = a.out + ".manifest.json";
    json outputs_json{{"csv", a.out}};
    if (!a.plan_out.empty()) outputs_json["plans"] = a.plan_out;
    json manifest{{"command", "sample-bench"},
                  {"version", kVersion},
                  {"input", input_json(in)},
                  {"model", {{"path", a.model}, {"sha256", sha256_file(a.model)}}},
                  {"seed", a.seed},
                  {"config",
                   {{"mode", a.mode},
                    {"grid", a.grid},
                    {"reps", a.reps},
                    {"exact", a.exact},
                    {"timing", !a.no_timing}}},
                  {"outputs", outputs_json}};
    auto f = outputs.open(manifest_path);
    f << manifest.dump(2) << "\n";
    close_checked(f, manifest_path);
  } else if (plan_file.is_open()) {
    close_checked(plan_file, a.plan_out);
  }
  outputs.commit();
  return kOk;
}

// synth

struct SynthArgs {
  std::string shape = "50,50,50";
  bool no_noise = false;
  std::string out = "synth_out";
  SynthSpec spec;
};

int cmd_synth(SynthArgs& a, std::ostream& out) {
  a.spec.shape = parse_shape(a.shape);
  if (a.no_noise) a.spec.noise = 0.0;
  SynthResult res = gen_synthetic(a.spec);

  const fs::path dir(a.out);
  OutputSet outputs(dir);
  const fs::path tensor_path = dir / "tensor.tns";
  const fs::path truth_path = dir / "truth.model";
  {
    auto f = outputs.open(tensor_path);
    write_frostt(f, res.tensor);
    close_checked(f, tensor_path);
  }
  {
    auto f = outputs.open(truth_path);
    write_kruskal(f, res.truth);
    close_checked(f, truth_path);
  }
  const SynthSpec& s = a.spec;
  json manifest{{"command", "synth"},
                {"version", kVersion},
                {"seed", s.seed},
                {"parameters",
                 {{"shape", s.shape},
                  {"rank", s.rank},
                  {"concentrated", s.concentrated},
                  {"spread", s.spread},
                  {"magnitude", s.magnitude},
                  {"seed_noise", s.seed_noise},
                  {"noise", s.noise}}},
                {"outputs",
                 {{"tensor", tensor_path.string()},
                  {"tensor_sha256", sha256_file(tensor_path.string())},
                  {"truth", truth_path.string()}}}};
  const fs::path manifest_path = dir / "manifest.json";
  auto f = outputs.open(manifest_path);
  f << manifest.dump(2) << "\n";
  close_checked(f, manifest_path);
  outputs.commit();
  out << "wrote " << tensor_path.string() << " (" << res.tensor.nnz() << " nonzeros) and " << truth_path.string()
      << "\n";
  return kOk;
}

// score

struct ScoreArgs {
  std::string tensor;
  std::string model;
  std::string truth;
  bool estimate = false;
  std::size_t fit_samples = 1 << 17;
  double fit_alpha = 0.5;
  std::uint64_t seed = 0;
};

int cmd_score(ScoreArgs& a, std::ostream& out) {
  if (!(a.fit_alpha > 0.0 && a.fit_alpha < 1.0)) throw std::invalid_argument("--fit-alpha must lie in (0, 1)");
  if (a.estimate && a.fit_samples < 2) throw std::invalid_argument("--fit-samples must be at least 2");
  TensorInput in = load_tensor(a.tensor);
  const KruskalModel model = load_model(a.model, in.tensor, "model");
  out << "exact_fit " << num(exact_fit(in.tensor, model)) << "\n";
  if (a.estimate) {
    Rng rng = make_rng(a.seed, 2);
    FitEstimator est(in.tensor, a.fit_samples, a.fit_alpha, rng);
    out << "estimated_fit " << num(est.estimated_fit(model)) << "\n";
  }
  if (!a.truth.empty()) {
    const KruskalModel truth = load_model(a.truth, in.tensor, "truth model");
    out << "fms " << num(factor_match_score(model, truth)) << "\n";
  }
  return kOk;
}

}  // namespace

double parse_tau(const std::string& text, std::size_t samples) {
  if (text == "1/s") {
    if (samples < 1) throw std::invalid_argument("--tau 1/s needs a positive sample count");
    return 1.0 / static_cast<double>(samples);
  }
  double v = 0.0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size() || !(v > 0.0 && v <= 1.0)) {
    throw std::invalid_argument("invalid --tau '" + text + "': expected 1, 1/s or a number in (0, 1]");
  }
  return v;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Randomized CP decomposition of sparse tensors"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "TOML/INI file with option values; command-line flags take precedence");
  app.require_subcommand(1);

  DecomposeArgs dec;
  auto* c_dec = app.add_subcommand("decompose", "Compute a CP decomposition of a FROSTT tensor");
  c_dec->add_option("tensor", dec.tensor, "Input .tns file")->required();
  c_dec->add_option("--method", dec.method, "Solver")->check(CLI::IsMember({"arls-lev", "als"}))->capture_default_str();
  c_dec->add_option("--rank", dec.cfg.rank, "CP rank")->capture_default_str();
  c_dec->add_option("--samples", dec.cfg.samples, "Sampled rows per least-squares solve")->capture_default_str();
  c_dec->add_option("--tau", dec.tau, "Deterministic threshold: 1, 1/s or a number in (0,1]")->capture_default_str();
  c_dec->add_flag("--combine,!--no-combine", dec.cfg.combine, "Combine repeated sampled rows")->capture_default_str();
  c_dec->add_option("--epoch-size", dec.cfg.epoch_size, "Iterations per fit evaluation")->capture_default_str();
  c_dec->add_option("--fail-epochs", dec.cfg.fail_epochs, "Non-improving epochs before stopping")
      ->capture_default_str();
  c_dec->add_option("--max-epochs", dec.cfg.max_epochs, "Epoch limit")->capture_default_str();
  c_dec->add_option("--max-iters", dec.max_iters, "Iteration limit for CP-ALS")->capture_default_str();
  c_dec->add_option("--tol", dec.cfg.tol, "Fit improvement tolerance")->capture_default_str();
  c_dec->add_option("--fit", dec.fit, "Fit evaluation")->check(CLI::IsMember({"exact", "estimated"}))
      ->capture_default_str();
  c_dec->add_option("--fit-samples", dec.cfg.fit_samples, "Samples for the estimated fit")->capture_default_str();
  c_dec->add_option("--fit-alpha", dec.cfg.fit_alpha, "Share of fit samples drawn from nonzeros")
      ->capture_default_str();
  c_dec->add_option("--init", dec.init, "Initialization")->check(CLI::IsMember({"gaussian", "rrf"}))
      ->capture_default_str();
  c_dec->add_option("--init-samples", dec.cfg.init_samples, "Fibers sampled per factor for RRF")
      ->capture_default_str();
  c_dec->add_option("--seed", dec.cfg.seed, "Base seed; run j uses seed + j")->capture_default_str();
  c_dec->add_option("--runs", dec.runs, "Independent runs")->capture_default_str();
  c_dec->add_option("--out", dec.out, "Output directory")->capture_default_str();
  c_dec->add_flag("--no-timing", dec.no_timing, "Record zero times so outputs are reproducible");

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("sample-bench", "Benchmark sketched solves of one least-squares subproblem");
  c_bench->add_option("tensor", bench.tensor, "Input .tns file")->required();
  c_bench->add_option("--model", bench.model, "Model file holding the frozen factors")->required();
  c_bench->add_option("--mode", bench.mode, "Mode to solve for (1-based)")->capture_default_str();
  c_bench->add_option("--grid", bench.grid, "Sample counts")->delimiter(',')->capture_default_str();
  c_bench->add_option("--reps", bench.reps, "Plans per configuration")->capture_default_str();
  c_bench->add_option("--seed", bench.seed, "Base seed; repetition j uses seed + j")->capture_default_str();
  c_bench->add_flag("--exact", bench.exact, "Report the relative residual difference to the exact solution");
  c_bench->add_flag("--no-timing", bench.no_timing, "Report zero times so outputs are reproducible");
  c_bench->add_option("--out", bench.out, "CSV output file (default: standard output)");
  c_bench->add_option("--plan-out", bench.plan_out, "Write sketch plan diagnostics to this file");

  SynthArgs syn;
  auto* c_syn = app.add_subcommand("synth", "Generate a synthetic tensor with concentrated leverage");
  c_syn->add_option("--shape", syn.shape, "Mode sizes, e.g. 50,50,50")->capture_default_str();
  c_syn->add_option("--rank", syn.spec.rank, "Rank")->capture_default_str();
  c_syn->add_option("--concentrated", syn.spec.concentrated, "Seeded columns per factor")->capture_default_str();
  c_syn->add_option("--spread", syn.spec.spread, "Nonzero rows per seeded column")->capture_default_str();
  c_syn->add_option("--magnitude", syn.spec.magnitude, "Value of seeded entries")->capture_default_str();
  c_syn->add_option("--seed-noise", syn.spec.seed_noise, "Uniform jitter added to seeded entries")
      ->capture_default_str();
  c_syn->add_option("--noise", syn.spec.noise, "Relative Gaussian noise level")->capture_default_str();
  c_syn->add_flag("--no-noise", syn.no_noise, "Generate the exact low-rank tensor");
  c_syn->add_option("--seed", syn.spec.seed, "Seed")->capture_default_str();
  c_syn->add_option("--out", syn.out, "Output directory")->capture_default_str();

  ScoreArgs sc;
  auto* c_score = app.add_subcommand("score", "Evaluate a model against a tensor and optional ground truth");
  c_score->add_option("tensor", sc.tensor, "Input .tns file")->required();
  c_score->add_option("--model", sc.model, "Model file")->required();
  c_score->add_option("--truth", sc.truth, "Ground-truth model for the factor match score");
  c_score->add_flag("--estimate", sc.estimate, "Also report the sampled fit estimate");
  c_score->add_option("--fit-samples", sc.fit_samples, "Samples for the estimated fit")->capture_default_str();
  c_score->add_option("--fit-alpha", sc.fit_alpha, "Share of fit samples drawn from nonzeros")->capture_default_str();
  c_score->add_option("--seed", sc.seed, "Seed for the fit estimate")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (*c_dec) return cmd_decompose(dec, out);
    if (*c_bench) return cmd_sample_bench(bench, out);
    if (*c_syn) return cmd_synth(syn, out);
    return cmd_score(sc, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  }
}

}  // namespace cparls::cli
