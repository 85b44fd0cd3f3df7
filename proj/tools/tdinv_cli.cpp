// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <iostream>
#include <sstream>
#include <CLI11.hpp>
#include "tdinv/matrix_io.hpp"
#include "tdinv/problem_spec.hpp"
#include "tdinv/reporting.hpp"

using namespace tdinv;

namespace
{

// "lo:hi:count" in log10 seconds.
TimeChannels ParseTimes(const std::string &text)
{
  std::stringstream in(text);
  double lo = 0, hi = 0;
  int count = 0;
  char c1 = 0, c2 = 0;
  if (!(in >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':')
  {
    Fail("--times-log10 expects lo:hi:count, got '" + text + "'");
  }
  return TimeChannels::LogSpaced(lo, hi, count);
}

std::vector<int> ParseInts(const std::string &text)
{
  std::vector<int> out;
  std::stringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ','))
  {
    out.push_back(std::stoi(tok));
  }
  return out;
}

Model LoadModelOrTruth(const std::string &path, const ProblemSpec &spec, const Problem &problem)
{
  if (path.empty())
  {
    return BuildTrueModel(spec, problem);
  }
  Model model = ModelFromJson(LoadJson(path));
  Require(model.size() == problem.CellCount(), "model size does not match the problem");
  return model;
}

void Write(const Json &j, const std::string &path)
{
  if (path.empty() || path == "-")
  {
    std::cout << j.dump(2) << "\n";
  }
  else
  {
    SaveJson(j, path);
  }
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Transient diffusion inversion with shared-pole rational approximation"};
  app.require_subcommand(1);
  int workers = 1;
  app.add_option("--workers", workers, "pole-parallel workers")->check(CLI::PositiveNumber);

  // fit-rba
  auto *fit = app.add_subcommand("fit-rba", "fit a shared-pole rational approximant");
  std::string times_text = "-6:-3:31", fit_out, fit_problem;
  int poles = 21;
  double xmin = 0.0, xmax = 0.0, xmax_factor = 100.0;
  FitConfig fit_cfg;
  fit->add_option("--times-log10", times_text, "lo:hi:count in log10 seconds");
  fit->add_option("--poles", poles, "pole count m")->check(CLI::PositiveNumber);
  fit->add_option("--xmin", xmin, "lower end of the spectral interval");
  auto *xmax_opt = fit->add_option("--xmax", xmax, "upper end of the spectral interval");
  fit->add_option("--problem", fit_problem, "derive --xmax from this problem spec")
      ->excludes(xmax_opt);
  fit->add_option("--xmax-factor", xmax_factor, "safety factor on the estimated spectral radius");
  fit->add_option("--max-iters", fit_cfg.max_iters, "pole relocation sweeps");
  fit->add_flag("--relative", fit_cfg.relative_weighting, "relative error weighting");
  fit->add_option("--out", fit_out, "approximant JSON")->required();

  // forward
  auto *fwd = app.add_subcommand("forward", "evaluate the transient response");
  std::string problem_path, model_path, approx_path, out_path;
  bool fields = false;
  fwd->add_option("--problem", problem_path, "problem spec")->required()->check(CLI::ExistingFile);
  fwd->add_option("--model", model_path, "model JSON (default: true model of the spec)");
  fwd->add_option("--approx", approx_path, "approximant JSON")->required()->check(CLI::ExistingFile);
  fwd->add_flag("--fields", fields, "include u(t_j) in the output");
  fwd->add_option("--out", out_path, "response JSON")->required();

  // verify
  auto *ver = app.add_subcommand("verify", "Taylor remainder and adjoint tests");
  int trials = 20;
  std::uint64_t seed = 1;
  ver->add_option("--problem", problem_path, "problem spec")->required()->check(CLI::ExistingFile);
  ver->add_option("--model", model_path, "model JSON (default: true model of the spec)");
  ver->add_option("--approx", approx_path, "approximant JSON")->required()->check(CLI::ExistingFile);
  ver->add_option("--trials", trials, "adjoint test trials");
  ver->add_option("--seed", seed, "random seed");
  ver->add_option("--out", out_path, "output directory")->required();

  // make-data
  auto *mk = app.add_subcommand("make-data", "synthetic observations from the true model");
  NoiseSpec noise;
  double eps_a = -1.0;
  std::string model_out;
  mk->add_option("--problem", problem_path, "problem spec")->required()->check(CLI::ExistingFile);
  mk->add_option("--model", model_path, "true model JSON (default: from the spec)");
  mk->add_option("--approx", approx_path, "approximant JSON")->required()->check(CLI::ExistingFile);
  mk->add_option("--eps-r", noise.eps_r, "relative noise level");
  mk->add_option("--eps-a", eps_a, "absolute noise level (default 1e-6 max|d|)");
  mk->add_option("--seed", noise.seed, "noise seed");
  mk->add_option("--model-out", model_out, "write the true model JSON here");
  mk->add_option("--out", out_path, "data JSON")->required();

  // invert
  auto *inv = app.add_subcommand("invert", "Gauss-Newton inversion");
  std::string data_path, start_path;
  InversionConfig icfg;
  double lambda0 = -1.0;
  inv->add_option("--problem", problem_path, "problem spec")->required()->check(CLI::ExistingFile);
  inv->add_option("--data", data_path, "data JSON")->required()->check(CLI::ExistingFile);
  inv->add_option("--approx", approx_path, "approximant JSON")->required()->check(CLI::ExistingFile);
  inv->add_option("--start", start_path, "starting model JSON (default: reference model)");
  inv->add_option("--lambda0", lambda0, "initial regularization weight (default: automatic)");
  inv->add_option("--chi2-target", icfg.chi2_target, "target χ²");
  inv->add_option("--max-gn", icfg.max_gn, "maximum Gauss-Newton iterations");
  inv->add_option("--lsqr-tol", icfg.lsqr.atol, "LSQR relative tolerance");
  inv->add_option("--lsqr-max", icfg.lsqr.max_iters, "LSQR iteration limit");
  inv->add_option("--out", out_path, "run directory")->required();

  // report
  auto *rep = app.add_subcommand("report", "consolidate a run directory into one report");
  std::string run_dir;
  rep->add_option("--run", run_dir, "run directory")->required()->check(CLI::ExistingDirectory);
  rep->add_option("--out", out_path, "report JSON (default: <run>/report.json)");

  // bench-scaling
  auto *bench = app.add_subcommand("bench-scaling", "factorize/solve timings per worker count");
  std::string worker_list = "1,2,4,8";
  int repeats = 3;
  bench->add_option("--problem", problem_path, "problem spec")->required()->check(CLI::ExistingFile);
  bench->add_option("--model", model_path, "model JSON (default: true model of the spec)");
  bench->add_option("--approx", approx_path, "approximant JSON")->required()->check(CLI::ExistingFile);
  bench->add_option("--worker-counts", worker_list, "comma separated worker counts");
  bench->add_option("--repeats", repeats, "repetitions, best time kept");
  bench->add_option("--out", out_path, "scaling JSON (a .csv with the same stem is also written)")
      ->required();

  // export-matrices
  auto *exp = app.add_subcommand("export-matrices", "write K, M, Q, f in Matrix Market format");
  exp->add_option("--problem", problem_path, "problem spec")->required()->check(CLI::ExistingFile);
  exp->add_option("--model", model_path, "model JSON (default: true model of the spec)");
  exp->add_option("--out", out_path, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try
  {
    SolverOptions sopts;
    sopts.workers = workers;

    if (*fit)
    {
      const TimeChannels channels = ParseTimes(times_text);
      if (!fit_problem.empty())
      {
        const ProblemSpec spec = LoadProblemSpec(fit_problem);
        const Problem problem = BuildProblem(spec);
        xmax = xmax_factor * EstimateSpectralRadius(problem, BuildReferenceModel(spec, problem));
      }
      Require(xmax > xmin, "--xmax (or --problem) is required and must exceed --xmin");
      const RationalApproximant a = FitCommonPole(channels, xmin, xmax, poles, fit_cfg);
      SaveJson(ToJson(a), fit_out);
      std::cerr << "fit_error " << a.fit_error << " after " << a.stats.iterations << " sweeps"
                << (a.stats.converged ? "" : " (not converged, best iterate kept)") << "\n";
      return 0;
    }

    if (*exp)
    {
      const ProblemSpec spec = LoadProblemSpec(problem_path);
      const Problem problem = BuildProblem(spec);
      const Model model = LoadModelOrTruth(model_path, spec, problem);
      ExportProblem(problem, model.m, out_path);
      return 0;
    }

    if (*rep)
    {
      const std::filesystem::path dir(run_dir);
      const InversionState state = StateFromJson(LoadJson((dir / "state.json").string()));
      SolveCounters counters;
      if (std::filesystem::exists(dir / "counters.json"))
      {
        const Json c = LoadJson((dir / "counters.json").string());
        counters.factorizations = c.value("factorizations", 0L);
        counters.solves = c.value("solves", 0L);
        counters.version = c.value("version", 0L);
      }
      Write(RunReport(state, counters), out_path.empty() ? (dir / "report.json").string() : out_path);
      return 0;
    }

    const ProblemSpec spec = LoadProblemSpec(problem_path);
    const Problem problem = BuildProblem(spec);
    const RationalApproximant approx = ApproximantFromJson(LoadJson(approx_path));
    ShiftedFactorCache cache(sopts);

    if (*fwd)
    {
      const Model model = LoadModelOrTruth(model_path, spec, problem);
      const ForwardResult r = ForwardResponse(problem, model, approx, cache, fields);
      Json j = {{"times", approx.channels.times},
                {"receivers", problem.ReceiverCount()},
                {"data", VectorToJson(r.data)},
                {"counters", ToJson(r.counters)}};
      if (fields)
      {
        Json f = Json::array();
        for (Eigen::Index k = 0; k < r.fields.rows(); k++)
        {
          f.push_back(VectorToJson(r.fields.row(k).transpose()));
        }
        j["fields"] = f;
      }
      Write(j, out_path);
    }
    else if (*ver)
    {
      const Model model = LoadModelOrTruth(model_path, spec, problem);
      std::filesystem::create_directories(out_path);
      const std::filesystem::path dir(out_path);
      Vector direction = Vector::Ones(problem.CellCount());
      for (Eigen::Index k = 0; k < direction.size(); k++)
      {
        direction(k) = std::sin(1.0 + 0.7 * k);
      }
      const TaylorReport taylor = TaylorTest(problem, model, approx, cache, direction,
                                             {1e-1, 1e-2, 1e-3, 1e-4, 1e-5});
      const JacobianOperator J(problem, model, approx, cache);
      const double mismatch = AdjointTest(J, trials, seed);
      WriteTaylorCsv((dir / "taylor.csv").string(), taylor);
      Write({{"taylor", ToJson(taylor)},
             {"adjoint", {{"trials", trials}, {"seed", seed}, {"max_mismatch", mismatch}}},
             {"counters", ToJson(cache.Counters())}},
            (dir / "verify.json").string());
      std::cout << "taylor slopes " << taylor.slope0 << " " << taylor.slope1
                << ", adjoint mismatch " << mismatch << "\n";
    }
    else if (*mk)
    {
      const Model model = LoadModelOrTruth(model_path, spec, problem);
      if (eps_a > 0.0)
      {
        noise.eps_a = eps_a;
      }
      const DataSet data = MakeDataset(problem, model, approx, cache, noise);
      Write(ToJson(data), out_path);
      if (!model_out.empty())
      {
        Write(ToJson(model), model_out);
      }
    }
    else if (*inv)
    {
      const DataSet data = DataSetFromJson(LoadJson(data_path));
      const Model start =
          start_path.empty() ? BuildReferenceModel(spec, problem) : ModelFromJson(LoadJson(start_path));
      Require(problem.grid.has_value(), "inversion needs a grid for the regularization");
      const RegOperator reg = BuildReg(*problem.grid);
      if (lambda0 > 0.0)
      {
        icfg.lambda0 = lambda0;
      }
      icfg.lsqr.btol = icfg.lsqr.atol;
      std::filesystem::create_directories(out_path);
      const std::filesystem::path dir(out_path);
      auto persist = [&](const InversionState &state)
      {
        Write(ToJson(state), (dir / "state.json").string());
        Write(ToJson(cache.Counters()), (dir / "counters.json").string());
        WriteConvergenceCsv((dir / "convergence.csv").string(), state.history);
        WriteResidualHeatmapCsv((dir / "residual_heatmap.csv").string(), data, state.d_pred);
        WriteTransientsCsv((dir / "transients.csv").string(), data, state.d_pred);
        WriteTimingCsv((dir / "timing.csv").string(), state.history, FitTimingModel(state.history));
        const IterationRecord &r = state.history.back();
        std::cerr << "iter " << r.iteration << " chi2 " << r.chi2 << " lambda " << r.lambda
                  << " eta " << r.eta << " lsqr " << r.lsqr_iters << "\n";
      };
      const InversionState state = RunInversion(problem, approx, reg, data, start, cache, icfg, persist);
      persist(state);
      Write(RunReport(state, cache.Counters()), (dir / "report.json").string());
      std::cout << "status " << state.status << " chi2 " << state.chi2 << " after "
                << state.iteration << " iterations\n";
      return state.status == "error" || state.status == "diverged" ? 2 : 0;
    }
    else if (*bench)
    {
      const Model model = LoadModelOrTruth(model_path, spec, problem);
      const auto rows = ScalingBenchmark(problem, model, approx, ParseInts(worker_list), repeats);
      Write(ToJson(rows), out_path);
      WriteScalingCsv(std::filesystem::path(out_path).replace_extension(".csv").string(), rows);
    }
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
