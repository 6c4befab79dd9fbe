#include "cli.hpp"

#include <chrono>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "hsevo/errors.hpp"
#include "hsevo/evaluation.hpp"
#include "hsevo/evolution.hpp"
#include "hsevo/run_output.hpp"
#include "hsevo/text_util.hpp"

namespace hsevo::cli {
namespace {

std::vector<std::string> split_command(const std::string& text) {
  std::istringstream ss(text);
  std::vector<std::string> out;
  std::string word;
  while (ss >> word) out.push_back(word);
  return out;
}

struct RunFlags {
  std::optional<std::string> problem;
  std::optional<std::string> config;
  std::optional<std::string> backend;
  std::optional<std::string> mock_dir;
  std::optional<std::int64_t> budget_tokens;
  std::optional<int> pop_init;
  std::optional<int> pop_size;
  std::optional<double> alpha;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<int> max_generations;
  std::optional<std::string> sandbox_cmd;
  std::optional<int> instances;
  std::optional<int> size;
  std::string output = "hsevo-run";
};

void add_common(CLI::App* app, RunFlags& f) {
  app->add_option("--problem", f.problem, "bpo, tsp_gls or op_aco");
  app->add_option("--config", f.config, "JSON config file; flags override it");
  app->add_option("--seed", f.seed, "Run seed");
  app->add_option("--sandbox-cmd", f.sandbox_cmd, "Sandbox command line (whitespace separated)");
  app->add_option("--instances", f.instances, "Number of evaluation instances");
  app->add_option("--size", f.size, "Items (BPO) or nodes (TSP, OP) per instance");
}

RunConfig build_config(const RunFlags& f) {
  RunConfig cfg;
  if (f.config) cfg = RunConfig::load(*f.config, cfg);
  if (f.problem) {
    const auto kind = problem_from_string(*f.problem);
    if (kind != cfg.problem.kind) cfg.problem = ProblemConfig::defaults_for(kind);
  }
  if (f.backend) {
    if (*f.backend == "mock") cfg.backend = BackendKind::mock;
    else if (*f.backend == "http") cfg.backend = BackendKind::http;
    else throw ConfigError("--backend must be 'mock' or 'http'");
  }
  if (f.mock_dir) cfg.mock_dir = *f.mock_dir;
  if (f.budget_tokens) cfg.budget_tokens = *f.budget_tokens;
  if (f.pop_init) cfg.pop_init = *f.pop_init;
  if (f.pop_size) cfg.pop_size = *f.pop_size;
  if (f.alpha) cfg.alpha = *f.alpha;
  if (f.seed) cfg.seed = *f.seed;
  if (f.workers) cfg.workers = *f.workers;
  if (f.max_generations) cfg.max_generations = *f.max_generations;
  if (f.sandbox_cmd) cfg.sandbox.command = split_command(*f.sandbox_cmd);
  if (f.instances) cfg.problem.n_instances = *f.instances;
  if (f.size) cfg.problem.size = *f.size;
  if (cfg.backend == BackendKind::mock && !cfg.mock_dir.empty() && std::filesystem::exists(cfg.mock_dir)) {
    cfg.mock_dir = std::filesystem::canonical(cfg.mock_dir).string();
  }
  return cfg.resolved();
}

std::shared_ptr<EvaluatorPool> make_pool(const std::shared_ptr<const ProblemSetup>& setup, const RunConfig& cfg) {
  std::vector<std::unique_ptr<HeuristicEvaluator>> workers;
  for (int i = 0; i < cfg.workers; ++i) {
    auto ev = std::make_unique<SandboxEvaluator>(setup, cfg.sandbox);
    if (!ev->session().ping(std::chrono::milliseconds(10000))) {
      std::string cmd;
      for (const auto& w : cfg.sandbox.command) cmd += (cmd.empty() ? "" : " ") + w;
      throw ConfigError("sandbox did not answer a ping: " + cmd);
    }
    workers.push_back(std::move(ev));
  }
  return std::make_shared<EvaluatorPool>(std::move(workers));
}

int cmd_run(const RunFlags& f, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = build_config(f);
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  const auto errors = cfg.validation_errors();
  if (!errors.empty()) {
    for (const auto& e : errors) err << "config error: " << e << "\n";
    return kConfigError;
  }

  std::shared_ptr<LlmBackend> backend;
  std::shared_ptr<EvaluatorPool> pool;
  std::shared_ptr<ProblemSetup> setup;
  std::shared_ptr<Embedder> embedder;
  try {
    if (cfg.backend == BackendKind::mock) {
      backend = std::make_shared<ScriptedMockBackend>(cfg.mock_dir);
    } else {
      auto http = HttpChatConfig::from_environment();
      http.endpoint = cfg.llm_endpoint;
      http.model = cfg.llm_model;
      backend = std::make_shared<HttpChatBackend>(http);
    }
    setup = std::make_shared<ProblemSetup>(ProblemSetup::build(cfg.problem));
    pool = make_pool(setup, cfg);
    embedder = make_embedder(cfg.embedder);
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  auto gateway = std::make_shared<LlmGateway>(backend, std::make_shared<TokenBudget>(cfg.budget_tokens));
  Engine engine(cfg, gateway, pool, embedder);
  engine.run();

  nlohmann::ordered_json extra;
  extra["embedder"] = embedder->tag();
  if (cfg.problem.kind == ProblemKind::tsp_gls) extra["tsp_references_computed"] = setup->tsp_references_computed;
  write_run_outputs(f.output, engine, cfg, extra);

  const auto best = archive_best(engine.archive());
  out << "stop: " << to_string(engine.stop_reason()) << ", generations: " << engine.generations_completed()
      << ", tokens: " << gateway->budget().used() << "/" << cfg.budget_tokens
      << ", best: " << (best ? format_double(*best) : std::string("none")) << "\n";
  out << "outputs in " << f.output << "\n";
  if (engine.stop_reason() == StopReason::transport_error) {
    err << "llm transport error: " << engine.stop_message() << "\n";
    return kTransportError;
  }
  return kOk;
}

int cmd_analyze(const std::string& dir, std::ostream& out, std::ostream& err) {
  if (!std::filesystem::exists(std::filesystem::path(dir) / run_files::archive)) {
    err << "no " << run_files::archive << " in " << dir << "\n";
    return kFailure;
  }
  RunConfig cfg;
  const auto cfg_path = std::filesystem::path(dir) / run_files::config;
  try {
    if (std::filesystem::exists(cfg_path)) cfg = RunConfig::load(cfg_path, cfg);
    auto embedder = make_embedder(cfg.embedder.with_environment());
    DiversityOptions opts;
    opts.alpha = cfg.alpha;
    opts.include_invalid = cfg.include_invalid;
    const auto res = analyze_run(dir, *embedder, opts);
    out << "wrote " << (std::filesystem::path(dir) / run_files::analysis).string() << " ("
        << res.reports.size() << " timesteps, " << res.compared << " compared, max |diff| "
        << format_double(res.max_abs_diff) << ")\n";
    if (!res.matches) {
      for (const auto& m : res.mismatches) err << "mismatch: " << m << "\n";
      return kFailure;
    }
  } catch (const Error& e) {
    err << "analyze failed: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}

int cmd_eval(const std::string& file, const RunFlags& f, std::ostream& out, std::ostream& err) {
  std::string source;
  RunConfig cfg;
  try {
    source = read_file(file);
    cfg = build_config(f);
    if (f.seed) cfg.problem.instance_seed = *f.seed;
    auto setup = std::make_shared<ProblemSetup>(ProblemSetup::build(cfg.problem));
    SandboxEvaluator ev(setup, cfg.sandbox);
    const auto r = ev.evaluate(source);
    if (!r.objective.valid()) {
      err << "INVALID";
      if (r.failure) err << " (" << r.failure->kind << "): " << r.failure->message;
      err << "\n";
      return kFailure;
    }
    out << format_double(r.objective.value()) << "\n";
    return kOk;
  } catch (const Error& e) {
    err << "eval failed: " << e.what() << "\n";
    return kFailure;
  }
}

int cmd_tsp_reference(const std::string& path, int count, int n, int restarts, int kicks, std::ostream& out) {
  std::string text =
      "# seed n length\n# 2-opt with double-bridge kicks; a reference, not proven optimal.\n";
  for (int s = 0; s < count; ++s) {
    const auto inst = gen_tsp(static_cast<std::uint64_t>(s), static_cast<std::size_t>(n));
    const auto sol = reference_tsp(inst, restarts, kicks, static_cast<std::uint64_t>(s));
    text += std::to_string(s) + " " + std::to_string(n) + " " + format_double(sol.length) + "\n";
  }
  write_file_atomic(path, text);
  out << "wrote " << count << " references to " << path << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heuristic evolution with flash reflection and harmony search", "hsevo"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "Run the evolution loop");
  add_common(run_cmd, run_flags);
  run_cmd->add_option("--backend", run_flags.backend, "http or mock");
  run_cmd->add_option("--mock-dir", run_flags.mock_dir, "Directory of scripted replies");
  run_cmd->add_option("--budget-tokens", run_flags.budget_tokens, "Token budget");
  run_cmd->add_option("--pop-init", run_flags.pop_init, "Initial population size");
  run_cmd->add_option("--pop-size", run_flags.pop_size, "Population size");
  run_cmd->add_option("--alpha", run_flags.alpha, "SWDI similarity threshold");
  run_cmd->add_option("--workers", run_flags.workers, "Parallel evaluators");
  run_cmd->add_option("--max-generations", run_flags.max_generations, "Stop after this many generations");
  run_cmd->add_option("--output", run_flags.output, "Output directory");

  std::string analyze_dir;
  auto* analyze_cmd = app.add_subcommand("analyze", "Recompute diversity from a run's archive");
  analyze_cmd->add_option("run_dir", analyze_dir, "Run directory")->required();

  RunFlags eval_flags;
  std::string eval_file;
  auto* eval_cmd = app.add_subcommand("eval", "Score one heuristic file");
  eval_cmd->add_option("heuristic", eval_file, "Python source file")->required();
  add_common(eval_cmd, eval_flags);

  std::string ref_path = std::string(HSEVO_DATA_DIR) + "/tsp100_reference.txt";
  int ref_count = 64, ref_n = 100, ref_restarts = 4, ref_kicks = 200;
  auto* ref_cmd = app.add_subcommand("tsp-reference", "Generate reference tour lengths for TSP instances");
  ref_cmd->add_option("--out", ref_path, "Output file");
  ref_cmd->add_option("--count", ref_count, "Instances (seeds 0..count-1)");
  ref_cmd->add_option("--n", ref_n, "Nodes per instance");
  ref_cmd->add_option("--restarts", ref_restarts, "2-opt restarts");
  ref_cmd->add_option("--kicks", ref_kicks, "Double-bridge kicks per restart");

  std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (*run_cmd) return cmd_run(run_flags, out, err);
    if (*analyze_cmd) return cmd_analyze(analyze_dir, out, err);
    if (*eval_cmd) return cmd_eval(eval_file, eval_flags, out, err);
    if (*ref_cmd) return cmd_tsp_reference(ref_path, ref_count, ref_n, ref_restarts, ref_kicks, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

}  // namespace hsevo::cli
