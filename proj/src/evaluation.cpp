#include "hsevo/evaluation.hpp"

#include <atomic>
#include <chrono>
#include <regex>
#include <thread>

#include "hsevo/errors.hpp"
#include "hsevo/parameterization.hpp"
#include "hsevo/prompts.hpp"

namespace hsevo {

ProblemSetup ProblemSetup::build(const ProblemConfig& cfg) {
  ProblemSetup s;
  s.cfg = cfg;
  const auto n = static_cast<std::size_t>(cfg.size);
  for (int i = 0; i < cfg.n_instances; ++i) {
    const auto seed = cfg.instance_seed + static_cast<std::uint64_t>(i);
    switch (cfg.kind) {
      case ProblemKind::bpo: s.bpo.push_back(gen_bpo(seed, n, cfg.bpo_capacity)); break;
      case ProblemKind::tsp_gls: s.tsp.push_back(gen_tsp(seed, n)); break;
      case ProblemKind::op_aco: s.op.push_back(gen_op(seed, n, cfg.op_max_len, cfg.prize_convention)); break;
    }
  }
  if (cfg.kind == ProblemKind::tsp_gls) {
    std::map<std::uint64_t, double> table;
    if (n > 11 && !cfg.tsp_reference_file.empty() && std::filesystem::exists(cfg.tsp_reference_file)) {
      table = load_tsp_reference(cfg.tsp_reference_file, n);
    }
    for (const auto& inst : s.tsp) {
      if (n <= 11) {
        s.tsp_reference.push_back(exact_tsp(inst).length);
      } else if (auto it = table.find(inst.seed); it != table.end()) {
        s.tsp_reference.push_back(it->second);
      } else {
        s.tsp_reference.push_back(reference_tsp(inst, 4, 200, inst.seed).length);
        ++s.tsp_references_computed;
      }
    }
  }
  return s;
}

namespace {

std::string entry_function(const std::string& source, const std::string& base) {
  try {
    if (auto fn = detect_entry_function(source, base)) return *fn;
  } catch (const ParseError&) {
    // the sandbox reports the real syntax error; only locate a def here
    static const std::regex def_re(R"(^def\s+([A-Za-z_][A-Za-z_0-9]*)\s*\()", std::regex::multiline);
    std::string fallback;
    for (auto it = std::sregex_iterator(source.begin(), source.end(), def_re); it != std::sregex_iterator(); ++it) {
      const auto name = (*it)[1].str();
      if (name == base || name.rfind(base + "_v", 0) == 0) return name;
      fallback = name;
    }
    if (!fallback.empty()) return fallback;
  }
  throw HeuristicError("missing_function", "no top-level function definition found");
}

using Clock = std::chrono::steady_clock;

std::chrono::milliseconds remaining(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
  if (left.count() <= 0) throw HeuristicError("timeout", "evaluation exceeded its time limit");
  return left;
}

}  // namespace

EvaluationResult evaluate_native(const ProblemSetup& setup, const BpoPriorityFn& bpo, const TspGuideFn& tsp,
                                 const OpPromiseFn& op) {
  switch (setup.cfg.kind) {
    case ProblemKind::bpo: return eval_bpo(bpo, setup.bpo);
    case ProblemKind::tsp_gls: return eval_tsp(tsp, setup.tsp, setup.tsp_reference, setup.cfg.gls);
    case ProblemKind::op_aco: return eval_op(op, setup.op, setup.cfg.aco);
  }
  throw ConfigError("unknown problem kind");
}

SandboxEvaluator::SandboxEvaluator(std::shared_ptr<const ProblemSetup> setup, SandboxOptions opts)
    : setup_(std::move(setup)), session_(std::make_unique<SandboxSession>(std::move(opts))) {}

EvaluationResult SandboxEvaluator::evaluate(const std::string& source) {
  const auto start = Clock::now();
  const auto deadline =
      start + std::chrono::milliseconds(static_cast<std::int64_t>(setup_->cfg.eval_timeout_seconds * 1000.0));
  auto failed = [&](const HeuristicError& e) {
    EvaluationResult r;
    r.failure = Failure{e.kind(), e.what()};
    r.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return r;
  };
  try {
    if (session_->state() == SandboxSession::State::dead) session_->respawn();
    const auto fn = entry_function(source, prompt_info(setup_->cfg.kind).function_name);
    session_->load(source, fn, setup_->cfg.instance_seed);
  } catch (const HeuristicError& e) {
    return failed(e);
  }

  auto& s = *session_;
  BpoPriorityFn bpo = [&](double item, const std::vector<double>& caps) {
    return wire::as_vector(s.call({item, caps}, remaining(deadline), wire::Shape::vector(caps.size()).allowing_nonfinite()));
  };
  TspGuideFn tsp = [&](const Matrix& d, const std::vector<std::int64_t>& tour, const Matrix& used) {
    return wire::as_matrix(s.call({d, tour, used}, remaining(deadline), wire::Shape::matrix(d.rows, d.cols)));
  };
  OpPromiseFn op = [&](const std::vector<double>& prizes, const Matrix& d, double max_len) {
    return wire::as_matrix(s.call({prizes, d, max_len}, remaining(deadline), wire::Shape::matrix(d.rows, d.cols)));
  };
  auto result = evaluate_native(*setup_, bpo, tsp, op);
  result.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

EvaluatorPool::EvaluatorPool(std::vector<std::unique_ptr<HeuristicEvaluator>> workers) : workers_(std::move(workers)) {
  if (workers_.empty()) throw ConfigError("evaluator pool needs at least one worker");
}

EvaluationResult EvaluatorPool::evaluate(const std::string& source) { return workers_.front()->evaluate(source); }

std::vector<EvaluationResult> EvaluatorPool::evaluate_all(const std::vector<std::string>& sources) {
  std::vector<EvaluationResult> results(sources.size());
  if (workers_.size() == 1 || sources.size() <= 1) {
    for (std::size_t i = 0; i < sources.size(); ++i) results[i] = workers_.front()->evaluate(sources[i]);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers_.size());
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers_.size(); ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < sources.size(); i = next++) results[i] = workers_[w]->evaluate(sources[i]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace hsevo
