#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hsevo/bpo.hpp"
#include "hsevo/op.hpp"
#include "hsevo/run_config.hpp"
#include "hsevo/sandbox_client.hpp"
#include "hsevo/tsp.hpp"

namespace hsevo {

// Instances and oracle values for one problem, generated once per run.
struct ProblemSetup {
  ProblemConfig cfg;
  std::vector<BpoInstance> bpo;
  std::vector<TspInstance> tsp;
  std::vector<double> tsp_reference;  // exact for n <= 11, else reference file or a local 2-opt run
  std::vector<OpInstance> op;
  std::size_t tsp_references_computed = 0;  // instances missing from the reference file

  static ProblemSetup build(const ProblemConfig& cfg);
};

class HeuristicEvaluator {
 public:
  virtual ~HeuristicEvaluator() = default;
  virtual EvaluationResult evaluate(const std::string& source) = 0;
};

// Adapts a plain function; used by tests and native baselines.
class CallbackEvaluator : public HeuristicEvaluator {
 public:
  explicit CallbackEvaluator(std::function<EvaluationResult(const std::string&)> fn) : fn_(std::move(fn)) {}
  EvaluationResult evaluate(const std::string& source) override { return fn_(source); }

 private:
  std::function<EvaluationResult(const std::string&)> fn_;
};

// Loads the candidate into a persistent sandbox session and runs the
// problem's solver with the candidate as its callback. The whole evaluation
// shares one deadline of cfg.eval_timeout_seconds. A dead session (after a
// timeout or crash) is respawned on the next evaluation.
class SandboxEvaluator : public HeuristicEvaluator {
 public:
  SandboxEvaluator(std::shared_ptr<const ProblemSetup> setup, SandboxOptions opts);
  EvaluationResult evaluate(const std::string& source) override;
  SandboxSession& session() { return *session_; }

 private:
  std::shared_ptr<const ProblemSetup> setup_;
  std::unique_ptr<SandboxSession> session_;
};

// Native callbacks run through the same solvers, without a sandbox.
EvaluationResult evaluate_native(const ProblemSetup& setup, const BpoPriorityFn& bpo, const TspGuideFn& tsp,
                                 const OpPromiseFn& op);

// Evaluates a batch on a fixed set of evaluators, one thread each. Results
// come back in input order regardless of scheduling.
class EvaluatorPool {
 public:
  explicit EvaluatorPool(std::vector<std::unique_ptr<HeuristicEvaluator>> workers);
  std::vector<EvaluationResult> evaluate_all(const std::vector<std::string>& sources);
  EvaluationResult evaluate(const std::string& source);
  std::size_t size() const { return workers_.size(); }

 private:
  std::vector<std::unique_ptr<HeuristicEvaluator>> workers_;
};

}  // namespace hsevo
