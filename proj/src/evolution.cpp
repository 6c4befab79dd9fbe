#include "hsevo/evolution.hpp"

#include <algorithm>
#include <unordered_set>

#include "hsevo/code_extraction.hpp"
#include "hsevo/errors.hpp"
#include "hsevo/normalizer.hpp"
#include "hsevo/parameterization.hpp"
#include "hsevo/prompts.hpp"

namespace hsevo {

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::none: return "none";
    case StopReason::budget_exhausted: return "budget_exhausted";
    case StopReason::max_generations: return "max_generations";
    case StopReason::mock_exhausted: return "mock_exhausted";
    case StopReason::transport_error: return "transport_error";
    case StopReason::no_parents: return "no_parents";
  }
  return "?";
}

namespace {

struct Ranked {
  double objective;
  std::size_t index;
  IndividualId id;
  bool operator<(const Ranked& o) const { return objective != o.objective ? objective < o.objective : index < o.index; }
};

}  // namespace

std::vector<ParentPair> select_parent_pairs(const Population& pop, const Archive& archive, int k,
                                            std::mt19937_64& rng) {
  std::vector<IndividualId> valid;
  for (auto id : pop.members) {
    if (archive.get(id).objective.valid()) valid.push_back(id);
  }
  if (valid.size() < 2) {
    throw SelectionError("need at least two valid members to select parents, have " + std::to_string(valid.size()));
  }
  std::vector<ParentPair> pairs;
  for (int p = 0; p < k; ++p) {
    std::uniform_int_distribution<std::size_t> first(0, valid.size() - 1);
    std::uniform_int_distribution<std::size_t> second(0, valid.size() - 2);
    const auto a = first(rng);
    auto b = second(rng);
    if (b >= a) ++b;
    pairs.emplace_back(valid[a], valid[b]);
  }
  return pairs;
}

std::vector<Individual> ranked_unique(const std::vector<ParentPair>& pairs, const Archive& archive) {
  std::vector<Ranked> order;
  std::unordered_set<std::uint64_t> seen_ids;
  for (const auto& [a, b] : pairs) {
    for (auto id : {a, b}) {
      if (!seen_ids.insert(to_underlying(id)).second) continue;
      const auto ind = archive.get(id);
      order.push_back({ind.objective.valid() ? ind.objective.value() : std::numeric_limits<double>::infinity(),
                       archive.index_of(id), id});
    }
  }
  std::sort(order.begin(), order.end());
  std::vector<Individual> out;
  std::unordered_set<std::string> seen_text;
  for (const auto& r : order) {
    auto ind = archive.get(r.id);
    if (!seen_text.insert(normalize_or_fallback(ind.source).text).second) continue;
    out.push_back(std::move(ind));
  }
  return out;
}

Population survive(const std::vector<IndividualId>& candidates, const Archive& archive, std::size_t capacity) {
  std::vector<Ranked> order;
  std::unordered_set<std::uint64_t> seen;
  for (auto id : candidates) {
    if (!seen.insert(to_underlying(id)).second) continue;
    const auto ind = archive.get(id);
    if (!ind.objective.valid()) continue;
    order.push_back({ind.objective.value(), archive.index_of(id), id});
  }
  std::sort(order.begin(), order.end());
  Population pop;
  pop.capacity = capacity;
  for (std::size_t i = 0; i < order.size() && i < capacity; ++i) pop.members.push_back(order[i].id);
  return pop;
}

std::optional<double> archive_best(const Archive& archive) {
  std::optional<double> best;
  for (const auto& ind : archive.entries()) {
    if (ind.objective.valid() && (!best || ind.objective.value() < *best)) best = ind.objective.value();
  }
  return best;
}

Engine::Engine(RunConfig cfg, std::shared_ptr<LlmGateway> gateway, std::shared_ptr<EvaluatorPool> pool,
               std::shared_ptr<Embedder> embedder)
    : cfg_(std::move(cfg)),
      gateway_(std::move(gateway)),
      pool_(std::move(pool)),
      embedder_(std::move(embedder)),
      rng_(cfg_.seed),
      info_(prompt_info(cfg_.problem.kind)) {}

bool Engine::is_tuned(IndividualId id) const {
  return tuned_.count(to_underlying(id)) > 0 || archive_.get(id).tuned;
}

void Engine::stop(StopReason r, std::string message) {
  if (stop_ != StopReason::none) return;
  stop_ = r;
  stop_message_ = std::move(message);
}

std::optional<ChatReply> Engine::ask(const ChatRequest& req) {
  if (stop_ != StopReason::none) return std::nullopt;
  try {
    return gateway_->chat(req);
  } catch (const BudgetExhaustedError& e) {
    stop(StopReason::budget_exhausted, e.what());
  } catch (const MockScriptExhaustedError& e) {
    stop(StopReason::mock_exhausted, e.what());
  } catch (const TransportError& e) {
    stop(StopReason::transport_error, e.what());
  }
  return std::nullopt;
}

Engine::Pending Engine::pending_from_reply(const ChatReply& reply, Origin origin, std::string role) {
  Pending p;
  p.origin = origin;
  p.role_label = std::move(role);
  p.tokens = static_cast<std::uint64_t>(reply.tokens);
  try {
    p.source = extract_code_block(reply.text);
    p.extracted = true;
  } catch (const ExtractionError& e) {
    p.source = reply.text;
    p.extraction_failure = Failure{"no_fence", e.what()};
  }
  return p;
}

std::vector<IndividualId> Engine::evaluate_and_archive(std::vector<Pending> batch, int generation) {
  std::vector<std::string> sources;
  std::vector<std::size_t> slots;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch[i].extracted) {
      sources.push_back(batch[i].source);
      slots.push_back(i);
    }
  }
  const auto results = pool_->evaluate_all(sources);
  std::vector<EvaluationResult> by_slot(batch.size());
  for (std::size_t k = 0; k < slots.size(); ++k) by_slot[slots[k]] = results[k];

  std::vector<IndividualId> ids;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    auto& p = batch[i];
    Individual ind;
    ind.id = archive_.next_id();
    ind.source = std::move(p.source);
    ind.generation = generation;
    ind.origin = p.origin;
    ind.role_label = std::move(p.role_label);
    ind.token_cost = p.tokens;
    if (p.extracted) {
      ind.objective = by_slot[i].objective;
      if (by_slot[i].failure) failures_.emplace_back(ind.id, *by_slot[i].failure);
    } else {
      failures_.emplace_back(ind.id, p.extraction_failure);
    }
    ids.push_back(archive_.add(std::move(ind)));
  }
  return ids;
}

void Engine::record(int t, std::size_t n_invalid, bool complete) {
  DiversityOptions opts;
  opts.alpha = cfg_.alpha;
  opts.include_invalid = cfg_.include_invalid;
  const auto snap = archive_.snapshot_at(t);
  DiversityReport rep;
  rep.timestep = t;
  try {
    rep = compute_report(snap, t, *embedder_, opts);
  } catch (const EmptyArchiveError&) {
  }
  GenerationRecord r;
  r.timestep = t;
  r.best_objective = archive_best(archive_);
  r.swdi = rep.swdi;
  r.cdi = rep.cdi;
  r.tokens_used = gateway_->budget().used();
  r.n_invalid = n_invalid;
  r.archive_size = archive_.size();
  r.n_clusters = rep.partition.clusters.size();
  r.mst_total_length = rep.mst.total_length;
  r.complete = complete;
  records_.push_back(r);
  diversity_.push_back(std::move(rep));
}

void Engine::initialize() {
  if (initialized_) throw std::logic_error("engine already initialized");
  initialized_ = true;

  Pending seed;
  seed.source = info_.seed_function;
  seed.extracted = true;
  seed.origin = Origin::seed;
  seed.role_label = "seed";
  std::vector<Pending> batch{std::move(seed)};

  for (int i = 0; i + 1 < cfg_.pop_init; ++i) {
    const auto& role = cfg_.roles[static_cast<std::size_t>(i) % cfg_.roles.size()];
    const auto task = prompts::task_description(role, info_);
    ChatRequest req{RoleKind::generator, prompts::generator_system(role), prompts::init_user(task, info_),
                    cfg_.temperature};
    auto reply = ask(req);
    if (!reply) break;
    batch.push_back(pending_from_reply(*reply, Origin::init, role));
  }

  const auto ids = evaluate_and_archive(std::move(batch), 0);
  population_ = survive(ids, archive_, static_cast<std::size_t>(cfg_.pop_init));
  std::size_t n_invalid = 0;
  for (auto id : ids) n_invalid += archive_.get(id).objective.valid() ? 0 : 1;
  record(0, n_invalid, stop_ == StopReason::none);
}

std::string Engine::flash_reflection_phase1(const std::vector<ParentPair>& pairs) {
  std::vector<std::string> sources;
  for (const auto& ind : ranked_unique(pairs, archive_)) sources.push_back(ind.source);
  ChatRequest req{RoleKind::reflector, prompts::reflector_system(), prompts::flash_phase1_user(sources),
                  cfg_.temperature};
  auto reply = ask(req);
  if (!reply) return {};
  reflection_.current_analysis = reply->text;
  return reply->text;
}

std::string Engine::flash_reflection_phase2() {
  ChatRequest req{RoleKind::reflector, prompts::reflector_system(),
                  prompts::flash_phase2_user(reflection_.current_analysis, reflection_.good_reflections,
                                             reflection_.bad_reflections),
                  cfg_.temperature};
  auto reply = ask(req);
  if (!reply) return {};
  reflection_.guide = reply->text;
  return reply->text;
}

void Engine::harmony_step(std::vector<IndividualId>& candidates, int t) {
  std::optional<Individual> target;
  for (auto id : candidates) {
    const auto ind = archive_.get(id);
    if (!ind.objective.valid() || is_tuned(id) || ind.origin == Origin::harmony_tuned) continue;
    if (!target || ind.objective.value() < target->objective.value() ||
        (ind.objective.value() == target->objective.value() &&
         archive_.index_of(id) < archive_.index_of(target->id))) {
      target = ind;
    }
  }
  HarmonyOutcome out;
  out.timestep = t;
  if (!target) {
    out.status = "no_valid_candidate";
    harmony_.push_back(out);
    return;
  }
  out.base = target->id;

  ChatRequest req{RoleKind::generator, prompts::harmony_system(), prompts::harmony_user(target->source),
                  cfg_.temperature};
  auto reply = ask(req);
  if (!reply) return;
  tuned_.insert(to_underlying(target->id));

  ParameterizedHeuristic ph;
  ph.base_id = target->id;
  try {
    auto cr = extract_code_and_ranges(reply->text);
    ph.template_source = std::move(cr.program);
    ph.ranges = std::move(cr.ranges);
    validate_parameterization(ph);
  } catch (const Error& e) {
    out.status = "extraction_failed";
    out.message = e.what();
    harmony_.push_back(out);
    return;
  }
  const auto defaults = pool_->evaluate(ph.template_source);
  if (!defaults.objective.valid()) {
    out.status = "extraction_failed";
    out.message = "template with its default values is INVALID" +
                  (defaults.failure ? ": " + defaults.failure->kind + ": " + defaults.failure->message : "");
    harmony_.push_back(out);
    return;
  }

  HarmonyObjective objective = [&](const std::vector<double>& values) -> std::optional<double> {
    const auto r = pool_->evaluate(specialize(ph, values));
    if (!r.objective.valid()) return std::nullopt;
    return r.objective.value();
  };
  const auto result = hs_optimize(ph.ranges, objective, cfg_.hs, rng_);
  if (!result.best) {
    out.status = "extraction_failed";
    out.message = "no harmony candidate was valid";
    harmony_.push_back(out);
    return;
  }

  Individual ind;
  ind.id = archive_.next_id();
  ind.source = specialize(ph, result.best->values);
  ind.objective = Objective::of(result.best->objective);
  ind.generation = t;
  ind.origin = Origin::harmony_tuned;
  ind.role_label = target->role_label;
  ind.tuned = true;
  ind.token_cost = static_cast<std::uint64_t>(reply->tokens);
  const auto id = archive_.add(std::move(ind));
  tuned_.insert(to_underlying(id));
  candidates.push_back(id);
  out.tuned = id;
  out.status = "tuned";
  harmony_.push_back(out);
}

bool Engine::run_generation() {
  if (!initialized_) throw std::logic_error("initialize() must run before run_generation()");
  if (stop_ != StopReason::none) return false;
  if (cfg_.max_generations > 0 && generation_ >= cfg_.max_generations) {
    stop(StopReason::max_generations, "reached max_generations = " + std::to_string(cfg_.max_generations));
    return false;
  }
  if (gateway_->budget().exhausted()) {
    stop(StopReason::budget_exhausted, "token budget exhausted");
    return false;
  }
  const int t = generation_ + 1;
  const auto best_before = archive_best(archive_);
  const auto size_before = archive_.size();

  std::vector<ParentPair> pairs;
  try {
    pairs = select_parent_pairs(population_, archive_, cfg_.pop_size, rng_);
  } catch (const SelectionError& e) {
    stop(StopReason::no_parents, e.what());
    return false;
  }
  flash_reflection_phase1(pairs);
  if (stop_ != StopReason::none) return false;
  const auto guide = flash_reflection_phase2();
  if (stop_ != StopReason::none) return false;

  const auto& expert = cfg_.roles.front();
  const auto task = prompts::task_description(expert, info_);
  std::vector<Pending> crossover;
  for (const auto& [a, b] : pairs) {
    auto pa = archive_.get(a);
    auto pb = archive_.get(b);
    const bool a_better = pa.objective.value() < pb.objective.value() ||
                          (pa.objective.value() == pb.objective.value() &&
                           archive_.index_of(a) < archive_.index_of(b));
    const auto& better = a_better ? pa : pb;
    const auto& worse = a_better ? pb : pa;
    ChatRequest req{RoleKind::generator, prompts::generator_system(expert),
                    prompts::crossover_user(task, info_, better.source, worse.source, guide), cfg_.temperature};
    auto reply = ask(req);
    if (!reply) break;
    crossover.push_back(pending_from_reply(*reply, Origin::crossover, expert));
  }
  auto offspring = evaluate_and_archive(std::move(crossover), t);

  std::vector<IndividualId> candidates = population_.members;
  candidates.insert(candidates.end(), offspring.begin(), offspring.end());

  if (stop_ == StopReason::none) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng_) < cfg_.mutation_rate) {
      Population pool;
      pool.members = candidates;
      const auto elite = best(pool, archive_);
      ChatRequest req{RoleKind::generator, prompts::generator_system(expert),
                      prompts::mutation_prompt(task, info_, elite.source, guide), cfg_.temperature};
      if (auto reply = ask(req)) {
        std::vector<Pending> one{pending_from_reply(*reply, Origin::mutation, expert)};
        for (auto id : evaluate_and_archive(std::move(one), t)) {
          offspring.push_back(id);
          candidates.push_back(id);
        }
      }
    }
  }

  if (stop_ == StopReason::none) harmony_step(candidates, t);

  std::size_t n_invalid = 0;
  for (auto id : offspring) n_invalid += archive_.get(id).objective.valid() ? 0 : 1;
  population_ = survive(candidates, archive_, static_cast<std::size_t>(cfg_.pop_size));

  const auto best_after = archive_best(archive_);
  const bool improved = best_after && (!best_before || *best_after < *best_before);
  (improved ? reflection_.good_reflections : reflection_.bad_reflections).push_back(guide);

  const bool complete = stop_ == StopReason::none;
  generation_ = t;
  if (archive_.size() > size_before) record(t, n_invalid, complete);
  if (complete) ++generations_completed_;
  return complete;
}

void Engine::run() {
  if (!initialized_) initialize();
  while (run_generation()) {
  }
}

}  // namespace hsevo
