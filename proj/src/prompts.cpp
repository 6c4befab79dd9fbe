#include "hsevo/prompts.hpp"

#include "hsevo/errors.hpp"
#include "hsevo/text_util.hpp"

namespace hsevo {

std::string to_string(ProblemKind p) {
  switch (p) {
    case ProblemKind::bpo: return "bpo";
    case ProblemKind::tsp_gls: return "tsp_gls";
    case ProblemKind::op_aco: return "op_aco";
  }
  return "?";
}

ProblemKind problem_from_string(std::string_view s) {
  if (s == "bpo") return ProblemKind::bpo;
  if (s == "tsp_gls" || s == "tsp") return ProblemKind::tsp_gls;
  if (s == "op_aco" || s == "op") return ProblemKind::op_aco;
  throw ConfigError("unknown problem '" + std::string(s) + "' (expected bpo, tsp_gls or op_aco)");
}

namespace {

const ProblemPromptInfo kBpo{
    "priority",
    "Solving online Bin Packing Problem (BPP). BPP requires packing a set of items of various sizes into the "
    "smallest number of fixed-sized bins. Online BPP requires packing an item as soon as it is received.",
    "The priority function takes as input an item and an array of bins_remain_cap (containing the remaining "
    "capacity of each bin) and returns a priority score for each bin. The bin with the highest priority score "
    "will be selected for the item.",
    "def priority_v{version}(item: float, bins_remain_cap: np.ndarray) -> np.ndarray:",
    R"(import numpy as np

def priority_v1(item: float, bins_remain_cap: np.ndarray) -> np.ndarray:
    """Returns priority with which we want to add item to each bin.

    Args:
        item: Size of item to be added to the bin.
        bins_remain_cap: Array of capacities for each bin.

    Return:
        Array of same size as bins_remain_cap with priority score of each bin.
    """
    ratios = item / bins_remain_cap
    log_ratios = np.log(ratios)
    priorities = -log_ratios
    return priorities
)"};

const ProblemPromptInfo kTsp{
    "update_edge_distance",
    "Solving Traveling Salesman Problem (TSP) via guided local search. TSP requires finding the shortest path "
    "that visits all given nodes and returns to the starting node.",
    "The 'update_edge_distance' function takes as input a matrix of edge distances, a locally optimized tour, "
    "and a matrix indicating the number of times each edge has been used. It returns an updated matrix of edge "
    "distances that incorporates the effects of the local optimization and edge usage. The returned matrix has "
    "the same shape as the input 'edge_distance' matrix, with the distances adjusted based on the provided "
    "tour and usage data.",
    "def update_edge_distance_v{version}(edge_distance: np.ndarray, local_opt_tour: np.ndarray, "
    "edge_n_used: np.ndarray) -> np.ndarray:",
    R"(import numpy as np

def update_edge_distance(edge_distance: np.ndarray, local_opt_tour: np.ndarray, edge_n_used: np.ndarray) -> np.ndarray:
    """
    Args:
        edge_distance (np.ndarray): Original edge distance matrix.
        local_opt_tour (np.ndarray): Local optimal solution path.
        edge_n_used (np.ndarray): Matrix representing the number of times each edge is used.
    Return:
        updated_edge_distance: updated score of each edge distance matrix.
    """

    num_nodes = edge_distance.shape[0]
    updated_edge_distance = np.copy(edge_distance)

    for i in range(num_nodes - 1):
        current_node = local_opt_tour[i]
        next_node = local_opt_tour[i + 1]
        updated_edge_distance[current_node, next_node] *= (1 + edge_n_used[current_node, next_node])

    updated_edge_distance[local_opt_tour[-1], local_opt_tour[0]] *= (1 + edge_n_used[local_opt_tour[-1], local_opt_tour[0]])
    return updated_edge_distance
)"};

const ProblemPromptInfo kOp{
    "heuristics",
    "Solving a black-box graph combinatorial optimization problem via stochastic solution sampling following "
    "\"heuristics\".",
    "The 'heuristics' function takes as input a vector of node attributes (shape: n), a matrix of edge "
    "attributes (shape: n by n), and a constraint imposed on the sum of edge attributes. A special node is "
    "indexed by 0. 'heuristics' returns prior indicators of how promising it is to include each edge in a "
    "solution. The return is of the same shape as the input matrix of edge attributes.",
    "def heuristics_v{version}(node_attr: np.ndarray, edge_attr: np.ndarray, node_constraint: float)->np.ndarray:",
    R"(import numpy as np

def heuristics_v1(node_attr: np.ndarray, edge_attr: np.ndarray, edge_constraint: float)->np.ndarray:
    return np.ones_like(edge_attr)
)"};

constexpr std::string_view kGeneratorSystem =
    "{role_init} helping to design heuristics that can effectively solve optimization problems.\n"
    "Your response outputs Python code and nothing else. Format your code as a Python code string: "
    "\"```python ... ```\".";

constexpr std::string_view kTaskDescription =
    "{role_init} Your task is to write a {function_name} function for {problem_description}\n"
    "{function_description}";

constexpr std::string_view kInitUser =
    "{task_description}\n\n"
    "{seed_function}\n\n"
    "Refer to the format of a trivial design above. Be very creative and give `{function_name}_v2`. Output code "
    "only and enclose your code with Python code block: ```python ... ```.";

constexpr std::string_view kReflectorSystem =
    "You are an expert in the domain of optimization heuristics. Your task is to provide useful advice based on "
    "analysis to design better heuristics.";

constexpr std::string_view kPhase1User =
    "### List heuristics\n"
    "Below is a list of design heuristics ranked from best to worst.\n"
    "{list_ranked_heuristics}\n\n"
    "### Guide\n"
    "- Keep in mind, list of design heuristics ranked from best to worst. Meaning the first function in the list "
    "is the best and the last function in the list is the worst.\n"
    "- The response in Markdown style and nothing else has the following structure:\n"
    "\"**Analysis:**\n"
    "**Experience:**\"\n"
    "In there:\n"
    "+ Meticulously analyze comments, docstrings and source code of several pairs (Better code - Worse code) in "
    "List heuristics to fill values for **Analysis:**.\n"
    "Example: \"Comparing (best) vs (worst), we see ...;  (second best) vs (second worst) ...; Comparing (1st) vs "
    "(2nd), we see ...; (3rd) vs (4th) ...; Comparing (worst) vs (second worst), we see ...; Overall:...\"\n\n"
    "+ Self-reflect to extract useful experience for design better heuristics and fill to **Experience:** "
    "(<60 words).\n\n"
    "I'm going to tip $999K for a better heuristics! Let's think step by step.";

constexpr std::string_view kPhase2User =
    "Your task is to redefine 'Current self-reflection' paying attention to avoid all things in 'Ineffective "
    "self-reflection' in order to come up with ideas to design better heuristics.\n\n"
    "### Current self-reflection\n"
    "{current_reflection}\n"
    "{good_reflection}\n\n"
    "### Ineffective self-reflection\n"
    "{bad_reflection}\n\n"
    "Response (<100 words) should have 4 bullet points: Keywords, Advice, Avoid, Explanation.\n"
    "I'm going to tip $999K for a better heuristics! Let's think step by step.";

constexpr std::string_view kCrossoverUser =
    "{task_description}\n\n"
    "### Better code\n"
    "{function_signature_better}\n"
    "{code_better}\n\n"
    "### Worse code\n"
    "{function_signature_worse}\n"
    "{code_worse}\n\n"
    "### Analyze & experience\n"
    "- {flash_reflection}\n\n"
    "Your task is to write an improved function `{func_name}_v2` by COMBINING elements of two above heuristics "
    "base Analyze & experience.\n"
    "Output the code within a Python code block: ```python ... ```, has comment and docstring (<50 words) to "
    "description key idea of heuristics design.\n\n"
    "I'm going to tip $999K for a better heuristics! Let's think step by step.";

constexpr std::string_view kMutation =
    "{task_description}\n\n"
    "Current heuristics:\n"
    "{function_signature_elitist}\n"
    "{elitist_code}\n\n"
    "Now, think outside the box write a mutated function `{func_name}_v2` better than current version.\n"
    "You can using some hints if need:\n"
    "{flash_reflection}\n\n"
    "Output code only and enclose your code with Python code block: ```python ... ```.\n\n"
    "I'm going to tip $999K for a better solution!";

constexpr std::string_view kHarmonySystem =
    "You are an expert in code review. Your task extract all threshold, weight or hardcode variable of the "
    "function make it become default parameters.";

constexpr std::string_view kHarmonyUser =
    "{elitist_code}\n\n"
    "Now extract all threshold, weight or hardcode variable of the function make it become default parameters "
    "and give me a 'parameter_ranges' dictionary representation. Key of dict is name of variable. Value of key "
    "is a tuple in Python MUST include 2 float elements, first element is begin value, second element is end "
    "value corresponding with parameter.\n"
    "- Output code only and enclose your code with Python code block: ```python ... ```.\n"
    "- Output 'parameter_ranges' dictionary only and enclose your code with other Python code block: "
    "```python ... ```.";

std::string signature(const ProblemPromptInfo& info, int version) {
  return render_template(info.signature_template, {{"version", std::to_string(version)}});
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

const ProblemPromptInfo& prompt_info(ProblemKind p) {
  switch (p) {
    case ProblemKind::bpo: return kBpo;
    case ProblemKind::tsp_gls: return kTsp;
    case ProblemKind::op_aco: return kOp;
  }
  throw ConfigError("unknown problem kind");
}

const std::vector<std::string>& default_personas() {
  static const std::vector<std::string> personas = {
      "You are an expert in the domain of optimization heuristics,",
      "You are Albert Einstein, relativity theory developer,",
      "You are Isaac Newton, the father of physics,",
      "You are Marie Curie, pioneer in radioactivity,",
      "You are Nikola Tesla, master of electricity,",
      "You are Galileo Galilei, champion of heliocentrism,",
      "You are Stephen Hawking, black hole theorist,",
      "You are Richard Feynman, quantum mechanics genius,",
      "You are Rosalind Franklin, DNA structure revealer,",
      "You are Ada Lovelace, computer programming pioneer.",
  };
  return personas;
}

namespace prompts {

std::string ordinal(std::size_t n) {
  const auto mod100 = n % 100;
  const char* suffix = "th";
  if (mod100 < 11 || mod100 > 13) {
    switch (n % 10) {
      case 1: suffix = "st"; break;
      case 2: suffix = "nd"; break;
      case 3: suffix = "rd"; break;
      default: break;
    }
  }
  return std::to_string(n) + suffix;
}

std::string generator_system(std::string_view role_init) {
  return render_template(kGeneratorSystem, {{"role_init", std::string(role_init)}});
}

std::string task_description(std::string_view role_init, const ProblemPromptInfo& info) {
  return render_template(kTaskDescription, {{"role_init", std::string(role_init)},
                                            {"function_name", info.function_name},
                                            {"problem_description", info.problem_description},
                                            {"function_description", info.function_description}});
}

std::string init_user(std::string_view task_description, const ProblemPromptInfo& info) {
  return render_template(kInitUser, {{"task_description", std::string(task_description)},
                                     {"seed_function", info.seed_function},
                                     {"function_name", info.function_name}});
}

std::string reflector_system() { return std::string(kReflectorSystem); }

std::string flash_phase1_user(const std::vector<std::string>& ranked_sources) {
  std::vector<std::string> items;
  for (std::size_t i = 0; i < ranked_sources.size(); ++i) {
    items.push_back("[Heuristics " + ordinal(i + 1) + "]\n" + ranked_sources[i]);
  }
  return render_template(kPhase1User, {{"list_ranked_heuristics", join(items, "\n")}});
}

std::string flash_phase2_user(std::string_view current_reflection, const std::vector<std::string>& good,
                              const std::vector<std::string>& bad) {
  return render_template(kPhase2User, {{"current_reflection", std::string(current_reflection)},
                                       {"good_reflection", join(good, "\n\n")},
                                       {"bad_reflection", join(bad, "\n\n")}});
}

std::string crossover_user(std::string_view task_description, const ProblemPromptInfo& info,
                           std::string_view better_code, std::string_view worse_code, std::string_view guide) {
  return render_template(kCrossoverUser, {{"task_description", std::string(task_description)},
                                          {"function_signature_better", signature(info, 0)},
                                          {"code_better", std::string(better_code)},
                                          {"function_signature_worse", signature(info, 1)},
                                          {"code_worse", std::string(worse_code)},
                                          {"flash_reflection", std::string(guide)},
                                          {"func_name", info.function_name}});
}

std::string mutation_prompt(std::string_view task_description, const ProblemPromptInfo& info,
                            std::string_view elite_code, std::string_view analysis) {
  return render_template(kMutation, {{"task_description", std::string(task_description)},
                                     {"function_signature_elitist", signature(info, 1)},
                                     {"elitist_code", std::string(elite_code)},
                                     {"flash_reflection", std::string(analysis)},
                                     {"func_name", info.function_name}});
}

std::string harmony_system() { return std::string(kHarmonySystem); }

std::string harmony_user(std::string_view elite_code) {
  return render_template(kHarmonyUser, {{"elitist_code", std::string(elite_code)}});
}

}  // namespace prompts
}  // namespace hsevo
