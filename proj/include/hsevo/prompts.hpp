#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hsevo {

enum class ProblemKind { bpo, tsp_gls, op_aco };
std::string to_string(ProblemKind p);
ProblemKind problem_from_string(std::string_view s);

struct ProblemPromptInfo {
  std::string function_name;         // e.g. "priority"
  std::string problem_description;
  std::string function_description;
  std::string signature_template;    // contains {version}
  std::string seed_function;         // complete program text
};

const ProblemPromptInfo& prompt_info(ProblemKind p);

// The ten role-play personas, used round-robin during initialization.
const std::vector<std::string>& default_personas();

namespace prompts {

std::string generator_system(std::string_view role_init);
std::string task_description(std::string_view role_init, const ProblemPromptInfo& info);
std::string init_user(std::string_view task_description, const ProblemPromptInfo& info);
std::string reflector_system();

std::string flash_phase1_user(const std::vector<std::string>& ranked_sources);
std::string flash_phase2_user(std::string_view current_reflection, const std::vector<std::string>& good,
                              const std::vector<std::string>& bad);

std::string crossover_user(std::string_view task_description, const ProblemPromptInfo& info,
                           std::string_view better_code, std::string_view worse_code, std::string_view guide);
std::string mutation_prompt(std::string_view task_description, const ProblemPromptInfo& info,
                            std::string_view elite_code, std::string_view analysis);

std::string harmony_system();
std::string harmony_user(std::string_view elite_code);

// "1st", "2nd", "3rd", "4th", ...
std::string ordinal(std::size_t n);

}  // namespace prompts
}  // namespace hsevo
