#pragma once

// Template content for the synthetic fixture world.

#include <string>
#include <utility>
#include <vector>

#include "pgr/memory/types.hpp"

namespace pgr::synth {

struct RefSpec {
  std::string text;
  FactType type;
  // Prospection step that bridges to this reference.
  std::string action;
  std::string constraints;
  // 1: found by the initial structure, 2: added by the first refinement.
  int phase;
  // Shares wording with the query.
  bool near;
};

struct Var {
  std::string name;
  std::vector<std::string> options;
};

struct Scenario {
  std::string query;
  std::string goal;
  std::vector<Var> vars;
  std::vector<RefSpec> refs;
};

struct DistractorTemplate {
  std::string text;
  FactType type;
  std::vector<Var> vars;
};

const std::vector<Scenario>& scenarios();
const std::vector<DistractorTemplate>& distractors();

struct PersonaPools {
  std::vector<std::string> first_names;
  std::vector<std::string> occupations;
  std::vector<std::string> hometowns;
  std::vector<std::string> hobbies;
};
const PersonaPools& persona_pools();

}  // namespace pgr::synth
