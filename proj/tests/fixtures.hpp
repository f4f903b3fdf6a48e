#pragma once

#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "skis/errors.hpp"
#include "skis/graph.hpp"

namespace skis::testing {

struct FixtureSpec {
  std::string name;
  Model model;
};

inline const std::vector<FixtureSpec>& fixture_specs() {
  static const std::vector<FixtureSpec> specs = {
      {"pair_ic", Model::IC},    {"path3_ic", Model::IC},  {"star_ic", Model::IC},
      {"cycle2_ic", Model::IC},  {"diamond_ic", Model::IC}, {"varcore_ic", Model::IC},
      {"k4_ic", Model::IC},      {"tri_ic", Model::IC},    {"path3_lt", Model::LT},
      {"fork_lt", Model::LT},    {"cycle2_lt", Model::LT},
  };
  return specs;
}

inline std::string fixtures_dir() {
  if (const char* env = std::getenv("SKIS_FIXTURES_DIR")) return env;
#ifdef SKIS_FIXTURES_DIR
  return SKIS_FIXTURES_DIR;
#else
  return "tests/fixtures";
#endif
}

inline std::string fixture_path(const std::string& name) {
  return fixtures_dir() + "/" + name + ".txt";
}

inline ProbabilisticGraph load_fixture(const FixtureSpec& spec) {
  std::ifstream in(fixture_path(spec.name));
  if (!in) throw io_error("cannot open fixture " + fixture_path(spec.name));
  return load_edge_list(in, spec.model, WeightMode::Given, 0);
}

inline ProbabilisticGraph load_fixture(const std::string& name) {
  for (const auto& spec : fixture_specs()) {
    if (spec.name == name) return load_fixture(spec);
  }
  throw validation_error("unknown fixture " + name);
}

}  // namespace skis::testing
