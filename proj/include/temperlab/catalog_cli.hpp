#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "temperlab/beta_solver.hpp"
#include "temperlab/matgroup.hpp"

namespace temperlab::catalog_cli {

inline constexpr const char* kVersion = "temperlab 0.1.0";

struct CatalogEntry {
  std::string name;
  int n = 2;
  matgroup::SubgroupSpec h_spec;
  std::optional<beta_solver::PairSpec> pair;  // absent for discrete entries
  RatMat embedding;                           // ambient_n x dim, with pair
  std::optional<Rat> expected_beta;
  std::string provenance;
  bool reductive = false;
  bool discrete = false;
  std::vector<int> delta_depth_schedule;  // discrete entries

  ojson to_json() const;
};

const std::vector<CatalogEntry>& catalog_entries();
const CatalogEntry& find_entry(const std::string& name);

// Exit codes: 0 success, 1 error, 2 indeterminate verdict, 64 usage.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace temperlab::catalog_cli
