#pragma once

#include <string>
#include <vector>

#include "dam/cli/config.hpp"

namespace dam::cli {

enum class CheckStatus { pass, fail, skipped };

struct IdentityCheck {
  std::string group;
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double tolerance = 0.0;
  bool relative = true;
  CheckStatus status = CheckStatus::pass;
  std::string note;
};

struct ValidationOptions {
  bool sign_flip = false;  // negative control: free resolvent with the wrong erfc sign
};

struct ValidationReport {
  std::vector<IdentityCheck> checks;

  bool passed() const;
  std::size_t count(CheckStatus s) const;
  std::string table() const;
};

/// Runs the transform / occupation / passage identities at the configured
/// process, policy and costs.
ValidationReport run_identities(const RunConfig& cfg, const ValidationOptions& opt = {});

}  // namespace dam::cli
