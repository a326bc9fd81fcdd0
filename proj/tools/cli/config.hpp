#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "elastobayes/experiment.hpp"
#include "elastobayes/saem.hpp"

namespace elastobayes::cli {

struct RunConfig {
  ExperimentConfig experiment;
  EmConfig em;
  std::string loading = "reaction";
  std::filesystem::path dataset;
  std::filesystem::path output = "out";
  unsigned long long seed = 1;
  int replicates = 1;
  double q_lo = 0.05;
  double q_hi = 0.95;

  // Throws InvalidArgument on unknown keys or malformed values.
  void set(const std::string& key, const std::string& value);
  void validate() const;
  // Resolved key = value lines, in a fixed order.
  std::string to_text() const;

  static const std::vector<std::string>& keys();
};

// Parses "key = value" lines; '#' starts a comment.
std::map<std::string, std::string> parse_key_values(const std::string& text);

RunConfig load_config(const std::filesystem::path& file,
                      const std::map<std::string, std::string>& overrides);

}  // namespace elastobayes::cli
