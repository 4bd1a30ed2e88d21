#pragma once

// Subcommand dispatch behind the ck executable. Exit status: 0 positive verdict,
// 1 negative verdict (incompatible, residual failure, characteristic, degenerate), 2 input or usage error.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace ck::cli {

enum class Format { json, text };

struct CommandConfig {
  std::string subcommand;  // compat | solve | jet | slope | eds | monge | gauss | levi
  std::string system, cauchy, slope, element, rhs, data, curve, series;
  std::optional<int> order;  // unset: input file order, then CK_DEFAULT_ORDER, then 8
  int samples = 16;
  std::uint64_t seed = 0;
  std::optional<int> j_max;
  bool then_levi = false;
  std::string output;  // empty: standard output
  Format format = Format::text;
};

/// The order used when neither --order nor the input file gives one.
int default_order();

/// Runs one subcommand, writing the report to `out` (or config.output) and diagnostics to `err`.
int run(const CommandConfig& config, std::ostream& out, std::ostream& err);

}  // namespace ck::cli
