#pragma once

#include <string_view>

namespace ktae {

enum class FisherMode { point, two_sided };
enum class DegeneratePolicy { zeros, error };

std::string_view to_string(FisherMode mode) noexcept;
std::string_view to_string(DegeneratePolicy policy) noexcept;
FisherMode parse_fisher_mode(std::string_view text);
DegeneratePolicy parse_degenerate_policy(std::string_view text);

/// Weights and numeric guards for key-token advantage estimation. Defaults
/// are the published hyperparameters (h1, h2, h3 = 1, 2, 1; k1 = 2, b = 0.5).
struct KtaeConfig {
  double h1 = 1.0;  // Fisher score weight
  double h2 = 2.0;  // information gain weight
  double h3 = 1.0;  // TF ratio weight inside the direction score
  double k1 = 2.0;
  double b = 0.5;
  double std_epsilon = 1e-8;
  double tf_floor = 1e-6;
  FisherMode fisher_mode = FisherMode::point;
  DegeneratePolicy degenerate_policy = DegeneratePolicy::zeros;

  bool operator==(const KtaeConfig&) const = default;
};

/// Throws Error{ConfigError} naming the first violated bound.
void validate(const KtaeConfig& config);

}  // namespace ktae
