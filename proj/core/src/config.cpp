#include "ktae/config.hpp"

#include <cmath>
#include <string>

#include "ktae/error.hpp"

namespace ktae {

std::string_view to_string(FisherMode mode) noexcept {
  return mode == FisherMode::point ? "point" : "two_sided";
}

std::string_view to_string(DegeneratePolicy policy) noexcept {
  return policy == DegeneratePolicy::zeros ? "zeros" : "error";
}

FisherMode parse_fisher_mode(std::string_view text) {
  if (text == "point") return FisherMode::point;
  if (text == "two_sided") return FisherMode::two_sided;
  throw Error(Errc::ConfigError, "fisher_mode must be 'point' or 'two_sided', got '" +
                                     std::string(text) + "'");
}

DegeneratePolicy parse_degenerate_policy(std::string_view text) {
  if (text == "zeros") return DegeneratePolicy::zeros;
  if (text == "error") return DegeneratePolicy::error;
  throw Error(Errc::ConfigError, "degenerate_policy must be 'zeros' or 'error', got '" +
                                     std::string(text) + "'");
}

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(Errc::ConfigError, what);
}

}  // namespace

void validate(const KtaeConfig& c) {
  require(std::isfinite(c.h1) && c.h1 >= 0.0, "h1 must be finite and >= 0");
  require(std::isfinite(c.h2) && c.h2 >= 0.0, "h2 must be finite and >= 0");
  require(std::isfinite(c.h3), "h3 must be finite");
  require(std::isfinite(c.k1) && c.k1 > 0.0, "k1 must be > 0");
  require(c.b >= 0.0 && c.b <= 1.0, "b must lie in [0, 1]");
  require(std::isfinite(c.std_epsilon) && c.std_epsilon > 0.0, "std_epsilon must be > 0");
  require(std::isfinite(c.tf_floor) && c.tf_floor > 0.0, "tf_floor must be > 0");
}

}  // namespace ktae
