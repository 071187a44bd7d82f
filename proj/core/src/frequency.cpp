#include "ktae/frequency.hpp"

#include <algorithm>
#include <cmath>

namespace ktae::frequency {

GroupLengths group_lengths(const ValidatedGroup& group) {
  double total_true = 0.0;
  double total_false = 0.0;
  for (std::size_t i = 0; i < group.size(); ++i) {
    const auto len = static_cast<double>(group.rollout(i).tokens.size());
    (group.is_correct(i) ? total_true : total_false) += len;
  }
  GroupLengths out;
  out.len_avg = (total_true + total_false) / static_cast<double>(group.size());
  out.len_true = group.num_correct() > 0
                     ? total_true / static_cast<double>(group.num_correct())
                     : out.len_avg;
  out.len_false = group.num_incorrect() > 0
                      ? total_false / static_cast<double>(group.num_incorrect())
                      : out.len_avg;
  return out;
}

TermCounts raw_term_frequencies(const ValidatedGroup& group, TokenId token) {
  TermCounts counts;
  for (std::size_t i = 0; i < group.size(); ++i) {
    const auto& tokens = group.rollout(i).tokens;
    const auto n = std::count(tokens.begin(), tokens.end(), token);
    (group.is_correct(i) ? counts.tf_true : counts.tf_false) += n;
  }
  return counts;
}

double tf_score(double tf, double len_side, double len_avg, double k1, double b) {
  if (!(len_avg > 0.0)) throw Error(Errc::DomainError, "tf_score requires len_avg > 0");
  if (!(k1 > 0.0)) throw Error(Errc::DomainError, "tf_score requires k1 > 0");
  if (!(b >= 0.0 && b <= 1.0)) throw Error(Errc::DomainError, "tf_score requires b in [0, 1]");
  if (!(tf >= 0.0)) throw Error(Errc::DomainError, "tf_score requires tf >= 0");
  if (std::isinf(tf)) return k1 + 1.0;
  const double norm = k1 * (1.0 - b + b * len_side / len_avg);
  return (k1 + 1.0) * tf / (norm + tf);
}

double cohens_h(const ContingencyTable& t) {
  const double h_true =
      t.correct() > 0
          ? std::asin(std::sqrt(static_cast<double>(t.a) / static_cast<double>(t.correct())))
          : 0.0;
  const double h_false =
      t.incorrect() > 0
          ? std::asin(std::sqrt(static_cast<double>(t.b) / static_cast<double>(t.incorrect())))
          : 0.0;
  return h_true - h_false;
}

double direction_score(const ContingencyTable& table, double tf_score_true, double tf_score_false,
                       double h3, double tf_floor, DegeneratePolicy policy) {
  if (policy == DegeneratePolicy::error && (table.correct() == 0 || table.incorrect() == 0)) {
    throw Error(Errc::DegenerateGroup, "direction score needs both correct and incorrect rollouts");
  }
  const double t = std::max(tf_score_true, tf_floor);
  const double f = std::max(tf_score_false, tf_floor);
  return cohens_h(table) + h3 * (t / f - f / t);
}

}  // namespace ktae::frequency
