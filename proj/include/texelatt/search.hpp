#pragma once

// Relevance-feedback search over descriptor attributes: sessions that
// accumulate more/equally/less constraints, candidate ranking, session
// metrics and a truthful simulated user.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "texelatt/descriptor.hpp"
#include "texelatt/rank_eval.hpp"

namespace texelatt {

inline constexpr std::size_t kPageSize = 8;
inline constexpr int kMaxIterations = 10;
inline constexpr std::size_t kSearchPageRank = 40;

enum class Relation { more, equally, less };

inline std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::more: return "more";
    case Relation::equally: return "equally";
    case Relation::less: return "less";
  }
  return "?";
}

inline Relation relation_from_string(std::string_view s) {
  if (s == "more") return Relation::more;
  if (s == "equally") return Relation::equally;
  if (s == "less") return Relation::less;
  throw std::invalid_argument("unknown relation: " + std::string(s));
}

/// "The target has more/equally/less of `attribute` than image ref_id."
struct FeedbackConstraint {
  std::string ref_id;
  std::string attribute;
  Relation relation = Relation::equally;

  bool operator==(const FeedbackConstraint&) const = default;
};

class UnknownAttribute : public std::invalid_argument {
 public:
  explicit UnknownAttribute(const std::string& name) : std::invalid_argument("unknown attribute: " + name) {}
};

class SessionExhausted : public std::logic_error {
 public:
  SessionExhausted() : std::logic_error("session exhausted: all iterations used") {}
};

/// Immutable search corpus: descriptors by id (sorted by id) and the
/// per-attribute "equally" band.
class SearchCorpus {
 public:
  SearchCorpus(const std::map<std::string, Descriptor>& descriptors, double gamma_fraction = 0.05) {
    for (const auto& [id, d] : descriptors) {
      index_.emplace(id, ids_.size());
      ids_.push_back(id);
      values_.push_back(d);
    }
    for (std::size_t a = 0; a < kDescriptorSize; ++a) {
      std::vector<double> col;
      col.reserve(values_.size());
      for (const auto& d : values_) col.push_back(d[a]);
      epsilon_[a] = gamma_from_range(col, gamma_fraction);
    }
  }

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& id(std::size_t i) const { return ids_[i]; }
  const Descriptor& descriptor(std::size_t i) const { return values_[i]; }
  double epsilon(std::size_t attribute) const { return epsilon_[attribute]; }
  bool contains(const std::string& id) const { return index_.count(id) > 0; }

  std::size_t index_of(const std::string& id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) throw std::out_of_range("unknown image id: " + id);
    return it->second;
  }

 private:
  std::vector<std::string> ids_;
  std::vector<Descriptor> values_;
  std::unordered_map<std::string, std::size_t> index_;
  std::array<double, kDescriptorSize> epsilon_{};
};

inline std::size_t attribute_index(const std::string& name) {
  try {
    return descriptor_index(name);
  } catch (const std::out_of_range&) {
    throw UnknownAttribute(name);
  }
}

struct Relevance {
  int satisfied = 0;
  double slack = 0.0;
};

/// Satisfaction of one constraint by a candidate value and its signed margin.
inline Relevance constraint_relevance(Relation relation, double candidate, double reference, double epsilon) {
  double margin = 0.0;
  switch (relation) {
    case Relation::more: margin = candidate - reference; break;
    case Relation::less: margin = reference - candidate; break;
    case Relation::equally: margin = epsilon - std::fabs(candidate - reference); break;
  }
  const bool ok = relation == Relation::equally ? margin >= 0.0 : margin > 0.0;
  return {ok ? 1 : 0, margin};
}

/// Order among candidates with equal satisfied counts.
enum class TieBreak {
  slack_then_id,  // larger summed margin first, then smaller id
  id              // smaller id first
};

struct SessionOptions {
  std::size_t page_size = kPageSize;
  int max_iterations = kMaxIterations;
  TieBreak tie_break = TieBreak::id;
};

/// One completed feedback round.
struct SearchIteration {
  std::vector<FeedbackConstraint> feedback;
  std::vector<std::string> reference_ids;  // shown after this round
  std::size_t target_rank = 0;             // 1-based
  double percentile_rank = 0.0;
};

class SearchSession {
 public:
  SearchSession(std::shared_ptr<const SearchCorpus> corpus, const std::string& target_id, SessionOptions options = {})
      : corpus_(std::move(corpus)),
        page_size_(options.page_size),
        max_iterations_(options.max_iterations),
        tie_break_(options.tie_break) {
    if (!corpus_) throw std::invalid_argument("init_session: no corpus");
    if (corpus_->size() < page_size_ + 1)
      throw std::invalid_argument("init_session: corpus too small, need at least " + std::to_string(page_size_ + 1) +
                                  " images");
    target_ = corpus_->index_of(target_id);
    score_.assign(corpus_->size(), {});
    rerank();
    reference_ = initial_references();
  }

  const SearchCorpus& corpus() const { return *corpus_; }
  const std::string& target_id() const { return corpus_->id(target_); }
  int iteration() const { return int(history_.size()); }
  int max_iterations() const { return max_iterations_; }
  std::size_t page_size() const { return page_size_; }
  SessionOptions options() const { return {page_size_, max_iterations_, tie_break_}; }
  bool exhausted() const { return iteration() >= max_iterations_; }
  const std::vector<FeedbackConstraint>& constraints() const { return constraints_; }
  const std::vector<SearchIteration>& history() const { return history_; }

  std::vector<std::string> reference_ids() const {
    std::vector<std::string> out;
    for (std::size_t i : reference_) out.push_back(corpus_->id(i));
    return out;
  }

  /// Ids from best to worst under the current constraints.
  std::vector<std::string> ranking() const {
    std::vector<std::string> out;
    for (std::size_t i : order_) out.push_back(corpus_->id(i));
    return out;
  }

  /// 1-based rank of an image in the current ranking.
  std::size_t rank_of(const std::string& id) const { return position_[corpus_->index_of(id)] + 1; }
  std::size_t target_rank() const { return position_[target_] + 1; }

  /// Fraction of the other images ranked strictly below the target.
  double percentile_rank() const {
    return double(corpus_->size() - target_rank()) / double(corpus_->size() - 1);
  }

  /// Target among the images shown.
  bool found() const { return target_rank() <= page_size_; }

  Relevance relevance(const std::string& candidate_id) const { return score_[corpus_->index_of(candidate_id)]; }

  /// Scores a candidate against an arbitrary constraint list.
  Relevance relevance_score(const std::string& candidate_id, const std::vector<FeedbackConstraint>& constraints) const {
    const Descriptor& c = corpus_->descriptor(corpus_->index_of(candidate_id));
    Relevance r;
    for (const auto& k : constraints) {
      const std::size_t a = attribute_index(k.attribute);
      const Relevance one =
          constraint_relevance(k.relation, c[a], corpus_->descriptor(corpus_->index_of(k.ref_id))[a], corpus_->epsilon(a));
      r.satisfied += one.satisfied;
      r.slack += one.slack;
    }
    return r;
  }

  /// Appends the feedback, re-ranks the corpus and shows the new top page.
  void apply_feedback(const std::vector<FeedbackConstraint>& feedback) {
    if (exhausted()) throw SessionExhausted();
    struct Resolved {
      std::size_t ref, attribute;
      Relation relation;
    };
    std::vector<Resolved> resolved;
    for (const auto& k : feedback) {
      const std::size_t a = attribute_index(k.attribute);
      if (!corpus_->contains(k.ref_id)) throw std::invalid_argument("feedback: unknown reference image " + k.ref_id);
      const std::size_t ref = corpus_->index_of(k.ref_id);
      if (std::find(reference_.begin(), reference_.end(), ref) == reference_.end())
        throw std::invalid_argument("feedback: image " + k.ref_id + " is not in the current reference set");
      resolved.push_back({ref, a, k.relation});
    }
    for (std::size_t i = 0; i < corpus_->size(); ++i) {
      const Descriptor& c = corpus_->descriptor(i);
      for (const auto& k : resolved) {
        const Relevance one = constraint_relevance(k.relation, c[k.attribute], corpus_->descriptor(k.ref)[k.attribute],
                                                   corpus_->epsilon(k.attribute));
        score_[i].satisfied += one.satisfied;
        score_[i].slack += one.slack;
      }
    }
    constraints_.insert(constraints_.end(), feedback.begin(), feedback.end());
    rerank();
    reference_.assign(order_.begin(), order_.begin() + std::ptrdiff_t(page_size_));
    history_.push_back({feedback, reference_ids(), target_rank(), percentile_rank()});
  }

 private:
  // Total order: satisfied desc, then the tie-break policy.
  void rerank() {
    order_.resize(corpus_->size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      if (score_[a].satisfied != score_[b].satisfied) return score_[a].satisfied > score_[b].satisfied;
      if (tie_break_ == TieBreak::slack_then_id && score_[a].slack != score_[b].slack)
        return score_[a].slack > score_[b].slack;
      return a < b;  // ids are stored sorted
    });
    position_.resize(order_.size());
    for (std::size_t r = 0; r < order_.size(); ++r) position_[order_[r]] = r;
  }

  static double squared_distance(const Descriptor& a, const Descriptor& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < kDescriptorSize; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return s;
  }

  // Farthest-point greedy over the non-target images, seeded by the image
  // nearest the corpus centroid; ties go to the smaller id.
  std::vector<std::size_t> initial_references() const {
    const std::size_t n = corpus_->size();
    Descriptor centroid;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < kDescriptorSize; ++k) centroid[k] += corpus_->descriptor(i)[k] / double(n);
    std::vector<std::size_t> picks;
    std::vector<double> gap(n, std::numeric_limits<double>::infinity());
    std::size_t seed = n;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (i == target_) continue;
      const double d = squared_distance(corpus_->descriptor(i), centroid);
      if (d < best) best = d, seed = i;
    }
    std::size_t next = seed;
    while (picks.size() < page_size_) {
      picks.push_back(next);
      gap[next] = -1.0;
      double far = -1.0;
      std::size_t arg = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == target_ || gap[i] < 0.0) continue;
        gap[i] = std::min(gap[i], squared_distance(corpus_->descriptor(i), corpus_->descriptor(next)));
        if (gap[i] > far) far = gap[i], arg = i;
      }
      next = arg;
    }
    return picks;
  }

  std::shared_ptr<const SearchCorpus> corpus_;
  std::size_t page_size_;
  int max_iterations_;
  TieBreak tie_break_;
  std::size_t target_ = 0;
  std::vector<FeedbackConstraint> constraints_;
  std::vector<Relevance> score_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> position_;
  std::vector<std::size_t> reference_;
  std::vector<SearchIteration> history_;
};

inline SearchSession init_session(std::shared_ptr<const SearchCorpus> corpus, const std::string& target_id,
                                  SessionOptions options = {}) {
  return SearchSession(std::move(corpus), target_id, options);
}

/// Fraction of sessions whose target reached rank <= page_rank after some
/// feedback round.
inline double search_accuracy(const std::vector<SearchSession>& sessions, std::size_t page_rank = kSearchPageRank) {
  if (sessions.empty()) return 0.0;
  std::size_t found = 0;
  for (const auto& s : sessions) {
    bool hit = false;
    for (const auto& it : s.history()) hit = hit || it.target_rank <= page_rank;
    found += hit;
  }
  return double(found) / double(sessions.size());
}

/// Simulated user answering from a table of attribute values (typically
/// ground truth, in its own units).
class OracleUser {
 public:
  OracleUser(const std::map<std::string, Descriptor>& truth, double gamma_fraction = 0.05) : truth_(truth) {
    if (truth_.size() < 2) throw std::invalid_argument("oracle: attribute table needs at least 2 images");
    const double n = double(truth_.size());
    for (std::size_t a = 0; a < kDescriptorSize; ++a) {
      double sum = 0.0, lo = 1e300, hi = -1e300;
      for (const auto& [id, d] : truth_) sum += d[a], lo = std::min(lo, d[a]), hi = std::max(hi, d[a]);
      const double mean = sum / n;
      double var = 0.0;
      for (const auto& [id, d] : truth_) var += (d[a] - mean) * (d[a] - mean);
      std_[a] = std::sqrt(var / n);
      if (std_[a] <= 1e-12 * std::max(1.0, std::fabs(mean))) std_[a] = 0.0;
      gamma_[a] = gamma_fraction * (hi - lo);
    }
  }

  /// One truthful constraint per reference image, on the attribute where
  /// the target differs most from it in standard deviations.
  std::vector<FeedbackConstraint> feedback(const SearchSession& session) const {
    const Descriptor& target = lookup(session.target_id());
    std::vector<FeedbackConstraint> out;
    for (const std::string& ref_id : session.reference_ids()) {
      const Descriptor& ref = lookup(ref_id);
      std::size_t best = kDescriptorSize;
      double best_gap = -1.0;
      for (std::size_t a = 0; a < kDescriptorSize; ++a) {
        if (std_[a] == 0.0) continue;
        const double gap = std::fabs(target[a] - ref[a]) / std_[a];
        if (gap > best_gap) best_gap = gap, best = a;
      }
      if (best == kDescriptorSize) throw std::invalid_argument("oracle: every attribute is constant over the corpus");
      const double delta = target[best] - ref[best];
      const Relation rel = std::fabs(delta) <= gamma_[best] ? Relation::equally
                           : delta > 0.0                    ? Relation::more
                                                            : Relation::less;
      out.push_back({ref_id, descriptor_labels()[best], rel});
    }
    return out;
  }

 private:
  const Descriptor& lookup(const std::string& id) const {
    const auto it = truth_.find(id);
    if (it == truth_.end()) throw std::invalid_argument("oracle: no attributes for image " + id);
    return it->second;
  }

  std::map<std::string, Descriptor> truth_;
  std::array<double, kDescriptorSize> std_{};
  std::array<double, kDescriptorSize> gamma_{};
};

inline std::vector<FeedbackConstraint> oracle_feedback(const SearchSession& session, const OracleUser& oracle) {
  return oracle.feedback(session);
}

/// Runs oracle rounds until the target is shown or iterations run out.
inline void simulate_session(SearchSession& session, const OracleUser& oracle) {
  while (!session.exhausted()) {
    session.apply_feedback(oracle.feedback(session));
    if (session.found()) break;
  }
}

/// Rebuilds a session from its recorded feedback rounds.
inline SearchSession replay_session(std::shared_ptr<const SearchCorpus> corpus, const std::string& target_id,
                                    const std::vector<std::vector<FeedbackConstraint>>& rounds,
                                    SessionOptions options = {}) {
  SearchSession s(std::move(corpus), target_id, options);
  for (const auto& r : rounds) s.apply_feedback(r);
  return s;
}

}  // namespace texelatt
