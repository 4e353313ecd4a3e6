#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cgt/error.hpp"
#include "cgt/move.hpp"
#include "cgt/proposition.hpp"

namespace cgt {

/// A problem found while loading a line-delimited file.
struct RecordIssue {
  std::size_t line = 0;
  std::string field;
  std::string message;
};

/// Every issue found in a log, reported together. code() is
/// duplicate_utterance_id if that is the only kind of issue, otherwise
/// malformed_record.
class LogError : public Error {
 public:
  LogError(Errc code, std::vector<RecordIssue> issues);

  const std::vector<RecordIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<RecordIssue> issues_;
};

/// One JSON object per line with the Move fields (utterance_id required;
/// group_id, start_s, end_s, participant, text, label, prop_text optional).
/// Unknown fields are ignored, blank lines skipped. Moves come back sorted by
/// (group_id, start_s, utterance_id).
std::vector<Move> load_move_log(std::istream& in);
std::vector<Move> load_move_log_file(const std::string& path);

void write_move(std::ostream& out, const Move& m);
void write_move_log(std::ostream& out, const std::vector<Move>& moves);

struct PropositionDictionary {
  std::map<std::string, PropFormula> entries;
};

/// Records of {utterance_id, proposition}.
PropositionDictionary load_dictionary(std::istream& in, const TaskDomain& domain);

struct PropositionCatalog {
  std::vector<PropFormula> formulas;
  std::map<PropFormula, std::vector<std::string>> phrasings;
};

/// Records of {proposition, phrasings: [string]}.
PropositionCatalog load_catalog(std::istream& in, const TaskDomain& domain);

/// One token per line; blank lines and lines starting with '#' are ignored.
std::set<std::string> load_stopwords(std::istream& in);
/// Built-in English list, used when no stop-word file is configured.
const std::set<std::string>& default_stopwords();

/// Lowercases and splits on anything that is not a letter or digit.
std::vector<std::string> tokenize(std::string_view text);

std::optional<PropFormula> extract_dictionary(const Move& m, const PropositionDictionary& d,
                                              const TaskDomain& domain);

struct SimilarityMatch {
  PropFormula formula;
  double score = 0.0;
};

/// Term-frequency cosine retrieval over the catalog's phrasings.
class SimilarityIndex {
 public:
  SimilarityIndex(PropositionCatalog catalog, std::set<std::string> stopwords,
                  const TaskDomain& domain);

  /// Best-scoring formula (ties to the smaller canonical string), regardless
  /// of threshold. Throws Errc::empty_catalog on an empty catalog.
  SimilarityMatch best(std::string_view text) const;

  const std::set<std::string>& stopwords() const noexcept { return stopwords_; }

 private:
  using Vector = std::map<std::string, double>;
  Vector vectorize(std::string_view text) const;

  struct Entry {
    PropFormula formula;
    std::string key;
    std::vector<Vector> phrasings;
  };
  std::vector<Entry> entries_;
  std::set<std::string> stopwords_;
};

inline constexpr double kDefaultSimilarityThreshold = 0.2;

/// Absent when the best score is below `threshold` (use a negative
/// threshold for unconditional argmax).
std::optional<PropFormula> extract_similarity(const Move& m, const SimilarityIndex& index,
                                              double threshold = kDefaultSimilarityThreshold);

/// Source of propositional content for a move.
class PropositionExtractor {
 public:
  virtual ~PropositionExtractor() = default;
  virtual std::optional<PropFormula> extract(const Move& m) const = 0;
};

class DictionaryExtractor final : public PropositionExtractor {
 public:
  DictionaryExtractor(PropositionDictionary dictionary, TaskDomain domain)
      : dictionary_(std::move(dictionary)), domain_(std::move(domain)) {}
  std::optional<PropFormula> extract(const Move& m) const override;

 private:
  PropositionDictionary dictionary_;
  TaskDomain domain_;
};

class SimilarityExtractor final : public PropositionExtractor {
 public:
  SimilarityExtractor(std::shared_ptr<const SimilarityIndex> index, double threshold)
      : index_(std::move(index)), threshold_(threshold) {}
  std::optional<PropFormula> extract(const Move& m) const override;

 private:
  std::shared_ptr<const SimilarityIndex> index_;
  double threshold_;
};

/// First extractor that produces a proposition wins.
class ChainExtractor final : public PropositionExtractor {
 public:
  explicit ChainExtractor(std::vector<std::shared_ptr<const PropositionExtractor>> chain)
      : chain_(std::move(chain)) {}
  std::optional<PropFormula> extract(const Move& m) const override;

 private:
  std::vector<std::shared_ptr<const PropositionExtractor>> chain_;
};

/// Keyword cascade standing in for a trained move classifier: affirmation
/// without propositional words is ACCEPT, doubt cues are DOUBT, otherwise
/// STATEMENT when a proposition is extractable and OBSERVATION if not.
MoveLabel classify_move_heuristic(const Move& m, const TaskDomain& domain,
                                  bool proposition_extractable);

enum class LabelSource { gold, heuristic };

struct ResolvePolicy {
  std::shared_ptr<const PropositionExtractor> extractor;
  LabelSource labels = LabelSource::gold;
};

/// Fills in the label (heuristic only supplies missing ones) and the
/// proposition. STATEMENT/ACCEPT moves left without a proposition are
/// marked unresolved.
Move resolve(Move m, const ResolvePolicy& policy, const TaskDomain& domain);

}  // namespace cgt
