#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dualarm {

enum class ActionKind { kPickUp, kRelease, kHome };

std::string_view to_string(ActionKind kind);
std::optional<ActionKind> parse_action(std::string_view text);

struct CommandEntry {
  std::string template_text;
  ActionKind action = ActionKind::kPickUp;
  std::string object_label;  // detector class; empty only for kHome
};

/// Ordered command templates plus the detector classes they may refer to.
class CommandLexicon {
 public:
  CommandLexicon() = default;
  /// Throws EmptyLexicon for no entries and ValidationError for empty or
  /// duplicate templates, or labels outside `detector_classes` (when given).
  CommandLexicon(std::vector<CommandEntry> entries, std::vector<std::string> detector_classes = {});

  const std::vector<CommandEntry>& entries() const { return entries_; }
  const std::vector<std::string>& detector_classes() const { return classes_; }
  std::size_t size() const { return entries_.size(); }

  /// The three commands of the shipped object dataset.
  static CommandLexicon default_english();

 private:
  std::vector<CommandEntry> entries_;
  std::vector<std::string> classes_;
};

/// Lowercase, strip punctuation, split on whitespace. UTF-8 aware: non-ASCII
/// letters survive and common Latin/Greek/Cyrillic/Vietnamese capitals are
/// lowercased.
std::vector<std::string> tokenize(std::string_view text);

/// term index -> tf * idf weight. Terms present with zero idf are kept.
using SparseVector = std::map<std::size_t, double>;

struct TfIdfIndex {
  std::vector<std::string> vocabulary;  // sorted
  std::vector<double> idf;              // ln(N / df(t))
  std::vector<SparseVector> entry_vectors;

  std::size_t dimension() const { return vocabulary.size(); }
  std::optional<std::size_t> term_index(std::string_view term) const;
};

/// Raw-count tf, natural-log idf. Throws EmptyLexicon.
TfIdfIndex build_index(const CommandLexicon& lexicon);

/// Out-of-vocabulary tokens are ignored.
SparseVector vectorize(const TfIdfIndex& index, std::string_view text);

/// v1.v2 / (|v1||v2|), and 0 if either norm is 0.
double cosine_similarity(const SparseVector& v1, const SparseVector& v2);

inline constexpr double kDefaultMatchThreshold = 0.6;

struct MatchResult {
  std::size_t entry_index = 0;
  CommandEntry entry;
  double score = 0.0;
  bool accepted = false;
  std::vector<double> scores;  // one per lexicon entry
};

/// Best-scoring entry; ties go to the lowest ordinal. `accepted == false`
/// means no entry reached the threshold (the NoMatch outcome).
MatchResult match_command(const TfIdfIndex& index, const CommandLexicon& lexicon,
                          std::string_view utterance, double threshold = kDefaultMatchThreshold);

}  // namespace dualarm
