#include "dualarm/command_matching.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dualarm/error.hpp"

namespace dualarm {
namespace {

// Decodes one UTF-8 sequence starting at s[i]; malformed bytes decode as
// themselves so no input is lost.
char32_t decode(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  auto cont = [&](std::size_t k) -> int {
    if (i + k >= s.size()) return -1;
    const auto b = static_cast<unsigned char>(s[i + k]);
    return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
  };
  if (b0 < 0x80) { i += 1; return b0; }
  if ((b0 & 0xE0) == 0xC0) {
    const int c1 = cont(1);
    if (c1 >= 0) { i += 2; return static_cast<char32_t>(((b0 & 0x1F) << 6) | c1); }
  } else if ((b0 & 0xF0) == 0xE0) {
    const int c1 = cont(1), c2 = cont(2);
    if (c1 >= 0 && c2 >= 0) { i += 3; return static_cast<char32_t>(((b0 & 0x0F) << 12) | (c1 << 6) | c2); }
  } else if ((b0 & 0xF8) == 0xF0) {
    const int c1 = cont(1), c2 = cont(2), c3 = cont(3);
    if (c1 >= 0 && c2 >= 0 && c3 >= 0) {
      i += 4;
      return static_cast<char32_t>(((b0 & 0x07) << 18) | (c1 << 12) | (c2 << 6) | c3);
    }
  }
  i += 1;
  return b0;
}

void encode(char32_t c, std::string& out) {
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
}

bool is_space(char32_t c) {
  return c == U' ' || (c >= U'\t' && c <= U'\r') || c == 0x00A0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F ||
         c == 0x205F || c == 0x3000;
}

bool is_punct(char32_t c) {
  if (c < 0x80) {
    return (c >= U'!' && c <= U'/') || (c >= U':' && c <= U'@') || (c >= U'[' && c <= U'`') ||
           (c >= U'{' && c <= U'~');
  }
  return (c >= 0x00A1 && c <= 0x00BF && c != 0x00AA && c != 0x00B5 && c != 0x00BA) ||
         (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) ||
         (c >= 0x3001 && c <= 0x3003) || (c >= 0x3008 && c <= 0x3011) ||
         (c >= 0xFF01 && c <= 0xFF0F);
}

char32_t to_lower(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 0x20;
  if (c < 0x80) return c;
  if (c >= 0x00C0 && c <= 0x00DE && c != 0x00D7) return c + 0x20;
  if ((c >= 0x0100 && c <= 0x0137) || (c >= 0x014A && c <= 0x0177)) return c | 1u;
  if (c >= 0x0139 && c <= 0x0148) return (c & 1u) ? c + 1 : c;
  if (c == 0x01A0 || c == 0x01AF) return c + 1;  // Ơ Ư
  if (c >= 0x0391 && c <= 0x03A9 && c != 0x03A2) return c + 0x20;
  if (c >= 0x0400 && c <= 0x040F) return c + 0x50;
  if (c >= 0x0410 && c <= 0x042F) return c + 0x20;
  if (c >= 0x1E00 && c <= 0x1EFF && !(c >= 0x1E96 && c <= 0x1E9F)) return c | 1u;  // Latin Extended Additional
  return c;
}

}  // namespace

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::kPickUp: return "pick_up";
    case ActionKind::kRelease: return "release";
    case ActionKind::kHome: return "home";
  }
  return "pick_up";
}

std::optional<ActionKind> parse_action(std::string_view text) {
  if (text == "pick_up") return ActionKind::kPickUp;
  if (text == "release") return ActionKind::kRelease;
  if (text == "home") return ActionKind::kHome;
  return std::nullopt;
}

CommandLexicon::CommandLexicon(std::vector<CommandEntry> entries, std::vector<std::string> detector_classes)
    : entries_(std::move(entries)), classes_(std::move(detector_classes)) {
  if (entries_.empty()) throw Error(ErrorCode::kEmptyLexicon, "command lexicon has no entries");
  std::vector<std::string> problems;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    const std::string field = "entries[" + std::to_string(i) + "]";
    if (e.template_text.empty()) problems.push_back(field + ".template: empty");
    else if (!seen.insert(e.template_text).second) problems.push_back(field + ".template: duplicate '" + e.template_text + "'");
    if (e.action != ActionKind::kHome) {
      if (e.object_label.empty()) {
        problems.push_back(field + ".object_label: required for " + std::string(to_string(e.action)));
      } else if (!classes_.empty() &&
                 std::find(classes_.begin(), classes_.end(), e.object_label) == classes_.end()) {
        problems.push_back(field + ".object_label: unknown detector class '" + e.object_label + "'");
      }
    }
  }
  if (!problems.empty()) {
    std::string msg = "invalid command lexicon:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw Error(ErrorCode::kValidationError, msg);
  }
}

CommandLexicon CommandLexicon::default_english() {
  return CommandLexicon(
      {
          {"pick up the white rectangular object", ActionKind::kPickUp, "rectangle"},
          {"pick up the white cylinder object", ActionKind::kPickUp, "cylinder"},
          {"pick up the box", ActionKind::kPickUp, "box"},
      },
      {"rectangle", "cylinder", "box"});
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t c = decode(text, i);
    if (is_space(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else if (!is_punct(c)) {
      encode(to_lower(c), current);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::optional<std::size_t> TfIdfIndex::term_index(std::string_view term) const {
  auto it = std::lower_bound(vocabulary.begin(), vocabulary.end(), term);
  if (it == vocabulary.end() || *it != term) return std::nullopt;
  return static_cast<std::size_t>(it - vocabulary.begin());
}

TfIdfIndex build_index(const CommandLexicon& lexicon) {
  if (lexicon.size() == 0) throw Error(ErrorCode::kEmptyLexicon, "command lexicon has no entries");

  std::vector<std::vector<std::string>> docs;
  std::set<std::string> terms;
  for (const auto& e : lexicon.entries()) {
    docs.push_back(tokenize(e.template_text));
    terms.insert(docs.back().begin(), docs.back().end());
  }

  TfIdfIndex index;
  index.vocabulary.assign(terms.begin(), terms.end());
  std::vector<std::size_t> df(index.vocabulary.size(), 0);
  for (const auto& doc : docs) {
    std::set<std::string> unique(doc.begin(), doc.end());
    for (const auto& t : unique) ++df[*index.term_index(t)];
  }
  const auto n = static_cast<double>(docs.size());
  index.idf.reserve(df.size());
  for (std::size_t count : df) index.idf.push_back(std::log(n / static_cast<double>(count)));

  for (const auto& e : lexicon.entries()) index.entry_vectors.push_back(vectorize(index, e.template_text));
  return index;
}

SparseVector vectorize(const TfIdfIndex& index, std::string_view text) {
  SparseVector counts;
  for (const auto& tok : tokenize(text)) {
    if (auto t = index.term_index(tok)) counts[*t] += 1.0;
  }
  for (auto& [term, weight] : counts) weight *= index.idf[term];
  return counts;
}

double cosine_similarity(const SparseVector& v1, const SparseVector& v2) {
  double dot = 0.0, n1 = 0.0, n2 = 0.0;
  for (const auto& [t, w] : v1) {
    n1 += w * w;
    if (auto it = v2.find(t); it != v2.end()) dot += w * it->second;
  }
  for (const auto& [t, w] : v2) n2 += w * w;
  if (n1 == 0.0 || n2 == 0.0) return 0.0;
  // sqrt(n * n) == n exactly, so a vector scores exactly 1 against itself.
  return std::clamp(dot / std::sqrt(n1 * n2), 0.0, 1.0);
}

MatchResult match_command(const TfIdfIndex& index, const CommandLexicon& lexicon,
                          std::string_view utterance, double threshold) {
  if (lexicon.size() == 0) throw Error(ErrorCode::kEmptyLexicon, "command lexicon has no entries");
  if (index.entry_vectors.size() != lexicon.size()) {
    throw Error(ErrorCode::kInvalidArgument, "index was not built from this lexicon");
  }
  const SparseVector query = vectorize(index, utterance);
  MatchResult result;
  result.scores.reserve(lexicon.size());
  double best = -1.0;
  for (std::size_t i = 0; i < lexicon.size(); ++i) {
    const double s = cosine_similarity(query, index.entry_vectors[i]);
    result.scores.push_back(s);
    if (s > best) {
      best = s;
      result.entry_index = i;
    }
  }
  result.entry = lexicon.entries()[result.entry_index];
  result.score = best;
  result.accepted = best >= threshold;
  return result;
}

}  // namespace dualarm
