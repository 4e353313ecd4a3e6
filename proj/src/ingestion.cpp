#include "cgt/ingestion.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace cgt {

using json = nlohmann::json;

namespace {

std::string summarize(const std::vector<RecordIssue>& issues) {
  std::ostringstream out;
  out << issues.size() << (issues.size() == 1 ? " problem" : " problems") << " in record stream";
  for (const auto& issue : issues) {
    out << "\n  line " << issue.line;
    if (!issue.field.empty()) out << " field '" << issue.field << "'";
    out << ": " << issue.message;
  }
  return out.str();
}

/// Reads non-blank lines as JSON objects; parse failures become issues.
template <class Fn>
std::vector<RecordIssue> for_each_record(std::istream& in, Fn&& fn) {
  std::vector<RecordIssue> issues;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (std::all_of(line.begin(), line.end(),
                    [](unsigned char c) { return std::isspace(c); })) {
      continue;
    }
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      issues.push_back({number, "", std::string("invalid JSON: ") + e.what()});
      continue;
    }
    if (!record.is_object()) {
      issues.push_back({number, "", "record is not an object"});
      continue;
    }
    fn(number, record, issues);
  }
  return issues;
}

std::optional<std::string> optional_string(const json& record, const char* field,
                                           std::size_t line, std::vector<RecordIssue>& issues) {
  auto it = record.find(field);
  if (it == record.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    issues.push_back({line, field, "expected a string"});
    return std::nullopt;
  }
  return it->get<std::string>();
}

}  // namespace

LogError::LogError(Errc code, std::vector<RecordIssue> issues)
    : Error(code, summarize(issues)), issues_(std::move(issues)) {}

std::vector<Move> load_move_log(std::istream& in) {
  std::vector<Move> moves;
  std::map<std::pair<std::string, std::string>, std::size_t> seen;
  std::size_t duplicates = 0;

  auto issues = for_each_record(in, [&](std::size_t line, const json& record,
                                        std::vector<RecordIssue>& issues) {
    const std::size_t before = issues.size();
    Move m;
    auto id = optional_string(record, "utterance_id", line, issues);
    if (!id || id->empty()) {
      if (issues.size() == before) issues.push_back({line, "utterance_id", "missing"});
    } else {
      m.utterance_id = *id;
    }
    m.group_id = optional_string(record, "group_id", line, issues).value_or("");
    m.text = optional_string(record, "text", line, issues).value_or("");

    for (const char* field : {"start_s", "end_s"}) {
      auto it = record.find(field);
      if (it == record.end() || it->is_null()) continue;
      if (!it->is_number()) {
        issues.push_back({line, field, "expected a number"});
        continue;
      }
      (std::string_view(field) == "start_s" ? m.start_s : m.end_s) = it->get<double>();
    }
    if (record.find("end_s") == record.end()) m.end_s = m.start_s;
    if (m.start_s > m.end_s) issues.push_back({line, "end_s", "ends before it starts"});

    if (auto it = record.find("participant"); it != record.end() && !it->is_null()) {
      if (it->is_string()) {
        m.participant = it->get<std::string>();
      } else if (it->is_number_integer()) {
        m.participant = std::to_string(it->get<long long>());
      } else {
        issues.push_back({line, "participant", "expected a string or integer"});
      }
    }

    if (auto label = optional_string(record, "label", line, issues)) {
      m.label = parse_label(*label);
      if (!m.label) issues.push_back({line, "label", "unknown label '" + *label + "'"});
    }
    m.prop_text = optional_string(record, "prop_text", line, issues);

    if (issues.size() != before) return;
    auto key = std::make_pair(m.group_id, m.utterance_id);
    if (auto [it, fresh] = seen.emplace(key, line); !fresh) {
      ++duplicates;
      issues.push_back({line, "utterance_id",
                        "duplicate utterance id '" + m.utterance_id + "' in group '" +
                            m.group_id + "' (first seen on line " +
                            std::to_string(it->second) + ")"});
      return;
    }
    moves.push_back(std::move(m));
  });

  if (!issues.empty()) {
    const Errc code =
        duplicates == issues.size() ? Errc::duplicate_utterance_id : Errc::malformed_record;
    throw LogError(code, std::move(issues));
  }
  std::stable_sort(moves.begin(), moves.end(), [](const Move& a, const Move& b) {
    if (a.group_id != b.group_id) return a.group_id < b.group_id;
    if (a.start_s != b.start_s) return a.start_s < b.start_s;
    return a.utterance_id < b.utterance_id;
  });
  return moves;
}

std::vector<Move> load_move_log_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open move log '" + path + "'");
  try {
    return load_move_log(in);
  } catch (const LogError& e) {
    throw LogError(e.code(), [&] {
      auto issues = e.issues();
      for (auto& issue : issues) issue.message = path + ": " + issue.message;
      return issues;
    }());
  }
}

void write_move(std::ostream& out, const Move& m) {
  json record;
  record["utterance_id"] = m.utterance_id;
  record["group_id"] = m.group_id;
  record["start_s"] = m.start_s;
  record["end_s"] = m.end_s;
  record["participant"] = m.participant;
  record["text"] = m.text;
  if (m.label) record["label"] = std::string(label_name(*m.label));
  if (m.prop_text) record["prop_text"] = *m.prop_text;
  out << record.dump() << '\n';
}

void write_move_log(std::ostream& out, const std::vector<Move>& moves) {
  for (const auto& m : moves) write_move(out, m);
}

// ---------------------------------------------------------------------------
// Resources

namespace {

std::optional<PropFormula> parse_field(const TaskDomain& domain, const std::string& text,
                                       std::size_t line, const char* field,
                                       std::vector<RecordIssue>& issues) {
  try {
    return parse_prop(domain, text);
  } catch (const Error& e) {
    issues.push_back({line, field, e.what()});
    return std::nullopt;
  }
}

}  // namespace

PropositionDictionary load_dictionary(std::istream& in, const TaskDomain& domain) {
  PropositionDictionary d;
  auto issues = for_each_record(in, [&](std::size_t line, const json& record,
                                        std::vector<RecordIssue>& issues) {
    auto id = optional_string(record, "utterance_id", line, issues);
    auto text = optional_string(record, "proposition", line, issues);
    if (!id || !text) {
      issues.push_back({line, !id ? "utterance_id" : "proposition", "missing"});
      return;
    }
    auto f = parse_field(domain, *text, line, "proposition", issues);
    if (!f) return;
    if (!d.entries.emplace(*id, std::move(*f)).second) {
      issues.push_back({line, "utterance_id", "duplicate dictionary entry '" + *id + "'"});
    }
  });
  if (!issues.empty()) throw LogError(Errc::malformed_record, std::move(issues));
  return d;
}

PropositionCatalog load_catalog(std::istream& in, const TaskDomain& domain) {
  PropositionCatalog c;
  auto issues = for_each_record(in, [&](std::size_t line, const json& record,
                                        std::vector<RecordIssue>& issues) {
    auto text = optional_string(record, "proposition", line, issues);
    if (!text) {
      issues.push_back({line, "proposition", "missing"});
      return;
    }
    auto parsed = parse_field(domain, *text, line, "proposition", issues);
    if (!parsed) return;
    const PropFormula& f = *parsed;
    std::vector<std::string> phrasings;
    if (auto it = record.find("phrasings"); it != record.end()) {
      if (!it->is_array() ||
          !std::all_of(it->begin(), it->end(), [](const json& v) { return v.is_string(); })) {
        issues.push_back({line, "phrasings", "expected a list of strings"});
        return;
      }
      phrasings = it->get<std::vector<std::string>>();
    }
    auto& slot = c.phrasings[f];
    if (slot.empty() && std::find(c.formulas.begin(), c.formulas.end(), f) == c.formulas.end()) {
      c.formulas.push_back(f);
    }
    slot.insert(slot.end(), phrasings.begin(), phrasings.end());
  });
  if (!issues.empty()) throw LogError(Errc::malformed_record, std::move(issues));
  return c;
}

std::set<std::string> load_stopwords(std::istream& in) {
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    auto tokens = tokenize(line);
    words.insert(tokens.begin(), tokens.end());
  }
  return words;
}

const std::set<std::string>& default_stopwords() {
  // Standard English function words. Number words, colour words and words
  // expressing (in)equality are deliberately absent.
  static const std::set<std::string> words{
      "a",     "about", "actually", "all",   "am",    "an",    "and",   "any",   "are",
      "as",    "at",    "be",       "been",  "but",   "by",    "can",   "could", "d",
      "did",   "do",    "does",     "doing", "for",   "from",  "get",   "go",    "gonna",
      "got",   "guess", "had",      "has",   "have",  "he",    "her",   "here",  "him",
      "his",   "how",   "i",        "if",    "in",    "into",  "is",    "it",    "its",
      "just",  "know",  "let",      "ll",    "m",     "maybe", "me",    "my",    "now",
      "of",    "oh",    "ok",       "okay",  "on",    "or",    "our",   "probably", "re",
      "s",     "see",   "she",      "should", "so",   "some",  "t",     "that",  "the",
      "their", "them",  "then",     "there", "these", "they",  "think", "this",  "those",
      "to",    "too",   "uh",       "um",    "up",    "us",    "ve",    "very",  "was",
      "we",    "well",  "were",     "what",  "when",  "where", "which", "who",   "why",
      "will",  "with",  "would",    "yeah",  "you",   "your",  "also",  "like",
  };
  return words;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

// ---------------------------------------------------------------------------
// Extraction

std::optional<PropFormula> extract_dictionary(const Move& m, const PropositionDictionary& d,
                                              const TaskDomain& domain) {
  if (auto it = d.entries.find(m.utterance_id); it != d.entries.end()) return it->second;
  if (m.prop_text) return parse_prop(domain, *m.prop_text);
  return std::nullopt;
}

SimilarityIndex::SimilarityIndex(PropositionCatalog catalog, std::set<std::string> stopwords,
                                 const TaskDomain& domain)
    : stopwords_(std::move(stopwords)) {
  for (auto& f : catalog.formulas) {
    Entry e{f, format_prop(domain, f), {}};
    auto it = catalog.phrasings.find(f);
    if (it == catalog.phrasings.end() || it->second.empty()) {
      e.phrasings.push_back(vectorize(e.key));
    } else {
      for (const auto& phrase : it->second) e.phrasings.push_back(vectorize(phrase));
    }
    entries_.push_back(std::move(e));
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.key < b.key; });
}

SimilarityIndex::Vector SimilarityIndex::vectorize(std::string_view text) const {
  Vector v;
  for (auto& token : tokenize(text)) {
    if (stopwords_.count(token) == 0) v[token] += 1.0;
  }
  return v;
}

namespace {

double cosine(const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (const auto& [k, v] : a) {
    na += v * v;
    if (auto it = b.find(k); it != b.end()) dot += v * it->second;
  }
  for (const auto& [k, v] : b) nb += v * v;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

SimilarityMatch SimilarityIndex::best(std::string_view text) const {
  if (entries_.empty()) throw Error(Errc::empty_catalog, "proposition catalog is empty");
  const auto query = vectorize(text);
  const Entry* winner = nullptr;
  double best_score = -1.0;
  for (const auto& e : entries_) {
    double score = 0.0;
    for (const auto& p : e.phrasings) score = std::max(score, cosine(query, p));
    if (winner == nullptr || score > best_score + 1e-12) {
      winner = &e;
      best_score = score;
    }
  }
  return {winner->formula, best_score};
}

std::optional<PropFormula> extract_similarity(const Move& m, const SimilarityIndex& index,
                                              double threshold) {
  auto match = index.best(m.text);
  if (match.score < threshold) return std::nullopt;
  return match.formula;
}

std::optional<PropFormula> DictionaryExtractor::extract(const Move& m) const {
  return extract_dictionary(m, dictionary_, domain_);
}

std::optional<PropFormula> SimilarityExtractor::extract(const Move& m) const {
  return extract_similarity(m, *index_, threshold_);
}

std::optional<PropFormula> ChainExtractor::extract(const Move& m) const {
  for (const auto& e : chain_) {
    if (auto p = e->extract(m)) return p;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Labels and resolution

MoveLabel classify_move_heuristic(const Move& m, const TaskDomain& domain,
                                  bool proposition_extractable) {
  static const std::set<std::string> affirmations{"yeah", "yes", "right", "sure"};
  static const std::set<std::string> doubts{"wait", "hmm", "really"};
  static const std::set<std::string> propositional{
      "one",     "two",    "three",   "four",    "five",    "six",      "seven",
      "eight",   "nine",   "ten",     "eleven",  "twelve",  "fifteen",  "twenty",
      "thirty",  "forty",  "fifty",   "sixty",   "seventy", "eighty",   "ninety",
      "hundred", "equal",  "equals",  "same",    "heavier", "lighter",  "more",
      "less",    "than",   "plus",    "greater", "bigger",  "smaller",  "together",
      "sum",     "different", "weighs", "weight", "grams",
  };

  bool affirm = false;
  bool doubt = false;
  bool content = false;
  for (const auto& token : tokenize(m.text)) {
    affirm |= affirmations.count(token) > 0;
    doubt |= doubts.count(token) > 0;
    content |= propositional.count(token) > 0 || domain.find_block(token).has_value() ||
               std::all_of(token.begin(), token.end(),
                           [](unsigned char c) { return std::isdigit(c); });
  }
  if (affirm && !content) return MoveLabel::accept;
  if (doubt) return MoveLabel::doubt;
  return proposition_extractable ? MoveLabel::statement : MoveLabel::observation;
}

Move resolve(Move m, const ResolvePolicy& policy, const TaskDomain& domain) {
  if (policy.extractor) {
    try {
      m.prop = policy.extractor->extract(m);
    } catch (const Error& e) {
      throw Error(e.code(), "utterance '" + m.utterance_id + "'" +
                                (m.group_id.empty() ? "" : " in group '" + m.group_id + "'") +
                                ": " + e.what());
    }
    if (m.prop) m.prop_text = format_prop(domain, *m.prop);
  }
  if (!m.label && policy.labels == LabelSource::heuristic) {
    m.label = classify_move_heuristic(m, domain, m.prop.has_value());
  }
  m.unresolved = m.needs_proposition() && !m.prop;
  return m;
}

}  // namespace cgt
