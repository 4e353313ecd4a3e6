#include "cgt/proposition.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <limits>
#include <map>

#include "cgt/error.hpp"

namespace cgt {

std::string_view relation_symbol(Relation rel) noexcept {
  switch (rel) {
    case Relation::eq: return "=";
    case Relation::lt: return "<";
    case Relation::gt: return ">";
    case Relation::neq: return "!=";
  }
  return "?";
}

Relation flip(Relation rel) noexcept {
  switch (rel) {
    case Relation::lt: return Relation::gt;
    case Relation::gt: return Relation::lt;
    default: return rel;
  }
}

bool compare(int lhs, Relation rel, int rhs) noexcept {
  switch (rel) {
    case Relation::eq: return lhs == rhs;
    case Relation::lt: return lhs < rhs;
    case Relation::gt: return lhs > rhs;
    case Relation::neq: return lhs != rhs;
  }
  return false;
}

bool AtomicProp::mentions(BlockId block) const noexcept {
  if (lhs == block) return true;
  if (const auto* b = std::get_if<BlockId>(&rhs)) return *b == block;
  if (const auto* s = std::get_if<SumTerm>(&rhs)) {
    return std::find(s->blocks.begin(), s->blocks.end(), block) != s->blocks.end();
  }
  return false;
}

std::vector<BlockId> AtomicProp::blocks() const {
  std::vector<BlockId> out{lhs};
  if (const auto* b = std::get_if<BlockId>(&rhs)) out.push_back(*b);
  if (const auto* s = std::get_if<SumTerm>(&rhs)) {
    out.insert(out.end(), s->blocks.begin(), s->blocks.end());
  }
  return out;
}

AtomicProp canonical(AtomicProp atom) {
  if (auto* sum = std::get_if<SumTerm>(&atom.rhs)) {
    std::sort(sum->blocks.begin(), sum->blocks.end());
    if (std::adjacent_find(sum->blocks.begin(), sum->blocks.end()) != sum->blocks.end()) {
      throw Error(Errc::invalid_atom, "sum term repeats a block");
    }
    if (sum->blocks.empty()) throw Error(Errc::invalid_atom, "empty sum term");
    if (sum->blocks.size() == 1) {
      BlockId only = sum->blocks.front();
      atom.rhs = only;
    }
  }
  bool lhs_on_right = false;
  if (const auto* b = std::get_if<BlockId>(&atom.rhs)) {
    lhs_on_right = *b == atom.lhs;
  } else if (const auto* s = std::get_if<SumTerm>(&atom.rhs)) {
    lhs_on_right = std::binary_search(s->blocks.begin(), s->blocks.end(), atom.lhs);
  }
  if (lhs_on_right) throw Error(Errc::invalid_atom, "left-hand block appears on the right");
  if (auto* b = std::get_if<BlockId>(&atom.rhs); b != nullptr && *b < atom.lhs) {
    std::swap(atom.lhs, *b);
    atom.rel = flip(atom.rel);
  }
  return atom;
}

AtomicProp make_atom(BlockId lhs, Relation rel, Term rhs) {
  return canonical(AtomicProp{lhs, rel, std::move(rhs)});
}

// ---------------------------------------------------------------------------
// TaskDomain

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_';
  });
}

}  // namespace

TaskDomain::TaskDomain(std::vector<std::string> block_names, std::vector<int> weights)
    : names_(std::move(block_names)) {
  if (names_.empty()) throw Error(Errc::empty_domain, "block set is empty");
  if (weights.empty()) throw Error(Errc::empty_domain, "weight domain is empty");
  if (names_.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw Error(Errc::invalid_domain, "too many blocks");
  }
  std::set<std::string> seen;
  for (const auto& name : names_) {
    if (!is_identifier(name)) {
      throw Error(Errc::invalid_domain, "invalid block name '" + name + "'");
    }
    auto key = lowercase(name);
    if (key == "and") throw Error(Errc::invalid_domain, "'and' is reserved");
    if (!seen.insert(key).second) {
      throw Error(Errc::invalid_domain, "duplicate block name '" + name + "'");
    }
  }
  std::sort(weights.begin(), weights.end());
  if (std::adjacent_find(weights.begin(), weights.end()) != weights.end()) {
    throw Error(Errc::invalid_domain, "duplicate weight in domain");
  }
  if (weights.front() <= 0) throw Error(Errc::invalid_domain, "weights must be positive");
  for (int w : weights) weights_.push_back(Weight{w});
}

TaskDomain TaskDomain::weights_task() {
  return TaskDomain({"red", "blue", "green", "purple", "yellow"}, {10, 20, 30, 40, 50});
}

const std::string& TaskDomain::name(BlockId block) const {
  if (block.index >= names_.size()) {
    throw Error(Errc::unknown_block, "block index " + std::to_string(block.index) +
                                         " is outside the configured block set");
  }
  return names_[block.index];
}

std::vector<BlockId> TaskDomain::blocks() const {
  std::vector<BlockId> out;
  out.reserve(names_.size());
  for (std::size_t i = 0; i < names_.size(); ++i) {
    out.push_back(BlockId{static_cast<std::uint16_t>(i)});
  }
  return out;
}

std::optional<BlockId> TaskDomain::find_block(std::string_view name) const {
  auto key = lowercase(name);
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (lowercase(names_[i]) == key) return BlockId{static_cast<std::uint16_t>(i)};
  }
  return std::nullopt;
}

bool TaskDomain::contains(Weight weight) const noexcept {
  return std::binary_search(weights_.begin(), weights_.end(), weight);
}

PossibilityMap TaskDomain::full_possibilities() const {
  return PossibilityMap(names_.size(), weight_set());
}

// ---------------------------------------------------------------------------
// Assignment

Assignment::Assignment(std::size_t block_count,
                       std::initializer_list<std::pair<BlockId, Weight>> values)
    : values_(block_count) {
  for (const auto& [block, weight] : values) set(block, weight);
}

void Assignment::set(BlockId block, Weight weight) {
  if (block.index >= values_.size()) {
    throw Error(Errc::unknown_block, "block index out of range for assignment");
  }
  values_[block.index] = weight;
}

std::optional<Weight> Assignment::get(BlockId block) const {
  if (block.index >= values_.size()) return std::nullopt;
  return values_[block.index];
}

Weight Assignment::at(BlockId block) const {
  auto w = get(block);
  if (!w) {
    throw Error(Errc::missing_block,
                "block index " + std::to_string(block.index) + " is unassigned");
  }
  return *w;
}

// ---------------------------------------------------------------------------
// Formatting

std::string format_atom(const TaskDomain& domain, const AtomicProp& atom) {
  std::string out = domain.name(atom.lhs);
  out += ' ';
  out += relation_symbol(atom.rel);
  out += ' ';
  std::visit(
      [&](const auto& rhs) {
        using T = std::decay_t<decltype(rhs)>;
        if constexpr (std::is_same_v<T, Weight>) {
          out += std::to_string(rhs.grams);
        } else if constexpr (std::is_same_v<T, BlockId>) {
          out += domain.name(rhs);
        } else {
          for (std::size_t i = 0; i < rhs.blocks.size(); ++i) {
            if (i > 0) out += " + ";
            out += domain.name(rhs.blocks[i]);
          }
        }
      },
      atom.rhs);
  return out;
}

std::string format_prop(const TaskDomain& domain, const PropFormula& prop) {
  std::string out;
  for (std::size_t i = 0; i < prop.atoms().size(); ++i) {
    if (i > 0) out += " and ";
    out += format_atom(domain, prop.atoms()[i]);
  }
  return out;
}

std::string format_question(const TaskDomain& domain, BlockId block, Weight weight) {
  return domain.name(block) + " = " + std::to_string(weight.grams) + "?";
}

PropFormula PropFormula::make(const TaskDomain& domain, std::vector<AtomicProp> atoms) {
  if (atoms.empty()) throw Error(Errc::invalid_atom, "a formula needs at least one atom");
  std::vector<std::pair<std::string, AtomicProp>> keyed;
  keyed.reserve(atoms.size());
  for (auto& atom : atoms) {
    auto c = canonical(std::move(atom));
    for (BlockId b : c.blocks()) domain.name(b);
    if (auto* w = std::get_if<Weight>(&c.rhs); w != nullptr && !domain.contains(*w)) {
      throw Error(Errc::weight_out_of_domain,
                  "weight " + std::to_string(w->grams) + " is not in the weight domain");
    }
    keyed.emplace_back(format_atom(domain, c), std::move(c));
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  keyed.erase(std::unique(keyed.begin(), keyed.end(),
                          [](const auto& a, const auto& b) { return a.first == b.first; }),
              keyed.end());
  std::vector<AtomicProp> sorted;
  sorted.reserve(keyed.size());
  for (auto& [key, atom] : keyed) sorted.push_back(std::move(atom));
  return PropFormula(std::move(sorted));
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

enum class TokenKind { identifier, number, eq, lt, gt, neq, plus, conj, end, invalid };

struct Token {
  TokenKind kind = TokenKind::end;
  std::string_view text;
  std::size_t position = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const noexcept { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    current_ = Token{TokenKind::end, {}, pos_};
    if (pos_ >= text_.size()) return;

    const std::size_t start = pos_;
    const unsigned char c = static_cast<unsigned char>(text_[pos_]);
    auto emit = [&](TokenKind kind, std::size_t len) {
      current_ = Token{kind, text_.substr(start, len), start};
      pos_ = start + len;
    };

    if (std::isalpha(c)) {
      std::size_t end = start;
      while (end < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) {
        ++end;
      }
      auto word = text_.substr(start, end - start);
      emit(lowercase(word) == "and" ? TokenKind::conj : TokenKind::identifier, end - start);
    } else if (std::isdigit(c)) {
      std::size_t end = start;
      while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
      emit(TokenKind::number, end - start);
    } else if (c == '=') {
      emit(TokenKind::eq, 1);
    } else if (c == '<') {
      emit(TokenKind::lt, 1);
    } else if (c == '>') {
      emit(TokenKind::gt, 1);
    } else if (c == '+') {
      emit(TokenKind::plus, 1);
    } else if (c == '!' && start + 1 < text_.size() && text_[start + 1] == '=') {
      emit(TokenKind::neq, 2);
    } else if (text_.substr(start, 3) == "\xE2\x88\xA7") {  // U+2227 LOGICAL AND
      emit(TokenKind::conj, 3);
    } else {
      emit(TokenKind::invalid, 1);
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Token current_;
};

std::string describe(const Token& t) {
  if (t.kind == TokenKind::end) return "end of input";
  return "'" + std::string(t.text) + "'";
}

class Parser {
 public:
  Parser(const TaskDomain& domain, std::string_view text) : domain_(domain), lexer_(text) {}

  std::vector<AtomicProp> formula() {
    std::vector<AtomicProp> atoms{atom()};
    while (lexer_.peek().kind == TokenKind::conj) {
      lexer_.take();
      atoms.push_back(atom());
    }
    if (lexer_.peek().kind != TokenKind::end) {
      throw SyntaxError(lexer_.peek().position, "'and' or end of input", describe(lexer_.peek()));
    }
    return atoms;
  }

 private:
  AtomicProp atom() {
    const BlockId lhs = block("block name");
    const Token rel_token = lexer_.take();
    Relation rel;
    switch (rel_token.kind) {
      case TokenKind::eq: rel = Relation::eq; break;
      case TokenKind::lt: rel = Relation::lt; break;
      case TokenKind::gt: rel = Relation::gt; break;
      case TokenKind::neq: rel = Relation::neq; break;
      default:
        throw SyntaxError(rel_token.position, "relation ('=', '<', '>' or '!=')",
                          describe(rel_token));
    }

    if (lexer_.peek().kind == TokenKind::number) {
      const Token num = lexer_.take();
      int grams = 0;
      auto [ptr, ec] = std::from_chars(num.text.data(), num.text.data() + num.text.size(), grams);
      if (ec != std::errc{} || !domain_.contains(Weight{grams})) {
        throw Error(Errc::weight_out_of_domain, "weight " + std::string(num.text) +
                                                    " at position " +
                                                    std::to_string(num.position) +
                                                    " is not in the weight domain");
      }
      return canonical(AtomicProp{lhs, rel, Weight{grams}});
    }

    std::vector<BlockId> members{block("weight or block name")};
    while (lexer_.peek().kind == TokenKind::plus) {
      lexer_.take();
      members.push_back(block("block name"));
    }
    if (members.size() == 1) return canonical(AtomicProp{lhs, rel, members.front()});
    return canonical(AtomicProp{lhs, rel, SumTerm{std::move(members)}});
  }

  BlockId block(const char* expected) {
    const Token t = lexer_.take();
    if (t.kind != TokenKind::identifier) throw SyntaxError(t.position, expected, describe(t));
    auto id = domain_.find_block(t.text);
    if (!id) {
      throw Error(Errc::unknown_block, "unknown block '" + std::string(t.text) +
                                           "' at position " + std::to_string(t.position));
    }
    return *id;
  }

  const TaskDomain& domain_;
  Lexer lexer_;
};

}  // namespace

PropFormula parse_prop(const TaskDomain& domain, std::string_view text) {
  return PropFormula::make(domain, Parser(domain, text).formula());
}

AtomicProp parse_atom(const TaskDomain& domain, std::string_view text) {
  auto prop = parse_prop(domain, text);
  if (prop.size() != 1) throw Error(Errc::invalid_atom, "expected a single atom");
  return prop.atoms().front();
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

int term_value(const Term& term, const Assignment& assignment) {
  return std::visit(
      [&](const auto& t) -> int {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, Weight>) {
          return t.grams;
        } else if constexpr (std::is_same_v<T, BlockId>) {
          return assignment.at(t).grams;
        } else {
          int sum = 0;
          for (BlockId b : t.blocks) sum += assignment.at(b).grams;
          return sum;
        }
      },
      term);
}

}  // namespace

bool eval_atom(const AtomicProp& atom, const Assignment& assignment) {
  return compare(assignment.at(atom.lhs).grams, atom.rel, term_value(atom.rhs, assignment));
}

bool eval_formula(const PropFormula& prop, const Assignment& assignment) {
  return std::all_of(prop.atoms().begin(), prop.atoms().end(),
                     [&](const AtomicProp& a) { return eval_atom(a, assignment); });
}

// ---------------------------------------------------------------------------
// Consistency

namespace {

const WeightSet& possibilities_of(const PossibilityMap& possibilities, BlockId block) {
  if (block.index >= possibilities.size()) {
    throw Error(Errc::unknown_block, "no possibility set for block index " +
                                         std::to_string(block.index));
  }
  return possibilities[block.index];
}

/// All values reachable as a sum of one weight from each listed block.
std::set<int> reachable_sums(std::span<const BlockId> blocks, const PossibilityMap& possibilities) {
  std::set<int> sums{0};
  for (BlockId b : blocks) {
    std::set<int> next;
    for (int s : sums) {
      for (Weight w : possibilities_of(possibilities, b)) next.insert(s + w.grams);
    }
    sums = std::move(next);
  }
  return sums;
}

bool any_pair(const std::set<int>& left, Relation rel, const std::set<int>& right) {
  if (left.empty() || right.empty()) return false;
  switch (rel) {
    case Relation::eq:
      return std::any_of(left.begin(), left.end(), [&](int v) { return right.count(v) > 0; });
    case Relation::lt: return *left.begin() < *right.rbegin();
    case Relation::gt: return *left.rbegin() > *right.begin();
    case Relation::neq: return left.size() > 1 || right.size() > 1 || *left.begin() != *right.begin();
  }
  return false;
}

}  // namespace

WeightSet inconsistent_weights(const AtomicProp& atom, BlockId target,
                               const PossibilityMap& possibilities) {
  if (!atom.mentions(target)) {
    throw Error(Errc::target_not_in_atom, "target block does not occur in the atom");
  }
  const WeightSet& candidates = possibilities_of(possibilities, target);

  // Split the atom into the side holding the target and the opposite side;
  // the target's weight plus `offsets` must relate to `opposite`.
  std::set<int> offsets{0};
  std::set<int> opposite;
  bool target_on_left = atom.lhs == target;
  if (target_on_left) {
    std::visit(
        [&](const auto& rhs) {
          using T = std::decay_t<decltype(rhs)>;
          if constexpr (std::is_same_v<T, Weight>) {
            opposite = {rhs.grams};
          } else if constexpr (std::is_same_v<T, BlockId>) {
            std::vector<BlockId> one{rhs};
            opposite = reachable_sums(one, possibilities);
          } else {
            opposite = reachable_sums(rhs.blocks, possibilities);
          }
        },
        atom.rhs);
  } else {
    std::vector<BlockId> lhs{atom.lhs};
    opposite = reachable_sums(lhs, possibilities);
    if (const auto* sum = std::get_if<SumTerm>(&atom.rhs)) {
      std::vector<BlockId> rest;
      for (BlockId b : sum->blocks) {
        if (b != target) rest.push_back(b);
      }
      offsets = reachable_sums(rest, possibilities);
    }
  }

  WeightSet out;
  for (Weight w : candidates) {
    std::set<int> side;
    for (int o : offsets) side.insert(w.grams + o);
    const bool consistent = target_on_left ? any_pair(side, atom.rel, opposite)
                                           : any_pair(opposite, atom.rel, side);
    if (!consistent) out.insert(w);
  }
  return out;
}

bool satisfiable(const AtomicProp& atom, const PossibilityMap& possibilities) {
  const auto& lhs = possibilities_of(possibilities, atom.lhs);
  return inconsistent_weights(atom, atom.lhs, possibilities).size() < lhs.size();
}

// ---------------------------------------------------------------------------
// Catalog

std::vector<AtomicProp> atomic_catalog(const TaskDomain& domain) {
  std::vector<AtomicProp> atoms;
  const auto blocks = domain.blocks();
  for (BlockId b : blocks) {
    for (Weight w : domain.weights()) atoms.push_back(make_atom(b, Relation::eq, w));
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    for (std::size_t j = i + 1; j < blocks.size(); ++j) {
      for (Relation rel : {Relation::eq, Relation::lt, Relation::gt, Relation::neq}) {
        atoms.push_back(make_atom(blocks[i], rel, blocks[j]));
      }
    }
  }
  for (BlockId lhs : blocks) {
    std::vector<BlockId> others;
    for (BlockId b : blocks) {
      if (b != lhs) others.push_back(b);
    }
    if (others.size() >= 31) {
      throw Error(Errc::catalog_too_large, "too many blocks to enumerate sum terms");
    }
    const std::uint32_t subsets = 1u << others.size();
    for (std::uint32_t mask = 0; mask < subsets; ++mask) {
      if (std::popcount(mask) < 2) continue;
      SumTerm sum;
      for (std::size_t k = 0; k < others.size(); ++k) {
        if (mask & (1u << k)) sum.blocks.push_back(others[k]);
      }
      atoms.push_back(make_atom(lhs, Relation::eq, std::move(sum)));
    }
  }
  std::sort(atoms.begin(), atoms.end(), [&](const AtomicProp& a, const AtomicProp& b) {
    return format_atom(domain, a) < format_atom(domain, b);
  });
  return atoms;
}

namespace {

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

}  // namespace

std::vector<PropFormula> generate_catalog(const TaskDomain& domain, int max_conjuncts,
                                          std::size_t cap) {
  if (max_conjuncts < 1) throw Error(Errc::invalid_atom, "max_conjuncts must be at least 1");
  const auto atoms = atomic_catalog(domain);
  const std::size_t k_max = std::min<std::size_t>(static_cast<std::size_t>(max_conjuncts),
                                                  atoms.size());
  double total = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) total += binomial(atoms.size(), k);
  if (total > static_cast<double>(cap)) {
    throw Error(Errc::catalog_too_large, "catalog would hold " + std::to_string(total) +
                                             " formulas, cap is " + std::to_string(cap));
  }

  std::vector<std::pair<std::string, PropFormula>> keyed;
  keyed.reserve(static_cast<std::size_t>(total));
  std::vector<std::size_t> idx;
  for (std::size_t k = 1; k <= k_max; ++k) {
    idx.resize(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      std::vector<AtomicProp> chosen;
      chosen.reserve(k);
      for (std::size_t i : idx) chosen.push_back(atoms[i]);
      auto f = PropFormula::make(domain, std::move(chosen));
      keyed.emplace_back(format_prop(domain, f), std::move(f));

      // Next k-combination in lexicographic order.
      std::size_t pos = k;
      while (pos > 0 && idx[pos - 1] == atoms.size() - k + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }
  }
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (a.second.size() != b.second.size()) return a.second.size() < b.second.size();
    return a.first < b.first;
  });
  std::vector<PropFormula> out;
  out.reserve(keyed.size());
  for (auto& [key, f] : keyed) out.push_back(std::move(f));
  return out;
}

}  // namespace cgt
