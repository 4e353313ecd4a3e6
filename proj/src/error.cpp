#include "cgt/error.hpp"

namespace cgt {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::syntax: return "SyntaxError";
    case Errc::unknown_block: return "UnknownBlock";
    case Errc::weight_out_of_domain: return "WeightOutOfDomain";
    case Errc::invalid_atom: return "InvalidAtom";
    case Errc::missing_block: return "MissingBlock";
    case Errc::target_not_in_atom: return "TargetNotInAtom";
    case Errc::catalog_too_large: return "CatalogTooLarge";
    case Errc::empty_domain: return "EmptyDomain";
    case Errc::invalid_domain: return "InvalidDomain";
    case Errc::contradictory_model: return "ContradictoryModel";
    case Errc::empty_evidence: return "EmptyEvidence";
    case Errc::too_many_worlds: return "TooManyWorlds";
    case Errc::invalid_seed: return "InvalidSeed";
    case Errc::inconsistent_state: return "InconsistentState";
    case Errc::missing_proposition: return "MissingProposition";
    case Errc::malformed_record: return "MalformedRecord";
    case Errc::duplicate_utterance_id: return "DuplicateUtteranceId";
    case Errc::empty_catalog: return "EmptyCatalog";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::id_mismatch: return "IdMismatch";
    case Errc::group_mismatch: return "GroupMismatch";
    case Errc::empty_input: return "EmptyInput";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::io: return "IoError";
  }
  return "Error";
}

namespace {

std::string syntax_message(std::size_t position, const std::string& expected,
                           const std::string& found) {
  return "syntax error at position " + std::to_string(position) + ": expected " +
         expected + ", found " + found;
}

}  // namespace

SyntaxError::SyntaxError(std::size_t position, std::string expected, std::string found)
    : Error(Errc::syntax, syntax_message(position, expected, found)),
      position_(position),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

}  // namespace cgt
