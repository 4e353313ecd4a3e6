#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cgt {

enum class Errc {
  syntax,
  unknown_block,
  weight_out_of_domain,
  invalid_atom,
  missing_block,
  target_not_in_atom,
  catalog_too_large,
  empty_domain,
  invalid_domain,
  contradictory_model,
  empty_evidence,
  too_many_worlds,
  invalid_seed,
  inconsistent_state,
  missing_proposition,
  malformed_record,
  duplicate_utterance_id,
  empty_catalog,
  length_mismatch,
  id_mismatch,
  group_mismatch,
  empty_input,
  invalid_config,
  io,
};

std::string_view errc_name(Errc code) noexcept;

/// Base of every error raised by the library. `code()` identifies the
/// failure class so callers and tests need not parse messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, std::string expected, std::string found);

  std::size_t position() const noexcept { return position_; }
  const std::string& expected() const noexcept { return expected_; }
  const std::string& found() const noexcept { return found_; }

 private:
  std::size_t position_;
  std::string expected_;
  std::string found_;
};

}  // namespace cgt
