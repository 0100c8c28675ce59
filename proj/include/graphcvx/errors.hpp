#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace graphcvx {

// Broad category; the CLI maps these onto exit codes 2, 3 and 4.
enum class ErrorKind { validation, io, internal };

// Specific diagnostic. Every malformed-input condition has its own code so
// callers and tests can tell them apart without parsing messages.
enum class Errc {
  bad_magic,
  unsupported_version,
  unsupported_dtype,
  truncated,
  trailing_bytes,
  empty_matrix,
  non_finite,
  negative_label,
  label_out_of_range,
  count_mismatch,
  manifest_syntax,
  manifest_field,
  no_layers,
  layer_order,
  invalid_argument,
  no_scorable_class,
  empty_curve,
  missing_aggregate,
  too_large,
  io_failure,
  invariant,
};

std::string_view to_string(Errc code) noexcept;
ErrorKind kind_of(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }
  ErrorKind kind() const noexcept { return kind_of(code_); }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& message);

}  // namespace graphcvx
