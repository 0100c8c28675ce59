#include "graphcvx/errors.hpp"

namespace graphcvx {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::bad_magic: return "bad magic";
    case Errc::unsupported_version: return "unsupported version";
    case Errc::unsupported_dtype: return "unsupported dtype";
    case Errc::truncated: return "truncated payload";
    case Errc::trailing_bytes: return "trailing bytes";
    case Errc::empty_matrix: return "empty matrix";
    case Errc::non_finite: return "non-finite value";
    case Errc::negative_label: return "negative label";
    case Errc::label_out_of_range: return "label out of range";
    case Errc::count_mismatch: return "count mismatch";
    case Errc::manifest_syntax: return "manifest syntax";
    case Errc::manifest_field: return "manifest field";
    case Errc::no_layers: return "no layers";
    case Errc::layer_order: return "layer order";
    case Errc::invalid_argument: return "invalid argument";
    case Errc::no_scorable_class: return "no scorable class";
    case Errc::empty_curve: return "empty curve";
    case Errc::missing_aggregate: return "missing aggregate";
    case Errc::too_large: return "too large";
    case Errc::io_failure: return "i/o failure";
    case Errc::invariant: return "invariant violation";
  }
  return "unknown";
}

ErrorKind kind_of(Errc code) noexcept {
  switch (code) {
    case Errc::io_failure: return ErrorKind::io;
    case Errc::invariant: return ErrorKind::internal;
    default: return ErrorKind::validation;
  }
}

void fail(Errc code, const std::string& message) {
  throw Error(code, std::string(to_string(code)) + ": " + message);
}

}  // namespace graphcvx
