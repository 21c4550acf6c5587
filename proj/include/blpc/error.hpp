#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace blpc
{

enum class Errc
{
  invalid_input,
  degenerate_input,
  numeric,
  config_invalid,
  io,
  bad_magic,
  version_mismatch,
  checksum,
  missing_tensor,
  shape_mismatch,
  format,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code table) can tell them apart.
class Error : public std::runtime_error
{
public:
  Error(Errc code, const std::string& message)
  : std::runtime_error(message)
  , code_(code)
  {
  }

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

} // namespace blpc
