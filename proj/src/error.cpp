#include "blpc/error.hpp"

namespace blpc
{

std::string_view to_string(Errc code) noexcept
{
  switch (code)
  {
    case Errc::invalid_input: return "invalid input";
    case Errc::degenerate_input: return "degenerate input";
    case Errc::numeric: return "numeric error";
    case Errc::config_invalid: return "invalid config";
    case Errc::io: return "i/o error";
    case Errc::bad_magic: return "bad magic";
    case Errc::version_mismatch: return "version mismatch";
    case Errc::checksum: return "checksum failure";
    case Errc::missing_tensor: return "missing tensor";
    case Errc::shape_mismatch: return "shape mismatch";
    case Errc::format: return "malformed file";
  }
  return "unknown error";
}

} // namespace blpc
