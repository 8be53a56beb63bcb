#include "msns/error.hpp"

namespace msns {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::NonHermitianInput: return "non-Hermitian input";
    case ErrorKind::ZeroWavenumber: return "zero wavenumber";
    case ErrorKind::NotDivergenceFree: return "not divergence-free";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::NoBracket: return "no bracket";
    case ErrorKind::CflViolation: return "CFL violation";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
    case ErrorKind::MalformedCsv: return "malformed CSV";
    case ErrorKind::BadMagic: return "bad magic";
    case ErrorKind::BadVersion: return "bad version";
    case ErrorKind::BadCrc: return "bad CRC";
  }
  return "unknown";
}

}  // namespace msns
