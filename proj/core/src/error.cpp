#include "hopfrc/error.hpp"

namespace hopfrc {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kContract: return "contract";
    case ErrorKind::kNumericDomain: return "numeric-domain";
    case ErrorKind::kDivergence: return "divergence";
    case ErrorKind::kNormalization: return "normalization";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kUnsupported: return "unsupported";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace hopfrc
