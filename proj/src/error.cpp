#include "quda/error.hpp"

namespace quda {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::NonFinite: return "NonFinite";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::NegativeThreshold: return "NegativeThreshold";
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::ClassTooSmall: return "ClassTooSmall";
    case Errc::MissingClass: return "MissingClass";
    case Errc::InvalidLabel: return "InvalidLabel";
    case Errc::NonPositiveRho: return "NonPositiveRho";
    case Errc::ZeroDiagonal: return "ZeroDiagonal";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::TooFewPerClass: return "TooFewPerClass";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::IoError: return "IoError";
    case Errc::ParseError: return "ParseError";
    case Errc::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case Errc::CorruptPayload: return "CorruptPayload";
  }
  return "Unknown";
}

}  // namespace quda
