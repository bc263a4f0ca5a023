#include "osmoracle/errors.hpp"

namespace osmo {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::InvalidCoordinate: return "InvalidCoordinate";
    case Errc::ParseError: return "ParseError";
    case Errc::DanglingReference: return "DanglingReference";
    case Errc::DuplicateObject: return "DuplicateObject";
    case Errc::BuildRejected: return "BuildRejected";
    case Errc::AreaNotFound: return "AreaNotFound";
    case Errc::AmbiguousArea: return "AmbiguousArea";
    case Errc::InvalidLimit: return "InvalidLimit";
    case Errc::InvalidBoundingBox: return "InvalidBoundingBox";
    case Errc::ObjectNotFound: return "ObjectNotFound";
    case Errc::NoMatch: return "NoMatch";
    case Errc::NoObjects: return "NoObjects";
    case Errc::IdOverflow: return "IdOverflow";
    case Errc::MalformedPayload: return "MalformedPayload";
    case Errc::UnknownFunction: return "UnknownFunction";
    case Errc::BadRequest: return "BadRequest";
    case Errc::LimitTooLarge: return "LimitTooLarge";
    case Errc::NotReady: return "NotReady";
    case Errc::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace osmo
