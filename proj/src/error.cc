#include "embias/error.h"

namespace embias {
namespace {

std::string FormatParseMessage(ParseError::Reason reason, std::uint64_t offset,
                               bool offset_is_line, const std::string &detail) {
  std::string msg = ParseError::ReasonName(reason);
  msg += offset_is_line ? " at line " : " at byte ";
  msg += std::to_string(offset);
  if (!detail.empty()) msg += ": " + detail;
  return msg;
}

}  // namespace

ParseError::ParseError(Reason reason, std::uint64_t offset,
                       bool offset_is_line, const std::string &detail)
    : Error("parse", FormatParseMessage(reason, offset, offset_is_line, detail)),
      reason_(reason),
      offset_(offset),
      offset_is_line_(offset_is_line),
      detail_(detail) {}

const char *ParseError::ReasonName(Reason reason) {
  switch (reason) {
    case Reason::kMalformedHeader: return "malformed header";
    case Reason::kDimensionMismatch: return "dimension mismatch";
    case Reason::kNonFinite: return "non-finite value";
    case Reason::kTruncated: return "truncated input";
    case Reason::kCountMismatch: return "entry count mismatch";
    case Reason::kMalformedRecord: return "malformed record";
  }
  return "parse error";
}

}  // namespace embias
