#pragma once

#include <stdexcept>
#include <string>

namespace secnn {

enum class Err {
  // parameter / ckks
  BudgetExceeded,
  DegreeUnusable,
  ScaleOutOfRange,
  LevelMismatch,
  ScaleMismatch,
  LevelExhausted,
  RelinKeyMissing,
  GaloisKeyMissing,
  // serialization
  BadMagic,
  VersionMismatch,
  TruncatedPayload,
  // transport
  FrameTooLarge,
  ChannelClosed,
  SocketError,
  // model / fixed point
  ParseError,
  DimMismatch,
  Overflow,
  // gc / ot
  WidthMismatch,
  LabelMismatch,
  ProtocolAbort,
  // generic
  InvalidArgument,
};

inline const char* err_name(Err e) {
  switch (e) {
    case Err::BudgetExceeded: return "BudgetExceeded";
    case Err::DegreeUnusable: return "DegreeUnusable";
    case Err::ScaleOutOfRange: return "ScaleOutOfRange";
    case Err::LevelMismatch: return "LevelMismatch";
    case Err::ScaleMismatch: return "ScaleMismatch";
    case Err::LevelExhausted: return "LevelExhausted";
    case Err::RelinKeyMissing: return "RelinKeyMissing";
    case Err::GaloisKeyMissing: return "GaloisKeyMissing";
    case Err::BadMagic: return "BadMagic";
    case Err::VersionMismatch: return "VersionMismatch";
    case Err::TruncatedPayload: return "TruncatedPayload";
    case Err::FrameTooLarge: return "FrameTooLarge";
    case Err::ChannelClosed: return "ChannelClosed";
    case Err::SocketError: return "SocketError";
    case Err::ParseError: return "ParseError";
    case Err::DimMismatch: return "DimMismatch";
    case Err::Overflow: return "Overflow";
    case Err::WidthMismatch: return "WidthMismatch";
    case Err::LabelMismatch: return "LabelMismatch";
    case Err::ProtocolAbort: return "ProtocolAbort";
    case Err::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

struct Error : std::runtime_error {
  Err code;
  Error(Err c, const std::string& msg)
      : std::runtime_error(std::string(err_name(c)) + ": " + msg), code(c) {}
};

[[noreturn]] inline void fail(Err c, const std::string& msg) { throw Error(c, msg); }

inline void require(bool ok, Err c, const std::string& msg) {
  if (!ok) fail(c, msg);
}

}  // namespace secnn
