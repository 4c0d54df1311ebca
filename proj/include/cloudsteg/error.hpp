#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cloudsteg {

enum class ErrorCode {
  MalformedStuffing,
  NoStartMarker,
  NoEndMarker,
  LeadingZero,
  DegenerateInterval,
  WindowMismatch,
  AmbiguousPhase,
  ConstantSignal,
  AllOneClass,
  SyncNotFound,
  InvalidSpec,
  InvalidConfig,
  ParseError,
};

// Receiver stage in which a decode error was raised.
enum class Phase {
  None,
  TransmissionStart,
  BitStart,
  BitDecision,
  SymbolSync,
  FrameSync,
  Destuffing,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedStuffing: return "MalformedStuffing";
    case ErrorCode::NoStartMarker: return "NoStartMarker";
    case ErrorCode::NoEndMarker: return "NoEndMarker";
    case ErrorCode::LeadingZero: return "LeadingZero";
    case ErrorCode::DegenerateInterval: return "DegenerateInterval";
    case ErrorCode::WindowMismatch: return "WindowMismatch";
    case ErrorCode::AmbiguousPhase: return "AmbiguousPhase";
    case ErrorCode::ConstantSignal: return "ConstantSignal";
    case ErrorCode::AllOneClass: return "AllOneClass";
    case ErrorCode::SyncNotFound: return "SyncNotFound";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

inline std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::None: return "none";
    case Phase::TransmissionStart: return "transmission-start";
    case Phase::BitStart: return "phase1-bit-start";
    case Phase::BitDecision: return "phase2-bit-decision";
    case Phase::SymbolSync: return "phase3-symbol-sync";
    case Phase::FrameSync: return "phase4-frame-sync";
    case Phase::Destuffing: return "destuffing";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, Phase phase = Phase::None)
      : std::runtime_error(compose(code, what, phase)), code_(code), phase_(phase) {}

  ErrorCode code() const noexcept { return code_; }
  Phase phase() const noexcept { return phase_; }

  // Same error, re-tagged with the pipeline stage it surfaced from.
  Error with_phase(Phase phase) const {
    return Error(code_, detail_from(what()), phase);
  }

 private:
  static std::string compose(ErrorCode code, const std::string& what, Phase phase) {
    std::string out;
    if (phase != Phase::None) {
      out += '[';
      out += to_string(phase);
      out += "] ";
    }
    out += to_string(code);
    if (!what.empty()) {
      out += ": ";
      out += what;
    }
    return out;
  }

  static std::string detail_from(std::string_view full) {
    auto pos = full.find(": ");
    return pos == std::string_view::npos ? std::string() : std::string(full.substr(pos + 2));
  }

  ErrorCode code_;
  Phase phase_;
};

}  // namespace cloudsteg
