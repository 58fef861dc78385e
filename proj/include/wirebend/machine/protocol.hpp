#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "wirebend/machine/steps.hpp"

// Line protocol between host and machine. ASCII, one message per LF-terminated line,
// single-space separators.
//
//   host -> machine:  F <steps> | B <steps> | R <steps> | RETRACT 0|1 | HOME | STOP
//   machine -> host:  OK | ERR <code> | HIT
//
// Exactly one command is outstanding at a time; STOP may be sent while a command runs.
// The running command is then answered (ERR 5 if it was cut short) before STOP's OK.
// HIT is an unsolicited limit-switch event emitted during HOME, before its OK.

namespace wirebend::protocol {

enum class ErrorCode : int {
  UnknownCommand = 1,
  BadArgument = 2,
  NotHomed = 3,
  OutOfRange = 4,
  Stopped = 5,
};

const char* describe(ErrorCode code);

enum class Op { Feed, Bend, Rotate, Retract, Home, Stop };

struct Command {
  Op op = Op::Feed;
  std::int64_t arg = 0;

  bool operator==(const Command&) const = default;
};

/// Formats without the trailing LF.
std::string format(const Command& c);

/// Parses one line (trailing LF/CR tolerated). Returns the error code to send back on failure.
struct ParsedCommand {
  std::optional<Command> command;
  ErrorCode error = ErrorCode::UnknownCommand;
};
ParsedCommand parse_command(std::string_view line);

Command from_motor(const MotorCommand& m);

enum class ResponseKind { Ok, Err, Hit };

struct Response {
  ResponseKind kind = ResponseKind::Ok;
  int code = 0;

  bool operator==(const Response&) const = default;
};

std::string format(const Response& r);
std::optional<Response> parse_response(std::string_view line);

}  // namespace wirebend::protocol
