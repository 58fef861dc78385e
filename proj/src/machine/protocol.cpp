#include "wirebend/machine/protocol.hpp"

#include <charconv>

namespace wirebend::protocol {

namespace {

std::string_view strip_eol(std::string_view line) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
  return line;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

const char* describe(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownCommand:
      return "unknown command";
    case ErrorCode::BadArgument:
      return "bad argument";
    case ErrorCode::NotHomed:
      return "bend axis not homed";
    case ErrorCode::OutOfRange:
      return "command out of range";
    case ErrorCode::Stopped:
      return "stopped";
  }
  return "unknown error";
}

std::string format(const Command& c) {
  switch (c.op) {
    case Op::Feed:
      return "F " + std::to_string(c.arg);
    case Op::Bend:
      return "B " + std::to_string(c.arg);
    case Op::Rotate:
      return "R " + std::to_string(c.arg);
    case Op::Retract:
      return "RETRACT " + std::to_string(c.arg);
    case Op::Home:
      return "HOME";
    case Op::Stop:
      return "STOP";
  }
  return {};
}

ParsedCommand parse_command(std::string_view line) {
  line = strip_eol(line);
  if (line == "HOME") return {Command{Op::Home, 0}};
  if (line == "STOP") return {Command{Op::Stop, 0}};

  const auto space = line.find(' ');
  if (space == std::string_view::npos) return {std::nullopt, ErrorCode::UnknownCommand};
  const auto word = line.substr(0, space);
  const auto arg = parse_int(line.substr(space + 1));

  Op op;
  if (word == "F") {
    op = Op::Feed;
  } else if (word == "B") {
    op = Op::Bend;
  } else if (word == "R") {
    op = Op::Rotate;
  } else if (word == "RETRACT") {
    op = Op::Retract;
  } else {
    return {std::nullopt, ErrorCode::UnknownCommand};
  }
  if (!arg || (op == Op::Retract && *arg != 0 && *arg != 1)) return {std::nullopt, ErrorCode::BadArgument};
  return {Command{op, *arg}};
}

Command from_motor(const MotorCommand& m) {
  switch (m.op) {
    case MotorOp::Feed:
      return {Op::Feed, m.value};
    case MotorOp::Bend:
      return {Op::Bend, m.value};
    case MotorOp::Rotate:
      return {Op::Rotate, m.value};
    case MotorOp::Retract:
      return {Op::Retract, m.value};
    case MotorOp::Home:
      return {Op::Home, 0};
  }
  return {};
}

std::string format(const Response& r) {
  switch (r.kind) {
    case ResponseKind::Ok:
      return "OK";
    case ResponseKind::Hit:
      return "HIT";
    case ResponseKind::Err:
      return "ERR " + std::to_string(r.code);
  }
  return {};
}

std::optional<Response> parse_response(std::string_view line) {
  line = strip_eol(line);
  if (line == "OK") return Response{ResponseKind::Ok, 0};
  if (line == "HIT") return Response{ResponseKind::Hit, 0};
  if (line.size() > 4 && line.substr(0, 4) == "ERR ") {
    if (const auto code = parse_int(line.substr(4))) return Response{ResponseKind::Err, static_cast<int>(*code)};
  }
  return std::nullopt;
}

}  // namespace wirebend::protocol
