#pragma once

#include "gradarg/error.hpp"
#include "gradarg/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gradarg {

struct SourceDocument {
  std::string text;
  std::string origin = "<inline>";
};

/// Reads a file into a SourceDocument. Throws Error(NotFound).
SourceDocument read_document(const std::string& path);

struct ParseError {
  int line = 1;
  int column = 1;
  ErrorCode code = ErrorCode::Syntax;
  std::string message;
};

/// "origin:line:column: CODE: message"
std::string format_error(const ParseError& error, const std::string& origin);

struct ParseResult {
  std::optional<Framework> framework;
  std::vector<ParseError> errors;

  bool ok() const noexcept { return framework.has_value(); }
};

/// Parses the line-oriented `.af` format:
///
///   option <id> [label="..."] [base=<float>]
///   arg <id> kind=<user|task> [owner=<user>] [base=<float>] [active=<bool>]
///            [label="..."] [derived_active_from=<id,id,...>]
///   att <src> <dst>
///   sup <src> <dst>
///   user <id>
///   pref <user> <option> <+|-|0>
///
/// `#` starts a comment. References may point forward. All independent errors
/// are reported; on success the framework has no structural errors.
ParseResult parse_framework(const SourceDocument& doc);

/// Convenience: parse or throw Error(InvalidAf) with every diagnostic in the message.
Framework parse_framework_or_throw(const SourceDocument& doc);

/// Deterministic text: options in declaration order, then users, arguments
/// sorted by id, relations sorted by (source, target), preferences sorted.
/// Scores use 17 significant digits, so parsing the output gives back an equal framework.
std::string serialize_framework(const Framework& framework);

}  // namespace gradarg
