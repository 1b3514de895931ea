#include "cdid/core.hpp"

#include <charconv>
#include <sstream>

namespace cdid {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid_input";
    case ErrorKind::io: return "io";
    case ErrorKind::empty_window: return "empty_window";
    case ErrorKind::empty_set: return "empty_set";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::singular: return "singular";
    case ErrorKind::no_crossing: return "no_crossing";
  }
  return "unknown";
}

bool contains(const IntervalSet& set, double x) {
  for (const auto& iv : set) {
    if (iv.contains(x)) return true;
  }
  return false;
}

namespace {

double parse_number(std::string token, const std::string& context) {
  auto first = token.find_first_not_of(" \t");
  auto last = token.find_last_not_of(" \t");
  if (first == std::string::npos) {
    throw Error(ErrorKind::invalid_input, "empty bound in interval set '" + context + "'");
  }
  token = token.substr(first, last - first + 1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw Error(ErrorKind::invalid_input,
                "malformed number '" + token + "' in interval set '" + context + "'");
  }
  return value;
}

}  // namespace

IntervalSet parse_interval_set(const std::string& text) {
  IntervalSet out;
  std::stringstream pieces(text);
  std::string piece;
  while (std::getline(pieces, piece, ';')) {
    if (piece.find_first_not_of(" \t") == std::string::npos) continue;
    auto comma = piece.find(',');
    if (comma == std::string::npos || piece.find(',', comma + 1) != std::string::npos) {
      throw Error(ErrorKind::invalid_input, "interval '" + piece + "' must be 'lo,hi'");
    }
    Interval iv{parse_number(piece.substr(0, comma), text),
                parse_number(piece.substr(comma + 1), text)};
    if (!(iv.lo <= iv.hi)) {
      throw Error(ErrorKind::invalid_input, "interval '" + piece + "' has lo > hi");
    }
    out.push_back(iv);
  }
  if (out.empty()) throw Error(ErrorKind::invalid_input, "empty interval set");
  return out;
}

}  // namespace cdid
