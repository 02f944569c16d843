#include "chopsticks/frames.hpp"

#include <stdexcept>

namespace chopsticks {

std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::approach:
      return "approach";
    case Phase::relocate:
      return "relocate";
    case Phase::release:
      return "release";
  }
  return "?";
}

Phase parse_phase(std::string_view s) {
  if (s == "approach") return Phase::approach;
  if (s == "relocate") return Phase::relocate;
  if (s == "release") return Phase::release;
  throw std::invalid_argument("unknown phase '" + std::string(s) + "'");
}

}  // namespace chopsticks
