#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chopsticks {

/// Finger -> chopstick assignment, thumb first: 1 = upper stick, 2 = lower
/// stick, 0 = no contact.
struct GrippingStyle {
  std::vector<int> c;

  int finger_count() const { return static_cast<int>(c.size()); }
  int contact_count() const;
  // Indices of fingers with a nonzero entry, in thumb -> pinky order.
  std::vector<int> contacting_fingers() const;

  friend bool operator==(const GrippingStyle&, const GrippingStyle&) = default;
  friend auto operator<=>(const GrippingStyle&, const GrippingStyle&) = default;
};

enum class StyleRejection { none, bad_value, thumb_rule, finger_crossing, missing_support };

struct StyleCheck {
  bool valid = false;
  StyleRejection reason = StyleRejection::none;
  std::string message;
};

StyleCheck is_valid_style(const GrippingStyle& s);

// All 3^N tuples in lexicographic order.
std::vector<GrippingStyle> enumerate_all_styles(int finger_count);
// Valid styles in lexicographic order. Requires N >= 2.
std::vector<GrippingStyle> enumerate_valid_styles(int finger_count);

// "1,1,1,2,0" or "(1,1,1,2,0)"; throws std::invalid_argument.
GrippingStyle parse_style(std::string_view text);
std::string format_style(const GrippingStyle& s);  // "1,1,1,2,0"

// Conventional name for the five well-known five-finger styles.
std::optional<std::string> style_name(const GrippingStyle& s);

}  // namespace chopsticks
