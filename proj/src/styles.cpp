#include "chopsticks/styles.hpp"

#include <stdexcept>

namespace chopsticks {

int GrippingStyle::contact_count() const {
  int n = 0;
  for (int v : c) n += v != 0;
  return n;
}

std::vector<int> GrippingStyle::contacting_fingers() const {
  std::vector<int> out;
  for (int i = 0; i < finger_count(); ++i)
    if (c[i] != 0) out.push_back(i);
  return out;
}

StyleCheck is_valid_style(const GrippingStyle& s) {
  for (int v : s.c)
    if (v < 0 || v > 2) return {false, StyleRejection::bad_value, "entries must be 0, 1 or 2"};
  if (s.c.empty() || s.c[0] != 1)
    return {false, StyleRejection::thumb_rule, "thumb must touch the upper stick"};
  bool seen_lower = false;
  for (size_t i = 1; i < s.c.size(); ++i) {
    if (s.c[i] == 2) seen_lower = true;
    if (s.c[i] == 1 && seen_lower)
      return {false, StyleRejection::finger_crossing,
              "finger crossing: an upper-stick finger follows a lower-stick finger"};
  }
  bool upper = false, lower = false;
  for (size_t i = 1; i < s.c.size(); ++i) {
    upper |= s.c[i] == 1;
    lower |= s.c[i] == 2;
  }
  if (!upper || !lower)
    return {false, StyleRejection::missing_support,
            "each stick needs at least one non-thumb finger"};
  return {true, StyleRejection::none, {}};
}

std::vector<GrippingStyle> enumerate_all_styles(int n) {
  if (n < 1) throw std::invalid_argument("finger count must be positive");
  std::vector<GrippingStyle> out;
  GrippingStyle s{std::vector<int>(n, 0)};
  while (true) {
    out.push_back(s);
    int i = n - 1;
    while (i >= 0 && s.c[i] == 2) s.c[i--] = 0;
    if (i < 0) break;
    ++s.c[i];
  }
  return out;
}

std::vector<GrippingStyle> enumerate_valid_styles(int n) {
  if (n < 2) throw std::invalid_argument("finger count must be at least 2");
  std::vector<GrippingStyle> out;
  for (GrippingStyle& s : enumerate_all_styles(n))
    if (is_valid_style(s).valid) out.push_back(std::move(s));
  return out;
}

GrippingStyle parse_style(std::string_view text) {
  std::string t;
  for (char ch : text)
    if (ch != ' ') t += ch;
  if (t.size() >= 2 && t.front() == '(' && t.back() == ')') t = t.substr(1, t.size() - 2);
  GrippingStyle s;
  size_t start = 0;
  while (start <= t.size()) {
    size_t end = t.find(',', start);
    if (end == std::string::npos) end = t.size();
    const std::string field = t.substr(start, end - start);
    if (field.size() != 1 || field[0] < '0' || field[0] > '2')
      throw std::invalid_argument("malformed style '" + std::string(text) +
                                  "': expected comma-separated 0, 1 or 2");
    s.c.push_back(field[0] - '0');
    start = end + 1;
  }
  return s;
}

std::string format_style(const GrippingStyle& s) {
  std::string out;
  for (size_t i = 0; i < s.c.size(); ++i) {
    if (i) out += ',';
    out += static_cast<char>('0' + s.c[i]);
  }
  return out;
}

std::optional<std::string> style_name(const GrippingStyle& s) {
  using V = std::vector<int>;
  if (s.c == V{1, 1, 1, 2, 0}) return "standard";
  if (s.c == V{1, 1, 1, 1, 2}) return "forsaken pinky";
  if (s.c == V{1, 1, 2, 0, 0}) return "right-hand rule";
  if (s.c == V{1, 0, 1, 2, 0}) return "dino claws";
  if (s.c == V{1, 0, 0, 1, 2}) return "unnamed";
  return std::nullopt;
}

}  // namespace chopsticks
