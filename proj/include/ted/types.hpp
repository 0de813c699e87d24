#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ted {

/// Fatal error carrying a short machine-readable code ("insufficient_tokens",
/// "degenerate_variance", ...) alongside the human-readable message.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

enum class Dimension : std::uint8_t { valence = 0, arousal = 1, dominance = 2 };

inline constexpr std::array<Dimension, 3> kAllDimensions{
    Dimension::valence, Dimension::arousal, Dimension::dominance};

constexpr std::size_t index_of(Dimension d) noexcept {
  return static_cast<std::size_t>(d);
}

constexpr std::string_view dimension_name(Dimension d) noexcept {
  switch (d) {
  case Dimension::valence:
    return "valence";
  case Dimension::arousal:
    return "arousal";
  case Dimension::dominance:
    return "dominance";
  }
  return "";
}

/// Single-letter column prefix used in CSV headers (V, A, D).
constexpr char dimension_code(Dimension d) noexcept {
  return "VAD"[index_of(d)];
}

inline std::optional<Dimension> parse_dimension(std::string_view s) {
  for (Dimension d : kAllDimensions) {
    if (s == dimension_name(d) || (s.size() == 1 && (s[0] == dimension_code(d) ||
                                                     s[0] == dimension_code(d) + ('a' - 'A')))) {
      return d;
    }
  }
  return std::nullopt;
}

/// Valence, arousal and dominance scores of one word.
struct Vad {
  std::array<double, 3> values{};

  constexpr double operator[](Dimension d) const noexcept { return values[index_of(d)]; }
  constexpr double& operator[](Dimension d) noexcept { return values[index_of(d)]; }

  double valence() const noexcept { return values[0]; }
  double arousal() const noexcept { return values[1]; }
  double dominance() const noexcept { return values[2]; }

  friend bool operator==(const Vad&, const Vad&) = default;
};

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

} // namespace ted
