#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace sdnguard {

// Traffic classes of the InSDN corpus: Normal plus seven attack families.
enum class Label : std::uint8_t {
  Normal = 0,
  DoS,
  DDoS,
  BruteForce,
  Web,
  Exploit,
  Probe,
  Botnet,
};

inline constexpr std::size_t kNumLabels = 8;

inline constexpr std::array<Label, kNumLabels> kAllLabels = {
    Label::Normal, Label::DoS,     Label::DDoS,  Label::BruteForce,
    Label::Web,    Label::Exploit, Label::Probe, Label::Botnet};

constexpr std::size_t index_of(Label l) noexcept { return static_cast<std::size_t>(l); }

std::string_view label_name(Label l) noexcept;

// Accepts canonical names and the spellings used by InSDN / CICFlowMeter
// exports ("BFA", "Web-Attack", "BOTNET", "U2R", ...). Case-insensitive.
std::optional<Label> parse_label(std::string_view text);

// Tie-break rank: DDoS > DoS > Botnet > Exploit > BruteForce > Web > Probe > Normal.
int severity_rank(Label l) noexcept;

inline bool is_attack(Label l) noexcept { return l != Label::Normal; }

// A probability (or vote-mass) vector over all eight labels. Classes a model
// never saw in training carry zero mass.
struct ClassProbabilities {
  std::array<double, kNumLabels> p{};

  double& operator[](Label l) noexcept { return p[index_of(l)]; }
  double operator[](Label l) const noexcept { return p[index_of(l)]; }

  double sum() const noexcept;
  bool is_simplex(double tol = 1e-9) const noexcept;
};

// Highest-mass label; exact ties resolve by severity_rank.
Label argmax_label(const ClassProbabilities& probs) noexcept;

}  // namespace sdnguard
