#include "sdnguard/labels.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "sdnguard/error.hpp"

namespace sdnguard {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::NonMonotonicTimestamp: return "NonMonotonicTimestamp";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::UnparsableCell: return "UnparsableCell";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::NonFiniteGradient: return "NonFiniteGradient";
    case Errc::EmptyEnsemble: return "EmptyEnsemble";
    case Errc::ClassTooSmall: return "ClassTooSmall";
    case Errc::CorruptModelFile: return "CorruptModelFile";
    case Errc::SerializationFailure: return "SerializationFailure";
    case Errc::InvalidInput: return "InvalidInput";
    case Errc::InvalidThresholds: return "InvalidThresholds";
    case Errc::InconsistentDecision: return "InconsistentDecision";
    case Errc::TableFull: return "TableFull";
    case Errc::OrphanEvent: return "OrphanEvent";
    case Errc::UndefinedFPR: return "UndefinedFPR";
    case Errc::ZeroBaseline: return "ZeroBaseline";
    case Errc::TooFewFlows: return "TooFewFlows";
    case Errc::IoFailure: return "IoFailure";
    case Errc::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

std::string_view label_name(Label l) noexcept {
  switch (l) {
    case Label::Normal: return "Normal";
    case Label::DoS: return "DoS";
    case Label::DDoS: return "DDoS";
    case Label::BruteForce: return "BruteForce";
    case Label::Web: return "Web";
    case Label::Exploit: return "Exploit";
    case Label::Probe: return "Probe";
    case Label::Botnet: return "Botnet";
  }
  return "Normal";
}

std::optional<Label> parse_label(std::string_view text) {
  std::string key;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (key == "normal" || key == "benign") return Label::Normal;
  if (key == "dos") return Label::DoS;
  if (key == "ddos") return Label::DDoS;
  if (key == "bruteforce" || key == "bfa") return Label::BruteForce;
  if (key == "web" || key == "webattack" || key == "webattacks") return Label::Web;
  if (key == "exploit" || key == "exploits" || key == "u2r") return Label::Exploit;
  if (key == "probe" || key == "probing") return Label::Probe;
  if (key == "botnet" || key == "bot") return Label::Botnet;
  return std::nullopt;
}

int severity_rank(Label l) noexcept {
  switch (l) {
    case Label::DDoS: return 7;
    case Label::DoS: return 6;
    case Label::Botnet: return 5;
    case Label::Exploit: return 4;
    case Label::BruteForce: return 3;
    case Label::Web: return 2;
    case Label::Probe: return 1;
    case Label::Normal: return 0;
  }
  return 0;
}

double ClassProbabilities::sum() const noexcept {
  double s = 0.0;
  for (double v : p) s += v;
  return s;
}

bool ClassProbabilities::is_simplex(double tol) const noexcept {
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) return false;
  }
  return std::abs(sum() - 1.0) <= tol;
}

Label argmax_label(const ClassProbabilities& probs) noexcept {
  Label best = Label::Normal;
  double best_mass = probs[Label::Normal];
  for (Label l : kAllLabels) {
    const double mass = probs[l];
    if (mass > best_mass || (mass == best_mass && severity_rank(l) > severity_rank(best))) {
      best = l;
      best_mass = mass;
    }
  }
  return best;
}

}  // namespace sdnguard
