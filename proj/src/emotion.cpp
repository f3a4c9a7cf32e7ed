#include "gaitemo/emotion.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "gaitemo/error.hpp"
#include "gaitemo/text.hpp"

namespace gaitemo {

std::string_view emotion_name(Emotion e) noexcept {
  switch (e) {
    case Emotion::Happy: return "happy";
    case Emotion::Angry: return "angry";
    case Emotion::Sad: return "sad";
    case Emotion::Neutral: return "neutral";
  }
  return "unknown";
}

std::optional<Emotion> parse_emotion(std::string_view name) {
  std::string lower(trim(name));
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (Emotion e : kAllEmotions) {
    if (emotion_name(e) == lower) return e;
  }
  return std::nullopt;
}

Emotion emotion_from_index(int index) {
  if (index < 0 || index >= static_cast<int>(kNumEmotions))
    throw DataError("emotion index out of range: " + std::to_string(index));
  return static_cast<Emotion>(index);
}

std::vector<LabelRow> parse_labels_csv(std::string_view text) {
  std::vector<LabelRow> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 2)
      throw ParseError(ParseErrorKind::ColumnCount, line_no, 0, "expected gait_id,label");
    if (line_no == 1 && trim(cells[0]) == "gait_id") continue;
    const std::string_view label = trim(cells[1]);
    std::optional<Emotion> e = parse_emotion(label);
    if (!e && label != "unlabeled")
      throw ParseError(ParseErrorKind::Schema, line_no, 2,
                       "unknown label '" + std::string(label) + "'");
    rows.emplace_back(std::string(trim(cells[0])), e);
  }
  return rows;
}

std::string labels_to_csv(const std::vector<LabelRow>& rows) {
  std::string out = "gait_id,label\n";
  for (const auto& [id, label] : rows) {
    out += id;
    out += ',';
    out += label ? emotion_name(*label) : "unlabeled";
    out += '\n';
  }
  return out;
}

}  // namespace gaitemo
