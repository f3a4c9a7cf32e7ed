#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gaitemo {

/// The four perceived-emotion classes. The integer values are the class
/// indices used by every model and file.
enum class Emotion : int { Happy = 0, Angry = 1, Sad = 2, Neutral = 3 };

inline constexpr std::size_t kNumEmotions = 4;

inline constexpr std::array<Emotion, kNumEmotions> kAllEmotions = {
    Emotion::Happy, Emotion::Angry, Emotion::Sad, Emotion::Neutral};

constexpr int index_of(Emotion e) noexcept { return static_cast<int>(e); }

std::string_view emotion_name(Emotion e) noexcept;
std::optional<Emotion> parse_emotion(std::string_view name);
Emotion emotion_from_index(int index);

/// One row of a labels CSV (`gait_id,label`); nullopt is "unlabeled".
using LabelRow = std::pair<std::string, std::optional<Emotion>>;

std::vector<LabelRow> parse_labels_csv(std::string_view text);
std::string labels_to_csv(const std::vector<LabelRow>& rows);

}  // namespace gaitemo
