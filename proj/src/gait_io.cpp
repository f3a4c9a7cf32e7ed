#include "gaitemo/gait_io.hpp"

#include <array>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "gaitemo/error.hpp"
#include "gaitemo/text.hpp"

namespace gaitemo {

namespace {

constexpr std::array<char, 3> kAxes = {'x', 'y', 'z'};

struct LineReader {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line_no = 0;

  // Next non-blank line, CR stripped.
  std::optional<std::string_view> next() {
    while (pos < text.size()) {
      const std::size_t nl = text.find('\n', pos);
      const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
      std::string_view line = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!trim(line).empty()) return line;
    }
    return std::nullopt;
  }
};

double parse_cell(std::string_view cell, std::size_t line, std::size_t column) {
  const auto v = parse_double(cell);
  if (!v)
    throw ParseError(ParseErrorKind::NonNumeric, line, column,
                     "non-numeric cell '" + std::string(trim(cell)) + "'");
  if (!std::isfinite(*v))
    throw ParseError(ParseErrorKind::NonFinite, line, column, "non-finite value");
  return *v;
}

// Column i of the file holds canonical coordinate layout[i].
std::array<std::size_t, kPoseDim> parse_column_header(std::string_view line, std::size_t line_no) {
  const auto cells = split(line, ',');
  if (cells.empty() || trim(cells[0]) != "t")
    throw ParseError(ParseErrorKind::MalformedHeader, line_no, 1, "first column must be 't'");
  if (cells.size() != kPoseDim + 1)
    throw ParseError(ParseErrorKind::ColumnCount, line_no, 0,
                     "expected 48 coordinates, got " + std::to_string(cells.size() - 1));
  std::array<std::size_t, kPoseDim> layout{};
  std::array<bool, kPoseDim> seen{};
  for (std::size_t c = 1; c < cells.size(); ++c) {
    const std::string_view name = trim(cells[c]);
    const std::size_t us = name.rfind('_');
    std::optional<JointId> joint;
    std::size_t axis = kAxes.size();
    if (us != std::string_view::npos && us + 2 == name.size()) {
      joint = parse_joint(name.substr(0, us));
      for (std::size_t a = 0; a < kAxes.size(); ++a)
        if (name[us + 1] == kAxes[a]) axis = a;
    }
    if (!joint || axis == kAxes.size())
      throw ParseError(ParseErrorKind::MalformedHeader, line_no, c + 1,
                       "unknown column '" + std::string(name) + "'");
    const std::size_t slot = 3 * index_of(*joint) + axis;
    if (seen[slot])
      throw ParseError(ParseErrorKind::MalformedHeader, line_no, c + 1,
                       "duplicate column '" + std::string(name) + "'");
    seen[slot] = true;
    layout[c - 1] = slot;
  }
  return layout;
}

Gait parse_csv(std::string_view text, std::string id) {
  LineReader reader{text};
  const auto first = reader.next();
  if (!first) throw ParseError(ParseErrorKind::MalformedHeader, 1, 0, "empty file");
  const auto head = split(*first, ',');
  if (head.size() != 2 || trim(head[0]) != "fps")
    throw ParseError(ParseErrorKind::MalformedHeader, reader.line_no, 0,
                     "expected 'fps,<float>' header");
  const auto fps = parse_double(head[1]);
  if (!fps)
    throw ParseError(ParseErrorKind::NonNumeric, reader.line_no, 2,
                     "non-numeric frame rate '" + std::string(trim(head[1])) + "'");
  if (!(*fps > 0.0) || !std::isfinite(*fps))
    throw ParseError(ParseErrorKind::BadFrameRate, reader.line_no, 2,
                     "frame rate must be positive");

  const auto columns = reader.next();
  if (!columns) throw ParseError(ParseErrorKind::MalformedHeader, reader.line_no + 1, 0,
                                 "missing column header");
  const auto layout = parse_column_header(*columns, reader.line_no);

  std::vector<Pose> frames;
  while (const auto line = reader.next()) {
    const auto cells = split(*line, ',');
    if (cells.size() != kPoseDim + 1)
      throw ParseError(ParseErrorKind::ColumnCount, reader.line_no, 0,
                       "expected 48 coordinates, got " +
                           std::to_string(cells.empty() ? 0 : cells.size() - 1));
    parse_cell(cells[0], reader.line_no, 1);
    Pose pose;
    auto coords = pose.coords();
    for (std::size_t c = 1; c < cells.size(); ++c)
      coords[layout[c - 1]] = parse_cell(cells[c], reader.line_no, c + 1);
    frames.push_back(pose);
  }
  if (frames.size() < 2)
    throw ParseError(ParseErrorKind::TooFewFrames, 0, 0,
                     "a gait needs at least 2 frames, got " + std::to_string(frames.size()));
  return Gait(std::move(id), *fps, std::move(frames));
}

Gait parse_json(std::string_view text, std::string fallback_id) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(ParseErrorKind::MalformedHeader, 0, 0, e.what());
  }
  if (!j.is_object() || !j.contains("fps") || !j.contains("frames"))
    throw ParseError(ParseErrorKind::Schema, 0, 0, "expected object with 'fps' and 'frames'");
  if (!j["fps"].is_number())
    throw ParseError(ParseErrorKind::NonNumeric, 0, 0, "'fps' must be a number");
  const double fps = j["fps"].get<double>();
  if (!(fps > 0.0) || !std::isfinite(fps))
    throw ParseError(ParseErrorKind::BadFrameRate, 0, 0, "frame rate must be positive");
  std::string id = std::move(fallback_id);
  if (j.contains("id")) {
    if (!j["id"].is_string()) throw ParseError(ParseErrorKind::Schema, 0, 0, "'id' must be a string");
    id = j["id"].get<std::string>();
  }
  const auto& jf = j["frames"];
  if (!jf.is_array()) throw ParseError(ParseErrorKind::Schema, 0, 0, "'frames' must be an array");
  std::vector<Pose> frames;
  frames.reserve(jf.size());
  for (std::size_t t = 0; t < jf.size(); ++t) {
    const auto& row = jf[t];
    const std::string where = "frame " + std::to_string(t) + ": ";
    if (!row.is_array() || row.size() != kPoseDim)
      throw ParseError(ParseErrorKind::ColumnCount, 0, 0,
                       where + "expected 48 coordinates, got " +
                           std::to_string(row.is_array() ? row.size() : 0));
    Pose pose;
    auto coords = pose.coords();
    for (std::size_t c = 0; c < kPoseDim; ++c) {
      if (!row[c].is_number())
        throw ParseError(ParseErrorKind::NonNumeric, 0, 0,
                         where + "coordinate " + std::to_string(c) + " is not a number");
      coords[c] = row[c].get<double>();
    }
    frames.push_back(pose);
  }
  if (frames.size() < 2)
    throw ParseError(ParseErrorKind::TooFewFrames, 0, 0,
                     "a gait needs at least 2 frames, got " + std::to_string(frames.size()));
  return Gait(std::move(id), fps, std::move(frames));
}

}  // namespace

Gait parse_gait(std::string_view text, GaitFormat format, std::string id) {
  return format == GaitFormat::Csv ? parse_csv(text, std::move(id))
                                   : parse_json(text, std::move(id));
}

std::string serialize_gait(const Gait& g, GaitFormat format) {
  if (format == GaitFormat::Json) {
    nlohmann::json frames = nlohmann::json::array();
    for (const Pose& p : g.frames()) {
      const auto c = p.coords();
      frames.push_back(std::vector<double>(c.begin(), c.end()));
    }
    nlohmann::json j = {{"id", g.id()}, {"fps", g.fps()}, {"frames", std::move(frames)}};
    return j.dump() + "\n";
  }
  std::string out = "fps," + format_double(g.fps()) + "\nt";
  for (std::size_t j = 0; j < kNumJoints; ++j) {
    for (char axis : kAxes) {
      out += ',';
      out += joint_name(static_cast<JointId>(j));
      out += '_';
      out += axis;
    }
  }
  out += '\n';
  for (std::size_t t = 0; t < g.size(); ++t) {
    out += format_double(static_cast<double>(t) / g.fps());
    for (double v : g[t].coords()) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

GaitFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".json" ? GaitFormat::Json : GaitFormat::Csv;
}

Gait read_gait_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_gait(text, format_for_path(path), path.stem().string());
  } catch (const ParseError& e) {
    throw ParseError(e, path.string() + ": ");
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_gait_file(const std::filesystem::path& path, const Gait& g) {
  write_text_file(path, serialize_gait(g, format_for_path(path)));
}

}  // namespace gaitemo
