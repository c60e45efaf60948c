#include "trajcast/csv.hpp"

#include <cmath>

#include <json.hpp>

#include "trajcast/errors.hpp"

namespace trajcast {

std::optional<std::vector<std::string>> read_csv_record(std::istream& in) {
  if (in.peek() == std::char_traits<char>::eof()) return std::nullopt;
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool saw_any = false;
  int ch;
  while ((ch = in.get()) != std::char_traits<char>::eof()) {
    saw_any = true;
    const char c = static_cast<char>(ch);
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      break;
    } else if (c == '\r') {
      if (in.peek() == '\n') in.get();
      break;
    } else {
      field.push_back(c);
    }
  }
  if (!saw_any) return std::nullopt;
  fields.push_back(std::move(field));
  return fields;
}

std::vector<GpsPoint> parse_polyline(const std::string& text) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("polyline is not valid JSON: ") + e.what());
  }
  if (!parsed.is_array()) throw FormatError("polyline is not an array");
  std::vector<GpsPoint> points;
  points.reserve(parsed.size());
  for (const auto& pair : parsed) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
        !pair[1].is_number()) {
      throw FormatError("polyline entry is not a [lon, lat] number pair");
    }
    GpsPoint p{pair[0].get<double>(), pair[1].get<double>()};
    if (!std::isfinite(p.lon) || !std::isfinite(p.lat)) {
      throw FormatError("polyline contains a non-finite coordinate");
    }
    points.push_back(p);
  }
  return points;
}

PortoCsvReader::PortoCsvReader(std::istream& in) : in_(in) {
  auto header = read_csv_record(in_);
  if (!header) throw FormatError("empty CSV: no header row");
  bool found = false;
  for (std::size_t i = 0; i < header->size(); ++i) {
    if ((*header)[i] == "POLYLINE") {
      polyline_col_ = i;
      found = true;
    } else if ((*header)[i] == "TRIP_ID") {
      trip_id_col_ = i;
    }
  }
  if (!found) throw FormatError("CSV header has no POLYLINE column");
}

std::optional<RawTripRecord> PortoCsvReader::next() {
  while (auto row = read_csv_record(in_)) {
    if (row->size() == 1 && (*row)[0].empty()) continue;  // blank line
    ++rows_read_;
    if (polyline_col_ >= row->size()) {
      ++malformed_;
      continue;
    }
    RawTripRecord rec;
    rec.trip_id = trip_id_col_ && *trip_id_col_ < row->size()
                      ? (*row)[*trip_id_col_]
                      : "row" + std::to_string(rows_read_);
    try {
      rec.polyline = parse_polyline((*row)[polyline_col_]);
    } catch (const FormatError&) {
      ++malformed_;
      continue;
    }
    return rec;
  }
  return std::nullopt;
}

}  // namespace trajcast
