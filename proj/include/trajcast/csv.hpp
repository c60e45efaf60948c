#pragma once

#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "trajcast/geo.hpp"

namespace trajcast {

struct RawTripRecord {
  std::string trip_id;
  std::vector<GpsPoint> polyline;
};

// Streaming reader for the ECML-PKDD taxi CSV. Only TRIP_ID (optional) and
// POLYLINE are consumed; malformed rows are counted and skipped.
class PortoCsvReader {
 public:
  // Reads the header row; throws FormatError when POLYLINE is missing.
  explicit PortoCsvReader(std::istream& in);

  std::optional<RawTripRecord> next();

  std::size_t rows_read() const { return rows_read_; }
  std::size_t malformed_count() const { return malformed_; }

 private:
  std::optional<std::vector<std::string>> read_row();

  std::istream& in_;
  std::size_t polyline_col_ = 0;
  std::optional<std::size_t> trip_id_col_;
  std::size_t rows_read_ = 0;
  std::size_t malformed_ = 0;
};

// One CSV record (handles quoted fields, embedded commas/newlines and
// doubled quotes); nullopt at end of stream.
std::optional<std::vector<std::string>> read_csv_record(std::istream& in);

// "[[lon,lat],...]" -> points; throws FormatError on anything malformed.
std::vector<GpsPoint> parse_polyline(const std::string& text);

}  // namespace trajcast
