#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mvref/grid.hpp"

namespace mvref {

/// CSV long format: header `point_id,view_id,u,v`, 1-based ids, one row per
/// (point, view), missing points written as -1,-1. Coordinates use 6 decimals.
void write_correspondences(std::ostream& out, const ObservationGrid& grid);
void write_correspondences_file(const std::string& path, const ObservationGrid& grid);

/// Parses the CSV format. Rows may come in any order; pairs never listed are
/// missing. Throws ParseError with "<source>:<line>: ..." on malformed input.
ObservationGrid read_correspondences(std::istream& in, const std::string& source = "<input>");
ObservationGrid read_correspondences_file(const std::string& path);

/// `point_id,view_id` rows, 1-based.
void write_index_list(std::ostream& out, const std::vector<ImageIndex>& items);
std::vector<ImageIndex> read_index_list(std::istream& in, const std::string& source = "<input>");

}  // namespace mvref
