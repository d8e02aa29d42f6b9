#include "mvref/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <string_view>

namespace mvref {
namespace {

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& msg) {
  throw Error(ErrorKind::ParseError, source + ":" + std::to_string(line) + ": " + msg);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::size_t parse_id(std::string_view s, const std::string& source, std::size_t line) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v == 0) {
    fail(source, line, "expected a positive integer id, got '" + std::string(s) + "'");
  }
  return v;
}

double parse_real(std::string_view s, const std::string& source, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    fail(source, line, "expected a finite number, got '" + std::string(s) + "'");
  }
  return v;
}

std::string format6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

template <class Fn>
void for_each_row(std::istream& in, const std::string& source, std::string_view header,
                  std::size_t fields, Fn&& fn) {
  std::string text;
  std::size_t line = 0;
  bool seen_header = false;
  while (std::getline(in, text)) {
    ++line;
    const std::string_view row = trim(text);
    if (row.empty()) continue;
    if (!seen_header) {
      if (row != header) fail(source, line, "expected header '" + std::string(header) + "'");
      seen_header = true;
      continue;
    }
    const auto cols = split(row);
    if (cols.size() != fields) {
      fail(source, line, "expected " + std::to_string(fields) + " fields, got " + std::to_string(cols.size()));
    }
    fn(cols, line);
  }
  if (!seen_header) fail(source, line, "missing header");
}

}  // namespace

void write_correspondences(std::ostream& out, const ObservationGrid& grid) {
  out << "point_id,view_id,u,v\n";
  for (std::size_t m = 0; m < grid.num_points(); ++m) {
    for (std::size_t n = 0; n < grid.num_views(); ++n) {
      const Pixel2& p = grid(m, n);
      out << m + 1 << ',' << n + 1 << ',';
      if (p.observed) {
        out << format6(p.u) << ',' << format6(p.v) << '\n';
      } else {
        out << "-1,-1\n";
      }
    }
  }
}

void write_correspondences_file(const std::string& path, const ObservationGrid& grid) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  write_correspondences(out, grid);
}

ObservationGrid read_correspondences(std::istream& in, const std::string& source) {
  struct Row {
    std::size_t point, view;
    double u, v;
  };
  std::vector<Row> rows;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::size_t points = 0, views = 0;
  for_each_row(in, source, "point_id,view_id,u,v", 4, [&](const auto& cols, std::size_t line) {
    Row r{parse_id(cols[0], source, line), parse_id(cols[1], source, line),
          parse_real(cols[2], source, line), parse_real(cols[3], source, line)};
    if (!seen.emplace(r.point, r.view).second) {
      fail(source, line, "duplicate entry for point " + std::to_string(r.point) + ", view " +
                             std::to_string(r.view));
    }
    points = std::max(points, r.point);
    views = std::max(views, r.view);
    rows.push_back(r);
  });
  std::set<std::size_t> point_ids, view_ids;
  for (const auto& [m, n] : seen) {
    point_ids.insert(m);
    view_ids.insert(n);
  }
  if (point_ids.size() != points || view_ids.size() != views) {
    throw Error(ErrorKind::ParseError, source + ": point and view ids must be contiguous from 1");
  }
  ObservationGrid grid(points, views);
  for (const auto& r : rows) {
    grid(r.point - 1, r.view - 1) =
        (r.u == -1.0 && r.v == -1.0) ? Pixel2::missing() : Pixel2::at(r.u, r.v);
  }
  return grid;
}

ObservationGrid read_correspondences_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, path + ": cannot open");
  return read_correspondences(in, path);
}

void write_index_list(std::ostream& out, const std::vector<ImageIndex>& items) {
  out << "point_id,view_id\n";
  for (const auto& i : items) out << i.point + 1 << ',' << i.view + 1 << '\n';
}

std::vector<ImageIndex> read_index_list(std::istream& in, const std::string& source) {
  std::vector<ImageIndex> out;
  for_each_row(in, source, "point_id,view_id", 2, [&](const auto& cols, std::size_t line) {
    out.push_back({parse_id(cols[1], source, line) - 1, parse_id(cols[0], source, line) - 1});
  });
  return out;
}

}  // namespace mvref
