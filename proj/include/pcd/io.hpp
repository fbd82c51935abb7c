#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "pcd/inference.hpp"
#include "pcd/simulation.hpp"

namespace pcd {

// Two-column x,y CSV; optional header row, '#' comment lines, LF or CRLF.
std::vector<Point2> read_points_csv(const std::string& path);
std::vector<Point2> parse_points_csv(std::string_view text, const std::string& origin);

void write_points_csv(const std::string& path, std::span<const Point2> pts,
                      const std::string& meta_comment = "");

nlohmann::json triangulation_json(const Triangulation& tri);
nlohmann::json domination_json(const DominationResult& dom);
nlohmann::json test_result_json(const TestResult& result);

// FNV-1a, used to stamp outputs with a config hash.
std::uint64_t fnv1a(std::string_view data);
std::string hex64(std::uint64_t v);

} // namespace pcd
