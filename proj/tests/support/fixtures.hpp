// Shared test fixtures: the vacation-package examples with one and two
// nominal attributes, plus the customer preferences over them.
#pragma once

#include <string>

#include "skypref/core.hpp"
#include "skypref/io.hpp"

namespace skypref::testing {

// package ids
inline constexpr PointId kA = 0, kB = 1, kC = 2, kD = 3, kE = 4, kF = 5;

inline Schema table1_schema() {
  return Schema({{"Price", Direction::kMin}, {"Hotel-class", Direction::kMax}},
                {{"Hotel-group", {"T", "H", "M"}}});
}

/** Six packages over (Price, Hotel-class, Hotel-group). */
inline Dataset table1() {
  Dataset d(table1_schema());
  d.append({kA, {1600, 4}, {0}});  // T
  d.append({kB, {2400, 1}, {0}});  // T
  d.append({kC, {3000, 5}, {1}});  // H
  d.append({kD, {3600, 4}, {1}});  // H
  d.append({kE, {2400, 2}, {2}});  // M
  d.append({kF, {3000, 3}, {2}});  // M
  return d;
}

inline Schema table3_schema() {
  return Schema({{"Price", Direction::kMin}, {"Hotel-class", Direction::kMax}},
                {{"Hotel-group", {"T", "H", "M"}}, {"Airline", {"G", "R", "W"}}});
}

/** Same packages with a second nominal attribute (Airline). */
inline Dataset table3() {
  Dataset d(table3_schema());
  d.append({kA, {1600, 4}, {0, 0}});  // T, G
  d.append({kB, {2400, 1}, {0, 0}});  // T, G
  d.append({kC, {3000, 5}, {1, 0}});  // H, G
  d.append({kD, {3600, 4}, {1, 1}});  // H, R
  d.append({kE, {2400, 2}, {2, 1}});  // M, R
  d.append({kF, {3000, 3}, {2, 2}});  // M, W
  return d;
}

inline ImplicitPreference pref(const Schema& schema, const std::string& text) {
  return parse_pref(text, schema);
}

}  // namespace skypref::testing
