#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hdmitx/config.hpp"

namespace hdmitx {

// Inputs for the output-voltage performance chart. Missing values are
// reported as not evaluated.
struct Measurements {
  std::optional<double> v_off;    // single-ended standby level
  std::optional<double> v_high;
  std::optional<double> v_low;
  std::optional<double> v_swing;  // settled v_high - v_low
  std::optional<double> rise_ps;
  std::optional<double> fall_ps;
  std::optional<double> standby_drop_v;
  std::optional<double> low_band_ratio;
};

// Small tolerance so values that sit exactly on a decimal bound are not
// rejected by binary rounding.
inline constexpr double kBoundSlack = 1e-9;

struct ComplianceItem {
  std::string name;
  std::optional<double> min;
  std::optional<double> max;
  bool max_exclusive = false;
  std::optional<double> achieved;
  std::string unit;
  std::string note;

  bool evaluated() const { return achieved.has_value(); }
  bool pass() const {
    if (!achieved || !std::isfinite(*achieved)) return !achieved;
    if (min && *achieved < *min - kBoundSlack) return false;
    if (max && (max_exclusive ? *achieved >= *max : *achieved > *max + kBoundSlack)) return false;
    return true;
  }
};

struct ComplianceReport {
  std::vector<ComplianceItem> items;
  std::vector<std::string> notes;
  std::vector<std::pair<std::string, std::string>> config;

  bool pass() const {
    for (const auto& i : items) {
      if (!i.pass()) return false;
    }
    return true;
  }
  const ComplianceItem* find(const std::string& name) const {
    for (const auto& i : items) {
      if (i.name == name) return &i;
    }
    return nullptr;
  }
};

inline ComplianceReport compliance_report(const Measurements& m, const ChannelConfig& config) {
  ComplianceReport r;
  r.config = config_entries(config);
  auto add = [&](std::string name, std::optional<double> lo, std::optional<double> hi, std::optional<double> v,
                 std::string unit, bool exclusive = false) -> ComplianceItem& {
    ComplianceItem i;
    i.name = std::move(name);
    i.min = lo;
    i.max = hi;
    i.max_exclusive = exclusive;
    i.achieved = v;
    i.unit = std::move(unit);
    r.items.push_back(std::move(i));
    return r.items.back();
  };
  add("V_off", 3.290, 3.310, m.v_off, "V");
  auto& swing = add("V_swing", 0.400, 0.600, m.v_swing, "V");
  swing.note = "reported 0.660 V would fail this bound; settled V_H - V_L is used";
  add("V_H", 3.290, 3.310, m.v_high, "V");
  add("V_L", 2.700, 2.900, m.v_low, "V");
  add("rise", 75.0, std::nullopt, m.rise_ps, "ps");
  add("fall", 75.0, std::nullopt, m.fall_ps, "ps");
  add("low_band_ratio", std::nullopt, 0.06, m.low_band_ratio, "", true);
  add("standby_drop", std::nullopt, 0.010, m.standby_drop_v, "V");
  for (const auto& i : r.items) {
    if (i.achieved && !std::isfinite(*i.achieved)) r.notes.push_back(i.name + ": non-finite measurement");
  }
  return r;
}

inline nlohmann::ordered_json to_json(const ComplianceReport& r) {
  nlohmann::ordered_json items = nlohmann::ordered_json::array();
  for (const auto& i : r.items) {
    nlohmann::ordered_json j;
    j["item"] = i.name;
    j["min"] = i.min ? nlohmann::ordered_json(*i.min) : nlohmann::ordered_json(nullptr);
    j["max"] = i.max ? nlohmann::ordered_json(*i.max) : nlohmann::ordered_json(nullptr);
    j["achieved"] = i.achieved && std::isfinite(*i.achieved) ? nlohmann::ordered_json(*i.achieved)
                                                             : nlohmann::ordered_json(nullptr);
    j["unit"] = i.unit;
    j["evaluated"] = i.evaluated();
    j["pass"] = i.pass();
    if (!i.note.empty()) j["note"] = i.note;
    items.push_back(std::move(j));
  }
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.config) cfg[k] = v;
  nlohmann::ordered_json out;
  out["pass"] = r.pass();
  out["items"] = std::move(items);
  out["notes"] = r.notes;
  out["config"] = std::move(cfg);
  return out;
}

inline std::string to_table(const ComplianceReport& r) {
  auto num = [](const std::optional<double>& v) -> std::string {
    if (!v) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", *v);
    return buf;
  };
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %12s %12s %12s %-4s %s\n", "item", "min", "max", "achieved", "unit",
                "verdict");
  out += line;
  for (const auto& i : r.items) {
    const char* verdict = !i.evaluated() ? "n/a" : i.pass() ? "PASS" : "FAIL";
    std::snprintf(line, sizeof line, "%-16s %12s %12s %12s %-4s %s\n", i.name.c_str(), num(i.min).c_str(),
                  num(i.max).c_str(), num(i.achieved).c_str(), i.unit.c_str(), verdict);
    out += line;
    if (!i.note.empty()) out += "    note: " + i.note + "\n";
  }
  for (const auto& n : r.notes) out += "note: " + n + "\n";
  out += std::string("overall: ") + (r.pass() ? "PASS" : "FAIL") + "\n";
  return out;
}

}  // namespace hdmitx
