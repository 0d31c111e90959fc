#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "hdmitx/error.hpp"
#include "hdmitx/rational.hpp"

namespace hdmitx {

enum class EdgeModel { Exponential, RaisedCosine };

// Output stage. Defaults reproduce the reported single-ended levels with a
// 50 ohm remote termination.
struct DriverParams {
  double avcc_v = 3.3;
  double r_term_ohm = 50.0;
  double i_sink_a = (3.299 - 2.8019) / 50.0;  // 9.942 mA
  double i_standby_a = (3.3 - 3.299) / 50.0;  // 20 uA
  double i_bias_a = 534.3e-9;
  double v_bias_v = 2.8;
  double t_rf_ps = 104.0;  // 20%-80%
  EdgeModel edge_model = EdgeModel::Exponential;

  double standby_drop_v() const { return i_standby_a * r_term_ohm; }
  double high_level_v() const { return avcc_v - i_standby_a * r_term_ohm; }
  // Standby current keeps flowing while the sink is on.
  double low_level_v() const { return avcc_v - (i_sink_a + i_standby_a) * r_term_ohm; }

  friend bool operator==(const DriverParams&, const DriverParams&) = default;
};

// Supply current: quiescent core draw plus a triangular spike per pre-driver
// transition.
struct SpikeModel {
  double q_c = 50e-15;
  double w_ps = 60.0;
  double i_dc_a = 1.005e-3;

  friend bool operator==(const SpikeModel&, const SpikeModel&) = default;
};

struct MaskVertex {
  double x_ui = 0.0;  // relative to eye centre, fraction of UI
  double v = 0.0;     // differential volts

  friend bool operator==(const MaskVertex&, const MaskVertex&) = default;
};

// Placeholder keep-out hexagon; not an HDMI compliance mask.
inline std::vector<MaskVertex> default_mask() {
  return {{-0.25, 0.0}, {-0.15, 0.2}, {0.15, 0.2}, {0.25, 0.0}, {0.15, -0.2}, {-0.15, -0.2}};
}

struct EyeSettings {
  int bins_t = 128;
  int bins_v = 128;
  double v_min = -0.75;
  double v_max = 0.75;
  std::vector<MaskVertex> mask = default_mask();

  friend bool operator==(const EyeSettings&, const EyeSettings&) = default;
};

struct ChannelConfig {
  double serial_rate_hz = 1.65e9;
  int word_width = 10;
  std::int64_t dt_ps = 10;
  std::int64_t ff_delay_ps = 30;
  std::int64_t buffer_delay_ps = 15;
  std::int64_t skew_ps = 20;
  int fo4_stages = 4;
  int max_delta_iterations = 1000;
  int horizon_words = 1000;
  std::uint64_t seed = 1;
  double f_cut_hz = 5e8;
  DriverParams driver;
  SpikeModel spike;
  EyeSettings eye;

  Rational bit_period() const { return bit_period_from_rate(serial_rate_hz); }
  TimeBase timebase() const { return TimeBase{bit_period()}; }
  // Two pixel periods, truncated to whole ps.
  std::int64_t protocol_bound_ps() const { return (bit_period() * (2 * word_width)).floor(); }

  friend bool operator==(const ChannelConfig&, const ChannelConfig&) = default;
};

// Checks the digital-netlist parameters only.
inline void validate_logic(const ChannelConfig& c) {
  const Rational p = c.bit_period();
  if (c.word_width != 8 && c.word_width != 10 && c.word_width != 16) {
    throw ConfigError("word_width must be 8, 10 or 16");
  }
  if (c.ff_delay_ps <= 0) throw ConfigError("ff_delay_ps must be > 0");
  if (c.buffer_delay_ps <= 0) throw ConfigError("buffer_delay_ps must be > 0");
  if (c.fo4_stages <= 0) throw ConfigError("fo4_stages must be > 0");
  if (c.skew_ps < 0) throw ConfigError("skew_ps must be >= 0");
  if (!(Rational{2 * c.skew_ps} < p)) throw ConfigError("skew_ps must be below half the serial period");
  if (c.max_delta_iterations < 1) throw ConfigError("max_delta_iterations must be >= 1");
  // Sel10 -> FO4 -> Start must settle inside one period.
  const std::int64_t path = c.buffer_delay_ps + c.ff_delay_ps + c.fo4_stages * c.buffer_delay_ps + c.ff_delay_ps;
  if (!(Rational{path} < p)) throw ConfigError("gate delays exceed the serial period timing budget");
}

inline void validate(const ChannelConfig& c) {
  validate_logic(c);
  const Rational p = c.bit_period();
  if (c.dt_ps <= 0) throw ConfigError("dt_ps must be > 0");
  if (Rational{32 * c.dt_ps} > p) throw ConfigError("dt_ps must give at least 32 samples per bit");
  const auto& d = c.driver;
  if (!(d.avcc_v > 0)) throw ConfigError("driver.avcc_v must be > 0");
  if (!(d.r_term_ohm > 0)) throw ConfigError("driver.r_term_ohm must be > 0");
  if (d.i_sink_a < 0 || d.i_standby_a < 0 || d.i_bias_a < 0) throw ConfigError("driver currents must be >= 0");
  if (d.t_rf_ps < 0) throw ConfigError("driver.t_rf_ps must be >= 0");
  if (d.standby_drop_v() > 0.010 + 1e-12) throw ConfigError("standby drop i_standby*r_term exceeds 10 mV");
  if (c.spike.q_c < 0 || !(c.spike.w_ps > 0) || c.spike.i_dc_a < 0) throw ConfigError("invalid spike model");
  if (c.eye.bins_t < 64 || c.eye.bins_v < 64) throw ConfigError("eye bins must be >= 64");
  if (!(c.eye.v_max > c.eye.v_min)) throw ConfigError("eye voltage range empty");
  if (c.eye.mask.size() < 3) throw ConfigError("eye mask needs at least 3 vertices");
  if (!(c.f_cut_hz > 0)) throw ConfigError("f_cut_hz must be > 0");
  if (c.horizon_words < 1) throw ConfigError("horizon_words must be >= 1");
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string format_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T out{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto r = std::from_chars(first, last, out);
  if (r.ec != std::errc{} || r.ptr != last) throw ConfigError("bad value for '" + key + "': '" + text + "'");
  return out;
}

inline std::string format_mask(const std::vector<MaskVertex>& m) {
  std::string s;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) s += ';';
    s += format_double(m[i].x_ui) + ':' + format_double(m[i].v);
  }
  return s;
}

inline std::vector<MaskVertex> parse_mask(const std::string& text) {
  std::vector<MaskVertex> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("mask vertex needs x:v, got '" + item + "'");
    out.push_back({parse_number<double>("eye.mask", trim(item.substr(0, colon))),
                   parse_number<double>("eye.mask", trim(item.substr(colon + 1)))});
  }
  return out;
}

struct Field {
  const char* key;
  std::function<std::string(const ChannelConfig&)> get;
  std::function<void(ChannelConfig&, const std::string&)> set;
};

template <typename T, typename Member>
Field number_field(const char* key, Member m) {
  return {key,
          [m](const ChannelConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return format_double(std::invoke(m, c));
            else return std::to_string(std::invoke(m, c));
          },
          [m, key](ChannelConfig& c, const std::string& v) { std::invoke(m, c) = parse_number<T>(key, v); }};
}

inline const std::vector<Field>& config_fields() {
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    f.push_back(number_field<double>("serial_rate_hz", [](auto& c) -> auto& { return c.serial_rate_hz; }));
    f.push_back(number_field<int>("word_width", [](auto& c) -> auto& { return c.word_width; }));
    f.push_back(number_field<std::int64_t>("dt_ps", [](auto& c) -> auto& { return c.dt_ps; }));
    f.push_back(number_field<std::int64_t>("ff_delay_ps", [](auto& c) -> auto& { return c.ff_delay_ps; }));
    f.push_back(number_field<std::int64_t>("buffer_delay_ps", [](auto& c) -> auto& { return c.buffer_delay_ps; }));
    f.push_back(number_field<std::int64_t>("skew_ps", [](auto& c) -> auto& { return c.skew_ps; }));
    f.push_back(number_field<int>("fo4_stages", [](auto& c) -> auto& { return c.fo4_stages; }));
    f.push_back(number_field<int>("max_delta_iterations", [](auto& c) -> auto& { return c.max_delta_iterations; }));
    f.push_back(number_field<int>("horizon_words", [](auto& c) -> auto& { return c.horizon_words; }));
    f.push_back(number_field<std::uint64_t>("seed", [](auto& c) -> auto& { return c.seed; }));
    f.push_back(number_field<double>("spectrum.f_cut_hz", [](auto& c) -> auto& { return c.f_cut_hz; }));
    f.push_back(number_field<double>("driver.avcc_v", [](auto& c) -> auto& { return c.driver.avcc_v; }));
    f.push_back(number_field<double>("driver.r_term_ohm", [](auto& c) -> auto& { return c.driver.r_term_ohm; }));
    f.push_back(number_field<double>("driver.i_sink_a", [](auto& c) -> auto& { return c.driver.i_sink_a; }));
    f.push_back(number_field<double>("driver.i_standby_a", [](auto& c) -> auto& { return c.driver.i_standby_a; }));
    f.push_back(number_field<double>("driver.i_bias_a", [](auto& c) -> auto& { return c.driver.i_bias_a; }));
    f.push_back(number_field<double>("driver.v_bias_v", [](auto& c) -> auto& { return c.driver.v_bias_v; }));
    f.push_back(number_field<double>("driver.t_rf_ps", [](auto& c) -> auto& { return c.driver.t_rf_ps; }));
    f.push_back({"driver.edge_model",
                 [](const ChannelConfig& c) {
                   return std::string(c.driver.edge_model == EdgeModel::Exponential ? "exponential" : "raised_cosine");
                 },
                 [](ChannelConfig& c, const std::string& v) {
                   if (v == "exponential") c.driver.edge_model = EdgeModel::Exponential;
                   else if (v == "raised_cosine") c.driver.edge_model = EdgeModel::RaisedCosine;
                   else throw ConfigError("driver.edge_model must be exponential or raised_cosine");
                 }});
    f.push_back(number_field<double>("spike.q_c", [](auto& c) -> auto& { return c.spike.q_c; }));
    f.push_back(number_field<double>("spike.w_ps", [](auto& c) -> auto& { return c.spike.w_ps; }));
    f.push_back(number_field<double>("spike.i_dc_a", [](auto& c) -> auto& { return c.spike.i_dc_a; }));
    f.push_back(number_field<int>("eye.bins_t", [](auto& c) -> auto& { return c.eye.bins_t; }));
    f.push_back(number_field<int>("eye.bins_v", [](auto& c) -> auto& { return c.eye.bins_v; }));
    f.push_back(number_field<double>("eye.v_min", [](auto& c) -> auto& { return c.eye.v_min; }));
    f.push_back(number_field<double>("eye.v_max", [](auto& c) -> auto& { return c.eye.v_max; }));
    f.push_back({"eye.mask", [](const ChannelConfig& c) { return format_mask(c.eye.mask); },
                 [](ChannelConfig& c, const std::string& v) { c.eye.mask = parse_mask(v); }});
    return f;
  }();
  return fields;
}

}  // namespace detail

// Flat `key = value` text, one key per line in a fixed order.
inline std::string serialize_config(const ChannelConfig& c) {
  std::string out;
  for (const auto& f : detail::config_fields()) {
    out += f.key;
    out += " = ";
    out += f.get(c);
    out += '\n';
  }
  return out;
}

inline std::vector<std::pair<std::string, std::string>> config_entries(const ChannelConfig& c) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : detail::config_fields()) out.emplace_back(f.key, f.get(c));
  return out;
}

// Unlisted keys keep their defaults. Does not validate.
inline ChannelConfig parse_config(std::string_view text) {
  ChannelConfig c;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    bool found = false;
    for (const auto& f : detail::config_fields()) {
      if (key == f.key) {
        f.set(c, value);
        found = true;
        break;
      }
    }
    if (!found) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  return c;
}

inline ChannelConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace hdmitx
