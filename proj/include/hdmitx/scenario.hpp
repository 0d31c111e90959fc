#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hdmitx/analog.hpp"
#include "hdmitx/channel.hpp"
#include "hdmitx/compliance.hpp"
#include "hdmitx/config.hpp"
#include "hdmitx/eye.hpp"
#include "hdmitx/measure.hpp"
#include "hdmitx/prbs.hpp"
#include "hdmitx/protocol.hpp"
#include "hdmitx/serializer.hpp"
#include "hdmitx/spectrum.hpp"
#include "hdmitx/stimulus.hpp"
#include "hdmitx/vcd.hpp"
#include "hdmitx/word.hpp"

namespace hdmitx {

enum class DataSource { Random, Prbs7, Prbs10, Fixed, File };

inline const char* source_name(DataSource s) {
  switch (s) {
    case DataSource::Random: return "random";
    case DataSource::Prbs7: return "prbs7";
    case DataSource::Prbs10: return "prbs10";
    case DataSource::Fixed: return "fixed";
    case DataSource::File: return "file";
  }
  return "?";
}

// Artifact kinds a scenario may request.
inline const std::set<std::string>& known_outputs() {
  static const std::set<std::string> k{"vcd", "eye", "spectrum", "report", "tx", "current", "bits"};
  return k;
}

// A schedule action time is either absolute ps or a clock cycle index
// ("c23"), which resolves to a quarter period after that falling edge.
struct ActionSpec {
  ProtocolAction action = ProtocolAction::EnablePulse;
  std::int64_t at = 0;
  bool cycle = false;
  std::int64_t width_ps = 0;

  friend bool operator==(const ActionSpec&, const ActionSpec&) = default;
};

struct Scenario {
  std::string name = "scenario";
  DataSource source = DataSource::Random;
  std::string word;       // fixed source
  std::string word_file;  // file source
  std::optional<std::size_t> words;
  std::optional<std::uint64_t> seed;
  // Empty means power-on reset followed by one enable pulse.
  std::vector<ActionSpec> schedule;
  // Fixed simulation end; otherwise the run ends after the last data round.
  std::optional<std::int64_t> horizon_ps;
  std::set<std::string> outputs{"vcd", "eye", "spectrum", "report"};

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

inline ProtocolSchedule resolve_schedule(const Scenario& s, const ChannelConfig& c) {
  if (s.schedule.empty()) return reset_and_enable(c);
  ProtocolSchedule out;
  for (const auto& a : s.schedule) {
    out.actions.push_back({a.cycle ? action_time(c, a.at) : a.at, a.action, a.width_ps});
  }
  return out;
}

inline bool has_enable(const ProtocolSchedule& s) {
  return std::any_of(s.actions.begin(), s.actions.end(),
                     [](const ScheduledAction& a) { return a.action == ProtocolAction::EnablePulse; });
}

// Words for the scenario; `base_dir` resolves relative word-file paths.
inline std::vector<Word> scenario_words(const Scenario& s, const ChannelConfig& c, const std::string& base_dir = "") {
  const std::size_t n = s.words.value_or(static_cast<std::size_t>(c.horizon_words));
  const std::uint64_t seed = s.seed.value_or(c.seed);
  switch (s.source) {
    case DataSource::Random: return random_words(n, seed, c.word_width);
    case DataSource::Prbs7:
    case DataSource::Prbs10: {
      if (seed > 0xFFFFFFFFULL) throw InvalidSeedError("LFSR seed exceeds 32 bits");
      const auto kind = s.source == DataSource::Prbs7 ? PrbsKind::Prbs7 : PrbsKind::Prbs10;
      return gen_prbs(kind, n, static_cast<std::uint32_t>(seed), c.word_width);
    }
    case DataSource::Fixed: {
      const Word w = Word::from_string(s.word);
      if (w.width() != c.word_width) throw ConfigError("fixed word width does not match word_width");
      return std::vector<Word>(n, w);
    }
    case DataSource::File: {
      std::filesystem::path p(s.word_file);
      if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
      auto w = load_word_file(p.string(), c.word_width);
      if (s.words && *s.words < w.size()) w.resize(*s.words);
      return w;
    }
  }
  return {};
}

inline std::vector<std::string> builtin_scenario_names() {
  return {"stream-random", "stream-prbs7", "stream-prbs10", "standby", "disable-midword"};
}

inline Scenario builtin_scenario(const std::string& name, const ChannelConfig& c) {
  Scenario s;
  s.name = name;
  const std::int64_t n = c.word_width;
  if (name == "stream-random") return s;
  if (name == "stream-prbs7" || name == "stream-prbs10") {
    s.source = name == "stream-prbs7" ? DataSource::Prbs7 : DataSource::Prbs10;
    s.seed = name == "stream-prbs7" ? 0x7F : 0x3FF;
    return s;
  }
  if (name == "standby") {
    s.schedule = {{ProtocolAction::DisableAssert, 1, true, 0}, {ProtocolAction::DisableRelease, 1 + 2 * n, true, 0}};
    s.horizon_ps = c.timebase().falling(3 + 2 * n + 20 * n);
    s.outputs = {"vcd", "eye", "report"};
    return s;
  }
  if (name == "disable-midword") {
    // Five data rounds, then disable halfway through a word, then re-enable.
    const std::int64_t en = 3 + 2 * n;
    const std::int64_t dis = en + 1 + 5 * n + n / 2;
    s.words = 20;
    s.schedule = {{ProtocolAction::DisableAssert, 1, true, 0},
                  {ProtocolAction::DisableRelease, 1 + 2 * n, true, 0},
                  {ProtocolAction::EnablePulse, en, true, 0},
                  {ProtocolAction::DisableAssert, dis, true, 0},
                  {ProtocolAction::DisableRelease, dis + 2 * n, true, 0},
                  {ProtocolAction::EnablePulse, dis + 2 * n + 2, true, 0}};
    s.horizon_ps = c.timebase().falling(dis + 2 * n + 2 + 6 * n);
    s.outputs = {"vcd", "report"};
    return s;
  }
  throw ConfigError("unknown scenario '" + name + "'");
}

namespace detail {

inline std::int64_t parse_int(const std::string& key, const std::string& v) {
  const bool hex = v.size() > 2 && v[0] == '0' && (v[1] == 'x' || v[1] == 'X');
  const char* b = v.data() + (hex ? 2 : 0);
  const char* e = v.data() + v.size();
  std::int64_t out = 0;
  const auto r = std::from_chars(b, e, out, hex ? 16 : 10);
  if (v.empty() || r.ec != std::errc{} || r.ptr != e) throw ConfigError("bad integer for '" + key + "': " + v);
  return out;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

// ACTION@T[:WIDTH], T = integer ps or cN.
inline ActionSpec parse_action_spec(const std::string& item) {
  const auto at = item.find('@');
  if (at == std::string::npos) throw ConfigError("schedule item '" + item + "' lacks '@'");
  ActionSpec a;
  try {
    a.action = parse_action(trim(item.substr(0, at)));
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
  std::string when = trim(item.substr(at + 1));
  const auto colon = when.find(':');
  if (colon != std::string::npos) {
    if (a.action != ProtocolAction::EnablePulse) throw ConfigError("only ENABLE_PULSE takes a width");
    a.width_ps = parse_int("schedule", trim(when.substr(colon + 1)));
    if (a.width_ps <= 0) throw ConfigError("enable width must be > 0");
    when = trim(when.substr(0, colon));
  }
  if (!when.empty() && when[0] == 'c') {
    a.cycle = true;
    when.erase(0, 1);
  }
  a.at = parse_int("schedule", when);
  if (a.at < 0) throw ConfigError("schedule times must be >= 0");
  return a;
}

}  // namespace detail

// Flat `key = value` form, '#' comments.
inline Scenario parse_scenario(std::string_view text) {
  Scenario s;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("scenario line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(body.substr(0, eq));
    const std::string v = detail::trim(body.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError("scenario key '" + key + "' repeated");
    if (key == "name") {
      if (v.empty() || v.find_first_of("/\\ ") != std::string::npos) throw ConfigError("bad scenario name '" + v + "'");
      s.name = v;
    } else if (key == "source") {
      if (v == "random") s.source = DataSource::Random;
      else if (v == "prbs7") s.source = DataSource::Prbs7;
      else if (v == "prbs10") s.source = DataSource::Prbs10;
      else if (v == "fixed") s.source = DataSource::Fixed;
      else if (v == "file") s.source = DataSource::File;
      else throw ConfigError("unknown source '" + v + "'");
    } else if (key == "word") {
      s.word = v;
    } else if (key == "word_file") {
      s.word_file = v;
    } else if (key == "words") {
      const auto n = detail::parse_int(key, v);
      if (n < 1) throw ConfigError("words must be >= 1");
      s.words = static_cast<std::size_t>(n);
    } else if (key == "seed") {
      s.seed = static_cast<std::uint64_t>(detail::parse_int(key, v));
    } else if (key == "schedule") {
      s.schedule.clear();
      for (const auto& item : detail::split(v, ',')) s.schedule.push_back(detail::parse_action_spec(item));
    } else if (key == "horizon_ps") {
      s.horizon_ps = detail::parse_int(key, v);
      if (*s.horizon_ps <= 0) throw ConfigError("horizon_ps must be > 0");
    } else if (key == "outputs") {
      s.outputs.clear();
      for (const auto& o : detail::split(v, ',')) {
        if (!known_outputs().count(o)) throw ConfigError("unknown output '" + o + "'");
        s.outputs.insert(o);
      }
    } else {
      throw ConfigError("unknown scenario key '" + key + "'");
    }
  }
  if (s.source == DataSource::Fixed && s.word.empty()) throw ConfigError("fixed source needs 'word'");
  if (s.source == DataSource::File && s.word_file.empty()) throw ConfigError("file source needs 'word_file'");
  return s;
}

// NAME of a built-in, or a path to a scenario file.
inline Scenario load_scenario(const std::string& name_or_path, const ChannelConfig& c, std::string* base_dir = nullptr) {
  const auto names = builtin_scenario_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end()) return builtin_scenario(name_or_path, c);
  std::ifstream f(name_or_path, std::ios::binary);
  if (!f) throw ConfigError("unknown scenario '" + name_or_path + "' (not a built-in and not a readable file)");
  std::stringstream ss;
  ss << f.rdbuf();
  if (base_dir) *base_dir = std::filesystem::path(name_or_path).parent_path().string();
  return parse_scenario(ss.str());
}

// Everything a scenario produces. `files` maps artifact names to contents
// and is written verbatim, so identical runs give identical bytes.
struct ArtifactSet {
  std::string name;
  std::map<std::string, std::string> files;
  ComplianceReport report;
  ProtocolVerdict protocol;
  std::optional<EyeHistogram> eye;
  std::optional<double> low_band_ratio;
  std::size_t bits = 0;
  bool pass = false;
};

namespace detail {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

inline ComplianceItem check_item(std::string name, std::optional<double> lo, std::optional<double> hi, double v,
                                 std::string unit = "") {
  ComplianceItem i;
  i.name = std::move(name);
  i.min = lo;
  i.max = hi;
  i.achieved = v;
  i.unit = std::move(unit);
  return i;
}

}  // namespace detail

// Runs logic-core, serializer checks, analog synthesis and analysis.
// Artifacts are restricted to `formats` when non-empty ("vcd", "csv", "json").
inline ArtifactSet run_scenario(const ChannelConfig& config, const Scenario& sc, const std::string& base_dir = "",
                                const std::set<std::string>& formats = {}) {
  validate(config);
  const auto wants = [&](const std::string& out, const std::string& fmt) {
    return sc.outputs.count(out) && (formats.empty() || formats.count(fmt));
  };
  ArtifactSet art;
  art.name = sc.name;
  const ProtocolSchedule schedule = resolve_schedule(sc, config);
  schedule.validate();
  const bool enabled = has_enable(schedule);
  const bool streaming = enabled && !sc.horizon_ps;
  if (!enabled && !sc.horizon_ps) throw ConfigError("a schedule without ENABLE_PULSE needs horizon_ps");
  const std::vector<Word> words = enabled ? scenario_words(sc, config, base_dir) : std::vector<Word>{};
  if (enabled && words.empty()) throw ConfigError("scenario has no words");

  const ChannelNetlist ch = detail::stage("logic-core", [&] { return build_channel(config); });
  const StreamRun run = detail::stage("logic-core", [&] {
    return streaming ? simulate_stream(ch, schedule, words) : simulate_schedule(ch, schedule, words, *sc.horizon_ps);
  });

  art.protocol = detail::stage("serializer-model", [&] { return check_protocol(run.traces, schedule, config); });
  std::optional<BitStream> serial;
  std::size_t mismatches = 0;
  if (streaming) {
    serial = detail::stage("serializer-model", [&] { return extract_serial(run.traces, config); });
    const BitStream golden = golden_serialize(words, config.bit_period());
    const std::size_t n = std::min(golden.size(), serial->size());
    for (std::size_t i = 0; i < n; ++i) mismatches += golden.bits[i] != serial->bits[i];
    mismatches += std::max(golden.size(), serial->size()) - n;
    art.bits = serial->size();
  }

  const TxPair tx = detail::stage("analog-front", [&] {
    return synthesize_tx(run.traces, config.driver, config.dt_ps, config.bit_period(), 0, run.horizon_ps);
  });
  const CurrentTrace current = detail::stage("analog-front", [&] {
    return supply_current(line_transitions(run.traces), config.spike, config.dt_ps, 0, tx.tx_plus.size());
  });

  detail::stage("analysis", [&] {
    Measurements m;
    // Standby level: everything before the first enable, or the whole run.
    std::int64_t standby_end = run.horizon_ps;
    for (const auto& a : schedule.actions) {
      if (a.action == ProtocolAction::EnablePulse) {
        standby_end = a.time_ps;
        break;
      }
    }
    const auto off_p = measure_levels(tx.tx_plus.slice(0, standby_end));
    const auto off_m = measure_levels(tx.tx_minus.slice(0, standby_end));
    m.v_off = std::min(off_p.v_low, off_m.v_low);
    m.standby_drop_v = config.driver.avcc_v - *m.v_off;

    EyeGeometry geo{config.eye.bins_t, config.eye.bins_v, config.eye.v_min, config.eye.v_max,
                    centred_fold_origin(config.bit_period(), ch.line_offset_ps())};
    std::vector<ComplianceItem> extra;
    std::vector<std::string> notes;
    if (streaming) {
      const std::int64_t begin = serial->start_time_ps();
      const auto p = tx.tx_plus.slice(begin, run.horizon_ps);
      const auto n = tx.tx_minus.slice(begin, run.horizon_ps);
      const Levels lv = measure_levels(p);
      m.v_high = lv.v_high;
      m.v_low = lv.v_low;
      m.v_swing = lv.swing;
      m.rise_ps = measure_edge(p, EdgeKind::Rise);
      m.fall_ps = measure_edge(p, EdgeKind::Fall);
      if (Rational{static_cast<std::int64_t>(p.size()) * p.dt_ps} >= config.bit_period() * 100) {
        art.eye = build_eye(p, n, config.bit_period(), geo);
        const MaskResult mr = mask_check(*art.eye, EyeMask{config.eye.mask});
        extra.push_back(detail::check_item("eye_mask_margin", 0.0, std::nullopt, mr.margin_v, "V"));
        extra.back().note = "placeholder keep-out mask, not a compliance mask";
      } else {
        notes.push_back("run shorter than 100 UI; eye and mask not evaluated");
      }
      extra.push_back(detail::check_item("serial_mismatches", std::nullopt, 0.0, static_cast<double>(mismatches)));

      const auto window = power_of_two_window(current, begin, run.horizon_ps);
      const Spectrum spec = spectrum(window);
      try {
        art.low_band_ratio = low_band_ratio(spec, config.f_cut_hz);
        m.low_band_ratio = art.low_band_ratio;
      } catch (const ResolutionError&) {
        notes.push_back("run too short to resolve the low band; spectral ratio not evaluated");
      }
      if (wants("spectrum", "csv")) art.files[sc.name + "_spectrum.csv"] = format_spectrum_csv(spec);
    } else if (!enabled) {
      art.eye = empty_eye(config.bit_period(), geo);
    }
    art.report = compliance_report(m, config);
    const auto& lat = art.protocol.latencies;
    std::int64_t worst = 0;
    for (const auto& l : lat) worst = std::max(worst, l.latency_ps);
    if (!lat.empty()) {
      extra.push_back(detail::check_item("protocol_latency", std::nullopt, static_cast<double>(art.protocol.bound_ps),
                                         static_cast<double>(worst), "ps"));
    }
    extra.push_back(detail::check_item("protocol_verdict", 1.0, std::nullopt, art.protocol.pass ? 1.0 : 0.0));
    for (auto& e : extra) art.report.items.push_back(std::move(e));
    for (auto& note : notes) art.report.notes.push_back(std::move(note));
    for (const auto& w : art.protocol.warnings) art.report.notes.push_back("protocol: " + w);
    art.report.notes.push_back("scenario " + sc.name + ", " +
                               (enabled ? std::string(source_name(sc.source)) + " source, " +
                                              std::to_string(words.size()) + " words"
                                        : std::string("standby, no data")));
    if (!enabled) art.report.notes.push_back("standby drop per line must not exceed 10 mV");
    return 0;
  });

  if (wants("vcd", "vcd")) art.files[sc.name + ".vcd"] = format_vcd(run.traces, sc.name);
  if (art.eye && wants("eye", "csv")) art.files[sc.name + "_eye.csv"] = format_eye_csv(*art.eye);
  if (wants("tx", "csv")) {
    art.files[sc.name + "_tx_plus.csv"] = format_csv(tx.tx_plus);
    art.files[sc.name + "_tx_minus.csv"] = format_csv(tx.tx_minus);
  }
  if (wants("current", "csv")) art.files[sc.name + "_current.csv"] = format_csv(current);
  if (serial && sc.outputs.count("bits") && (formats.empty() || formats.count("csv"))) {
    art.files[sc.name + "_bits.txt"] = format_bitstream(*serial);
  }
  if (wants("report", "json")) {
    art.files[sc.name + "_report.json"] = to_json(art.report).dump(2) + "\n";
    art.files[sc.name + "_report.txt"] = to_table(art.report);
  }
  art.pass = art.report.pass();
  return art;
}

inline void write_artifacts(const ArtifactSet& art, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir + "': " + ec.message());
  for (const auto& [name, content] : art.files) write_text((std::filesystem::path(out_dir) / name).string(), content);
}

}  // namespace hdmitx
