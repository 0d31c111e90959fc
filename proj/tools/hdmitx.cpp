// hdmitx: run channel scenarios and export waveforms, eyes, spectra and
// compliance reports.
//
// Exit status: 0 all checks pass, 1 compliance failure, 2 usage or
// configuration error, 3 internal simulation error.

#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "hdmitx.hpp"

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2, kInternal = 3 };

struct Options {
  std::string config_path;
  std::vector<std::string> scenarios;
  std::optional<std::size_t> words;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "hdmitx_out";
  unsigned jobs = 1;
  std::vector<std::string> formats;
};

struct Job {
  std::string spec;
  hdmitx::Scenario scenario;
  std::string base_dir;
  hdmitx::ArtifactSet result;
  int status = kPass;
  std::string error;
};

hdmitx::ChannelConfig load(const Options& o) {
  hdmitx::ChannelConfig c = o.config_path.empty() ? hdmitx::ChannelConfig{} : hdmitx::load_config(o.config_path);
  hdmitx::validate(c);
  return c;
}

// Runs every job, at most `jobs` at a time. Each scenario pipeline is
// sequential; only independent scenarios overlap.
void run_all(std::vector<Job>& jobs, const hdmitx::ChannelConfig& config, const std::set<std::string>& formats,
             unsigned n_threads) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      Job& j = jobs[i];
      try {
        j.result = hdmitx::run_scenario(config, j.scenario, j.base_dir, formats);
        j.status = j.result.pass ? kPass : kFail;
      } catch (const hdmitx::ConfigError& e) {
        j.status = kUsage;
        j.error = e.what();
      } catch (const hdmitx::InvalidSeedError& e) {
        j.status = kUsage;
        j.error = e.what();
      } catch (const hdmitx::ParseError& e) {
        j.status = kUsage;
        j.error = e.what();
      } catch (const hdmitx::IoError& e) {
        j.status = kUsage;
        j.error = e.what();
      } catch (const std::exception& e) {
        j.status = kInternal;
        j.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n = std::max(1u, std::min<unsigned>(n_threads, static_cast<unsigned>(jobs.size())));
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

int worst(const std::vector<Job>& jobs) {
  int s = kPass;
  for (const auto& j : jobs) s = std::max(s, j.status);
  return s;
}

std::vector<Job> prepare(const Options& o, const hdmitx::ChannelConfig& c, std::vector<std::string> defaults) {
  std::vector<Job> jobs;
  for (const auto& spec : o.scenarios.empty() ? defaults : o.scenarios) {
    Job j;
    j.spec = spec;
    j.scenario = hdmitx::load_scenario(spec, c, &j.base_dir);
    if (o.words) j.scenario.words = *o.words;
    if (o.seed) j.scenario.seed = *o.seed;
    jobs.push_back(std::move(j));
  }
  std::set<std::string> names;
  for (const auto& j : jobs) {
    if (!names.insert(j.scenario.name).second) {
      throw hdmitx::ConfigError("scenario name '" + j.scenario.name + "' used twice; outputs would collide");
    }
  }
  return jobs;
}

void print_errors(const std::vector<Job>& jobs) {
  for (const auto& j : jobs) {
    if (!j.error.empty()) std::fprintf(stderr, "hdmitx: %s: %s\n", j.scenario.name.c_str(), j.error.c_str());
  }
}

int cmd_run(const Options& o) {
  const auto c = load(o);
  auto jobs = prepare(o, c, {"stream-random"});
  std::set<std::string> formats(o.formats.begin(), o.formats.end());
  run_all(jobs, c, formats, o.jobs);
  for (const auto& j : jobs) {
    if (!j.error.empty()) continue;
    hdmitx::write_artifacts(j.result, o.out_dir);
    std::printf("%s: %s (%zu bits, %zu files in %s)\n", j.scenario.name.c_str(), j.result.pass ? "PASS" : "FAIL",
                j.result.bits, j.result.files.size(), o.out_dir.c_str());
  }
  print_errors(jobs);
  return worst(jobs);
}

// Runs the scenarios with a restricted output set and reports one headline
// check per scenario.
template <typename Summary>
int cmd_single(const Options& o, std::set<std::string> outputs, std::set<std::string> formats, Summary summary) {
  const auto c = load(o);
  auto jobs = prepare(o, c, {"stream-random"});
  for (auto& j : jobs) j.scenario.outputs = outputs;
  run_all(jobs, c, formats, o.jobs);
  int status = kPass;
  for (auto& j : jobs) {
    if (!j.error.empty()) continue;
    hdmitx::write_artifacts(j.result, o.out_dir);
    j.status = summary(j);
    status = std::max(status, j.status);
  }
  print_errors(jobs);
  return std::max(status, worst(jobs));
}

int cmd_eye(const Options& o) {
  return cmd_single(o, {"eye"}, {"csv"}, [](const Job& j) {
    if (!j.result.eye) {
      std::printf("%s: no eye (scenario has no streaming interval)\n", j.scenario.name.c_str());
      return kPass;
    }
    const auto& eye = *j.result.eye;
    const auto* m = j.result.report.find("eye_mask_margin");
    const bool pass = !m || m->pass();
    std::printf("%s: eye height %.4f V, mask %s", j.scenario.name.c_str(), hdmitx::eye_height(eye),
                pass ? "PASS" : "FAIL");
    if (m) std::printf(" (margin %.4f V)", *m->achieved);
    std::printf("\n");
    return pass ? kPass : kFail;
  });
}

int cmd_spectrum(const Options& o) {
  return cmd_single(o, {"spectrum"}, {"csv"}, [](const Job& j) {
    if (!j.result.low_band_ratio) {
      std::printf("%s: no spectral ratio (no streaming interval or run too short)\n", j.scenario.name.c_str());
      return kPass;
    }
    const double r = *j.result.low_band_ratio;
    std::printf("%s: low-band ratio %.6f, %s\n", j.scenario.name.c_str(), r, r < 0.06 ? "PASS" : "FAIL");
    return r < 0.06 ? kPass : kFail;
  });
}

int cmd_report(const Options& o) {
  const bool json = std::find(o.formats.begin(), o.formats.end(), "json") != o.formats.end();
  return cmd_single(o, {"report"}, {"json"}, [json](const Job& j) {
    if (json) {
      std::printf("%s", j.result.files.at(j.scenario.name + "_report.json").c_str());
    } else {
      std::printf("== %s\n%s", j.scenario.name.c_str(), hdmitx::to_table(j.result.report).c_str());
    }
    return j.result.pass ? kPass : kFail;
  });
}

int cmd_vcd(const Options& o) {
  return cmd_single(o, {"vcd"}, {"vcd"}, [&o](const Job& j) {
    std::printf("%s: wrote %s\n", j.scenario.name.c_str(),
                (std::filesystem::path(o.out_dir) / (j.scenario.name + ".vcd")).string().c_str());
    return kPass;
  });
}

int cmd_selftest(const Options& o) {
  const auto c = load(o);
  int status = kPass;
  for (const auto& r : hdmitx::run_selftest(c)) {
    std::printf("%s  %s%s%s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.empty() ? "" : ": ",
                r.detail.c_str());
    if (!r.pass) status = kFail;
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HDMI transmitter data channel simulator"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "Channel configuration file (key = value)")->check(CLI::ExistingFile);
    sub->add_option("--scenario", o.scenarios, "Built-in scenario name or scenario file; repeatable");
    sub->add_option("--words", o.words, "Number of data words")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "Seed for random or PRBS data");
    sub->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--jobs", o.jobs, "Scenarios run concurrently")->check(CLI::Range(1u, 256u));
    sub->add_option("--format", o.formats, "Restrict artifacts to these formats")
        ->check(CLI::IsMember({"csv", "vcd", "json"}));
  };
  std::vector<std::pair<CLI::App*, int (*)(const Options&)>> subs{
      {app.add_subcommand("run", "Run scenarios and write all requested artifacts"), cmd_run},
      {app.add_subcommand("eye", "Write the eye histogram and check the mask"), cmd_eye},
      {app.add_subcommand("spectrum", "Write the supply-current spectrum and check the low band"), cmd_spectrum},
      {app.add_subcommand("report", "Print the compliance report"), cmd_report},
      {app.add_subcommand("vcd", "Write the logic event trace as VCD"), cmd_vcd},
      {app.add_subcommand("selftest", "Check each stage against closed-form results"), cmd_selftest},
  };
  for (auto& [sub, fn] : subs) common(sub);
  app.footer("Built-in scenarios: stream-random, stream-prbs7, stream-prbs10, standby, disable-midword");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }
  try {
    for (auto& [sub, fn] : subs) {
      if (sub->parsed()) return fn(o);
    }
  } catch (const hdmitx::ConfigError& e) {
    std::fprintf(stderr, "hdmitx: %s\n", e.what());
    return kUsage;
  } catch (const hdmitx::ParseError& e) {
    std::fprintf(stderr, "hdmitx: %s\n", e.what());
    return kUsage;
  } catch (const hdmitx::InvalidSeedError& e) {
    std::fprintf(stderr, "hdmitx: %s\n", e.what());
    return kUsage;
  } catch (const hdmitx::IoError& e) {
    std::fprintf(stderr, "hdmitx: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "hdmitx: internal error: %s\n", e.what());
    return kInternal;
  }
  return kUsage;
}
