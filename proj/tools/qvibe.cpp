// qvibe command-line front end. Talks to the library only through qvibe.h.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qvibe/qvibe.h"

namespace {

struct CommonOptions {
  std::string config;
  std::string seed;
  std::string out;
  std::string p_fa;
  std::string f_max;
  std::string mode;
  std::string format;
  std::vector<std::string> settings;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "scenario file (key = value sections, or JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "random seed (u64)");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--p-fa", o.p_fa, "false-alarm probability over the grid");
  cmd->add_option("--f-max", o.f_max, "highest analysed frequency, Hz (a unit suffix such as '50 kHz' is accepted)");
  cmd->add_option("--mode", o.mode, "quantum or classical")->check(CLI::IsMember({"quantum", "classical"}));
  cmd->add_option("--format", o.format, "report format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--set", o.settings, "override a scenario setting, section.key=value (repeatable)");
}

int report(qvibe_status status) {
  if (status != QVIBE_OK) {
    std::fprintf(stderr, "qvibe: %s: %s\n", qvibe_status_name(status), qvibe_last_error());
  }
  return static_cast<int>(status);
}

/// Loads the scenario and applies the command-line overrides.
qvibe_status build_scenario(const CommonOptions& o, qvibe_scenario** out) {
  qvibe_status st = o.config.empty() ? qvibe_scenario_new(out) : qvibe_scenario_load(o.config.c_str(), out);
  if (st != QVIBE_OK) {
    return st;
  }
  std::vector<std::pair<std::string, std::string>> overrides;
  for (const auto& s : o.settings) {
    const auto eq = s.find('=');
    overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  if (!o.seed.empty()) overrides.emplace_back("run.seed", o.seed);
  if (!o.out.empty()) overrides.emplace_back("run.out", o.out);
  if (!o.p_fa.empty()) overrides.emplace_back("analysis.p_fa", o.p_fa);
  if (!o.f_max.empty()) {
    const bool bare = o.f_max.find_first_not_of("0123456789.eE+-") == std::string::npos;
    overrides.emplace_back("analysis.f_max", bare ? o.f_max + " Hz" : o.f_max);
  }
  if (!o.mode.empty()) overrides.emplace_back("run.mode", o.mode);
  if (!o.format.empty()) overrides.emplace_back("run.format", o.format);
  for (const auto& [k, v] : overrides) {
    st = qvibe_scenario_set(*out, k.c_str(), v.c_str());
    if (st != QVIBE_OK) {
      return st;
    }
  }
  return QVIBE_OK;
}

using Runner = qvibe_status (*)(const qvibe_scenario*, char*, size_t, size_t*);

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qvibe: two-photon vibrometry simulation and flux-probing estimation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(qvibe_version()));

  CommonOptions o;
  std::string first_path;
  std::string second_path;
  std::vector<std::string> qcrb_pairs;
  std::string qcrb_trials;

  auto* simulate = app.add_subcommand("simulate", "simulate timestamp streams and ground truth");
  auto* estimate = app.add_subcommand("estimate", "estimate the vibration from two timestamp files");
  auto* trials = app.add_subcommand("trials", "repeated-trial amplitude and frequency statistics");
  auto* sweep = app.add_subcommand("sweep", "discrete frequency sweep");
  auto* advantage = app.add_subcommand("advantage", "quantum vs classical under loss and background");
  auto* qcrb = app.add_subcommand("qcrb", "quantum Cramer-Rao bound and Monte-Carlo static-delay study");
  for (auto* cmd : {simulate, estimate, trials, sweep, advantage, qcrb}) {
    add_common(cmd, o);
  }
  estimate->add_option("first", first_path, "coincidence (or port-1) stream")->required();
  estimate->add_option("second", second_path, "anti-coincidence (or port-2) stream")->required();
  qcrb->add_option("--pairs", qcrb_pairs, "number of detected pairs (repeatable)");
  qcrb->add_option("--trials", qcrb_trials, "Monte-Carlo trials per pair count (0: bound only)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(QVIBE_ERR_USAGE);
  }

  for (const auto& s : o.settings) {
    if (s.find('=') == std::string::npos) {
      std::fprintf(stderr, "qvibe: usage error: --set expects section.key=value, got '%s'\n", s.c_str());
      return static_cast<int>(QVIBE_ERR_USAGE);
    }
  }
  if (qcrb->parsed()) {
    if (!qcrb_pairs.empty()) o.settings.push_back("qcrb.pairs=");
    for (const auto& n : qcrb_pairs) o.settings.push_back("qcrb.pairs=" + n);
    if (!qcrb_trials.empty()) o.settings.push_back("qcrb.trials=" + qcrb_trials);
  }

  Runner runner = nullptr;
  if (simulate->parsed()) runner = qvibe_run_simulate;
  if (trials->parsed()) runner = qvibe_run_trials;
  if (sweep->parsed()) runner = qvibe_run_sweep;
  if (advantage->parsed()) runner = qvibe_run_advantage;
  if (qcrb->parsed()) runner = qvibe_run_qcrb;

  qvibe_scenario* scenario = nullptr;
  qvibe_status st = build_scenario(o, &scenario);
  if (st == QVIBE_OK) {
    std::vector<char> summary(1 << 16);
    size_t needed = 0;
    if (estimate->parsed()) {
      st = qvibe_run_estimate(scenario, first_path.c_str(), second_path.c_str(), summary.data(), summary.size(),
                              &needed);
    } else {
      st = runner(scenario, summary.data(), summary.size(), &needed);
    }
    if (st == QVIBE_OK) {
      std::fputs(summary.data(), stdout);
    }
  }
  qvibe_scenario_free(scenario);
  return report(st);
}
