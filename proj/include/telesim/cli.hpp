// Copyright 2026 The telesim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Subcommands:
//
//   teleport        batch teleportation rounds, per-detector frequencies
//   sweep-analyzer  joint D4x-D3 rates vs. Bob's analyzer angle
//   sweep-overlap   joint rates vs. prism offset
//   baseline        beamsplitter Bell analyzer for comparison
//   bell-decompose  Bell-basis expansion of the three-photon state
//
// Exit status: 0 success, 2 configuration error, 1 any other failure.

#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "telesim/bell.hpp"
#include "telesim/harness.hpp"
#include "telesim/sources.hpp"

namespace telesim {

namespace cli_detail {

inline SweepRange parse_sweep(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--sweep expects START:STOP:STEP, got '" + text + "'");
    }
  }
  if (parts.size() != 3) throw ConfigError("--sweep expects START:STOP:STEP, got '" + text + "'");
  SweepRange r{parts[0], parts[1], parts[2]};
  r.validate();
  return r;
}

inline std::string fmt(double v, int precision = 6) {
  if (std::abs(v) < 1e-15) v = 0.0;
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

inline std::string fmt_complex(ComplexAmp z) {
  const std::string im = fmt(z.imag());
  return fmt(z.real()) + (im.front() == '-' ? "" : "+") + im + "i";
}

inline nlohmann::json fit_json(const FringeFit& f) {
  return {{"amplitude", f.amplitude},
          {"offset", f.offset},
          {"phase_deg", f.phase_deg},
          {"visibility", f.visibility},
          {"residual", f.residual}};
}

inline void open_out(std::ofstream& f, const std::string& path) {
  f.open(path);
  if (!f) throw std::runtime_error("cannot open output file '" + path + "'");
}

inline nlohmann::json stats_json(const TeleportStats& s) {
  nlohmann::json freq;
  for (auto d : kAllOutcomes) freq[std::string(to_string(d))] = s.frequency(d);
  return {{"frequencies", freq},
          {"success_rate", s.success_rate()},
          {"mean_fidelity", s.mean_fidelity()}};
}

inline std::string stats_line(const TeleportStats& s) {
  std::string line;
  for (auto d : kAllOutcomes) line += " " + std::string(to_string(d)) + "=" + fmt(s.frequency(d));
  line += " success_rate=" + fmt(s.success_rate());
  line += " mean_fidelity=" + fmt(s.mean_fidelity(), 12);
  return line;
}

struct Summary {
  std::string line;
  nlohmann::json json;
};

inline Summary run_sweep_analyzer(const RunConfig& cfg, const std::string& out_path) {
  const auto records = sweep_analyzer(cfg);
  if (!out_path.empty()) {
    std::ofstream f;
    open_out(f, out_path);
    write_csv(f, records);
  }
  Summary s;
  s.line = "points=" + std::to_string(records.size() / 4);
  std::map<std::string, FringeFit> fits;
  for (auto d : kAliceDetectors) {
    const std::string pair(pair_label(d));
    try {
      const auto fit = fit_fringe(select_pair(records, pair));
      fits[pair] = fit;
      s.json["fits"][pair] = fit_json(fit);
      s.line += " " + pair + ":phase=" + fmt(fit.phase_deg, 5) + ",visibility=" + fmt(fit.visibility, 4);
    } catch (const std::invalid_argument& e) {
      s.json["fits"][pair] = nullptr;
      s.line += " " + pair + ":fit=unavailable";
    }
  }
  const std::pair<std::string, std::string> pairs[] = {{"D4I-D3", "D4II-D3"}, {"D4III-D3", "D4IV-D3"}};
  for (const auto& [a, b] : pairs) {
    if (fits.count(a) && fits.count(b)) {
      const double diff = fringe_phase_difference(fits[a], fits[b]);
      s.json["phase_difference_deg"][a + "/" + b] = diff;
      s.line += " phase_diff(" + a + "," + b + ")=" + fmt(diff, 5);
    }
  }
  return s;
}

inline Summary run_sweep_overlap(const RunConfig& cfg, const std::string& out_path) {
  const auto records = sweep_overlap(cfg);
  if (!out_path.empty()) {
    std::ofstream f;
    open_out(f, out_path);
    write_csv(f, records);
  }
  Summary s;
  s.line = "points=" + std::to_string(records.size() / 4);
  try {
    const auto g = fit_overlap(records);
    s.json["overlap"] = {{"center_um", g.center}, {"sigma_um", g.sigma}, {"fwhm_um", g.fwhm()},
                         {"peak", g.peak}};
    s.line += " center_um=" + fmt(g.center, 5) + " sigma_um=" + fmt(g.sigma, 5) +
              " fwhm_um=" + fmt(g.fwhm(), 5);
  } catch (const std::invalid_argument&) {
    s.json["overlap"] = nullptr;
    s.line += " fit=unavailable";
  }
  return s;
}

inline Summary run_bell_decompose(const RunConfig& cfg, const std::string& out_path) {
  const auto in = cfg.input();
  const auto branches = bell_decompose(compose_three(in, epr_ket(cfg.epr_phase)));
  std::ofstream f;
  if (!out_path.empty()) {
    open_out(f, out_path);
    f << "bell_state,bob0_re,bob0_im,bob1_re,bob1_im,weight\n";
  }
  Summary s;
  for (const auto& b : branches) {
    const std::string name(to_string(b.bell));
    const double w = b.bob.norm_squared();
    if (f.is_open()) {
      f << name << ',' << format_double(b.bob[0].real()) << ',' << format_double(b.bob[0].imag())
        << ',' << format_double(b.bob[1].real()) << ',' << format_double(b.bob[1].imag()) << ','
        << format_double(w) << '\n';
    }
    s.json["branches"][name] = {{"bob", {b.bob[0].real(), b.bob[0].imag(), b.bob[1].real(), b.bob[1].imag()}},
                                {"weight", w}};
    s.line += (s.line.empty() ? "" : " ") + name + "=(" + fmt_complex(b.bob[0]) + "," +
              fmt_complex(b.bob[1]) + ")";
  }
  return s;
}

}  // namespace cli_detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Polarization-qubit teleportation with a sum-frequency Bell measurement"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read flat 'key = value' options from PATH");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.fallthrough();

  RunConfig cfg;
  std::string out_path, sweep_text;
  std::vector<double> alpha_parts, beta_parts;
  bool json_summary = false;

  app.add_option("--seed", cfg.seed, "Random seed");
  app.add_option("--shots", cfg.shots, "Shots per point (or total for teleport/baseline)");
  app.add_option("--out", out_path, "CSV output path");
  auto* angle = app.add_option("--input-angle", cfg.input_angle_deg, "Linear input polarization, degrees");
  auto* alpha = app.add_option("--alpha", alpha_parts, "Input H amplitude RE,IM")
                    ->delimiter(',')
                    ->expected(2);
  auto* beta = app.add_option("--beta", beta_parts, "Input V amplitude RE,IM")
                   ->delimiter(',')
                   ->expected(2);
  alpha->needs(beta);
  beta->needs(alpha);
  angle->excludes(alpha);
  angle->excludes(beta);
  app.add_option("--visibility", cfg.visibility, "EPR coherence v in [0,1]");
  app.add_option("--epr-phase", cfg.epr_phase, "EPR relative phase, radians");
  app.add_option("--sfg-efficiency", cfg.sfg_efficiency, "Lumped detection efficiency in (0,1]");
  app.add_option("--overlap-sigma", cfg.overlap_sigma_um, "Overlap width, micrometers");
  app.add_option("--prism-offset", cfg.prism_offset_um, "Prism offset, micrometers");
  app.add_option("--sweep", sweep_text, "Grid START:STOP:STEP, stop excluded");
  app.add_option("--threads", cfg.threads, "Worker threads");
  app.add_flag("--json-summary", json_summary, "Print the summary as one JSON object");

  const std::pair<const char*, Mode> subcommands[] = {
      {"teleport", Mode::Teleport},
      {"sweep-analyzer", Mode::SweepAnalyzer},
      {"sweep-overlap", Mode::SweepOverlap},
      {"baseline", Mode::Baseline},
      {"bell-decompose", Mode::BellDecompose}};
  const char* descriptions[] = {"Batch teleportation statistics", "Analyzer-angle fringe sweep",
                                "Prism-offset overlap scan", "Beamsplitter Bell analyzer baseline",
                                "Bell-basis expansion of the three-photon state"};
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(subcommands); ++i)
    subs.push_back(app.add_subcommand(subcommands[i].first, descriptions[i]));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  std::string mode_name;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) {
      cfg.mode = subcommands[i].second;
      mode_name = subcommands[i].first;
    }
  }

  try {
    if (!alpha_parts.empty()) {
      cfg.amplitudes = std::array<ComplexAmp, 2>{ComplexAmp{alpha_parts[0], alpha_parts[1]},
                                                 ComplexAmp{beta_parts[0], beta_parts[1]}};
    }
    if (!sweep_text.empty()) cfg.sweep = cli_detail::parse_sweep(sweep_text);
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  cli_detail::Summary summary;
  try {
    switch (cfg.mode) {
      case Mode::Teleport: {
        const auto s = run_teleport(cfg);
        summary.line = "shots=" + std::to_string(s.shots) + cli_detail::stats_line(s);
        summary.json = cli_detail::stats_json(s);
        break;
      }
      case Mode::Baseline: {
        const auto s = run_baseline(cfg);
        summary.line = "shots=" + std::to_string(s.shots) + cli_detail::stats_line(s);
        summary.json = cli_detail::stats_json(s);
        break;
      }
      case Mode::SweepAnalyzer: summary = cli_detail::run_sweep_analyzer(cfg, out_path); break;
      case Mode::SweepOverlap: summary = cli_detail::run_sweep_overlap(cfg, out_path); break;
      case Mode::BellDecompose: summary = cli_detail::run_bell_decompose(cfg, out_path); break;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  if (json_summary) {
    summary.json["mode"] = mode_name;
    summary.json["seed"] = cfg.seed;
    summary.json["shots"] = cfg.shots;
    out << summary.json.dump() << '\n';
  } else {
    out << mode_name << " seed=" << cfg.seed << ' ' << summary.line << '\n';
  }
  return 0;
}

}  // namespace telesim
