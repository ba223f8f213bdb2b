// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sodkit Authors

#pragma once

// The `sodkit` command line: simulate, score, purify, fdsplit, stats.
// Exit codes: 0 success, 1 usage/config error, 2 data error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sodkit/assign.hpp"
#include "sodkit/coco.hpp"
#include "sodkit/csv.hpp"
#include "sodkit/error.hpp"
#include "sodkit/freq.hpp"
#include "sodkit/ftm.hpp"
#include "sodkit/json_io.hpp"
#include "sodkit/report_text.hpp"
#include "sodkit/sim.hpp"

namespace sodkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Parsed --config file. Every section is optional.
struct RunConfig {
  SimConfig simulation{};
  MclaWeights weights{};
  HfpConfig hfp{};
  BandSplitConfig fdsplit{};
  DatasetStatsConfig stats{};
};

inline RunConfig load_run_config(const std::string& path) {
  RunConfig rc;
  if (path.empty()) return rc;
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": malformed JSON at byte " + std::to_string(e.byte));
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  }
  try {
    detail::check_keys(j, "config", {"simulation", "weights", "hfp", "fdsplit", "stats"});
    detail::read(j, "simulation", rc.simulation);
    detail::read(j, "weights", rc.weights);
    detail::read(j, "hfp", rc.hfp);
    detail::read(j, "fdsplit", rc.fdsplit);
    if (j.contains("stats")) {
      const auto& s = j.at("stats");
      detail::check_keys(s, "stats", {"bins", "assigners", "levels"});
      detail::read(s, "bins", rc.stats.bins);
      detail::read(s, "assigners", rc.stats.assigners);
      if (s.contains("levels")) rc.stats.levels = s.at("levels").get<std::vector<PyramidLevel>>();
    }
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return rc;
}

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// Keeps the named assigners in the order given; names missing from `pool`
/// fall back to the built-in defaults for that strategy.
inline std::vector<SimAssigner> select_assigners(const std::vector<SimAssigner>& pool,
                                                 const std::string& names) {
  std::vector<SimAssigner> out;
  for (const auto& n : split_list(names)) {
    const auto s = parse_strategy(n);
    auto it = std::find_if(pool.begin(), pool.end(),
                           [&](const SimAssigner& a) { return a.assigner.strategy == s; });
    out.push_back(it != pool.end() ? *it : default_sim_assigner(s));
  }
  if (out.empty()) throw ConfigError("--assigners: empty list");
  return out;
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw FormatError(p.string() + ": cannot open for writing");
  f << text;
  f.close();
  if (!f) throw FormatError(p.string() + ": write failed");
}

inline void write_report(const SimReport& r, const std::filesystem::path& dir, bool svg,
                         std::ostream& out) {
  write_file(dir / "report.json", report_to_json(r));
  write_file(dir / "report.csv", report_to_csv(r));
  if (svg) {
    write_file(dir / "bars.svg", report_to_bar_svg(r));
    write_file(dir / "pie.svg", report_to_pie_svg(r));
  }
  out << report_to_table(r);
}

/// Options shared by the commands that take MCLA weights.
struct WeightFlags {
  MclaWeights w{};
  CLI::Option* iou = nullptr;
  CLI::Option* poc = nullptr;
  CLI::Option* scc = nullptr;
  CLI::Option* c_poc = nullptr;
  CLI::Option* c_scc = nullptr;

  void add(CLI::App* app) {
    iou = app->add_option("--lambda-iou", w.iou, "MCLA weight of the IoU term")->capture_default_str();
    poc = app->add_option("--lambda-poc", w.poc, "MCLA weight of the position term")->capture_default_str();
    scc = app->add_option("--lambda-scc", w.scc, "MCLA weight of the shape term")->capture_default_str();
    c_poc = app->add_option("--c-poc", w.c_poc, "gain inside the position term")->capture_default_str();
    c_scc = app->add_option("--c-scc", w.c_scc, "gain inside the shape term")->capture_default_str();
  }
  void apply(MclaWeights& target) const {
    if (iou->count()) target.iou = w.iou;
    if (poc->count()) target.poc = w.poc;
    if (scc->count()) target.scc = w.scc;
    if (c_poc->count()) target.c_poc = w.c_poc;
    if (c_scc->count()) target.c_scc = w.c_scc;
  }
};

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"sodkit: label-assignment simulation, MCLA scoring and spectral feature filtering"};
  app.name("sodkit");
  app.require_subcommand(1);
  app.set_version_flag("--version", "sodkit 0.3.0");

  std::string config_path;
  unsigned jobs = 1;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file (flags override its values)")
        ->check(CLI::ExistingFile);
    sub->add_option("--jobs", jobs, "worker threads; output does not depend on it")
        ->capture_default_str()
        ->check(CLI::Range(1u, 1024u));
  };

  // simulate ---------------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo positive-sample statistics by GT size");
  SimConfig sim_defaults;
  std::uint64_t seed = sim_defaults.seed;
  int trials = sim_defaults.trials;
  int n_gts = sim_defaults.n_gts;
  std::string sim_assigners = "one_stage_maxiou,two_stage_maxiou,mcla";
  std::string sim_out = ".";
  bool no_svg = false;
  detail::WeightFlags sim_w;
  auto* o_seed = sim->add_option("--seed", seed, "seed of the first trial")->capture_default_str();
  auto* o_trials = sim->add_option("--trials", trials, "number of trials")->capture_default_str();
  auto* o_ngts = sim->add_option("--n-gts", n_gts, "GT boxes per trial")->capture_default_str();
  auto* o_sim_assigners =
      sim->add_option("--assigners", sim_assigners, "comma-separated subset of assigners")
          ->capture_default_str();
  sim->add_option("--out", sim_out, "output directory")->capture_default_str();
  sim->add_flag("--no-svg", no_svg, "skip bars.svg and pie.svg");
  sim_w.add(sim);

  // score ------------------------------------------------------------------
  auto* score = app.add_subcommand("score", "Score matrix between GT and proposal box lists");
  std::string gt_path, prop_path, score_out;
  std::string criterion = "mcla";
  detail::WeightFlags score_w;
  score->add_option("--gt", gt_path, "GT boxes CSV (x1,y1,x2,y2)")->required();
  score->add_option("--proposals", prop_path, "proposal boxes CSV (x1,y1,x2,y2)")->required();
  score->add_option("--out", score_out, "output CSV path")->required();
  score->add_option("--criterion", criterion, "iou | poc | scc | mcla")
      ->capture_default_str()
      ->check(CLI::IsMember({"iou", "poc", "scc", "mcla"}));
  score_w.add(score);

  // purify -----------------------------------------------------------------
  auto* pur = app.add_subcommand("purify", "Highpass residual purification of an FTM1 tensor");
  std::string pur_in, pur_out, mask_out;
  int level = 0;
  HfpConfig hfp_defaults;
  HfpConfig hfp_flags = hfp_defaults;
  pur->add_option("input", pur_in, "input FTM1 file")->required();
  pur->add_option("--output,-o", pur_out, "output FTM1 file")->required();
  pur->add_option("--level", level, "pyramid level l of the input (0 = finest)")->capture_default_str();
  auto* o_relay = pur->add_option("--relay-level", hfp_flags.relay_level, "relay level r")->capture_default_str();
  auto* o_int = pur->add_option("--intensity", hfp_flags.intensity, "filtering intensity mu")->capture_default_str();
  auto* o_wt = pur->add_option("--weight", hfp_flags.weight, "purified feature weight omega")->capture_default_str();
  pur->add_option("--emit-mask", mask_out, "also write the frequency mask (FTM1, c=1)");

  // fdsplit ----------------------------------------------------------------
  auto* fds = app.add_subcommand("fdsplit", "Split an FTM1 tensor into low and high frequency parts");
  std::string fds_in, fds_stem;
  BandSplitConfig band_flags;
  fds->add_option("input", fds_in, "input FTM1 file")->required();
  fds->add_option("--stem", fds_stem, "output stem; writes <stem>.low.ftm and <stem>.high.ftm "
                                      "(default: input path without extension)");
  auto* o_dl = fds->add_option("--low-cutoff", band_flags.low_cutoff, "lowpass cutoff D_l")->capture_default_str();
  auto* o_dh = fds->add_option("--high-cutoff", band_flags.high_cutoff, "highpass cutoff D_h")->capture_default_str();

  // stats ------------------------------------------------------------------
  auto* st = app.add_subcommand("stats", "Positive-sample statistics on COCO-style annotations");
  std::string ann_path, st_out = ".";
  std::string st_assigners = sim_assigners;
  bool st_no_svg = false;
  detail::WeightFlags st_w;
  st->add_option("annotations", ann_path, "COCO annotation JSON")->required();
  auto* o_st_assigners = st->add_option("--assigners", st_assigners, "comma-separated subset of assigners")
                             ->capture_default_str();
  st->add_option("--out", st_out, "output directory")->capture_default_str();
  st->add_flag("--no-svg", st_no_svg, "skip bars.svg and pie.svg");
  st_w.add(st);

  for (auto* sub : {sim, score, pur, fds, st}) common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    const RunConfig rc = load_run_config(config_path);

    if (sim->parsed()) {
      SimConfig cfg = rc.simulation;
      if (o_seed->count()) cfg.seed = seed;
      if (o_trials->count()) cfg.trials = trials;
      if (o_ngts->count()) cfg.n_gts = n_gts;
      if (o_sim_assigners->count()) cfg.assigners = detail::select_assigners(cfg.assigners, sim_assigners);
      for (auto& a : cfg.assigners) {
        if (a.assigner.strategy == Strategy::mcla) {
          a.assigner.weights = rc.weights;
          sim_w.apply(a.assigner.weights);
        }
      }
      const auto report = run_simulation(cfg, jobs);
      detail::write_report(report, sim_out, !no_svg, out);
      return kExitOk;
    }

    if (score->parsed()) {
      MclaWeights w = rc.weights;
      score_w.apply(w);
      validate(w);
      const auto gts = read_box_csv(gt_path);
      const auto props = read_box_csv(prop_path);
      const auto m = criterion_matrix(parse_criterion(criterion), gts, props, w);
      detail::write_file(score_out, score_matrix_csv(m));
      return kExitOk;
    }

    if (pur->parsed()) {
      HfpConfig cfg = rc.hfp;
      if (o_relay->count()) cfg.relay_level = hfp_flags.relay_level;
      if (o_int->count()) cfg.intensity = hfp_flags.intensity;
      if (o_wt->count()) cfg.weight = hfp_flags.weight;
      validate(cfg);
      hfp_strength(level, cfg);  // rejects levels outside [0, r) before any IO
      const auto x = read_ftm(pur_in);
      const auto mask = build_hfp_mask(x.height(), x.width(), level, cfg);
      write_ftm(pur_out, purify(x, mask, cfg.weight));
      if (!mask_out.empty()) write_ftm(mask_out, mask_to_tensor(mask));
      return kExitOk;
    }

    if (fds->parsed()) {
      BandSplitConfig cfg = rc.fdsplit;
      if (o_dl->count()) cfg.low_cutoff = band_flags.low_cutoff;
      if (o_dh->count()) cfg.high_cutoff = band_flags.high_cutoff;
      for (double c : {cfg.low_cutoff, cfg.high_cutoff}) {
        if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("cutoffs must lie in [0, 1]");
      }
      const auto x = read_ftm(fds_in);
      std::filesystem::path stem = fds_stem;
      if (stem.empty()) stem = std::filesystem::path(fds_in).replace_extension();
      const auto [low, high] = fd_split(x, cfg);
      write_ftm(stem.string() + ".low.ftm", low);
      write_ftm(stem.string() + ".high.ftm", high);
      return kExitOk;
    }

    if (st->parsed()) {
      DatasetStatsConfig cfg = rc.stats;
      if (o_st_assigners->count()) cfg.assigners = detail::select_assigners(cfg.assigners, st_assigners);
      for (auto& a : cfg.assigners) {
        if (a.assigner.strategy == Strategy::mcla) {
          a.assigner.weights = rc.weights;
          st_w.apply(a.assigner.weights);
        }
      }
      const auto ds = load_coco(ann_path);
      if (const auto crowd = ds.crowd_count(); crowd > 0) {
        err << "sodkit: excluded " << crowd << " crowd annotation(s) from GT sets\n";
      }
      cfg.dataset_name = std::filesystem::path(ann_path).filename().string();
      const auto report = dataset_assignment_stats(ds, cfg, jobs);
      detail::write_report(report, st_out, !st_no_svg, out);
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "sodkit: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "sodkit: " << e.what() << '\n';
    return kExitData;
  } catch (const nlohmann::json::exception& e) {
    err << "sodkit: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "sodkit: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace sodkit::cli
