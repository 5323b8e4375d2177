// passconn: voxel-to-region structural connectivity from tractography.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "passconn/bench.hpp"
#include "passconn/connectivity.hpp"
#include "passconn/error.hpp"
#include "passconn/glyph.hpp"
#include "passconn/matrix_io.hpp"
#include "passconn/nifti.hpp"
#include "passconn/phantom.hpp"
#include "passconn/superres.hpp"
#include "passconn/tck.hpp"
#include "passconn/tracking.hpp"

namespace fs = std::filesystem;
using namespace passconn;

namespace {

constexpr const char* version = "passconn 1.0.0";

struct TrackingFlags {
  double step = 0.5;
  int max_steps = 1000;
  double noise_deg = 0.0;
  double min_length = 0.0;
  std::uint64_t seed = 0;

  void add_to(CLI::App* sub) {
    sub->add_option("--step", step, "Tracking step size (mm)")->capture_default_str();
    sub->add_option("--max-steps", max_steps, "Maximum steps per direction")->capture_default_str();
    sub->add_option("--noise-deg", noise_deg, "Angular noise std-dev per step (degrees)")->capture_default_str();
    sub->add_option("--min-length", min_length, "Discard tracks shorter than this (mm)")->capture_default_str();
    sub->add_option("--seed", seed, "Master RNG seed")->capture_default_str();
  }
  TrackParams params() const {
    TrackParams p{step, max_steps, noise_deg, min_length, seed};
    p.validate();
    return p;
  }
};

std::string config_unused;

CLI::App* subcommand(CLI::App& app, const std::string& name, const std::string& help) {
  auto* sub = app.add_subcommand(name, help);
  sub->set_version_flag("--version", version);
  // Expanded by expand_config() before parsing.
  sub->add_option("--config", config_unused, "key=value file supplying any flag; command line overrides");
  return sub;
}

// Replaces `--config FILE` with the `--key value` pairs it lists, skipping
// keys that are also given on the command line. `flag=true` becomes `--flag`.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::vector<std::string> out;
  std::string file;
  for (std::size_t n = 0; n < args.size(); ++n) {
    if (args[n] == "--config" && n + 1 < args.size()) {
      file = args[++n];
    } else if (args[n].rfind("--config=", 0) == 0) {
      file = args[n].substr(9);
    } else {
      out.push_back(args[n]);
    }
  }
  if (file.empty()) return out;
  std::ifstream in(file);
  if (!in) throw ArgumentError("cannot read config file " + file);

  auto given = [&](const std::string& key) {
    const std::string flag = "--" + key;
    for (const auto& a : out)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  auto trim = [](std::string s) {
    s.erase(0, s.find_first_not_of(" \t\r"));
    s.erase(s.find_last_not_of(" \t\r") + 1);
    return s;
  };
  std::vector<std::string> extra;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ArgumentError(file + ": line " + std::to_string(line_no) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    if (key.empty() || key == "config" || given(key)) continue;
    if (value == "true") extra.push_back("--" + key);
    else if (value != "false") {
      extra.push_back("--" + key);
      extra.push_back(value);
    }
  }
  // Subcommand options must follow the subcommand name.
  const std::size_t at = out.size() > 1 ? 2 : out.size();
  out.insert(out.begin() + static_cast<std::ptrdiff_t>(at), extra.begin(), extra.end());
  return out;
}

void report_warnings(const ConnectivityMatrix& m) {
  for (const auto& w : m.provenance.warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Voxel-to-region connectivity from tractography streamlines"};
  app.set_version_flag("--version", version);
  app.require_subcommand(1);

  // phantom
  std::string ph_type = "slab";
  double ph_source_voxel = 1.0, ph_field_voxel = 1.0;
  std::string ph_out = ".";
  auto* phantom_cmd = subcommand(app, "phantom", "Write a synthetic phantom (field.nii.gz, source.nii.gz, targets.nii.gz)");
  phantom_cmd->add_option("--type", ph_type, "bar, slab or split")->check(CLI::IsMember({"bar", "slab", "split"}))->capture_default_str();
  phantom_cmd->add_option("--source-voxel", ph_source_voxel, "Source grid voxel size (mm)")->capture_default_str();
  phantom_cmd->add_option("--field-voxel", ph_field_voxel, "Field/target grid voxel size (mm)")->capture_default_str();
  phantom_cmd->add_option("--out-dir", ph_out, "Output directory")->capture_default_str();

  // track
  std::string tr_field, tr_source, tr_algorithm = "region", tr_out;
  std::uint32_t tr_label = 1;
  std::int64_t tr_k = 200, tr_kstar = 100000;
  int tr_threads = 0;
  TrackingFlags tr_flags;
  auto* track_cmd = subcommand(app, "track", "Generate streamlines and write a .tck file");
  track_cmd->add_option("--field", tr_field, "Direction field NIfTI (4th dim = 3)")->required()->check(CLI::ExistingFile);
  track_cmd->add_option("--source", tr_source, "Source label volume")->required()->check(CLI::ExistingFile);
  track_cmd->add_option("--label", tr_label, "Source label")->capture_default_str();
  track_cmd->add_option("--algorithm", tr_algorithm, "per-voxel (K per voxel) or region (K* total)")
      ->check(CLI::IsMember({"per-voxel", "region"}))->capture_default_str();
  track_cmd->add_option("--k", tr_k, "Streamlines per voxel")->capture_default_str();
  track_cmd->add_option("--kstar", tr_kstar, "Total streamlines")->capture_default_str();
  track_cmd->add_option("--threads", tr_threads, "Worker threads (0 = all cores)")->capture_default_str();
  track_cmd->add_option("--out", tr_out, "Output .tck")->required();
  tr_flags.add_to(track_cmd);

  // connectivity
  std::string cn_algorithm = "proposed", cn_source, cn_targets, cn_field, cn_tck, cn_mode = "both", cn_out;
  std::uint32_t cn_label = 1;
  std::int64_t cn_k = 200, cn_kstar = 100000;
  int cn_threads = 0;
  TrackingFlags cn_flags;
  auto* conn_cmd = subcommand(app, "connectivity", "Compute a voxel-to-region connectivity matrix");
  conn_cmd->add_option("--algorithm", cn_algorithm, "traditional, proposed or from-tck")
      ->check(CLI::IsMember({"traditional", "proposed", "from-tck"}))->capture_default_str();
  conn_cmd->add_option("--source", cn_source, "Source label volume")->required()->check(CLI::ExistingFile);
  conn_cmd->add_option("--label", cn_label, "Source label")->capture_default_str();
  conn_cmd->add_option("--targets", cn_targets, "Target atlas label volume")->required()->check(CLI::ExistingFile);
  auto* field_opt = conn_cmd->add_option("--field", cn_field, "Direction field (traditional/proposed)")->check(CLI::ExistingFile);
  auto* tck_opt = conn_cmd->add_option("--tck", cn_tck, "Tractogram (from-tck)")->check(CLI::ExistingFile);
  field_opt->excludes(tck_opt);
  conn_cmd->add_option("--k", cn_k, "Streamlines per voxel (traditional)")->capture_default_str();
  conn_cmd->add_option("--kstar", cn_kstar, "Total streamlines (proposed)")->capture_default_str();
  conn_cmd->add_option("--endpoint-mode", cn_mode, "last or both")->check(CLI::IsMember({"last", "both"}))->capture_default_str();
  conn_cmd->add_option("--threads", cn_threads, "Worker threads (0 = all cores)")->capture_default_str();
  conn_cmd->add_option("--out", cn_out, "Output matrix (.csv, or .bin for binary)")->required();
  cn_flags.add_to(conn_cmd);

  // parcellate
  std::string pc_matrix, pc_source, pc_out;
  std::uint32_t pc_label = 1;
  auto* parc_cmd = subcommand(app, "parcellate", "Argmax parcellation of a connectivity matrix");
  parc_cmd->add_option("--matrix", pc_matrix, "Connectivity matrix (.csv or binary)")->required()->check(CLI::ExistingFile);
  parc_cmd->add_option("--source", pc_source, "Source label volume")->required()->check(CLI::ExistingFile);
  parc_cmd->add_option("--label", pc_label, "Source label")->capture_default_str();
  parc_cmd->add_option("--out", pc_out, "Output label volume")->required();

  // superres
  std::string sr_tck, sr_source, sr_targets, sr_mode = "both", sr_out;
  std::uint32_t sr_label = 1;
  int sr_threads = 0;
  bool sr_check = false;
  auto* sr_cmd = subcommand(app, "superres", "Accumulate upsampled streamlines on a high-resolution source grid");
  sr_cmd->add_option("--tck", sr_tck, "Tractogram")->required()->check(CLI::ExistingFile);
  sr_cmd->add_option("--hi-source", sr_source, "High-resolution source label volume")->required()->check(CLI::ExistingFile);
  sr_cmd->add_option("--label", sr_label, "Source label")->capture_default_str();
  sr_cmd->add_option("--targets", sr_targets, "Target atlas label volume")->required()->check(CLI::ExistingFile);
  sr_cmd->add_option("--endpoint-mode", sr_mode, "last or both")->check(CLI::IsMember({"last", "both"}))->capture_default_str();
  sr_cmd->add_option("--threads", sr_threads, "Worker threads (0 = all cores)")->capture_default_str();
  sr_cmd->add_flag("--self-check", sr_check, "Verify against accumulation without upsampling");
  sr_cmd->add_option("--out", sr_out, "Output matrix (.csv, or .bin for binary)")->required();

  // pieglyph
  std::string pg_matrix, pg_source, pg_axis = "z", pg_out, pg_names;
  std::uint32_t pg_label = 1;
  int pg_slice = 0;
  double pg_min_fraction = 0.02;
  auto* pg_cmd = subcommand(app, "pieglyph", "Render one slice of pie glyphs as SVG");
  pg_cmd->add_option("--matrix", pg_matrix, "Connectivity matrix")->required()->check(CLI::ExistingFile);
  pg_cmd->add_option("--source", pg_source, "Source label volume")->required()->check(CLI::ExistingFile);
  pg_cmd->add_option("--label", pg_label, "Source label")->capture_default_str();
  pg_cmd->add_option("--axis", pg_axis, "Slice axis")->check(CLI::IsMember({"x", "y", "z"}))->capture_default_str();
  pg_cmd->add_option("--slice", pg_slice, "Slice index along the axis")->required();
  pg_cmd->add_option("--min-fraction", pg_min_fraction, "Merge smaller shares into 'other'")->capture_default_str();
  pg_cmd->add_option("--names", pg_names, "label<TAB>name lookup table for the legend")->check(CLI::ExistingFile);
  pg_cmd->add_option("--out", pg_out, "Output SVG")->required();

  // bench
  bench::Config bc;
  std::string bc_out, bc_mode = "both";
  TrackingFlags bc_flags;
  bc_flags.noise_deg = bc.track.angular_noise_deg;
  bc_flags.seed = bc.track.rng_seed;
  auto* bench_cmd = subcommand(app, "bench", "Time both algorithms over a resolution sweep on a phantom");
  bench_cmd->add_option("--phantom", bc.phantom, "bar or slab")->check(CLI::IsMember({"bar", "slab"}))->capture_default_str();
  bench_cmd->add_option("--resolutions", bc.resolutions, "Source voxel sizes in mm, coarse to fine")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--k", bc.k, "Streamlines per voxel (traditional)")->capture_default_str();
  bench_cmd->add_option("--kstar", bc.k_star, "Total streamlines (proposed)")->capture_default_str();
  bench_cmd->add_option("--repeat", bc.repeat, "Repeats per resolution")->capture_default_str();
  bench_cmd->add_option("--threads", bc.threads, "Worker threads")->capture_default_str();
  bench_cmd->add_option("--endpoint-mode", bc_mode, "last or both")->check(CLI::IsMember({"last", "both"}))->capture_default_str();
  bench_cmd->add_option("--out", bc_out, "Report CSV")->required();
  bc_flags.add_to(bench_cmd);

  try {
    std::vector<std::string> args;
    try {
      args = expand_config(argc, argv);
    } catch (const ArgumentError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    }
    std::vector<char*> cargs;
    for (auto& a : args) cargs.push_back(a.data());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*phantom_cmd) {
      auto spec = ph_type == "bar" ? phantom::bar(ph_source_voxel) : phantom::slab(ph_source_voxel);
      spec.field_voxel = ph_field_voxel;
      if (ph_type == "split") {
        spec.left_label = 0;
        spec.right_upper_label = 30;
      }
      const auto ph = phantom::make(spec);
      fs::create_directories(ph_out);
      ph.field.save(fs::path(ph_out) / "field.nii.gz");
      nifti::write_labels(ph.source, fs::path(ph_out) / "source.nii.gz");
      nifti::write_labels(ph.targets, fs::path(ph_out) / "targets.nii.gz");
    } else if (*track_cmd) {
      const auto field = DirectionField::load(tr_field);
      const auto source_vol = nifti::read_labels(tr_source);
      const SourceRegion source(source_vol, tr_label);
      TrackingReport report;
      const auto tg = tr_algorithm == "region"
                          ? track_region(source, field, tr_flags.params(), tr_kstar, tr_threads, &report)
                          : track_per_voxel(source, field, tr_flags.params(), tr_k, tr_threads, &report);
      tck::write(tg, tr_out);
      if (!report.capped_rows.empty())
        std::cerr << "warning: " << report.capped_rows.size() << " voxel(s) reached the attempt cap\n";
      std::cout << tg.size() << " streamlines from " << report.attempts << " attempts\n";
    } else if (*conn_cmd) {
      const auto source_vol = nifti::read_labels(cn_source);
      const SourceRegion source(source_vol, cn_label);
      const auto targets = nifti::read_labels(cn_targets);
      const RunParams rp{cn_k, cn_kstar, parse_endpoint_mode(cn_mode)};
      ConnectivityMatrix m;
      if (cn_algorithm == "from-tck") {
        if (cn_tck.empty()) throw ArgumentError("--tck is required for --algorithm from-tck");
        m = connectivity_from_tractogram(tck::read(cn_tck), source, targets, rp.endpoint_mode, cn_threads);
      } else {
        if (cn_field.empty()) throw ArgumentError("--field is required for --algorithm " + cn_algorithm);
        const auto field = DirectionField::load(cn_field);
        m = cn_algorithm == "traditional"
                ? traditional_connectivity(source, targets, field, cn_flags.params(), rp, cn_threads)
                : proposed_connectivity(source, targets, field, cn_flags.params(), rp, cn_threads);
      }
      report_warnings(m);
      matrix_io::write(m, cn_out);
    } else if (*parc_cmd) {
      const auto m = matrix_io::read(pc_matrix);
      const auto source = nifti::read_labels(pc_source);
      nifti::write_labels(parcellate(m, source, pc_label), pc_out);
    } else if (*sr_cmd) {
      const auto source_vol = nifti::read_labels(sr_source);
      const SourceRegion source(source_vol, sr_label);
      const auto targets = nifti::read_labels(sr_targets);
      const auto m = superres_connectivity(tck::read(sr_tck), source, targets, parse_endpoint_mode(sr_mode), sr_threads,
                                           sr_check);
      matrix_io::write(m, sr_out);
    } else if (*pg_cmd) {
      const auto m = matrix_io::read(pg_matrix);
      const auto source = nifti::read_labels(pg_source);
      glyph::Options opt;
      opt.axis = glyph::parse_axis(pg_axis);
      opt.slice = pg_slice;
      opt.min_fraction = pg_min_fraction;
      if (!pg_names.empty()) opt.names = glyph::read_label_names(pg_names);
      const auto svg = glyph::render_pie_glyphs(m, source, pg_label, opt, glyph::Palette::for_labels(m.labels()));
      std::ofstream out(pg_out, std::ios::binary | std::ios::trunc);
      if (!(out << svg)) throw Error("failed writing " + pg_out);
    } else if (*bench_cmd) {
      bc.track = bc_flags.params();
      bc.endpoint_mode = parse_endpoint_mode(bc_mode);
      const auto records = bench::run(bc, [](const bench::Record& r) {
        std::fprintf(stderr, "%6.3g mm  %-11s  rep %d  N=%zu  %.4f s\n", r.resolution_mm, r.algorithm.c_str(), r.repeat,
                     r.n_source_voxels, r.wall_seconds);
      });
      bench::write_csv(records, bc_out);
      std::printf("%-14s %10s %14s %14s %10s %10s\n", "resolution_mm", "N", "traditional_s", "proposed_s", "speedup",
                  "mean_C");
      for (const auto& s : bench::summarize(records))
        std::printf("%-14g %10zu %14.4f %14.4f %10.2f %10.2f\n", s.resolution_mm, s.n_source_voxels,
                    s.traditional_seconds, s.proposed_seconds, s.speedup(), s.mean_passthrough);
      std::printf("threads: %d  cpu: %s\n", bc.threads, bench::cpu_model().c_str());
    }
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
