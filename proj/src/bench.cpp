#include "passconn/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <limits>

#include "passconn/connectivity.hpp"
#include "passconn/error.hpp"
#include "passconn/phantom.hpp"

namespace passconn::bench {
namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fmt(double v, const char* spec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

std::string cpu_model() {
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        auto s = line.substr(colon + 1);
        s.erase(0, s.find_first_not_of(' '));
        return s;
      }
    }
  }
  return "unknown";
}

std::vector<Record> run(const Config& config, const std::function<void(const Record&)>& progress) {
  if (config.phantom != "bar" && config.phantom != "slab")
    throw ArgumentError("phantom must be 'bar' or 'slab', got '" + config.phantom + "'");
  if (config.resolutions.empty()) throw ArgumentError("at least one resolution is required");
  for (std::size_t n = 1; n < config.resolutions.size(); ++n)
    if (!(config.resolutions[n] < config.resolutions[n - 1]))
      throw ArgumentError("resolutions must be sorted from coarse to fine (strictly descending)");
  if (config.repeat < 1) throw ArgumentError("repeat must be at least 1");
  config.track.validate();

  const std::string cpu = cpu_model();
  std::vector<Record> out;
  for (double res : config.resolutions) {
    const auto spec = config.phantom == "bar" ? phantom::bar(res) : phantom::slab(res);
    const auto ph = phantom::make(spec);
    const SourceRegion source(ph.source, phantom::source_label);
    const RunParams rp{config.k, config.k_star, config.endpoint_mode};

    // Mean pass-through count is a property of the tractogram, measured once
    // and outside the timed runs.
    double mean_pass = 0.0;
    {
      const auto tg = track_region(source, ph.field, config.track, config.k_star, config.threads);
      PassthroughScratch scratch(source);
      std::size_t total = 0;
      for (const auto& s : tg.streamlines) total += scratch.rows(s).size();
      mean_pass = static_cast<double>(total) / static_cast<double>(tg.size());
    }

    for (int rep = 0; rep < config.repeat; ++rep) {
      for (const char* algorithm : {"traditional", "proposed"}) {
        const bool trad = std::string(algorithm) == "traditional";
        const auto t0 = std::chrono::steady_clock::now();
        const auto m = trad ? traditional_connectivity(source, ph.targets, ph.field, config.track, rp, config.threads)
                            : proposed_connectivity(source, ph.targets, ph.field, config.track, rp, config.threads);
        const auto t1 = std::chrono::steady_clock::now();
        Record r;
        r.resolution_mm = res;
        r.algorithm = algorithm;
        r.repeat = rep;
        r.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
        r.n_source_voxels = source.size();
        r.k = trad ? config.k : 0;
        r.k_star = trad ? 0 : config.k_star;
        r.generated = m.provenance.streamlines;
        r.attempts = m.provenance.attempts;
        r.mean_passthrough = trad ? std::numeric_limits<double>::quiet_NaN() : mean_pass;
        r.threads = config.threads;
        r.cpu_model = cpu;
        if (progress) progress(r);
        out.push_back(std::move(r));
      }
    }
  }
  return out;
}

void write_csv(const std::vector<Record>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << csv_header << '\n';
  for (const auto& r : records) {
    out << fmt(r.resolution_mm, "%g") << ',' << r.algorithm << ',' << r.repeat << ',' << fmt(r.wall_seconds, "%.6f")
        << ',' << r.n_source_voxels << ',' << r.k << ',' << r.k_star << ',' << r.generated << ',' << r.attempts << ','
        << (r.mean_passthrough == r.mean_passthrough ? fmt(r.mean_passthrough, "%.4f") : std::string()) << ','
        << r.threads << ',' << csv_quote(r.cpu_model) << '\n';
  }
  if (!out) throw Error("failed writing " + path.string());
}

std::vector<Summary> summarize(const std::vector<Record>& records) {
  std::vector<Summary> out;
  for (const auto& r : records) {
    auto it = std::find_if(out.begin(), out.end(), [&](const Summary& s) { return s.resolution_mm == r.resolution_mm; });
    if (it == out.end()) {
      Summary s;
      s.resolution_mm = r.resolution_mm;
      s.n_source_voxels = r.n_source_voxels;
      s.traditional_seconds = std::numeric_limits<double>::infinity();
      s.proposed_seconds = std::numeric_limits<double>::infinity();
      out.push_back(s);
      it = out.end() - 1;
    }
    if (r.algorithm == "traditional") {
      it->traditional_seconds = std::min(it->traditional_seconds, r.wall_seconds);
    } else {
      it->proposed_seconds = std::min(it->proposed_seconds, r.wall_seconds);
      it->mean_passthrough = r.mean_passthrough;
    }
  }
  return out;
}

}  // namespace passconn::bench
