#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <set>

#include "passconn/matrix_io.hpp"
#include "passconn/nifti.hpp"
#include "passconn/tck.hpp"

using namespace passconn;
namespace fs = std::filesystem;

namespace {

const fs::path dir = fs::temp_directory_path() / "passconn_test_cli";

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + PASSCONN_CLI + "\" " + args + " > \"" + (dir / "stdout.txt").string() +
                          "\" 2> \"" + (dir / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string p(const std::string& name) { return "\"" + (dir / name).string() + "\""; }

struct Setup {
  Setup() {
    fs::create_directories(dir);
    REQUIRE(run("phantom --type bar --out-dir " + p("bar")) == 0);
  }
};

}  // namespace

TEST_CASE("phantom, proposed connectivity and parcellation") {
  Setup s;
  const std::string common = "--source " + p("bar/source.nii.gz") + " --targets " + p("bar/targets.nii.gz") +
                             " --field " + p("bar/field.nii.gz");
  REQUIRE(run("connectivity --algorithm proposed " + common + " --kstar 50 --seed 1 --out " + p("c.csv")) == 0);
  const auto m = matrix_io::read(dir / "c.csv");
  // 8x2x2 bar: straight tracks stay in one of four x-lanes and hit both slabs.
  REQUIRE(m.rows() == 32);
  std::map<std::pair<int, int>, std::set<std::int64_t>> lanes;
  std::map<int, std::int64_t> per_x;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    CHECK(m.at(r, 0) == 0);
    CHECK(m.at(r, 1) == m.at(r, 2));
    const auto& v = m.row_voxels()[r];
    lanes[{v.j, v.k}].insert(m.at(r, 1));
    per_x[v.i] += m.at(r, 1);
  }
  for (const auto& [lane, counts] : lanes) CHECK(counts.size() == 1);
  for (const auto& [x, total] : per_x) CHECK(total == 50);

  REQUIRE(run("parcellate --matrix " + p("c.csv") + " --source " + p("bar/source.nii.gz") + " --out " + p("parc.nii.gz")) == 0);
  const auto parc = nifti::read_labels(dir / "parc.nii.gz");
  CHECK(parc.voxels_with_label(10).size() == 32);

  REQUIRE(run("pieglyph --matrix " + p("c.csv") + " --source " + p("bar/source.nii.gz") + " --axis z --slice 5 --out " +
              p("g.svg")) == 0);
  CHECK(slurp(dir / "g.svg").find("data-sweep=\"180.000\"") != std::string::npos);
}

TEST_CASE("track writes exactly K* streamlines, deterministically") {
  Setup s;
  const std::string args = "track --algorithm region --field " + p("bar/field.nii.gz") + " --source " +
                           p("bar/source.nii.gz") + " --kstar 120 --noise-deg 5 --seed 9 --out ";
  REQUIRE(run(args + p("a.tck")) == 0);
  REQUIRE(run(args + p("b.tck") + " --threads 3") == 0);
  CHECK(tck::read(dir / "a.tck").size() == 120);
  CHECK(slurp(dir / "a.tck") == slurp(dir / "b.tck"));

  REQUIRE(run("connectivity --algorithm from-tck --tck " + p("a.tck") + " --source " + p("bar/source.nii.gz") +
              " --targets " + p("bar/targets.nii.gz") + " --out " + p("t.csv")) == 0);
  REQUIRE(run("superres --tck " + p("a.tck") + " --hi-source " + p("bar/source.nii.gz") + " --targets " +
              p("bar/targets.nii.gz") + " --self-check --out " + p("s.csv")) == 0);
  CHECK(slurp(dir / "t.csv") == slurp(dir / "s.csv"));
}

TEST_CASE("exit codes") {
  Setup s;
  const int missing = run("track --field " + p("nope.nii") + " --source " + p("bar/source.nii.gz") + " --out " + p("x.tck"));
  CHECK(missing == 2);
  CHECK(slurp(dir / "stderr.txt").find("nope.nii") != std::string::npos);
  CHECK(run("connectivity --algorithm sideways --source " + p("bar/source.nii.gz") + " --targets " +
            p("bar/targets.nii.gz") + " --out " + p("x.csv")) == 2);
  CHECK(run("frobnicate") == 2);
  // Label absent from the source volume.
  CHECK(run("track --field " + p("bar/field.nii.gz") + " --source " + p("bar/source.nii.gz") + " --label 77 --out " +
            p("x.tck")) == 2);
  // A tractogram that is not a TCK file is a runtime error.
  std::ofstream(dir / "junk.tck") << "not a tractogram\n";
  CHECK(run("connectivity --algorithm from-tck --tck " + p("junk.tck") + " --source " + p("bar/source.nii.gz") +
            " --targets " + p("bar/targets.nii.gz") + " --out " + p("x.csv")) == 1);
}

TEST_CASE("--version and --help on every subcommand") {
  Setup s;
  for (const char* sub : {"phantom", "track", "connectivity", "parcellate", "superres", "pieglyph", "bench"}) {
    CHECK(run(std::string(sub) + " --version") == 0);
    CHECK(slurp(dir / "stdout.txt").find("passconn 1.0.0") != std::string::npos);
    CHECK(run(std::string(sub) + " --help") == 0);
    CHECK(slurp(dir / "stdout.txt").find("--config") != std::string::npos);
  }
}

TEST_CASE("--config supplies flags and the command line overrides them") {
  Setup s;
  std::ofstream(dir / "run.cfg") << "# experiment bundle\nalgorithm=region\nfield=" << (dir / "bar/field.nii.gz").string()
                                 << "\nsource=" << (dir / "bar/source.nii.gz").string() << "\nkstar=30\nseed=4\n";
  REQUIRE(run("track --config " + p("run.cfg") + " --out " + p("cfg.tck")) == 0);
  CHECK(tck::read(dir / "cfg.tck").size() == 30);
  REQUIRE(run("track --config " + p("run.cfg") + " --kstar 12 --out " + p("cfg2.tck")) == 0);
  CHECK(tck::read(dir / "cfg2.tck").size() == 12);
  CHECK(run("track --config " + p("absent.cfg") + " --out " + p("cfg3.tck")) == 2);
}
