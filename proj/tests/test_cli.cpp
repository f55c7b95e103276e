// End-to-end checks of the command-line surface. The binary path comes from
// the CREASE_CLI_BIN environment variable (set by the CMake test config).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "crease/curves.hpp"
#include "crease/image_io.hpp"
#include "crease/synthgen.hpp"

using namespace crease;
namespace fs = std::filesystem;

namespace {

std::string cli_bin() {
    const char* p = std::getenv("CREASE_CLI_BIN");
    REQUIRE(p != nullptr);
    return p;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("crease_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args, const std::string& stdout_file = "") {
    std::string cmd = cli_bin() + " " + args + " 2>/dev/null";
    if (!stdout_file.empty()) cmd += " >" + stdout_file;
    else cmd += " >/dev/null";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    out << text;
}

} // namespace

TEST_CASE("generate: runs a spec, writes outputs, deterministic across runs") {
    TempDir td;
    write_text(td.file("spec.json"),
               R"({"kind":"concentric","size":96,"radii":[12,26],"widths":[1.5,3.0],"snr":6.81})");
    const std::string out1 = td.file("run1"), out2 = td.file("run2");
    CHECK(run("generate --spec " + td.file("spec.json") + " --seed 7 --out " + out1) == 0);
    CHECK(run("generate --spec " + td.file("spec.json") + " --seed 7 --out " + out2) == 0);
    for (const char* f : {"clean.sf2d", "noisy.sf2d", "clean.png", "noisy.png", "gt.json"}) {
        CHECK(fs::exists(out1 + "/" + f));
        CHECK(slurp(out1 + "/" + f) == slurp(out2 + "/" + f));
    }
    // Different seed changes the noisy image only.
    const std::string out3 = td.file("run3");
    CHECK(run("generate --spec " + td.file("spec.json") + " --seed 8 --out " + out3) == 0);
    CHECK(slurp(out1 + "/clean.sf2d") == slurp(out3 + "/clean.sf2d"));
    CHECK(slurp(out1 + "/noisy.sf2d") != slurp(out3 + "/noisy.sf2d"));
}

TEST_CASE("generate: missing spec file exits with code 2") {
    TempDir td;
    CHECK(run("generate --spec " + td.file("absent.json") + " --out " + td.file("o")) == 2);
}

TEST_CASE("generate: malformed spec exits with code 2") {
    TempDir td;
    write_text(td.file("bad.json"), "{not json");
    CHECK(run("generate --spec " + td.file("bad.json") + " --out " + td.file("o")) == 2);
    write_text(td.file("badkind.json"), R"({"kind":"nope"})");
    CHECK(run("generate --spec " + td.file("badkind.json") + " --out " + td.file("o")) == 2);
}

TEST_CASE("filter: unknown method exits 2 and lists choices") {
    TempDir td;
    SyntheticImage syn = gen_concentric(64, {12.0}, {2.0});
    write_sf2d(syn.image, td.file("in.sf2d"));
    const int rc = run("filter --input " + td.file("in.sf2d") + " --output " + td.file("o.sf2d")
                       + " --method frobnicate");
    CHECK(rc == 2);
}

TEST_CASE("filter: bilateral and gaussian run end to end") {
    TempDir td;
    SyntheticImage syn = gen_concentric(64, {12.0}, {2.0});
    write_sf2d(add_noise(syn.image, 6.81, 3), td.file("in.sf2d"));
    CHECK(run("filter --input " + td.file("in.sf2d") + " --output " + td.file("bil.sf2d")
              + " --method bilateral --sigma-spatial 3.0 --sigma-range 1.0") == 0);
    CHECK(fs::exists(td.file("bil.sf2d")));
    CHECK(run("filter --input " + td.file("in.sf2d") + " --output " + td.file("g.png")
              + " --method gaussian --sigma 1.25") == 0);
    ScalarField2D g = read_image(td.file("g.png"));
    CHECK(g.width == 64);
}

TEST_CASE("filter: mafod with reference stopping writes a scale map") {
    TempDir td;
    SyntheticImage syn = gen_concentric(64, {12.0}, {2.0});
    write_sf2d(syn.image, td.file("clean.sf2d"));
    write_sf2d(add_noise(syn.image, 6.81, 3), td.file("noisy.sf2d"));
    const int rc = run("filter --input " + td.file("noisy.sf2d") + " --output "
                       + td.file("out.sf2d") + " --method mafod --lambda 0.01 --theta 0.2"
                       + " --sigmas 1.0:1.0:3.0 --T 4 --M 20 --reference " + td.file("clean.sf2d")
                       + " --scale-map-out " + td.file("scale.sf2d"));
    CHECK(rc == 0);
    CHECK(fs::exists(td.file("out.sf2d")));
    ScalarField2D sm = read_sf2d(td.file("scale.sf2d"));
    for (double v : sm.data) CHECK((v == 1.0 || v == 2.0 || v == 3.0));
}

TEST_CASE("extract: constant image gives empty curves and exit 0") {
    TempDir td;
    write_sf2d(ScalarField2D(32, 32, 0.5), td.file("c.sf2d"));
    CHECK(run("extract --input " + td.file("c.sf2d") + " --out " + td.file("curves.json")) == 0);
    CurveSet cs = read_curves_json(td.file("curves.json"));
    CHECK(cs.curves.empty());
}

TEST_CASE("extract: overlay and csv outputs") {
    TempDir td;
    SyntheticImage syn = gen_concentric(72, {14.0}, {2.0});
    write_sf2d(syn.image, td.file("in.sf2d"));
    write_curves_json(syn.ground_truth, td.file("gt.json"));
    CHECK(run("extract --input " + td.file("in.sf2d") + " --out " + td.file("curves.json")
              + " --csv " + td.file("curves.csv") + " --overlay " + td.file("ov.png") + " --gt "
              + td.file("gt.json")) == 0);
    CHECK(fs::exists(td.file("ov.png")));
    const std::string csv = slurp(td.file("curves.csv"));
    CHECK(csv.rfind("curve_id,kind,x,y", 0) == 0);
    CurveSet cs = read_curves_json(td.file("curves.json"));
    CHECK(!cs.curves.empty());
}

TEST_CASE("evaluate: identical curves print E=0.000, p=100%") {
    TempDir td;
    SyntheticImage syn = gen_concentric(72, {14.0}, {2.0});
    write_curves_json(syn.ground_truth, td.file("gt.json"));
    CHECK(run("evaluate --gt " + td.file("gt.json") + " --rec " + td.file("gt.json")
              + " --neighborhood 6 --out " + td.file("m.json"), td.file("stdout.txt")) == 0);
    const std::string out = slurp(td.file("stdout.txt"));
    CHECK(out.find("E=0.000, p=100%") != std::string::npos);
    const std::string metrics = slurp(td.file("m.json"));
    CHECK(metrics.find("\"E\"") != std::string::npos);
}

TEST_CASE("pipeline: small end-to-end run produces metrics and manifest") {
    TempDir td;
    write_text(td.file("cfg.json"), R"({
      "seed": 5,
      "generate": {"kind":"concentric","size":96,"radii":[12,26],"widths":[1.5,3.0],"snr":6.81},
      "filter": {"method":"mafod","lambda":0.005,"theta":0.2,"sigmas":"0.5:0.5:3.0",
                 "T":6,"M":30,"patience":3},
      "extract": {},
      "evaluate": {"neighborhood":6}
    })");
    CHECK(run("pipeline --config " + td.file("cfg.json") + " --out " + td.file("run"),
              td.file("stdout.txt")) == 0);
    for (const char* f : {"clean.sf2d", "noisy.sf2d", "filtered.sf2d", "scale_map.sf2d",
                          "curves.json", "metrics.json", "manifest.json", "overlay.png"})
        CHECK(fs::exists(td.file(std::string("run/") + f)));
    const std::string out = slurp(td.file("stdout.txt"));
    CHECK(out.find("E=") != std::string::npos);
}
