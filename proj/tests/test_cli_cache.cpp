#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bpv/cache.hpp"
#include "bpv/jsonio.hpp"

using namespace bpv;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  fs::path d = fs::temp_directory_path() / ("bpv-test-" + tag);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, const fs::path& out) {
  std::string cmd = std::string(BPV_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("law cache round-trips, detects tampering, survives corruption") {
  fs::path dir = fresh_dir("cache");
  FormalGroupLaw L = build_fgl(2, 1, Flavor::Araki, 6, 1);
  cache_store(dir.string(), L);
  fs::path file = cache_path(dir.string(), 2, 1, Flavor::Araki, 6, 1);
  REQUIRE(fs::exists(file));

  auto hit = cache_load(dir.string(), 2, 1, Flavor::Araki, 6, 1);
  REQUIRE(hit.has_value());
  CHECK(hit->F == L.F);
  CHECK(hit->inverse == L.inverse);
  CHECK(hit->p_series == L.p_series);

  // different parameters hash to a different file: miss
  CHECK_FALSE(cache_load(dir.string(), 2, 1, Flavor::Hazewinkel, 6, 1).has_value());
  CHECK_FALSE(cache_load(dir.string(), 2, 1, Flavor::Araki, 7, 1).has_value());

  // header tampering inside a correctly-named file: rejected
  {
    ordered_json j = ordered_json::parse(std::ifstream(file));
    j["header"] = "fgl-v1|p=3|n=1|flavor=araki|D=6|N=1";
    std::ofstream(file, std::ios::trunc) << j.dump(1) << "\n";
  }
  CHECK_FALSE(cache_load(dir.string(), 2, 1, Flavor::Araki, 6, 1).has_value());

  // truncated file: warning + miss, then cached_fgl recomputes and restores
  std::ofstream(file, std::ios::trunc) << "{\"format_version\": 1, \"hea";
  CHECK_FALSE(cache_load(dir.string(), 2, 1, Flavor::Araki, 6, 1).has_value());
  FormalGroupLaw R = cached_fgl(dir.string(), 2, 1, Flavor::Araki, 6, 1);
  CHECK(R.p_series == L.p_series);
  CHECK(cache_load(dir.string(), 2, 1, Flavor::Araki, 6, 1).has_value());
  fs::remove_all(dir);
}

TEST_CASE("certificate serialization round-trips through json") {
  FormalGroupLaw L = build_fgl(2, 2, Flavor::Araki, 12, 1);
  BVRing B(L, 1, 2);
  MembershipCertificate cert = B.v_alpha_prime_certificate(1);
  MembershipCertificate back = certificate_from_json(certificate_to_json(cert));
  CHECK(back.window == cert.window);
  CHECK(back.target == cert.target);
  REQUIRE(back.gens.size() == cert.gens.size());
  for (size_t i = 0; i < cert.gens.size(); ++i) {
    CHECK(back.gens[i] == cert.gens[i]);
    CHECK(back.multipliers[i] == cert.multipliers[i]);
  }
  CHECK(verify_certificate(back));
}

TEST_CASE("cli: verify-main succeeds, reports deterministically, recheck accepts its certificates") {
  fs::path dir = fresh_dir("cli");
  fs::path r1 = dir / "r1.json", r2 = dir / "r2.json", log = dir / "log.txt";

  CHECK(run_cli("verify-main --prime 2 --m 1 --n 1 --out " + r1.string(), log) == 0);
  CHECK(run_cli("verify-main --prime 2 --m 1 --n 1 --out " + r2.string(), log) == 0);
  std::string t1 = slurp(r1), t2 = slurp(r2);
  CHECK(!t1.empty());
  CHECK(t1 == t2);

  ordered_json report = ordered_json::parse(t1);
  CHECK(report.at("params").at("command") == "verify-main");
  bool rechecked = false;
  for (const auto& chk : report.at("checks")) {
    CHECK(chk.at("status") == "PASS");
    CHECK(chk.at("timing_ms") == 0.0);
    if (chk.at("name") != "v1-alpha-prime-certificate") continue;
    REQUIRE_FALSE(chk.at("certificate").is_null());
    fs::path certfile = dir / "cert.json";
    std::ofstream(certfile) << chk.at("certificate").dump();
    CHECK(run_cli("recheck " + certfile.string(), log) == 0);
    // tampering with the target must make the recheck fail (exit 1)
    ordered_json bad = chk.at("certificate");
    bad["target"] = ordered_json::array();
    fs::path badfile = dir / "bad.json";
    std::ofstream(badfile) << bad.dump();
    CHECK(run_cli("recheck " + badfile.string(), log) == 1);
    rechecked = true;
  }
  CHECK(rechecked);
  fs::remove_all(dir);
}

TEST_CASE("cli: configuration errors exit with code 2") {
  fs::path dir = fresh_dir("cli-err");
  fs::path log = dir / "log.txt";
  // k exceeds w = n + 1 - m
  CHECK(run_cli("filtration --prime 2 --m 1 --n 1 --k 3", log) == 2);
  // m > n
  CHECK(run_cli("verify-main --prime 2 --m 2 --n 1", log) == 2);
  // unknown flavor
  CHECK(run_cli("pseries --prime 2 --n 1 --flavor cartier", log) == 2);
  // unknown subcommand is a CLI parse error
  CHECK(run_cli("frobnicate", log) == 2);
  fs::remove_all(dir);
}

TEST_CASE("cli: pseries and alpha reports carry the expected payloads") {
  fs::path dir = fresh_dir("cli-payload");
  fs::path out = dir / "out.json", log = dir / "log.txt";

  CHECK(run_cli("pseries --prime 2 --m 1 --n 1 --cache-dir " + (dir / "cache").string() +
                    " --out " + out.string(),
                log) == 0);
  ordered_json ps = ordered_json::parse(slurp(out));
  // [2](t) = v1 t^2 at (2,1,1): single term, exponent [2]
  CHECK(ps.at("result").at("p_series").size() == 1);
  CHECK(ps.at("result").at("p_series")[0][0] == ordered_json::array({2}));

  // second run hits the cache and produces the identical report
  std::string first = slurp(out);
  CHECK(run_cli("pseries --prime 2 --m 1 --n 1 --cache-dir " + (dir / "cache").string() +
                    " --out " + out.string(),
                log) == 0);
  CHECK(slurp(out) == first);

  CHECK(run_cli("alpha --prime 2 --m 1 --n 2 --out " + out.string(), log) == 0);
  ordered_json al = ordered_json::parse(slurp(out));
  CHECK(al.at("result").at("degree") == 12);
  fs::remove_all(dir);
}
