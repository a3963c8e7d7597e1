#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "bpv/fgl.hpp"
#include "bpv/jsonio.hpp"

namespace bpv {

inline constexpr int kCacheFormatVersion = 1;

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string cache_header(long p, int n, Flavor flavor, int D, int N) {
  return "fgl-v" + std::to_string(kCacheFormatVersion) + "|p=" + std::to_string(p) +
         "|n=" + std::to_string(n) + "|flavor=" + flavor_name(flavor) +
         "|D=" + std::to_string(D) + "|N=" + std::to_string(N);
}

inline std::filesystem::path cache_path(const std::string& dir, long p, int n, Flavor flavor,
                                        int D, int N) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(cache_header(p, n, flavor, D, N))));
  return std::filesystem::path(dir) / ("fgl-" + std::string(buf) + ".json");
}

// Stores the reduced (modular-stage) law only; the rational construction
// stage is a build-time scaffold and is recomputed when actually needed.
inline void cache_store(const std::string& dir, const FormalGroupLaw& L) {
  try {
    std::filesystem::create_directories(dir);
    ordered_json j;
    j["format_version"] = kCacheFormatVersion;
    j["header"] = cache_header(L.p, L.n, L.flavor, L.D, L.N);
    j["p"] = L.p;
    j["n"] = L.n;
    j["flavor"] = flavor_name(L.flavor);
    j["D"] = L.D;
    j["N"] = L.N;
    j["F"] = series_to_json(L.F);
    j["inverse"] = series_to_json(L.inverse);
    j["p_series"] = series_to_json(L.p_series);

    auto final_path = cache_path(dir, L.p, L.n, L.flavor, L.D, L.N);
    auto tmp = final_path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      out << j.dump(1) << "\n";
      if (!out) throw std::runtime_error("write failed");
    }
    std::filesystem::rename(tmp, final_path);
  } catch (const std::exception& e) {
    std::cerr << "warning: could not write law cache in " << dir << ": " << e.what() << "\n";
  }
}

inline std::optional<FormalGroupLaw> cache_load(const std::string& dir, long p, int n,
                                                Flavor flavor, int D, int N) {
  auto path = cache_path(dir, p, n, flavor, D, N);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  try {
    std::ifstream in(path);
    ordered_json j = ordered_json::parse(in);
    if (j.at("format_version") != kCacheFormatVersion ||
        j.at("header") != cache_header(p, n, flavor, D, N))
      throw std::runtime_error("format/header mismatch");

    FormalGroupLaw L;
    L.p = p;
    L.n = n;
    L.flavor = flavor;
    L.D = D;
    L.N = N;
    L.rat = ScalarRing::rationals(p);
    L.mod = (N == 1) ? ScalarRing::prime_field(p) : ScalarRing::integers_mod(p, N);
    L.tctx = make_context({"t"}, D, L.mod, 1, n);
    L.stctx = make_context({"s", "t"}, D, L.mod, 1, n);
    L.F = series_from_json(j.at("F"), L.stctx);
    L.inverse = series_from_json(j.at("inverse"), L.tctx);
    L.p_series = series_from_json(j.at("p_series"), L.tctx);
    return L;
  } catch (const std::exception& e) {
    std::cerr << "warning: ignoring unreadable cache file " << path << ": " << e.what() << "\n";
    return std::nullopt;
  }
}

// Load if cached, otherwise build and (best effort) store.
inline FormalGroupLaw cached_fgl(const std::string& dir, long p, int n, Flavor flavor, int D,
                                 int N) {
  if (!dir.empty())
    if (auto hit = cache_load(dir, p, n, flavor, D, N)) return *hit;
  FormalGroupLaw L = build_fgl(p, n, flavor, D, N);
  if (!dir.empty()) cache_store(dir, L);
  return L;
}

}  // namespace bpv
