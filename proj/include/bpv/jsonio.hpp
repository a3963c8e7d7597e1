#pragma once

#include <json.hpp>
#include <string>

#include "bpv/bvring.hpp"
#include "bpv/series.hpp"

namespace bpv {

using ordered_json = nlohmann::ordered_json;

inline ordered_json ring_to_json(const ScalarRing& r) {
  ordered_json j;
  switch (r.kind) {
    case ScalarKind::PrimeField: j["kind"] = "prime-field"; break;
    case ScalarKind::IntegersMod: j["kind"] = "integers-mod"; break;
    default: j["kind"] = "rationals"; break;
  }
  j["p"] = r.p;
  j["N"] = r.N;
  return j;
}

inline ScalarRing ring_from_json(const ordered_json& j) {
  std::string kind = j.at("kind");
  long p = j.at("p");
  int N = j.at("N");
  if (kind == "prime-field") return ScalarRing::prime_field(p);
  if (kind == "integers-mod") return ScalarRing::integers_mod(p, N);
  if (kind == "rationals") return ScalarRing::rationals(p);
  throw config_error("unknown scalar ring kind: " + kind);
}

inline ordered_json ctx_to_json(const CtxPtr& ctx) {
  ordered_json j;
  j["vars"] = ctx->vars;
  j["coh_weight"] = ctx->coh_weight;
  j["trunc_weight"] = ctx->trunc_weight;
  j["trunc"] = ctx->trunc;
  j["ring"] = ring_to_json(ctx->ring);
  j["vlo"] = ctx->vlo;
  j["vhi"] = ctx->vhi;
  return j;
}

inline CtxPtr ctx_from_json(const ordered_json& j) {
  return make_context(j.at("vars").get<std::vector<std::string>>(), j.at("trunc"),
                      ring_from_json(j.at("ring")), j.at("vlo"), j.at("vhi"),
                      j.at("coh_weight").get<std::vector<long>>(),
                      j.at("trunc_weight").get<std::vector<int>>());
}

// Canonical series payload: sorted [exponent-vector, coefficient-text]
// pairs.  Identical content always serializes identically, which the cache
// hashing relies on.
inline ordered_json series_to_json(const TruncatedSeries& s) {
  ordered_json arr = ordered_json::array();
  for (const auto& [m, c] : s.terms()) arr.push_back({m, c.render()});
  return arr;
}

inline TruncatedSeries series_from_json(const ordered_json& j, const CtxPtr& ctx) {
  TruncatedSeries s = TruncatedSeries::zero(ctx);
  for (const auto& entry : j) {
    XMon m = entry.at(0).get<XMon>();
    s.set_term(m, VPolynomial::parse(entry.at(1).get<std::string>(), ctx->ring, ctx->vlo,
                                     ctx->vhi));
  }
  return s;
}

inline ordered_json certificate_to_json(const MembershipCertificate& c) {
  ordered_json j;
  j["context"] = ctx_to_json(c.target.ctx());
  j["target"] = series_to_json(c.target);
  j["gens"] = ordered_json::array();
  for (const auto& g : c.gens) j["gens"].push_back(series_to_json(g));
  j["multipliers"] = ordered_json::array();
  for (const auto& h : c.multipliers) j["multipliers"].push_back(series_to_json(h));
  j["window"] = c.window;
  return j;
}

inline MembershipCertificate certificate_from_json(const ordered_json& j) {
  CtxPtr ctx = ctx_from_json(j.at("context"));
  MembershipCertificate c(series_from_json(j.at("target"), ctx));
  for (const auto& g : j.at("gens")) c.gens.push_back(series_from_json(g, ctx));
  for (const auto& h : j.at("multipliers")) c.multipliers.push_back(series_from_json(h, ctx));
  c.window = j.at("window");
  return c;
}

}  // namespace bpv
