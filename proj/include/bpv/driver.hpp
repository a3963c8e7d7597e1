#pragma once

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "bpv/bvring.hpp"
#include "bpv/cache.hpp"
#include "bpv/dickson.hpp"
#include "bpv/jsonio.hpp"

namespace bpv {

struct RunConfig {
  std::string command;
  long p = 2;
  int m = 1, n = 1;
  int k = -1;       // default: w = n + 1 - m
  int D = -1;       // default: module-fgl rule
  int N = -1;       // default: 6 for m = 0, else 1
  std::string flavor = "araki";
  std::vector<long> degrees;  // slice degrees for filtration checks
  std::string out;            // report path; empty = stdout
  std::string cache_dir;
  std::string input;          // certificate file for recheck
};

inline void apply_defaults(RunConfig& c) {
  if (c.D < 0) c.D = default_trunc(c.p, c.m, c.n);
  if (c.N < 0) c.N = (c.m == 0) ? 6 : 1;
  if (c.k < 0) c.k = c.n + 1 - c.m;
}

inline void validate(const RunConfig& c) {
  if (c.m < 0 || c.m > c.n) throw config_error("need 0 <= m <= n");
  int w = c.n + 1 - c.m;
  if (c.k > w)
    throw config_error("k = " + std::to_string(c.k) + " exceeds w = " + std::to_string(w));
  if (c.D < 1 || c.N < 1) throw config_error("need D, N >= 1");
  flavor_from_name(c.flavor);  // throws on bad name
}

// Accumulates check records; timings are reported as 0 unless BPV_TIMINGS
// is set, so reports are byte-identical across runs by default.
class Reporter {
public:
  Reporter() { real_ = std::getenv("BPV_TIMINGS") != nullptr; }

  void add(const std::string& name, const std::string& status,
           ordered_json certificate = nullptr, double ms = 0.0) {
    ordered_json rec;
    rec["name"] = name;
    rec["status"] = status;
    rec["certificate"] = std::move(certificate);
    rec["timing_ms"] = real_ ? ms : 0.0;
    checks_.push_back(std::move(rec));
    if (status == "FAIL") ++fails_;
  }

  void timed(const std::string& name, const std::function<std::pair<std::string, ordered_json>()>& fn) {
    auto t0 = std::chrono::steady_clock::now();
    auto [status, cert] = fn();
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
    add(name, status, std::move(cert), ms);
  }

  int fails() const { return fails_; }
  const ordered_json& checks() const { return checks_; }

private:
  ordered_json checks_ = ordered_json::array();
  int fails_ = 0;
  bool real_ = false;
};

inline ordered_json params_json(const RunConfig& c) {
  ordered_json j;
  j["command"] = c.command;
  j["p"] = c.p;
  j["m"] = c.m;
  j["n"] = c.n;
  j["k"] = c.k;
  j["D"] = c.D;
  j["N"] = c.N;
  j["flavor"] = c.flavor;
  j["degrees"] = c.degrees;
  return j;
}

// v-free series over the x-variables, coefficients mod p, as a cohomology
// element with empty exterior part (used for the mod-I_{n+1} comparisons).
inline SignedPoly series_to_cohomology(const TruncatedSeries& s, int k) {
  long p = s.ctx()->ring.p;
  SignedPoly out(p, k);
  for (const auto& [m, c] : s.terms())
    for (const auto& [e, sc] : c.terms()) {
      if (!e.empty())
        throw precondition_error("series still has v-generators after ideal reduction");
      std::vector<int> xe(m.begin(), m.begin() + k);
      out.add_term(0u, xe, sc.value().get_num().get_si());
    }
  return out;
}

inline std::string pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

// --- command bodies -------------------------------------------------------

inline ordered_json run_pseries(const RunConfig& cfg, const FormalGroupLaw& L, Reporter& rep) {
  ELaw E = reduce_law(L, cfg.m);
  ordered_json out;
  out["p_series"] = series_to_json(E.p_series);
  ordered_json pis = ordered_json::array();
  for (int k = 0; k <= cfg.n; ++k) pis.push_back(series_to_json(E.pis[k]));
  out["pi"] = pis;

  // exact reassembly over the full modular stage
  rep.timed("pi-reassembly", [&]() -> std::pair<std::string, ordered_json> {
    TruncatedSeries acc = E.pis[0] * Scalar(L.mod, L.p);
    for (int k = 1; k <= cfg.n; ++k)
      acc = acc + E.pis[k] * VPolynomial::generator(L.mod, 1, cfg.n, k);
    return {pass_fail(acc == L.p_series), nullptr};
  });

  for (int k = 0; k <= cfg.n; ++k) {
    long pk = ipow(cfg.p, k);
    rep.timed("pi-congruence-k" + std::to_string(k),
              [&, k, pk]() -> std::pair<std::string, ordered_json> {
                // pi_k = t^(p^k) modulo (p, t^(p^k + 1))
                TruncatedSeries diff =
                    E.pis[k] - TruncatedSeries::monomial(
                                   E.pis[k].ctx(), {static_cast<int>(pk)},
                                   VPolynomial::constant(L.mod, 1, cfg.n, 1));
                bool ok = true;
                for (const auto& [mo, c] : diff.terms()) {
                  if (mo[0] > pk) continue;
                  for (const auto& [e, sc] : c.terms())
                    if (sc.p_valuation() < 1) ok = false;
                }
                // pi_k = t^(p^k) modulo I_{n+1}
                TruncatedSeries red = E.pis[k].reduce_ideal(cfg.n + 1);
                TruncatedSeries expect = TruncatedSeries::monomial(
                    red.ctx(), {static_cast<int>(pk)},
                    VPolynomial::constant(L.mod, 1, cfg.n, 1).reduce_ideal(cfg.n + 1));
                ok = ok && red == expect;
                return {pass_fail(ok), nullptr};
              });
  }

  for (int k = 0; k <= cfg.n; ++k) {
    long pk = ipow(cfg.p, k);
    if (pk > cfg.D) break;
    rep.timed("p-series-congruence-k" + std::to_string(k),
              [&, k, pk]() -> std::pair<std::string, ordered_json> {
                // [p](t) = v_k t^(p^k) modulo (v_0,...,v_{k-1}, t^(p^k+1))
                TruncatedSeries red = L.p_series.reduce_ideal(k);
                TruncatedSeries low = TruncatedSeries::zero(red.ctx());
                for (const auto& [mo, c] : red.terms())
                  if (mo[0] <= pk) low.add_term(mo, c);
                VPolynomial vk = (k == 0)
                                     ? VPolynomial::constant(L.mod, 1, cfg.n, L.p)
                                     : VPolynomial::generator(L.mod, 1, cfg.n, k);
                TruncatedSeries expect = TruncatedSeries::monomial(
                    red.ctx(), {static_cast<int>(pk)}, vk.reduce_ideal(k));
                return {pass_fail(low == expect), nullptr};
              });
  }
  return out;
}

inline ordered_json run_alpha(const RunConfig& cfg, const FormalGroupLaw& L, Reporter& rep) {
  BVRing B(L, cfg.m, cfg.n + 1 - cfg.m);
  ordered_json out;
  TruncatedSeries a = B.chi(B.w());
  TruncatedSeries a2 = B.alpha_monic_product();
  TruncatedSeries ap = B.alpha_prime();
  out["alpha"] = series_to_json(a);
  out["alpha_prime"] = series_to_json(ap);
  long expdeg = 2 * ipow(cfg.p, cfg.m) * (ipow(cfg.p, B.w()) - 1) / (cfg.p - 1);
  out["degree"] = expdeg;
  rep.add("alpha-two-formulas", pass_fail(a == a2));
  rep.add("alpha-degree", pass_fail(a.homogeneous_degree() == std::optional<long>(expdeg)));
  rep.add("alpha-prime-degree",
          pass_fail(ap.homogeneous_degree() == std::optional<long>(expdeg)));
  return out;
}

inline ordered_json run_dickson(const RunConfig& cfg, Reporter& rep) {
  long p = cfg.p;
  int k = cfg.k, m = cfg.m;
  SignedPoly beta = dickson_beta(p, k);
  SignedPoly betap = dickson_beta_prime(p, k);
  SignedPoly betas = dickson_beta_sec(p, m, k);
  ordered_json out;
  out["beta"] = beta.render();
  out["beta_prime"] = betap.render();
  out["beta_sec"] = betas.render();

  long pm = dpow(p, m);
  rep.add("beta-sec-equals-beta-prime-power", pass_fail(betas == betap.pow(pm)));
  rep.add("beta-sec-equals-beta-power", pass_fail(betas == beta.pow(pm)));

  std::mt19937 rng(12345);
  auto random_poly = [&]() {
    SignedPoly e(p, k);
    for (int t = 0; t < 5; ++t) {
      unsigned mask = rng() % (1u << k);
      std::vector<int> xe(k);
      for (auto& v : xe) v = static_cast<int>(rng() % 3);
      e.add_term(mask, xe, static_cast<long>(rng() % p));
    }
    return e;
  };
  bool q2 = true, fq = true;
  for (int t = 0; t < 10; ++t) {
    SignedPoly e = random_poly();
    for (int i = 0; i < 3; ++i) {
      if (!q_op(i, q_op(i, e)).is_zero()) q2 = false;
      if (frobenius_twist(q_op(i, e)) != q_op(i + 1, frobenius_twist(e))) fq = false;
    }
  }
  rep.add("q-squared-zero", pass_fail(q2));
  rep.add("frobenius-q-commutation", pass_fail(fq));

  bool det_ok = true;
  int found = 0;
  while (found < 20) {
    std::vector<std::vector<long>> g(k, std::vector<long>(k));
    for (auto& row : g)
      for (auto& v : row) v = static_cast<long>(rng() % p);
    long dg = fp_det(g, p);
    if (dg == 0) continue;
    ++found;
    if (gl_act(g, betap) != betap * dg) det_ok = false;
  }
  rep.add("det-character", pass_fail(det_ok));
  return out;
}

inline ordered_json run_verify_main(const RunConfig& cfg, const FormalGroupLaw& L,
                                    Reporter& rep) {
  int w = cfg.n + 1 - cfg.m;
  BVRing B(L, cfg.m, w);
  ordered_json out;

  TruncatedSeries a = B.chi(w);
  TruncatedSeries ap = B.alpha_prime();
  out["alpha"] = series_to_json(a);
  out["alpha_prime"] = series_to_json(ap);

  rep.timed("alpha-two-formulas", [&]() -> std::pair<std::string, ordered_json> {
    return {pass_fail(a == B.alpha_monic_product()), nullptr};
  });

  rep.timed("alpha-minus-alpha-prime-in-ideal",
            [&]() -> std::pair<std::string, ordered_json> {
              int window = effective_window(B.xctx(), B.pgens());
              auto cert = ideal_member(a - ap, B.pgens(), window);
              if (!cert) return {"UNDECIDED-AT-CUTOFF", nullptr};
              return {pass_fail(verify_certificate(*cert)), certificate_to_json(*cert)};
            });

  for (int i = cfg.m; i <= cfg.n; ++i) {
    rep.timed("v" + std::to_string(i) + "-alpha-prime-certificate",
              [&, i]() -> std::pair<std::string, ordered_json> {
                MembershipCertificate cert = B.v_alpha_prime_certificate(i);
                return {pass_fail(verify_certificate(cert)), certificate_to_json(cert)};
              });
  }

  rep.timed("mod-I-comparison", [&]() -> std::pair<std::string, ordered_json> {
    TruncatedSeries ar = a.reduce_ideal(cfg.n + 1);
    TruncatedSeries apr = ap.reduce_ideal(cfg.n + 1);
    SignedPoly bp = dickson_beta(cfg.p, w).pow(dpow(cfg.p, cfg.m));
    bool ok = !ar.is_zero() && series_to_cohomology(ar, w) == bp &&
              series_to_cohomology(apr, w) == bp;
    return {pass_fail(ok), nullptr};
  });
  return out;
}

inline ordered_json run_filtration(const RunConfig& cfg, const FormalGroupLaw& L,
                                   Reporter& rep) {
  int w = cfg.n + 1 - cfg.m;
  BVRing B(L, cfg.m, cfg.k);
  ordered_json out;
  ordered_json stages = ordered_json::array();

  auto degrees_or = [&](long bound) {
    if (!cfg.degrees.empty()) return cfg.degrees;
    std::vector<long> ds;
    for (long d = -bound; d <= bound; d += 2) ds.push_back(d);
    return ds;
  };

  for (int kk = 0; kk <= cfg.k; ++kk) {
    ARing A = B.a_ring(kk);
    ordered_json st;
    st["k"] = kk;
    st["division_degree"] = A.d;
    st["psi"] = series_to_json(A.psi);
    st["remainder"] = series_to_json(A.rem);
    st["theta_bar"] = A.theta_bar ? series_to_json(*A.theta_bar) : ordered_json(nullptr);
    stages.push_back(st);

    rep.timed("theta-certificate-k" + std::to_string(kk),
              [&]() -> std::pair<std::string, ordered_json> {
                return {pass_fail(verify_certificate(A.theta_cert)),
                        certificate_to_json(A.theta_cert)};
              });

    if (kk == w) {
      rep.timed("remainder-mod-I-k" + std::to_string(kk),
                [&]() -> std::pair<std::string, ordered_json> {
                  return {pass_fail(A.rem.reduce_ideal(cfg.n + 1).is_zero()), nullptr};
                });
    }

    if (kk >= 1) {
      for (long d : degrees_or(24)) {
        rep.timed("ideal-recursion-k" + std::to_string(kk) + "-d" + std::to_string(d),
                  [&, d]() -> std::pair<std::string, ordered_json> {
                    SliceCompare c = B.ideal_recursion_check(kk, d);
                    ordered_json j{{"dim_ambient", c.dim_ambient},
                                   {"dim_lhs", c.dim_lhs},
                                   {"dim_rhs", c.dim_rhs},
                                   {"window", c.x2},
                                   {"status", c.status}};
                    return {pass_fail(c.status == "equal"), j};
                  });
      }
    }
  }
  out["stages"] = stages;

  for (int j = 1; j <= cfg.k; ++j)
    for (int i = 0; i < j; ++i)
      rep.timed("chi" + std::to_string(j) + "-psi" + std::to_string(i) + "-certificate",
                [&, i, j]() -> std::pair<std::string, ordered_json> {
                  auto cert = B.chi_psi_certificate(i, j);
                  if (!cert) return {"UNDECIDED-AT-CUTOFF", nullptr};
                  return {pass_fail(verify_certificate(*cert)), certificate_to_json(*cert)};
                });

  for (int j = 1; j <= cfg.k; ++j)
    for (long d : degrees_or(20))
      rep.timed("annihilator-chi" + std::to_string(j) + "-d" + std::to_string(d),
                [&, j, d]() -> std::pair<std::string, ordered_json> {
                  SliceCompare c = B.annihilator_slice_check(j, d);
                  ordered_json jj{{"dim_ambient", c.dim_ambient},
                                  {"dim_kernel", c.dim_lhs},
                                  {"dim_ideal", c.dim_rhs},
                                  {"x1", c.x1},
                                  {"x2", c.x2},
                                  {"status", c.status}};
                  return {pass_fail(c.status == "equal"), jj};
                });

  for (int kk = 0; kk <= cfg.k; ++kk)
    for (long d : degrees_or(20))
      rep.timed("vm-regularity-k" + std::to_string(kk) + "-d" + std::to_string(d),
                [&, kk, d]() -> std::pair<std::string, ordered_json> {
                  SliceCompare c = B.vm_regularity_check(kk, d);
                  ordered_json jj{{"dim_ambient", c.dim_ambient},
                                  {"dim_kernel", c.dim_lhs},
                                  {"dim_expected", c.dim_rhs},
                                  {"x1", c.x1},
                                  {"x2", c.x2},
                                  {"status", c.status}};
                  return {pass_fail(c.status == "equal"), jj};
                });
  return out;
}

inline ordered_json run_recheck(const RunConfig& cfg, Reporter& rep) {
  std::ifstream in(cfg.input);
  if (!in) throw config_error("cannot open certificate file: " + cfg.input);
  ordered_json j = ordered_json::parse(in);
  MembershipCertificate cert = certificate_from_json(j);
  rep.add("certificate-recheck", pass_fail(verify_certificate(cert)));
  ordered_json out;
  out["window"] = cert.window;
  return out;
}

// --- entry point ----------------------------------------------------------

inline int run(RunConfig cfg) {
  try {
    apply_defaults(cfg);
    validate(cfg);

    Reporter rep;
    ordered_json payload;
    if (cfg.command == "dickson") {
      payload = run_dickson(cfg, rep);
    } else if (cfg.command == "recheck") {
      payload = run_recheck(cfg, rep);
    } else {
      FormalGroupLaw L =
          cached_fgl(cfg.cache_dir, cfg.p, cfg.n, flavor_from_name(cfg.flavor), cfg.D, cfg.N);
      if (cfg.command == "pseries")
        payload = run_pseries(cfg, L, rep);
      else if (cfg.command == "alpha")
        payload = run_alpha(cfg, L, rep);
      else if (cfg.command == "verify-main")
        payload = run_verify_main(cfg, L, rep);
      else if (cfg.command == "filtration")
        payload = run_filtration(cfg, L, rep);
      else
        throw config_error("unknown command: " + cfg.command);
    }

    ordered_json report;
    report["params"] = params_json(cfg);
    report["result"] = payload;
    report["checks"] = rep.checks();

    std::string text = report.dump(1) + "\n";
    if (cfg.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(cfg.out, std::ios::trunc);
      if (!f) throw config_error("cannot write report to " + cfg.out);
      f << text;
    }
    return rep.fails() == 0 ? 0 : 1;
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace bpv
