// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "conetri/number_theory.hpp"
#include "conetri/pipeline.hpp"
#include "conetri/verifier.hpp"

using namespace conetri;

namespace {

// Criterion parameters.
constexpr std::uint64_t kCampaignSeedBase = 1000;
constexpr long kCampaignBound = 7;
constexpr std::size_t kCampaignPerDim = 125;  // d = 2..5, 500 cones in all
constexpr std::size_t kPow2Count = 200;
constexpr unsigned kPow2MaxLog = 6;
constexpr long kPow2Bound = 3;
constexpr std::uint64_t kPow2Seed = 6;
constexpr unsigned long kOddMax = 1001;
constexpr std::uint64_t kPrimeMax = 1'000'000;
constexpr long kStairMax = 64;
constexpr std::uint64_t kDeterminismSeed = 10;

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::cout << (ok ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << detail << std::endl;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// VmHWM from /proc, in MiB; 0 where unavailable.
long peak_rss_mib() {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("VmHWM:", 0) == 0) return std::stol(line.substr(6)) / 1024;
  return 0;
}

struct CampaignTally {
  std::size_t runs = 0;
  std::size_t certified = 0;  // volume, containment, unimodular
  std::size_t facets_checked = 0;
  std::size_t facets_failed = 0;
  std::size_t phi_bad = 0;
  std::size_t mu_bad = 0;
  std::size_t xi_bad = 0;
  std::size_t bound_bad = 0;
  std::size_t total_cones = 0;
  std::size_t max_cones = 0;
  std::optional<double> min_slack;
  std::vector<std::string> first_failures;
};

void run_campaigns(CampaignTally& tally, double& elapsed) {
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t d = 2; d <= 5; ++d) {
    const RandomSpec spec{d, kCampaignBound, kCampaignPerDim};
    run_campaign(spec, kCampaignSeedBase + d, PipelineOptions{}, 1, [&](std::size_t run, const PipelineResult& r) {
      const CertificateReport& rep = r.report;
      ++tally.runs;
      const bool ok = rep.volume_ok && rep.containment_ok && rep.all_unimodular;
      if (ok) ++tally.certified;
      if (rep.facets_checked) {
        ++tally.facets_checked;
        if (!rep.facets_ok) ++tally.facets_failed;
      }
      if (!rep.phi_descent_ok) ++tally.phi_bad;
      if (!rep.mu_bound_ok) ++tally.mu_bad;
      if (!rep.xi_length_ok) ++tally.xi_bad;
      if (!rep.final_bound_ok) ++tally.bound_bad;
      tally.total_cones += r.cones.size();
      tally.max_cones = std::max(tally.max_cones, r.cones.size());
      if (auto s = slack_ratio(rep)) tally.min_slack = tally.min_slack ? std::min(*tally.min_slack, *s) : *s;
      if (!rep.all_ok() && tally.first_failures.size() < 5) {
        std::string names;
        for (const auto& f : rep.failing()) names += " " + f;
        tally.first_failures.push_back("d=" + std::to_string(d) + " run " + std::to_string(run) + ":" + names);
      }
    });
  }
  elapsed = seconds_since(t0);
}

void criteria_1_to_5() {
  CampaignTally t;
  double elapsed = 0;
  run_campaigns(t, elapsed);
  const std::size_t expected = 4 * kCampaignPerDim;
  for (const auto& f : t.first_failures) std::cout << "  note: " << f << std::endl;

  report(1, "end-to-end certificates on 500 cones",
         t.runs == expected && t.certified == expected && t.facets_failed == 0,
         std::to_string(t.certified) + "/" + std::to_string(t.runs) + " certified, facets checked on " +
             std::to_string(t.facets_checked) + " (" + std::to_string(t.facets_failed) + " failed), " +
             std::to_string(t.total_cones) + " unimodular cones (max " + std::to_string(t.max_cones) + "), " +
             fmt(elapsed) + " s, peak rss " + std::to_string(peak_rss_mib()) + " MiB");
  report(2, "phi descent on every trace event", t.runs == expected && t.phi_bad == 0,
         std::to_string(t.phi_bad) + " runs with violations");
  report(3, "intermediate multiplicity ceiling", t.runs == expected && t.mu_bad == 0,
         std::to_string(t.mu_bad) + " runs with violations");
  report(4, "xi label lengths in the 2-triangulation", t.runs == expected && t.xi_bad == 0,
         std::to_string(t.xi_bad) + " runs with violations");
  report(5, "final dilation within both closed-form bounds", t.runs == expected && t.bound_bad == 0,
         std::to_string(t.bound_bad) + " runs with violations, min cor/max_dilation " +
             (t.min_slack ? fmt(*t.min_slack) : std::string("n/a")));
}

// (d/2) (3/2)^l as an exact rational.
Rational pow2_final_bound(std::size_t d, unsigned l) {
  Rational b(static_cast<long>(d), 2);
  b.canonicalize();
  for (unsigned i = 0; i < l; ++i) b *= Rational(3, 2);
  return b;
}

SimplicialCone draw_pow2_cone(std::size_t d, std::mt19937_64& rng) {
  std::uniform_int_distribution<long> entry(-kPow2Bound, kPow2Bound);
  for (;;) {
    std::vector<LatticeVector> gens;
    for (std::size_t j = 0; j < d; ++j) {
      std::vector<Integer> v(d);
      for (auto& x : v) x = entry(rng);
      LatticeVector g(std::move(v));
      if (g.is_zero()) break;
      gens.push_back(g.divided_exactly(g.content()));
    }
    if (gens.size() != d) continue;
    std::vector<std::vector<Integer>> cols;
    for (const auto& g : gens) cols.push_back(g.values());
    const Integer det = abs(determinant(IntMatrix::from_columns(cols)));
    if (det == 0 || !is_power_of_two(det) || det > (1L << kPow2MaxLog)) continue;
    return make_cone(std::move(gens));
  }
}

void criterion_6() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(kPow2Seed);
  std::size_t bad = 0, certified = 0, generators = 0;
  std::map<unsigned, std::size_t> by_log;
  Rational worst_ratio = 0;
  PipelineOptions options;
  options.isolated = true;
  for (std::size_t i = 0; i < kPow2Count; ++i) {
    const std::size_t d = 3 + i % 3;
    const SimplicialCone cone = draw_pow2_cone(d, rng);
    const unsigned l = static_cast<unsigned>(mpz_sizeinbase(cone.multiplicity().get_mpz_t(), 2) - 1);
    ++by_log[l];
    const PipelineResult r = run_pipeline(cone, options);
    if (r.report.volume_ok && r.report.containment_ok && r.report.all_unimodular) ++certified;
    if (!r.report.isolated_final_ok.value_or(false)) ++bad;
    // Every leaf generator, measured against the cone's own simplex.
    const Rational bound = pow2_final_bound(d, l);
    bool cone_ok = true;
    for (std::size_t c = 0; c < r.cones.size(); ++c)
      for (RayId g : r.cones.cone(c)) {
        const Rational dil = dilation(cone, r.cones.ray(g)).value;
        ++generators;
        if (dil > bound) cone_ok = false;
        Rational ratio = dil / bound;
        if (ratio > worst_ratio) worst_ratio = ratio;
      }
    if (!cone_ok) ++bad;
  }
  std::string mix;
  for (const auto& [l, n] : by_log) mix += " l=" + std::to_string(l) + ":" + std::to_string(n);
  report(6, "power-of-two cones in isolated mode", bad == 0 && certified == kPow2Count,
         std::to_string(bad) + " violations, " + std::to_string(certified) + "/" + std::to_string(kPow2Count) +
             " certified, " + std::to_string(generators) + " generators checked, max dilation/bound " +
             fmt(worst_ratio.get_d()) + ", mix" + mix + ", " + fmt(seconds_since(t0)) + " s");
}

void criterion_7() {
  std::size_t pairs = 0, bad = 0;
  for (unsigned long p = 3; p <= kOddMax; p += 2) {
    const Integer pz(p);
    for (unsigned long m = p / 2 + 1; m < p; ++m) {
      if (m % 2 == 0) continue;
      ++pairs;
      const OddAdjustment a = odd_adjust(Integer(m), pz);
      // s <= log2 p  <=>  2^s <= p
      const bool s_ok = a.s >= 1 && (Integer(1) << a.s) <= pz;
      const bool t_ok = 2 * a.t < pz;
      const bool eq_ok = (a.t << a.s) == ((Integer(1) << (a.s - 1)) - 1) * pz + Integer(m);
      if (!(s_ok && t_ok && eq_ok)) ++bad;
    }
  }
  report(7, "odd adjustment, every odd p <= 1001", bad == 0 && pairs > 0,
         std::to_string(pairs) + " pairs, " + std::to_string(bad) + " violations");
}

void criterion_8() {
  const PrimeSieve sieve(kPrimeMax);
  std::size_t bad = 0;
  double tightest = 0;
  std::uint64_t count = 0;  // primes <= x
  for (std::uint64_t x = 2; x <= kPrimeMax; ++x) {
    if (sieve.is_prime(x)) ++count;
    const double b = rosser_bound(static_cast<double>(x));
    if (!(static_cast<double>(count) < b)) ++bad;
    tightest = std::max(tightest, static_cast<double>(count) / b);
  }
  report(8, "prime counting bound up to 10^6", bad == 0,
         std::to_string(bad) + " violations, max pi(x)/bound " + fmt(tightest));
}

// Independent check of a 2D fan inside cone((1,0),(1,n)): every generator lies
// in the cone, every cone has determinant +-1, the slices on x = 1 tile [0, n]
// exactly once, and their lengths add up to n.
bool brute_force_2d(long n, const std::vector<std::pair<Integer, Integer>>& gens_a,
                    const std::vector<std::pair<Integer, Integer>>& gens_b) {
  std::vector<std::pair<Rational, Rational>> slices;
  Rational length = 0;
  for (std::size_t i = 0; i < gens_a.size(); ++i) {
    const auto& [a1, a2] = gens_a[i];
    const auto& [b1, b2] = gens_b[i];
    for (const auto* g : {&gens_a[i], &gens_b[i]})
      if (g->first <= 0 || g->second < 0 || g->second > n * g->first) return false;
    const Integer det = a1 * b2 - a2 * b1;
    if (det != 1 && det != -1) return false;
    Rational lo(a2, a1), hi(b2, b1);
    lo.canonicalize();
    hi.canonicalize();
    if (hi < lo) std::swap(lo, hi);
    Rational len = Rational(abs(det)) / Rational(a1 * b1);
    len.canonicalize();
    length += len;
    slices.emplace_back(lo, hi);
  }
  if (length != n) return false;
  std::sort(slices.begin(), slices.end());
  Rational at = 0;
  for (const auto& [lo, hi] : slices) {
    if (lo != at || hi <= lo) return false;
    at = hi;
  }
  return at == n;
}

void criterion_9() {
  std::size_t oracle_bad = 0, stair_compared = 0, stair_bad = 0;
  for (long n = 2; n <= kStairMax; ++n) {
    const SimplicialCone base = make_cone({LatticeVector{1, 0}, LatticeVector{1, n}});
    const PipelineResult r = run_pipeline(base);
    std::vector<std::pair<Integer, Integer>> ga, gb;
    std::set<std::pair<long, long>> got;
    for (std::size_t c = 0; c < r.cones.size(); ++c) {
      const auto rays = r.cones.cone(c);
      const LatticeVector& a = r.cones.ray(rays[0]);
      const LatticeVector& b = r.cones.ray(rays[1]);
      ga.emplace_back(a[0], a[1]);
      gb.emplace_back(b[0], b[1]);
      if (a[0] == 1 && b[0] == 1) {
        const long lo = std::min(a[1].get_si(), b[1].get_si()), hi = std::max(a[1].get_si(), b[1].get_si());
        got.emplace(lo, hi);
      } else {
        got.emplace(-1, -1);
      }
    }
    if (!brute_force_2d(n, ga, gb)) ++oracle_bad;
    // The run stays on the slice x = 1 when every subdivision vector does;
    // then the only unimodular answer is the staircase.
    const bool on_slice = std::all_of(r.p2t.trace.begin(), r.p2t.trace.end(),
                                      [](const TraceEvent& ev) { return ev.x_prime[0] == 1; });
    if (on_slice) {
      ++stair_compared;
      std::set<std::pair<long, long>> stair;
      for (long k = 0; k < n; ++k) stair.emplace(k, k + 1);
      if (got != stair || r.cones.size() != static_cast<std::size_t>(n)) ++stair_bad;
    }
  }
  report(9, "staircase cones ((1,0),(1,n)), n = 2..64", oracle_bad == 0 && stair_bad == 0,
         std::to_string(oracle_bad) + " oracle mismatches, staircase compared on " + std::to_string(stair_compared) +
             " with " + std::to_string(stair_bad) + " mismatches");
}

std::string campaign_bytes(std::size_t jobs) {
  std::ostringstream os;
  write_campaign(os, RandomSpec{3, kCampaignBound, 20}, kDeterminismSeed, PipelineOptions{}, jobs, 2);
  return os.str();
}

std::string single_bytes() {
  std::ostringstream os;
  const PipelineResult r = run_pipeline(make_cone({LatticeVector{1, 0}, LatticeVector{1, 3}}));
  write_report(os, r, true, 2);
  return os.str();
}

void criterion_10() {
  const std::string a = campaign_bytes(1);
  const std::string b = campaign_bytes(1);
  const std::string c = campaign_bytes(2);
  const std::string s1 = single_bytes();
  const std::string s2 = single_bytes();
  report(10, "byte-identical reports on repeat", !a.empty() && a == b && a == c && s1 == s2,
         "campaign " + std::to_string(a.size()) + " bytes, repeat " + (a == b ? "equal" : "differs") +
             ", two threads " + (a == c ? "equal" : "differs") + ", single report " +
             (s1 == s2 ? "equal" : "differs"));
}

}  // namespace

// Optional arguments pick criteria by number; 1..5 share one campaign.
int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::stoi(argv[i]));
  auto want = [&](int id) { return wanted.empty() || wanted.count(id) > 0; };
  if (want(1) || want(2) || want(3) || want(4) || want(5)) criteria_1_to_5();
  if (want(6)) criterion_6();
  if (want(7)) criterion_7();
  if (want(8)) criterion_8();
  if (want(9)) criterion_9();
  if (want(10)) criterion_10();
  return failures == 0 ? 0 : 1;
}
