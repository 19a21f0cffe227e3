#include "conetri/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "conetri/errors.hpp"

namespace conetri {

void RunConfig::validate() const {
  const int sources = (input_path ? 1 : 0) + (inline_generators ? 1 : 0) + (random ? 1 : 0);
  if (sources != 1) throw DomainError("exactly one of input, inline generators, random spec is required");
  if (random) {
    if (random->dim < 2) throw DimensionError("random cones need dimension >= 2");
    if (random->bound < 1) throw DomainError("random entry bound must be >= 1");
  }
  if (jobs == 0) throw DomainError("jobs must be positive");
}

// ------------------------------------------------------------------- parsing

Json integer_json(const Integer& v) {
  if (mpz_fits_slong_p(v.get_mpz_t())) return Json(v.get_si());
  return Json(v.get_str());
}

Integer integer_from_json(const Json& j) {
  if (j.is_number_integer()) return Integer(j.get<long>());
  if (j.is_string()) {
    Integer out;
    if (out.set_str(j.get<std::string>(), 10) != 0) throw ParseError("not a decimal integer: " + j.get<std::string>());
    return out;
  }
  throw ParseError("expected an integer, got " + j.dump());
}

Json vector_json(const LatticeVector& v) {
  Json out = Json::array();
  for (const auto& c : v.coords()) out.push_back(integer_json(c));
  return out;
}

namespace {

LatticeVector vector_from_json(const Json& j, std::size_t d) {
  if (!j.is_array() || j.size() != d) throw ParseError("each generator must be an array of " + std::to_string(d) + " integers");
  std::vector<Integer> coords;
  coords.reserve(d);
  for (const auto& c : j) coords.push_back(integer_from_json(c));
  return LatticeVector(std::move(coords));
}

std::string rational_string(const Rational& q) { return q.get_num().get_str() + "/" + q.get_den().get_str(); }

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

ParsedInput parse_input(std::string_view bytes) {
  Json doc;
  try {
    doc = Json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("input must be a JSON object");
  if (!doc.contains("dimension") || !doc["dimension"].is_number_integer())
    throw ParseError("missing integer field \"dimension\"");
  if (!doc.contains("generators") || !doc["generators"].is_array())
    throw ParseError("missing array field \"generators\"");
  const long dim = doc["dimension"].get<long>();
  if (dim < 2) throw DimensionError("dimension must be at least 2");
  const auto d = static_cast<std::size_t>(dim);
  const Json& gens = doc["generators"];
  if (gens.size() != d) throw ParseError("expected " + std::to_string(d) + " generators");

  ParsedInput out{make_cone({LatticeVector{1, 0}, LatticeVector{0, 1}}), {}};
  std::vector<LatticeVector> vectors;
  for (std::size_t i = 0; i < d; ++i) {
    LatticeVector v = vector_from_json(gens[i], d);
    if (v.is_zero()) throw SingularMatrixError("generator " + std::to_string(i + 1) + " is the zero vector");
    const Integer content = v.content();
    if (content != 1) {
      out.warnings.push_back("generator " + std::to_string(i + 1) + " divided by its content " + content.get_str());
      v = v.divided_exactly(content);
    }
    vectors.push_back(std::move(v));
  }
  out.cone = make_cone(std::move(vectors));
  return out;
}

SimplicialCone random_cone(std::size_t d, long bound, std::mt19937_64& rng) {
  if (d < 2) throw DimensionError("random cones need dimension >= 2");
  if (bound < 1) throw DomainError("random entry bound must be >= 1");
  std::uniform_int_distribution<long> entry(-bound, bound);
  for (;;) {
    std::vector<std::vector<Integer>> rows(d, std::vector<Integer>(d));
    for (auto& row : rows)
      for (auto& e : row) e = entry(rng);
    std::vector<LatticeVector> columns;
    bool zero_column = false;
    for (std::size_t c = 0; c < d && !zero_column; ++c) {
      std::vector<Integer> col(d);
      for (std::size_t r = 0; r < d; ++r) col[r] = rows[r][c];
      LatticeVector v(std::move(col));
      if (v.is_zero()) zero_column = true;
      else columns.push_back(v.divided_exactly(v.content()));
    }
    if (zero_column) continue;
    try {
      return make_cone(std::move(columns));
    } catch (const SingularMatrixError&) {
    }
  }
}

// ------------------------------------------------------------------ pipeline

PipelineResult run_pipeline(const SimplicialCone& base_in, const PipelineOptions& options) {
  const SimplicialCone base = with_fresh_labels(base_in);
  PipelineResult result{base, run_p2t(base), FlatFan(base.dimension()), {}, {}};
  CertificateReport& rep = result.report;

  const Triangulation& two_tri = result.p2t.triangulation;
  const TraceAudit audit = audit_trace(base, result.p2t.trace, two_tri.all_created);
  rep.phi_descent_ok = audit.phi_descent_ok;
  rep.label_depth_ok = audit.label_depth_ok;
  rep.mu_bound_ok = audit.mu_bound_ok;
  rep.xi_length_ok = audit.xi_length_ok;
  rep.xi_length_global_ok = audit.xi_length_global_ok;
  rep.trace_consistent_ok = audit.trace_consistent_ok;
  rep.violations = audit.violations;

  if (options.isolated) {
    bool generation_ok = true;
    bool final_ok = true;
    std::vector<SimplicialCone> leaves;
    for (const auto& cone : two_tri.cones) {
      IsolatedRefinement iso = refine_isolated(cone);
      const IsolatedAudit ia = audit_isolated(iso);
      generation_ok = generation_ok && ia.generation_ok;
      final_ok = final_ok && ia.final_ok && ia.exact_depth_ok;
      rep.violations.insert(rep.violations.end(), ia.violations.begin(), ia.violations.end());
      leaves.insert(leaves.end(), iso.cones.begin(), iso.cones.end());
      result.isolated.push_back(std::move(iso));
    }
    result.cones = FlatFan::from_cones(leaves);
    rep.isolated_generation_ok = generation_ok;
    rep.isolated_final_ok = final_ok;
  } else {
    result.cones = refine_to_unimodular(two_tri);
  }

  rep.facets_checked =
      options.check_facets && !options.isolated && result.cones.size() <= options.facet_check_limit;
  const TriangulationCheck check = verify_triangulation(base, result.cones, rep.facets_checked);
  rep.volume_ok = check.volume_ok;
  rep.containment_ok = check.containment_ok;
  rep.facets_ok = check.facets_ok;
  rep.all_unimodular = check.all_unimodular();

  const FinalBounds bounds = final_bounds(base.multiplicity(), base.dimension());
  rep.final_bound_thm = bounds.thm;
  rep.final_bound_cor = bounds.cor;
  rep.mu_ceiling = bounds.mu_ceiling;
  if (rep.all_unimodular) {
    rep.max_dilation = check.max_dilation;
    rep.final_bound_ok = within_bound(rep.max_dilation, bounds.thm) &&
                         (!bounds.cor || within_bound(rep.max_dilation, *bounds.cor));
  }
  return result;
}

int exit_status(const CertificateReport& report) { return report.all_ok() ? 0 : 2; }

// ------------------------------------------------------------------ reports

Json trace_json(std::span<const TraceEvent> trace) {
  Json out = Json::array();
  for (const auto& ev : trace) {
    Json e;
    e["parent"] = ev.parent_id;
    e["source"] = ev.source_id;
    e["p"] = integer_json(ev.p);
    Json z = Json::array(), zp = Json::array(), mus = Json::array();
    for (const auto& v : ev.z) z.push_back(integer_json(v));
    for (const auto& v : ev.z_prime) zp.push_back(integer_json(v));
    for (const auto& v : ev.mu_children) mus.push_back(integer_json(v));
    e["z"] = std::move(z);
    e["z_prime"] = std::move(zp);
    e["x_prime"] = vector_json(ev.x_prime);
    e["new_label"] = ev.new_label_index;
    e["children"] = ev.children_ids;
    e["mu_parent"] = integer_json(ev.mu_parent);
    e["mu_children"] = std::move(mus);
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

Json cone_json(const FlatFan& fan, std::size_t c) {
  Json gens = Json::array();
  for (RayId r : fan.cone(c)) gens.push_back(vector_json(fan.ray(r)));
  return {{"generators", std::move(gens)}, {"multiplicity", integer_json(abs(fan.determinant(c)))}};
}

std::string pad(int indent, int level) { return indent < 0 ? std::string() : std::string(indent * level, ' '); }

// v.dump(indent) as it reads when nested `level` deep.
void dump_at(std::ostream& out, const Json& v, int indent, int level) {
  const std::string text = v.dump(indent);
  if (indent < 0 || level == 0) {
    out << text;
    return;
  }
  const std::string prefix = pad(indent, level);
  for (char c : text) {
    out << c;
    if (c == '\n') out << prefix;
  }
}

using MemberWriter = std::function<void(std::ostream&, int level)>;

// Object `head` written as dump() would, except that the members named in
// `streamed` are produced by their writers.
void write_object(std::ostream& out, const Json& head, int indent, int level,
                  const std::vector<std::pair<std::string, MemberWriter>>& streamed) {
  out << '{';
  bool first = true;
  for (const auto& [key, value] : head.items()) {
    if (!first) out << ',';
    first = false;
    if (indent >= 0) out << '\n' << pad(indent, level + 1);
    out << Json(key).dump() << (indent >= 0 ? ": " : ":");
    auto it = std::find_if(streamed.begin(), streamed.end(), [&](const auto& s) { return s.first == key; });
    if (it != streamed.end()) it->second(out, level + 1);
    else dump_at(out, value, indent, level + 1);
  }
  if (!first && indent >= 0) out << '\n' << pad(indent, level);
  out << '}';
}

void write_array(std::ostream& out, std::size_t n, int indent, int level,
                 const std::function<void(std::ostream&, std::size_t, int level)>& element) {
  if (n == 0) {
    out << "[]";
    return;
  }
  out << '[';
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) out << ',';
    if (indent >= 0) out << '\n' << pad(indent, level + 1);
    element(out, i, level + 1);
  }
  if (indent >= 0) out << '\n' << pad(indent, level);
  out << ']';
}

}  // namespace

std::optional<double> slack_ratio(const CertificateReport& rep) {
  if (!rep.final_bound_cor || sgn(rep.max_dilation) <= 0) return std::nullopt;
  return *rep.final_bound_cor / rep.max_dilation.get_d();
}

Json report_json(const PipelineResult& result, bool include_trace, bool include_cones) {
  const CertificateReport& rep = result.report;
  Json doc;
  doc["dimension"] = result.base.dimension();
  Json base = Json::array();
  for (const auto& g : result.base.generators()) base.push_back(vector_json(g));
  doc["base"] = std::move(base);
  doc["multiplicity"] = integer_json(result.base.multiplicity());
  doc["mode"] = rep.isolated_final_ok ? "isolated" : "global";

  std::set<ConeId> sources;
  for (const auto& ev : result.p2t.trace) sources.insert(ev.source_id);
  doc["p2t"] = {{"iterations", sources.size()},
                {"events", result.p2t.trace.size()},
                {"created", result.p2t.triangulation.all_created.size()},
                {"two_triangulation_size", result.p2t.triangulation.cones.size()}};

  doc["cone_count"] = result.cones.size();
  if (include_cones) {
    Json cones = Json::array();
    for (std::size_t c = 0; c < result.cones.size(); ++c) cones.push_back(cone_json(result.cones, c));
    doc["cones"] = std::move(cones);
  } else {
    doc["cones"] = nullptr;
  }

  doc["max_dilation"] = rational_string(rep.max_dilation);
  doc["bounds"] = {{"thm", rep.final_bound_thm},
                   {"cor", optional_number(rep.final_bound_cor)},
                   {"mu_ceiling", rep.mu_ceiling}};
  doc["slack_ratio"] = optional_number(slack_ratio(rep));

  Json cert;
  cert["volume_ok"] = rep.volume_ok;
  cert["containment_ok"] = rep.containment_ok;
  cert["facets_ok"] = rep.facets_checked ? Json(rep.facets_ok) : Json(nullptr);
  cert["all_unimodular"] = rep.all_unimodular;
  cert["phi_descent_ok"] = rep.phi_descent_ok;
  cert["label_depth_ok"] = rep.label_depth_ok;
  cert["mu_bound_ok"] = rep.mu_bound_ok;
  cert["xi_length_ok"] = rep.xi_length_ok;
  cert["xi_length_global_ok"] = rep.xi_length_global_ok;
  cert["trace_consistent_ok"] = rep.trace_consistent_ok;
  cert["final_bound_ok"] = rep.final_bound_ok;
  if (rep.isolated_generation_ok) cert["isolated_generation_ok"] = *rep.isolated_generation_ok;
  if (rep.isolated_final_ok) cert["isolated_final_ok"] = *rep.isolated_final_ok;
  doc["certificates"] = std::move(cert);
  doc["passed"] = rep.all_ok();
  doc["violations"] = rep.violations;
  if (include_trace) doc["trace"] = trace_json(result.p2t.trace);
  return doc;
}

std::string report_text(const PipelineResult& result) {
  const CertificateReport& rep = result.report;
  std::ostringstream os;
  os << "base cone (d = " << result.base.dimension() << ", mu = " << result.base.multiplicity().get_str() << "):";
  for (const auto& g : result.base.generators()) {
    os << " (";
    for (std::size_t i = 0; i < g.size(); ++i) os << (i ? "," : "") << g[i].get_str();
    os << ")";
  }
  os << "\n2-triangulation: " << result.p2t.triangulation.cones.size() << " cones, "
     << result.p2t.trace.size() << " subdivision events\n";
  os << "unimodular triangulation: " << result.cones.size() << " cones\n";
  os << "max dilation: " << rational_string(rep.max_dilation) << " (" << rep.max_dilation.get_d() << ")\n";
  os << "bounds: thm " << rep.final_bound_thm << ", cor ";
  if (rep.final_bound_cor) os << *rep.final_bound_cor;
  else os << "n/a";
  os << ", mu ceiling " << rep.mu_ceiling << "\n";
  const auto failing = rep.failing();
  if (failing.empty()) {
    os << "certificates: all passed\n";
  } else {
    os << "certificates FAILED:";
    for (const auto& f : failing) os << " " << f;
    os << "\n";
    for (const auto& v : rep.violations) os << "  " << v << "\n";
  }
  return os.str();
}

void write_report(std::ostream& out, const PipelineResult& result, bool include_trace, int indent, int level) {
  const Json head = report_json(result, include_trace, false);
  const FlatFan& fan = result.cones;
  write_object(out, head, indent, level,
               {{"cones", [&](std::ostream& o, int lvl) {
                   write_array(o, fan.size(), indent, lvl,
                               [&](std::ostream& oo, std::size_t c, int l) { dump_at(oo, cone_json(fan, c), indent, l); });
                 }}});
}

ParsedReport parse_report(std::string_view text) {
  std::optional<SimplicialCone> base;
  std::optional<FlatFan> fan;
  bool facets_checked = false;
  bool multiplicities_ok = true;
  std::string key;
  std::size_t dim = 0;

  // Cone entries are objects two levels down under "cones"; each is interned
  // on its closing brace and then dropped from the document.
  const auto callback = [&](int depth, nlohmann::json::parse_event_t event, Json& parsed) -> bool {
    using Event = nlohmann::json::parse_event_t;
    if (event == Event::key && depth == 1) {
      key = parsed.get<std::string>();
      return true;
    }
    if (event != Event::object_end || depth != 2 || key != "cones") return true;
    const Json& gens = parsed.at("generators");
    if (dim == 0) dim = gens.size();
    if (!fan) fan.emplace(dim);
    std::vector<RayId> rays;
    for (const auto& g : gens) rays.push_back(fan->intern(vector_from_json(g, dim)));
    fan->add_cone(rays);
    if (abs(fan->determinant(fan->size() - 1)) != integer_from_json(parsed.at("multiplicity")))
      multiplicities_ok = false;
    return false;
  };

  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end(), callback);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
  dim = doc.at("dimension").get<std::size_t>();
  const Json& base_json = doc.at("base");
  std::vector<LatticeVector> gens;
  for (const auto& g : base_json) gens.push_back(vector_from_json(g, dim));
  base.emplace(make_cone(std::move(gens)));
  facets_checked = doc.at("certificates").at("facets_ok").is_boolean();
  if (!fan) fan.emplace(dim);
  if (fan->dimension() != dim) throw ParseError("cone dimension does not match the report");
  return ParsedReport{std::move(*base), std::move(*fan), facets_checked, multiplicities_ok};
}

// ----------------------------------------------------------------- campaigns

std::vector<SimplicialCone> campaign_cones(const RandomSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<SimplicialCone> out;
  out.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) out.push_back(random_cone(spec.dim, spec.bound, rng));
  return out;
}

CampaignSummary run_campaign(const RandomSpec& spec, std::uint64_t seed, const PipelineOptions& options,
                             std::size_t jobs, const RunSink& sink) {
  const auto cones = campaign_cones(spec, seed);
  CampaignSummary summary;
  std::mutex mutex;
  std::condition_variable turn_changed;
  std::size_t turn = 0;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;

  auto deliver = [&](std::size_t i, const PipelineResult& r) {
    if (exit_status(r.report) == 0) {
      ++summary.passed;
    } else {
      ++summary.failed;
      summary.exit_status = 2;
    }
    if (const auto s = slack_ratio(r.report))
      summary.min_slack_ratio = summary.min_slack_ratio ? std::min(*summary.min_slack_ratio, *s) : *s;
    if (sink) sink(i, r);
  };

  auto worker = [&] {
    for (std::size_t i = next++; i < cones.size(); i = next++) {
      std::optional<PipelineResult> r;
      std::exception_ptr error;
      try {
        r.emplace(run_pipeline(cones[i], options));
      } catch (...) {
        error = std::current_exception();
      }
      std::unique_lock lock(mutex);
      turn_changed.wait(lock, [&] { return turn == i; });
      if (!failure) {
        if (error) failure = error;
        else {
          try {
            deliver(i, *r);
          } catch (...) {
            failure = std::current_exception();
          }
        }
      }
      ++turn;
      turn_changed.notify_all();
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, cones.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return summary;
}

Json summary_json(const CampaignSummary& summary) {
  return {{"passed", summary.passed},
          {"failed", summary.failed},
          {"min_slack_ratio", optional_number(summary.min_slack_ratio)}};
}

CampaignSummary write_campaign(std::ostream& out, const RandomSpec& spec, std::uint64_t seed,
                               const PipelineOptions& options, std::size_t jobs, int indent, const RunSink& sink) {
  Json head;
  head["seed"] = seed;
  head["dim"] = spec.dim;
  head["bound"] = spec.bound;
  head["count"] = spec.count;
  head["runs"] = nullptr;
  head["summary"] = nullptr;
  CampaignSummary summary;

  const auto write_run = [&](std::size_t i, const PipelineResult& r, int level) {
    Json run;
    run["run"] = i;
    run["status"] = exit_status(r.report);
    run["report"] = nullptr;
    write_object(out, run, indent, level,
                 {{"report", [&](std::ostream& o, int lvl) { write_report(o, r, false, indent, lvl); }}});
  };
  const auto write_runs = [&](std::ostream& o, int level) {
    if (spec.count == 0) {
      o << "[]";
      return;
    }
    o << '[';
    summary = run_campaign(spec, seed, options, jobs, [&](std::size_t i, const PipelineResult& r) {
      if (sink) sink(i, r);
      if (i > 0) o << ',';
      if (indent >= 0) o << '\n' << pad(indent, level + 1);
      write_run(i, r, level + 1);
    });
    if (indent >= 0) o << '\n' << pad(indent, level);
    o << ']';
  };
  write_object(out, head, indent, 0,
               {{"runs", write_runs},
                {"summary", [&](std::ostream& o, int level) { dump_at(o, summary_json(summary), indent, level); }}});
  return summary;
}

}  // namespace conetri
