#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "conetri/cone_geometry.hpp"
#include "conetri/flat_fan.hpp"
#include "conetri/p2t_engine.hpp"
#include "conetri/pow2_refiner.hpp"
#include "conetri/verifier.hpp"

namespace conetri {

using Json = nlohmann::ordered_json;

enum class OutputFormat { json, text };

struct RandomSpec {
  std::size_t dim = 2;
  long bound = 1;
  std::size_t count = 1;
};

struct RunConfig {
  std::optional<std::string> input_path;
  std::optional<std::vector<LatticeVector>> inline_generators;
  std::optional<RandomSpec> random;
  std::uint64_t seed = 0;
  OutputFormat format = OutputFormat::json;
  bool verify = false;
  std::optional<std::string> trace_path;
  bool isolated = false;
  std::size_t jobs = 1;

  /// Exactly one of input_path / inline_generators / random must be set.
  void validate() const;
};

struct ParsedInput {
  SimplicialCone cone;
  std::vector<std::string> warnings;
};

/// Reads {"dimension": d, "generators": [[...], ...]}. Integers may be JSON
/// numbers or decimal strings. Non-primitive generators are divided by their
/// content and reported in `warnings`.
ParsedInput parse_input(std::string_view bytes);

/// Entries uniform in [-bound, bound]; generator j is column j of the drawn
/// matrix, divided by its content. Redrawn until nonsingular.
SimplicialCone random_cone(std::size_t d, long bound, std::mt19937_64& rng);

struct PipelineOptions {
  bool isolated = false;
  bool check_facets = true;
  /// Facet matching is skipped above this many cones; the report says so.
  std::size_t facet_check_limit = 2'000'000;
};

struct PipelineResult {
  SimplicialCone base;
  P2TState p2t;
  /// Unimodular cones; in isolated mode the union of per-cone refinements.
  FlatFan cones;
  std::vector<IsolatedRefinement> isolated;
  CertificateReport report;
};

/// P2T, then power-of-two refinement, then certification.
PipelineResult run_pipeline(const SimplicialCone& base, const PipelineOptions& options = {});

/// 0 when every certificate passes, 2 otherwise.
int exit_status(const CertificateReport& report);

Json integer_json(const Integer& v);
Integer integer_from_json(const Json& j);
Json vector_json(const LatticeVector& v);
Json trace_json(std::span<const TraceEvent> trace);

/// Full report document. With include_cones false the "cones" member is
/// null; write_report streams it instead.
Json report_json(const PipelineResult& result, bool include_trace, bool include_cones = true);
std::string report_text(const PipelineResult& result);
/// cor / max_dilation, when both are defined.
std::optional<double> slack_ratio(const CertificateReport& report);

/// Writes report_json(result, include_trace).dump(indent) without building
/// the cone list in memory. `level` is the nesting depth of the report inside
/// an enclosing document.
void write_report(std::ostream& out, const PipelineResult& result, bool include_trace, int indent, int level = 0);

/// A report document read back from text.
struct ParsedReport {
  SimplicialCone base;
  FlatFan cones;
  bool facets_checked = false;
  /// Every listed cone multiplicity equals |det| of its generators.
  bool multiplicities_ok = true;
};

/// Parses a report; cone entries are interned as they are read.
ParsedReport parse_report(std::string_view text);

/// Cones drawn for a random campaign, in run order.
std::vector<SimplicialCone> campaign_cones(const RandomSpec& spec, std::uint64_t seed);

struct CampaignSummary {
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::optional<double> min_slack_ratio;
  int exit_status = 0;
};

/// Receives each run's result in run order.
using RunSink = std::function<void(std::size_t run, const PipelineResult& result)>;

/// Runs every cone, on several threads if asked. At most `jobs` results are
/// alive at once.
CampaignSummary run_campaign(const RandomSpec& spec, std::uint64_t seed, const PipelineOptions& options,
                             std::size_t jobs, const RunSink& sink);

Json summary_json(const CampaignSummary& summary);

/// Streams {seed, dim, bound, count, runs: [{run, status, report}], summary};
/// `sink` additionally sees every result before it is written.
CampaignSummary write_campaign(std::ostream& out, const RandomSpec& spec, std::uint64_t seed,
                               const PipelineOptions& options, std::size_t jobs, int indent,
                               const RunSink& sink = {});

}  // namespace conetri
