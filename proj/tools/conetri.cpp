// conetri: unimodular triangulations of simplicial lattice cones.
#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "conetri/errors.hpp"
#include "conetri/pipeline.hpp"

using namespace conetri;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write " + path);
  out << text << '\n';
}

// Re-reads an emitted report and checks its cone list on its own.
bool reverify(const std::string& emitted) {
  const ParsedReport parsed = parse_report(emitted);
  const TriangulationCheck check = verify_triangulation(parsed.base, parsed.cones, parsed.facets_checked);
  return parsed.multiplicities_ok && check.volume_ok && check.containment_ok && check.all_unimodular() &&
         (!parsed.facets_checked || check.facets_ok);
}

bool reverify(const PipelineResult& result) {
  std::ostringstream text;
  write_report(text, result, false, -1);
  return reverify(text.str());
}

void report_failures(const CertificateReport& rep, const std::string& prefix = "") {
  for (const auto& flag : rep.failing()) std::cerr << prefix << "certificate failed: " << flag << '\n';
}

int run_command(const RunConfig& cfg) {
  const ParsedInput input = parse_input(read_file(*cfg.input_path));
  for (const auto& w : input.warnings) std::cerr << "warning: " << w << '\n';

  const PipelineResult result = run_pipeline(input.cone, {cfg.isolated, true});
  int status = exit_status(result.report);

  if (cfg.verify && !reverify(result)) {
    std::cerr << "certificate failed: round_trip_ok\n";
    status = 2;
  }
  if (cfg.trace_path) write_file(*cfg.trace_path, trace_json(result.p2t.trace).dump(2));

  if (cfg.format == OutputFormat::json) {
    write_report(std::cout, result, cfg.trace_path.has_value(), 2);
    std::cout << '\n';
  } else {
    std::cout << report_text(result);
  }
  report_failures(result.report);
  return status;
}

int random_command(const RunConfig& cfg) {
  int status = 0;
  const RunSink check = [&](std::size_t run, const PipelineResult& result) {
    const std::string prefix = "run " + std::to_string(run) + ": ";
    if (cfg.verify && !reverify(result)) {
      std::cerr << prefix << "certificate failed: round_trip_ok\n";
      status = 2;
    }
    report_failures(result.report, prefix);
  };
  const PipelineOptions options{cfg.isolated, true};
  CampaignSummary summary;
  if (cfg.format == OutputFormat::json) {
    summary = write_campaign(std::cout, *cfg.random, cfg.seed, options, cfg.jobs, 2, check);
    std::cout << '\n';
  } else {
    summary = run_campaign(*cfg.random, cfg.seed, options, cfg.jobs, check);
    std::cout << "runs: " << cfg.random->count << ", passed: " << summary.passed << ", failed: " << summary.failed
              << ", min slack ratio: " << summary_json(summary)["min_slack_ratio"] << '\n';
  }
  return std::max(status, summary.exit_status);
}

int bounds_command(const std::string& mu_text, std::size_t dim, OutputFormat format) {
  Integer mu;
  if (mu.set_str(mu_text, 10) != 0 || mu < 1) throw ParseError("--mu must be a positive integer");
  if (dim < 2) throw DimensionError("--dim must be at least 2");
  const FinalBounds b = final_bounds(mu, dim);
  if (format == OutputFormat::json) {
    Json doc;
    doc["mu"] = integer_json(mu);
    doc["dim"] = dim;
    doc["thm"] = b.thm;
    doc["cor"] = b.cor ? Json(*b.cor) : Json(nullptr);
    doc["mu_ceiling"] = b.mu_ceiling;
    std::cout << doc.dump(2) << '\n';
  } else {
    std::cout << "thm " << b.thm << "\ncor ";
    if (b.cor) std::cout << *b.cor;
    else std::cout << "n/a";
    std::cout << "\nmu_ceiling " << b.mu_ceiling << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unimodular triangulations of simplicial lattice cones"};
  app.require_subcommand(1);

  const std::map<std::string, OutputFormat> formats{{"json", OutputFormat::json}, {"text", OutputFormat::text}};
  RunConfig run_cfg;
  RunConfig random_cfg;
  RandomSpec spec;
  OutputFormat bounds_format = OutputFormat::json;
  std::string input;
  std::string trace;
  std::string mu_text;
  std::size_t bounds_dim = 0;

  auto* run = app.add_subcommand("run", "triangulate the cone in a JSON file");
  run->add_option("input", input, "input document")->required();
  run->add_flag("--verify", run_cfg.verify, "re-parse and re-verify the emitted triangulation");
  run->add_option("--trace", trace, "write the subdivision trace to this path");
  run->add_option("--format", run_cfg.format, "json or text")->transform(CLI::CheckedTransformer(formats));
  run->add_flag("--isolated", run_cfg.isolated, "refine each 2-cone on its own");

  auto* rnd = app.add_subcommand("random", "seeded campaign over random cones");
  rnd->add_option("--dim", spec.dim, "dimension")->required();
  rnd->add_option("--bound", spec.bound, "entry bound")->required();
  rnd->add_option("--count", spec.count, "number of cones")->required();
  rnd->add_option("--seed", random_cfg.seed, "64-bit seed")->required();
  rnd->add_flag("--verify", random_cfg.verify, "re-parse and re-verify every emitted triangulation");
  rnd->add_option("--format", random_cfg.format, "json or text")->transform(CLI::CheckedTransformer(formats));
  rnd->add_flag("--isolated", random_cfg.isolated, "refine each 2-cone on its own");
  rnd->add_option("--jobs", random_cfg.jobs, "worker threads");

  auto* bnd = app.add_subcommand("bounds", "print the dilation bounds for (mu, d)");
  bnd->add_option("--mu", mu_text, "multiplicity")->required();
  bnd->add_option("--dim", bounds_dim, "dimension")->required();
  bnd->add_option("--format", bounds_format, "json or text")->transform(CLI::CheckedTransformer(formats));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      run_cfg.input_path = input;
      if (!trace.empty()) run_cfg.trace_path = trace;
      run_cfg.validate();
      return run_command(run_cfg);
    }
    if (*rnd) {
      random_cfg.random = spec;
      random_cfg.validate();
      return random_command(random_cfg);
    }
    return bounds_command(mu_text, bounds_dim, bounds_format);
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
