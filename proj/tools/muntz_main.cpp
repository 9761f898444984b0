// Command-line front end: flag parsing only.  Every subcommand is translated
// into a report::JobSpec and executed by the library, so anything the tool
// can do is reproducible from the JSON job echoed in its report.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "muntz/report.hpp"

namespace {

using nlohmann::json;

json parse_json_arg(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw CLI::ValidationError(what, e.what());
  }
}

int finish(const muntz::report::RunResult& rr, const std::string& out_path) {
  std::cout << rr.report.dump(2) << "\n";
  if (!out_path.empty()) {
    std::ofstream os(out_path);
    if (!os) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return 1;
    }
    os << rr.report.dump(2) << "\n";
  }
  for (const auto& [name, contents] : rr.artifacts) {
    std::ofstream os(name);
    if (!os) {
      std::cerr << "error: cannot write " << name << "\n";
      return 1;
    }
    os << contents;
  }
  return rr.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "muntz: embeddings of monomial spans into L^2(mu) and composition "
      "operators on them - spectra, classification verdicts, and exact "
      "real-exponent polynomial checks.\n"
      "Reports are JSON on stdout; --emit-plot-data adds CSV series.\n"
      "The MUNTZ_QUAD_TOL environment variable overrides the quadrature "
      "tolerance (see also --quad-tol)."};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_path;
  bool no_timestamp = false;
  bool strict = false;
  double quad_tol = 0.0;
  app.add_option("--out", out_path, "also write the JSON report to this file");
  app.add_flag("--no-timestamp", no_timestamp,
               "omit the timestamp (byte-reproducible reports)");
  app.add_flag("--strict", strict,
               "exit 2 when every verdict in the report is inconclusive");
  app.add_option("--quad-tol", quad_tol,
                 "quadrature tolerance override for this run");

  // --- seq -----------------------------------------------------------------
  auto* seq_cmd = app.add_subcommand(
      "seq", "inspect an exponent sequence (geom:2,12 or a comma list)");
  std::string seq_spec, seq_check = "none";
  int seq_block = 3;
  double seq_eta = 2.0;
  seq_cmd->add_option("spec", seq_spec, "sequence spec")->required();
  seq_cmd->add_option(
      "--check", seq_check,
      "lacunary | gap | summable | quasilacunary | closure | none");
  seq_cmd->add_option("--block", seq_block, "block bound for quasilacunary");
  seq_cmd->add_option("--eta", seq_eta, "factor for the closure check");

  // --- poly ------------------------------------------------------------------
  auto* poly_cmd = app.add_subcommand(
      "poly", "exact polynomials with real exponents");
  poly_cmd->require_subcommand(1);
  auto* expand_cmd =
      poly_cmd->add_subcommand("expand", "expand p^k and count terms");
  std::string poly_p;
  int poly_pow = 1;
  bool poly_count = false;
  expand_cmd->add_option("--p", poly_p, "polynomial, e.g. 'x + x^(s:sqrt2)'")
      ->required();
  expand_cmd->add_option("--pow", poly_pow, "power to expand");
  expand_cmd->add_flag("--count", poly_count, "report the term count only");
  auto* schinzel_cmd = poly_cmd->add_subcommand(
      "schinzel", "check term_count(p^k) >= k+1");
  std::string schinzel_p;
  int schinzel_pow = 2;
  schinzel_cmd->add_option("--p", schinzel_p, "polynomial")->required();
  schinzel_cmd->add_option("--pow", schinzel_pow, "power");
  auto* inv_cmd = poly_cmd->add_subcommand(
      "invariance", "does composition with phi keep the span of x^lambda?");
  std::string inv_phi, inv_seq;
  std::vector<double> inv_lambdas;
  inv_cmd->add_option("--phi", inv_phi, "polynomial symbol")->required();
  inv_cmd->add_option("--seq", inv_seq, "exponent sequence spec")->required();
  inv_cmd->add_option("--lambda", inv_lambdas, "exponents to test")
      ->delimiter(',');

  // --- measure ----------------------------------------------------------------
  auto* measure_cmd =
      app.add_subcommand("measure", "describe a measure on [0,1]");
  std::string measure_mu;
  std::vector<double> measure_tails, measure_moments;
  bool measure_no_profile = false;
  measure_cmd
      ->add_option("--mu", measure_mu,
                   "measure as JSON, e.g. '{\"density\":\"1-x\"}'")
      ->required();
  measure_cmd->add_option("--tails", measure_tails, "tail-mass widths")
      ->delimiter(',');
  measure_cmd->add_option("--moments", measure_moments, "moment exponents")
      ->delimiter(',');
  measure_cmd->add_flag("--no-profile", measure_no_profile,
                        "skip the sublinearity profile");

  // --- embed -----------------------------------------------------------------
  auto* embed_cmd = app.add_subcommand(
      "embed", "embedding of a monomial span into L^2(mu)");
  std::string embed_seq, embed_mu, embed_norm = "normalized";
  int embed_n = 0;
  std::vector<double> embed_q, embed_tails;
  bool embed_plot = false;
  std::string embed_prefix = "muntz_embed";
  embed_cmd->add_option("--seq", embed_seq, "exponent sequence spec")
      ->required();
  embed_cmd->add_option("--mu", embed_mu, "measure as JSON")->required();
  embed_cmd->add_option("--n", embed_n, "section size (default: all)");
  embed_cmd->add_option("--q", embed_q, "Schatten exponents")->delimiter(',');
  embed_cmd->add_option("--norm", embed_norm, "raw | normalized | riesz");
  embed_cmd->add_option("--tails", embed_tails, "tail-section offsets n0")
      ->delimiter(',');
  embed_cmd->add_flag("--emit-plot-data", embed_plot, "write CSV series");
  embed_cmd->add_option("--plot-prefix", embed_prefix, "CSV file prefix");

  // --- compop ----------------------------------------------------------------
  auto* compop_cmd = app.add_subcommand(
      "compop", "composition operator f -> f o phi on a monomial span");
  std::string compop_phi, compop_seq, compop_route = "direct",
                          compop_norm = "normalized";
  bool compop_classify = false, compop_essnorm = false, compop_plot = false;
  int compop_svals = 0;
  std::string compop_prefix = "muntz_compop";
  compop_cmd->add_option("--phi", compop_phi, "symbol, e.g. '1-abs(2*x-1)'")
      ->required();
  compop_cmd->add_option("--seq", compop_seq, "exponent sequence spec")
      ->required();
  compop_cmd->add_flag("--classify", compop_classify,
                       "run the boundedness/compactness/Schatten rules");
  compop_cmd->add_option("--svals", compop_svals,
                         "compute this many singular values");
  compop_cmd->add_flag("--essnorm", compop_essnorm,
                       "essential-norm formula plus tail estimates");
  compop_cmd->add_option("--route", compop_route, "direct | pullback");
  compop_cmd->add_option("--norm", compop_norm, "raw | normalized | riesz");
  compop_cmd->add_flag("--emit-plot-data", compop_plot, "write CSV series");
  compop_cmd->add_option("--plot-prefix", compop_prefix, "CSV file prefix");

  // --- report ----------------------------------------------------------------
  auto* report_cmd = app.add_subcommand(
      "report", "run a bundle of jobs from a JSON file and write an index");
  std::string bundle_file, bundle_dir = "muntz_reports";
  int bundle_jobs = 1;
  report_cmd
      ->add_option("--bundle", bundle_file,
                   "JSON file: array of jobs, or {\"jobs\": [...]}")
      ->required();
  report_cmd->add_option("--out-dir", bundle_dir, "report directory");
  report_cmd->add_option("--jobs", bundle_jobs, "worker count");

  CLI11_PARSE(app, argc, argv);

  muntz::report::RunOptions opt;
  opt.with_timestamp = !no_timestamp;
  opt.strict = strict;

  try {
    muntz::report::JobSpec job;
    job.out = "";  // the tool handles --out itself
    if (quad_tol > 0.0) job.tolerances["quad_tol"] = quad_tol;

    if (*seq_cmd) {
      job.subcommand = "seq";
      job.inputs = {{"spec", seq_spec},
                    {"check", seq_check},
                    {"block", seq_block},
                    {"eta", seq_eta}};
    } else if (*poly_cmd) {
      job.subcommand = "poly";
      if (*expand_cmd)
        job.inputs = {{"action", "expand"},
                      {"p", poly_p},
                      {"pow", poly_pow},
                      {"count", poly_count}};
      else if (*schinzel_cmd)
        job.inputs = {{"action", "schinzel"},
                      {"p", schinzel_p},
                      {"pow", schinzel_pow}};
      else
        job.inputs = {{"action", "invariance"},
                      {"phi", inv_phi},
                      {"seq", inv_seq},
                      {"lambdas", inv_lambdas}};
      if (inv_lambdas.empty()) job.inputs.erase("lambdas");
    } else if (*measure_cmd) {
      job.subcommand = "measure";
      job.inputs = {{"mu", parse_json_arg(measure_mu, "--mu")},
                    {"profile", !measure_no_profile}};
      if (!measure_tails.empty()) job.inputs["tails"] = measure_tails;
      if (!measure_moments.empty()) job.inputs["moments"] = measure_moments;
    } else if (*embed_cmd) {
      job.subcommand = "embed";
      job.inputs = {{"seq", embed_seq},
                    {"mu", parse_json_arg(embed_mu, "--mu")},
                    {"q", embed_q},
                    {"norm", embed_norm},
                    {"emit_plot_data", embed_plot},
                    {"plot_prefix", embed_prefix}};
      if (embed_n > 0) job.inputs["n"] = embed_n;
      if (!embed_tails.empty()) job.inputs["tails"] = embed_tails;
    } else if (*compop_cmd) {
      job.subcommand = "compop";
      job.inputs = {{"phi", compop_phi},
                    {"seq", compop_seq},
                    {"classify", compop_classify},
                    {"svals", compop_svals},
                    {"essnorm", compop_essnorm},
                    {"route", compop_route},
                    {"norm", compop_norm},
                    {"emit_plot_data", compop_plot},
                    {"plot_prefix", compop_prefix}};
    } else if (*report_cmd) {
      std::ifstream is(bundle_file);
      if (!is) {
        std::cerr << "error: cannot read " << bundle_file << "\n";
        return 1;
      }
      json bundle = json::parse(is);
      if (bundle.is_object() && bundle.contains("jobs")) bundle = bundle["jobs"];
      auto res =
          muntz::report::run_bundle(bundle, bundle_dir, opt, bundle_jobs);
      std::cout << res.index.dump(2) << "\n";
      return res.exit_code;
    }

    return finish(muntz::report::run(job, opt), out_path);
  } catch (const std::exception& e) {
    json err = {{"error", {{"kind", "runtime"}, {"message", e.what()}}}};
    std::cout << err.dump(2) << "\n";
    return 1;
  }
}
