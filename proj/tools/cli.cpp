#include "cli.hpp"

#include <algorithm>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "intdim/decimation.hpp"
#include "intdim/errors.hpp"
#include "intdim/estimators.hpp"
#include "intdim/io.hpp"
#include "intdim/manifolds.hpp"
#include "intdim/neighbors.hpp"
#include "intdim/profile.hpp"
#include "intdim/serialize.hpp"
#include "intdim/spectrum.hpp"

namespace intdim::cli {

namespace {

using nlohmann::json;

struct Globals {
  std::uint64_t seed = 0;
  std::string method = "mle";
  double fraction = 0.9;
  std::size_t repeats = 20;
  std::string format = "json";
  unsigned threads = 0;
};

struct Output {
  std::ostream& out;
  bool csv;

  void emit(const json& j, const std::string& csv_text) const {
    if (csv) {
      out << csv_text;
    } else {
      out << j.dump(2) << '\n';
    }
  }
};

EstimatorConfig estimator_config(const Globals& g, double discard) {
  EstimatorConfig cfg;
  cfg.method = parse_method(g.method);
  cfg.discard_fraction = discard;
  cfg.kernel.threads = g.threads;
  return cfg;
}

ActivationMatrix load_clean(const std::string& path, std::optional<double> dedupe_tol, std::size_t& removed) {
  ActivationMatrix m = load_matrix(path);
  removed = 0;
  if (!dedupe_tol) return m;
  DedupeResult r = dedupe(m, *dedupe_tol);
  removed = r.removed;
  return std::move(r.matrix);
}

void emit_matrix_summary(const Output& o, const std::string& path, const ActivationMatrix& m) {
  json j = {{"schema_version", kSchemaVersion}, {"output", path}, {"rows", m.rows()}, {"cols", m.cols()}};
  o.emit(j, "output,rows,cols\n" + path + ',' + std::to_string(m.rows()) + ',' + std::to_string(m.cols()) + '\n');
}

std::string number(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Intrinsic dimension of point clouds (TwoNN), with scale analysis and PCA baselines", "intdim"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--method", g.method, "Estimator")
      ->check(CLI::IsMember({"mle", "cumulate", "triplets"}))
      ->capture_default_str();
  app.add_option("--subsample-fraction", g.fraction, "Share of rows per subsample repeat")->capture_default_str();
  app.add_option("--repeats", g.repeats, "Subsample repeats")->capture_default_str();
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads for the distance kernel (0: all cores)")->capture_default_str();

  std::string input;
  std::string output;
  std::optional<double> dedupe_tol;
  double discard = 0.1;

  auto* estimate_cmd = app.add_subcommand("estimate", "Global ID of a matrix (mean and std over subsamples)");
  estimate_cmd->add_option("matrix", input, "NPY or CSV matrix, one row per point")->required();
  estimate_cmd->add_option("--dedupe-tol", dedupe_tol, "Drop rows within this distance of an earlier row first");
  estimate_cmd->add_option("--discard-fraction", discard, "Upper tail dropped by the cumulate fit")->capture_default_str();

  std::size_t k_max = 20;
  double rel_tol = 0.1;
  auto* decimate_cmd = app.add_subcommand("decimate", "ID versus sample size by k-fold decimation");
  decimate_cmd->add_option("matrix", input)->required();
  decimate_cmd->add_option("--k-max", k_max, "Largest fold count")->capture_default_str();
  decimate_cmd->add_option("--rel-tol", rel_tol, "Tolerance of the stability verdict")->capture_default_str();
  decimate_cmd->add_option("--dedupe-tol", dedupe_tol);
  decimate_cmd->add_option("--discard-fraction", discard)->capture_default_str();

  bool raw_covariance = false;
  double threshold = 0.9;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "PCA eigenspectrum and PC-ID");
  spectrum_cmd->add_option("matrix", input)->required();
  spectrum_cmd->add_flag("--raw-covariance", raw_covariance, "Use the covariance instead of the correlation matrix");
  spectrum_cmd->add_option("--threshold", threshold, "Variance share defining PC-ID")->capture_default_str();

  auto* surrogate_cmd = app.add_subcommand("surrogate", "Gaussian sample with the same mean and covariance");
  surrogate_cmd->add_option("matrix", input)->required();
  surrogate_cmd->add_option("-o,--output", output, "Output matrix (.npy or .csv)")->required();

  ManifoldSpec spec;
  std::string kind = "hypercube";
  std::size_t d_embed = 0;
  auto* synth_cmd = app.add_subcommand("synth", "Sample a manifold of known ID (writes NPY plus a JSON sidecar)");
  synth_cmd->add_option("--kind", kind)
      ->check(CLI::IsMember({"line", "hypercube", "hypersphere", "swiss_roll", "gaussian_blob"}))
      ->capture_default_str();
  synth_cmd->add_option("--d-intrinsic", spec.d_intrinsic)->capture_default_str();
  synth_cmd->add_option("--d-embed", d_embed, "Ambient dimension (default: the smallest the kind allows)");
  synth_cmd->add_option("--n", spec.n)->capture_default_str();
  synth_cmd->add_option("--noise", spec.noise, "Std of isotropic Gaussian noise")->capture_default_str();
  synth_cmd->add_option("-o,--output", output, "Output .npy path")->required();

  std::size_t d_target = 0;
  auto* embed_cmd = app.add_subcommand("embed", "Random orthogonal embedding into a larger space");
  embed_cmd->add_option("matrix", input)->required();
  embed_cmd->add_option("--d-target", d_target)->required();
  embed_cmd->add_option("-o,--output", output)->required();

  double lambda = 0.0;
  auto* luminance_cmd = app.add_subcommand("perturb-luminance", "Add lambda * U[0,1) to every coordinate of each row");
  luminance_cmd->add_option("matrix", input)->required();
  luminance_cmd->add_option("--lambda", lambda)->required();
  luminance_cmd->add_option("-o,--output", output)->required();

  bool per_category = false;
  double profile_tol = 0.0;
  auto* profile_cmd = app.add_subcommand("profile", "ID of every checkpoint listed in a manifest");
  profile_cmd->add_option("manifest", input, "Manifest JSON")->required();
  profile_cmd->add_flag("--per-category", per_category, "Average per-category IDs within each layer");
  profile_cmd->add_option("--dedupe-tol", profile_tol)->capture_default_str();
  profile_cmd->add_option("--discard-fraction", discard)->capture_default_str();

  std::vector<double> xs;
  std::vector<double> ys;
  auto* correlate_cmd = app.add_subcommand("correlate", "Pearson correlation of two series");
  correlate_cmd->add_option("--x", xs, "Comma-separated values")->delimiter(',');
  correlate_cmd->add_option("--y", ys, "Comma-separated values")->delimiter(',');
  correlate_cmd->add_option("pairs", input, "Two-column CSV of (x, y) pairs");

  std::uint64_t n_classes = 0;
  auto* bound_cmd = app.add_subcommand("bound", "Smallest ID with n_classes <= 2^ID");
  bound_cmd->add_option("n_classes", n_classes)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(ErrorKind::configuration);
  }

  const Output o{out, g.format == "csv"};
  try {
    if (estimate_cmd->parsed()) {
      std::size_t removed = 0;
      const ActivationMatrix m = load_clean(input, dedupe_tol, removed);
      const IdEstimate e = subsample_estimate(m, {g.fraction, g.repeats}, estimator_config(g, discard), g.seed);
      json j = to_json(e);
      if (dedupe_tol) j["removed_duplicates"] = removed;
      o.emit(j, to_csv(e));
    } else if (decimate_cmd->parsed()) {
      std::size_t removed = 0;
      const ActivationMatrix m = load_clean(input, dedupe_tol, removed);
      const DecimationCurve c = decimation_curve(m, k_max, estimator_config(g, discard), g.seed);
      const Stability verdict = stability_verdict(c, rel_tol);
      o.emit(to_json(c, verdict), to_csv(c));
    } else if (spectrum_cmd->parsed()) {
      const SpectrumReport r = spectrum(load_matrix(input), !raw_covariance, threshold);
      o.emit(to_json(r), to_csv(r));
    } else if (surrogate_cmd->parsed()) {
      const ActivationMatrix s = gaussian_surrogate(load_matrix(input), g.seed);
      save_matrix(output, s);
      emit_matrix_summary(o, output, s);
    } else if (synth_cmd->parsed()) {
      spec.kind = parse_manifold_kind(kind);
      spec.d_embed = d_embed != 0 ? d_embed : minimal_ambient_dimension(spec.kind, spec.d_intrinsic);
      spec.seed = g.seed;
      if (format_from_path(output) != MatrixFormat::npy) throw ConfigError("synth writes NPY; use a .npy output path");
      const GeneratedDataset ds = gen_manifold(spec);
      write_dataset(output, ds);
      emit_matrix_summary(o, output, ds.matrix);
    } else if (embed_cmd->parsed()) {
      const ActivationMatrix e = embed_orthogonal(load_matrix(input), d_target, g.seed);
      save_matrix(output, e);
      emit_matrix_summary(o, output, e);
    } else if (luminance_cmd->parsed()) {
      const ActivationMatrix p = perturb_luminance(load_matrix(input), {lambda, g.seed});
      save_matrix(output, p);
      emit_matrix_summary(o, output, p);
    } else if (profile_cmd->parsed()) {
      ProfileOptions opts;
      opts.estimator = estimator_config(g, discard);
      opts.subsample = {g.fraction, g.repeats};
      opts.seed = g.seed;
      opts.dedupe_tol = profile_tol;
      opts.per_category = per_category;
      const LayerProfile p = profile(std::filesystem::path(input), opts);
      o.emit(to_json(p), to_csv(p));
    } else if (correlate_cmd->parsed()) {
      if (!input.empty()) {
        if (!xs.empty() || !ys.empty()) throw ConfigError("give either a pairs file or --x/--y, not both");
        const ActivationMatrix pairs = load_matrix(input);
        if (pairs.cols() != 2) throw ValidationError("pairs file must have exactly 2 columns");
        for (std::size_t i = 0; i < pairs.rows(); ++i) {
          xs.push_back(pairs(i, 0));
          ys.push_back(pairs(i, 1));
        }
      }
      const double r = pearson(xs, ys);
      json j = {{"schema_version", kSchemaVersion}, {"r", r}, {"n", xs.size()}};
      o.emit(j, "r,n\n" + number(r) + ',' + std::to_string(xs.size()) + '\n');
    } else if (bound_cmd->parsed()) {
      const ClassBound b = min_id_bound(n_classes);
      o.emit(to_json(b), "n_classes,min_id\n" + std::to_string(b.n_classes) + ',' + std::to_string(b.min_id) + '\n');
    }
  } catch (const Error& e) {
    err << "error: " << e.what();
    if (e.kind() == ErrorKind::degenerate_data && std::string_view(e.what()).find("(r1 = 0)") != std::string_view::npos) {
      err << " (pass --dedupe-tol 0 to drop exact copies)";
    }
    err << '\n';
    return exit_code(e.kind());
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return 1;
  }
  return 0;
}

}  // namespace intdim::cli
