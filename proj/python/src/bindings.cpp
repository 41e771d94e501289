// Thin pybind11 layer over the C++ library. Matrices cross as 2-D numpy
// arrays (float32 stays float32); reports cross as the same JSON documents
// the CLI prints, decoded on the Python side.

#include <cstring>
#include <optional>
#include <string>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "intdim/decimation.hpp"
#include "intdim/errors.hpp"
#include "intdim/estimators.hpp"
#include "intdim/io.hpp"
#include "intdim/manifolds.hpp"
#include "intdim/neighbors.hpp"
#include "intdim/profile.hpp"
#include "intdim/serialize.hpp"
#include "intdim/spectrum.hpp"

namespace py = pybind11;
using namespace intdim;

namespace {

template <class T>
using CArray = py::array_t<T, py::array::c_style | py::array::forcecast>;

template <class T>
ActivationMatrix from_array(const CArray<T>& a) {
  if (a.ndim() != 2) throw ValidationError("expected a 2-D array, got " + std::to_string(a.ndim()) + " dimensions");
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  std::vector<T> values(a.data(), a.data() + rows * cols);
  return ActivationMatrix(rows, cols, std::move(values));
}

// float32 input keeps float32 storage; anything else is converted to float64.
ActivationMatrix to_matrix(const py::array& a) {
  if (py::isinstance<py::array_t<float>>(a)) return from_array<float>(a.cast<CArray<float>>());
  return from_array<double>(a.cast<CArray<double>>());
}

py::array to_array(const ActivationMatrix& m) {
  return m.visit([&](auto values) -> py::array {
    using T = typename decltype(values)::value_type;
    py::array_t<T> out({m.rows(), m.cols()});
    if (!values.empty()) std::memcpy(out.mutable_data(), values.data(), values.size() * sizeof(T));
    return out;
  });
}

template <class T>
py::array_t<T> vec(std::span<const T> v) {
  py::array_t<T> out(static_cast<py::ssize_t>(v.size()));
  if (!v.empty()) std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(T));
  return out;
}
template <class T>
py::array_t<T> vec(const std::vector<T>& v) {
  return vec(std::span<const T>(v));
}

EstimatorConfig config(const std::string& method, double discard_fraction, unsigned threads) {
  EstimatorConfig c;
  c.method = parse_method(method);
  c.discard_fraction = discard_fraction;
  c.kernel.threads = threads;
  return c;
}

}  // namespace

PYBIND11_MODULE(_intdim, mod) {
  mod.doc() = "Intrinsic dimension of point clouds (native core)";
  mod.attr("SCHEMA_VERSION") = kSchemaVersion;

  auto base = py::register_exception<Error>(mod, "IntdimError", PyExc_RuntimeError);
  auto config_error = py::register_exception<ConfigError>(mod, "ConfigError", base.ptr());
  auto validation_error = py::register_exception<ValidationError>(mod, "ValidationError", base.ptr());
  py::register_exception<ParseError>(mod, "ParseError", validation_error.ptr());
  py::register_exception<DegenerateDataError>(mod, "DegenerateDataError", base.ptr());
  py::register_exception<IoError>(mod, "IoError", base.ptr());
  (void)config_error;

  mod.def("load_matrix", [](const std::filesystem::path& p) { return to_array(load_matrix(p)); }, py::arg("path"));
  mod.def("save_matrix", [](const std::filesystem::path& p, const py::array& a) { save_matrix(p, to_matrix(a)); },
          py::arg("path"), py::arg("x"));

  mod.def(
      "two_nearest",
      [](const py::array& x, unsigned threads) {
        KernelOptions opts;
        opts.threads = threads;
        const NeighborStats s = two_nearest(to_matrix(x), opts);
        py::dict d;
        d["r1"] = vec(s.r1);
        d["r2"] = vec(s.r2);
        d["nn1"] = vec(s.nn1);
        d["nn2"] = vec(s.nn2);
        d["mu"] = vec(s.mu);
        return d;
      },
      py::arg("x"), py::arg("threads") = 0);

  mod.def(
      "dedupe",
      [](const py::array& x, double tol) {
        const DedupeResult r = dedupe(to_matrix(x), tol);
        return py::make_tuple(to_array(r.matrix), vec(r.matrix.row_ids()),
                              r.removed);
      },
      py::arg("x"), py::arg("tol") = 0.0);

  mod.def(
      "estimate_ratios",
      [](const std::vector<double>& mu, const std::string& method, double discard_fraction) {
        const Method m = parse_method(method);
        if (m == Method::triplets) throw ConfigError("triplets needs neighbour ids; use estimate() on the points");
        return to_json(m == Method::mle ? estimate_mle(mu) : estimate_cumulate(mu, discard_fraction)).dump();
      },
      py::arg("mu"), py::arg("method") = "mle", py::arg("discard_fraction") = 0.1);

  mod.def(
      "estimate",
      [](const py::array& x, const std::string& method, double fraction, std::size_t repeats, double discard_fraction,
         std::uint64_t seed, unsigned threads) {
        const ActivationMatrix m = to_matrix(x);
        py::gil_scoped_release release;
        return to_json(subsample_estimate(m, {fraction, repeats}, config(method, discard_fraction, threads), seed)).dump();
      },
      py::arg("x"), py::arg("method") = "mle", py::arg("subsample_fraction") = 0.9, py::arg("repeats") = 20,
      py::arg("discard_fraction") = 0.1, py::arg("seed") = 0, py::arg("threads") = 0);

  mod.def(
      "decimate",
      [](const py::array& x, std::size_t k_max, const std::string& method, double rel_tol, double discard_fraction,
         std::uint64_t seed, unsigned threads) {
        const ActivationMatrix m = to_matrix(x);
        py::gil_scoped_release release;
        const DecimationCurve c = decimation_curve(m, k_max, config(method, discard_fraction, threads), seed);
        return to_json(c, stability_verdict(c, rel_tol)).dump();
      },
      py::arg("x"), py::arg("k_max") = 20, py::arg("method") = "mle", py::arg("rel_tol") = 0.1,
      py::arg("discard_fraction") = 0.1, py::arg("seed") = 0, py::arg("threads") = 0);

  mod.def("spearman", [](const std::vector<double>& x, const std::vector<double>& y) { return spearman(x, y); });

  mod.def(
      "spectrum",
      [](const py::array& x, bool use_correlation, double threshold) {
        return to_json(spectrum(to_matrix(x), use_correlation, threshold)).dump();
      },
      py::arg("x"), py::arg("use_correlation") = true, py::arg("threshold") = 0.9);

  mod.def("gaussian_surrogate", [](const py::array& x, std::uint64_t seed) { return to_array(gaussian_surrogate(to_matrix(x), seed)); },
          py::arg("x"), py::arg("seed") = 0);

  mod.def(
      "gen_manifold",
      [](const std::string& kind, std::size_t d_intrinsic, std::optional<std::size_t> d_embed, std::size_t n,
         double noise, std::uint64_t seed) {
        ManifoldSpec spec;
        spec.kind = parse_manifold_kind(kind);
        spec.d_intrinsic = d_intrinsic;
        spec.d_embed = d_embed.value_or(minimal_ambient_dimension(spec.kind, d_intrinsic));
        spec.n = n;
        spec.noise = noise;
        spec.seed = seed;
        const GeneratedDataset ds = gen_manifold(spec);
        return py::make_tuple(to_array(ds.matrix), ds.true_id);
      },
      py::arg("kind"), py::arg("d_intrinsic"), py::arg("d_embed") = py::none(), py::arg("n") = 1000,
      py::arg("noise") = 0.0, py::arg("seed") = 0);

  mod.def("embed_orthogonal",
          [](const py::array& x, std::size_t d_target, std::uint64_t seed) {
            return to_array(embed_orthogonal(to_matrix(x), d_target, seed));
          },
          py::arg("x"), py::arg("d_target"), py::arg("seed") = 0);
  mod.def("fourier_lift",
          [](const py::array& x, std::size_t d_target, double bandwidth, std::uint64_t seed) {
            return to_array(fourier_lift(to_matrix(x), d_target, bandwidth, seed));
          },
          py::arg("x"), py::arg("d_target"), py::arg("bandwidth") = 1.0, py::arg("seed") = 0);
  mod.def("perturb_luminance",
          [](const py::array& x, double lambda, std::uint64_t seed) {
            return to_array(perturb_luminance(to_matrix(x), {lambda, seed}));
          },
          py::arg("x"), py::arg("lam"), py::arg("seed") = 0);

  mod.def(
      "profile",
      [](const std::filesystem::path& manifest, const std::string& method, double fraction, std::size_t repeats,
         double discard_fraction, double dedupe_tol, bool per_category, std::uint64_t seed, unsigned threads) {
        ProfileOptions opts;
        opts.estimator = config(method, discard_fraction, threads);
        opts.subsample = {fraction, repeats};
        opts.seed = seed;
        opts.dedupe_tol = dedupe_tol;
        opts.per_category = per_category;
        py::gil_scoped_release release;
        return to_json(profile(manifest, opts)).dump();
      },
      py::arg("manifest"), py::arg("method") = "mle", py::arg("subsample_fraction") = 0.9, py::arg("repeats") = 20,
      py::arg("discard_fraction") = 0.1, py::arg("dedupe_tol") = 0.0, py::arg("per_category") = false,
      py::arg("seed") = 0, py::arg("threads") = 0);

  // Round-trips a manifest through the C++ reader: raises on anything profile() would reject.
  mod.def("normalize_manifest", [](const std::string& text) { return manifest_to_json(parse_manifest(text)); },
          py::arg("text"));

  mod.def("relative_depth", &relative_depth, py::arg("order_index"), py::arg("total_layers"));
  mod.def("min_id_bound", [](std::uint64_t n) { return min_id_bound(n).min_id; }, py::arg("n_classes"));
  mod.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) { return pearson(x, y); },
          py::arg("x"), py::arg("y"));
}
