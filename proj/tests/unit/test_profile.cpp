#include <doctest.h>

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "intdim/errors.hpp"
#include "intdim/io.hpp"
#include "intdim/manifolds.hpp"
#include "intdim/profile.hpp"
#include "intdim/serialize.hpp"
#include "support/oracles.hpp"

using namespace intdim;

namespace {

struct Layer {
  std::string name;
  std::size_t order_index;
  std::size_t true_id;
  std::size_t d_embed;
  std::optional<std::string> category;
};

// Writes one hypersphere dataset per layer (no boundary, so TwoNN is nearly
// unbiased) plus the manifest, and returns the manifest path.
std::filesystem::path write_network(const std::string& tag, const std::vector<Layer>& layers, std::size_t n = 2000) {
  const auto dir = oracle::temp_dir(tag);
  Manifest man;
  man.network_name = tag;
  man.total_layers = 10;
  std::uint64_t seed = 1;
  for (const auto& l : layers) {
    const auto ds = gen_manifold({ManifoldKind::hypersphere, l.true_id, l.true_id + 1, n, 0.0, seed++});
    const auto file = l.name + (l.category ? "_" + *l.category : "") + ".npy";
    save_npy(dir / file, embed_orthogonal(ds.matrix, l.d_embed, seed++));
    man.checkpoints.push_back({l.name, l.order_index, 10, l.d_embed, file, l.category});
  }
  std::ofstream(dir / "manifest.json") << manifest_to_json(man);
  return dir / "manifest.json";
}

ProfileOptions fast_options() {
  ProfileOptions o;
  o.subsample = {0.9, 5};
  o.seed = 17;
  return o;
}

}  // namespace

TEST_CASE("profile of three synthetic layers recovers their IDs") {
  const auto path = write_network("three_layers", {{"conv1", 2, 3, 64, {}}, {"conv2", 5, 8, 128, {}}, {"fc", 9, 2, 32, {}}});
  const auto p = profile(path, fast_options());
  REQUIRE(p.layers.size() == 3);
  const double truth[] = {3, 8, 2};
  for (std::size_t i = 0; i < 3; ++i) {
    CAPTURE(i);
    CHECK(std::abs(p.layers[i].estimate.d_hat - truth[i]) / truth[i] < 0.15);
  }
  CHECK(p.layers[0].relative_depth == 0.2);
  CHECK(p.layers[1].relative_depth == 0.5);
  CHECK(p.layers[2].relative_depth == 0.9);
  CHECK(p.layers[1].checkpoint.d_embed == 128);
  CHECK(p.network_name == "three_layers");
}

TEST_CASE("single checkpoint equals a direct subsample estimate") {
  const auto path = write_network("single", {{"only", 4, 5, 20, {}}}, 600);
  const auto opts = fast_options();
  const auto p = profile(path, opts);
  REQUIRE(p.layers.size() == 1);
  const auto m = load_matrix(path.parent_path() / "only.npy");
  const auto direct = subsample_estimate(m, opts.subsample, opts.estimator, opts.seed);
  CHECK(p.layers[0].estimate.d_hat == direct.d_hat);
  CHECK(p.layers[0].estimate.std == direct.std);
  CHECK(p.layers[0].estimate.n_used == direct.n_used);
}

TEST_CASE("per-category mode with one category equals plain mode") {
  const auto path = write_network("one_cat", {{"a", 1, 3, 10, "cats"}, {"b", 2, 4, 10, "cats"}}, 500);
  auto opts = fast_options();
  const auto plain = profile(path, opts);
  opts.per_category = true;
  const auto grouped = profile(path, opts);
  REQUIRE(grouped.layers.size() == plain.layers.size());
  for (std::size_t i = 0; i < plain.layers.size(); ++i) {
    CHECK(grouped.layers[i].estimate.d_hat == plain.layers[i].estimate.d_hat);
    CHECK(grouped.layers[i].estimate.std == plain.layers[i].estimate.std);
    CHECK(grouped.layers[i].estimate.n_used == plain.layers[i].estimate.n_used);
    REQUIRE(grouped.layers[i].per_category.size() == 1);
    CHECK(grouped.layers[i].per_category[0].category == "cats");
  }
}

TEST_CASE("per-category mode averages categories of a layer") {
  const auto path = write_network("cats", {{"pool1", 3, 2, 12, "dog"}, {"pool1", 3, 4, 12, "cat"}, {"pool1", 3, 6, 12, "car"},
                                           {"fc", 8, 3, 12, "dog"}, {"fc", 8, 3, 12, "cat"}, {"fc", 8, 3, 12, "car"}},
                                 500);
  auto opts = fast_options();
  opts.per_category = true;
  const auto p = profile(path, opts);
  REQUIRE(p.layers.size() == 2);
  const auto& pool = p.layers[0];
  REQUIRE(pool.per_category.size() == 3);
  std::vector<double> ids;
  for (const auto& c : pool.per_category) ids.push_back(c.estimate.d_hat);
  CHECK(pool.estimate.d_hat == doctest::Approx(mean(ids)));
  CHECK(pool.estimate.std == doctest::Approx(sample_std(ids)));
  CHECK(pool.estimate.std > 0.5);
  CHECK(pool.per_category[1].category == "cat");
}

TEST_CASE("profile output is byte-identical across runs") {
  const auto path = write_network("repeat", {{"l1", 1, 3, 16, {}}, {"l2", 2, 5, 16, {}}}, 400);
  const auto a = to_json(profile(path, fast_options())).dump();
  const auto b = to_json(profile(path, fast_options())).dump();
  CHECK(a == b);
  CHECK(to_csv(profile(path, fast_options())) == to_csv(profile(path, fast_options())));
}

TEST_CASE("profile errors name the checkpoint") {
  const auto dir = oracle::temp_dir("profile_errors");
  save_npy(dir / "tiny.npy", oracle::gaussian(2, 3, 1));
  save_npy(dir / "ok.npy", oracle::gaussian(50, 3, 1));
  auto run = [&](const std::string& name, const std::string& file, std::size_t d_embed) {
    Manifest man{"net", 4, {{name, 1, 4, d_embed, file, {}}}, dir};
    return profile(man, fast_options());
  };
  try {
    run("missing_layer", "nope.npy", 3);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("missing_layer") != std::string::npos);
  }
  try {
    run("tiny_layer", "tiny.npy", 3);
    FAIL("expected DegenerateDataError");
  } catch (const DegenerateDataError& e) {
    CHECK(std::string(e.what()).find("tiny_layer") != std::string::npos);
  }
  CHECK_THROWS_AS(run("wrong_width", "ok.npy", 4), ValidationError);
}

TEST_CASE("duplicates are removed before estimating") {
  const auto dir = oracle::temp_dir("profile_dupes");
  RowMatrix x = oracle::gaussian(60, 3, 2).to_eigen();
  x.row(5) = x.row(4);
  x.row(9) = x.row(4);
  save_npy(dir / "d.npy", ActivationMatrix::from_eigen(x));
  const Manifest man{"net", 1, {{"d", 1, 1, 3, "d.npy", {}}}, dir};
  const auto p = profile(man, fast_options());
  CHECK(p.layers[0].removed_duplicates == 2);
}

TEST_CASE("manifest parsing") {
  const std::string text = R"({"schema_version": 1, "network_name": "vgg", "total_layers": 16,
    "checkpoints": [{"name": "input", "order_index": 0, "d_embed": 150528, "matrix_path": "l0.npy"},
                    {"name": "pool1", "order_index": 2, "d_embed": 802816, "matrix_path": "l2.npy", "category": "dog"}]})";
  const auto m = parse_manifest(text, "/data");
  CHECK(m.network_name == "vgg");
  CHECK(m.total_layers == 16);
  REQUIRE(m.checkpoints.size() == 2);
  CHECK(m.checkpoints[1].category == std::optional<std::string>("dog"));
  CHECK_FALSE(m.checkpoints[0].category.has_value());
  CHECK(m.checkpoints[1].total_layers == 16);

  const auto again = parse_manifest(manifest_to_json(m), "/data");
  CHECK(again.checkpoints[1].matrix_path == m.checkpoints[1].matrix_path);
  CHECK(again.checkpoints[1].d_embed == 802816);
}

TEST_CASE("manifest errors") {
  CHECK_THROWS_AS(parse_manifest("{\"network_name\": "), ParseError);
  try {
    parse_manifest("{\"a\": 1,,}");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.unit() == ParseError::Unit::byte);
    CHECK(e.offset() == 9);
  }
  const auto base = nlohmann::json::parse(R"({"network_name": "n", "total_layers": 4,
    "checkpoints": [{"name": "a", "order_index": 1, "d_embed": 3, "matrix_path": "a.npy"}]})");
  CHECK_NOTHROW(parse_manifest(base.dump()));
  auto mutate = [&](auto f) {
    auto j = base;
    f(j);
    return j.dump();
  };
  CHECK_THROWS_AS(parse_manifest(mutate([](auto& j) { j.erase("network_name"); })), ConfigError);
  CHECK_THROWS_AS(parse_manifest(mutate([](auto& j) { j["total_layers"] = "four"; })), ConfigError);
  CHECK_THROWS_AS(parse_manifest(mutate([](auto& j) { j["total_layers"] = 0; })), ConfigError);
  CHECK_THROWS_AS(parse_manifest(mutate([](auto& j) { j["checkpoints"] = nlohmann::json::array(); })), ConfigError);
  CHECK_THROWS_AS(parse_manifest(mutate([](auto& j) { j["checkpoints"][0]["order_index"] = 5; })), ConfigError);
  CHECK_THROWS_AS(parse_manifest(mutate([](auto& j) { j["checkpoints"][0]["order_index"] = -1; })), ConfigError);
  CHECK_THROWS_AS(parse_manifest(mutate([](auto& j) { j["checkpoints"][0].erase("matrix_path"); })), ConfigError);
  CHECK_THROWS_AS(parse_manifest(mutate([](auto& j) { j["schema_version"] = 2; })), ConfigError);
  CHECK_THROWS_AS(parse_manifest(mutate([](auto& j) {
                    j["checkpoints"].push_back({{"name", "b"}, {"order_index", 0}, {"d_embed", 3}, {"matrix_path", "b.npy"}});
                  })),
                  ConfigError);
  CHECK_THROWS_AS(load_manifest("/nonexistent/manifest.json"), IoError);
}

TEST_CASE("relative depth") {
  CHECK(relative_depth(0, 10) == 0.0);
  CHECK(relative_depth(10, 10) == 1.0);
  CHECK(relative_depth(2, 8) == 0.25);
  CHECK_THROWS_AS(relative_depth(11, 10), ConfigError);
  CHECK_THROWS_AS(relative_depth(0, 0), ConfigError);
}

TEST_CASE("class bound examples") {
  CHECK(min_id_bound(1000).min_id == 10);
  CHECK(min_id_bound(2).min_id == 1);
  CHECK(min_id_bound(40).min_id == 6);
  CHECK(min_id_bound(1).min_id == 0);
  CHECK_THROWS_AS(min_id_bound(0), ConfigError);
}

TEST_CASE("class bound holds for every n up to 10^6") {
  std::size_t bad = 0;
  for (std::uint64_t n = 1; n <= 1000000; ++n) {
    const unsigned id = min_id_bound(n).min_id;
    const bool ok = (std::uint64_t{1} << id) >= n && (n < 2 || (std::uint64_t{1} << (id - 1)) < n);
    bad += !ok;
  }
  CHECK(bad == 0);
}

TEST_CASE("pearson examples") {
  const std::vector<double> x{1, 2, 3};
  CHECK(pearson(x, std::vector<double>{2, 4, 6}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson(x, std::vector<double>{3, 2, 1}) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(pearson(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4}) == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("pearson affine invariance") {
  const auto g = oracle::gaussian(200, 2, 3).to_eigen();
  std::vector<double> x(200), y(200), xa(200), yn(200);
  for (std::size_t i = 0; i < 200; ++i) {
    x[i] = g(static_cast<Eigen::Index>(i), 0);
    y[i] = 0.5 * x[i] + g(static_cast<Eigen::Index>(i), 1);
    xa[i] = 4.0 * x[i] + 2.5;
    yn[i] = -3.0 * y[i] + 1.0;
  }
  const double r = pearson(x, y);
  CHECK(std::abs(pearson(xa, y) - r) < 1e-12);
  CHECK(std::abs(pearson(x, yn) + r) < 1e-12);
}

TEST_CASE("pearson errors") {
  CHECK_THROWS_AS(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), DegenerateDataError);
  CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), ConfigError);
  CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{1}), ConfigError);
}

TEST_CASE("estimate report round trip") {
  IdEstimate e{4.5, 0.25, Method::cumulate, 900, 20, 7, {"w"}};
  const auto j = to_json(e);
  CHECK(j["schema_version"] == 1);
  const auto back = id_estimate_from_json(j);
  CHECK(back.d_hat == 4.5);
  CHECK(back.method == Method::cumulate);
  CHECK(back.warnings == std::vector<std::string>{"w"});
  CHECK(to_csv(e).rfind("d_hat,std,method,n_used,repeats,seed\n", 0) == 0);
  CHECK_THROWS_AS(id_estimate_from_json(nlohmann::json{{"d_hat", 1.0}}), ValidationError);
}
