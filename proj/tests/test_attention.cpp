#include <doctest.h>

#include <cmath>
#include <cstring>

#include "panobev/attention.hpp"
#include "panobev/errors.hpp"
#include "panobev/io.hpp"
#include "panobev/rng.hpp"

#include "test_util.hpp"

using namespace panobev;

namespace {

// Fixture with queries, in-bounds reference angles and a random feature map.
struct Fixture {
  BevQueries q;
  SphericalRefs refs;
  ValidMask mask;
  FeatureMap f;
  LinearParams params;
};

Fixture make_fixture(uint64_t seed, std::size_t n = 4, std::size_t c = 8,
                     std::size_t k = 4, std::size_t h = 8, std::size_t w = 16,
                     bool randomize = true) {
  Fixture fx;
  Rng rng(seed);
  fx.q = Mat(n, c);
  for (double& x : fx.q.v) x = rng.normal();
  fx.refs.angles.resize(n);
  for (auto& a : fx.refs.angles) {
    a.phi = rng.uniform(-3.0, 3.0);
    a.theta = rng.uniform(0.4, M_PI - 0.4);
  }
  fx.mask.assign(n, 1);
  fx.f = FeatureMap(c, h, w);
  for (double& x : fx.f.v) x = rng.normal();
  fx.params = init_params(static_cast<uint32_t>(c), static_cast<uint32_t>(k),
                          seed);
  if (randomize) randomize_params(fx.params, seed + 1, 0.1);
  return fx;
}

}  // namespace

TEST_CASE("init_params is deterministic and zero-initialized where it counts") {
  LinearParams a = init_params(8, 4, 123);
  LinearParams b = init_params(8, 4, 123);
  CHECK(a.pos.weight == b.pos.weight);
  CHECK(a.pos.bias == b.pos.bias);
  LinearParams c = init_params(8, 4, 124);
  CHECK(a.pos.weight != c.pos.weight);
  for (double w : a.sph_offsets.weight) CHECK(w == 0.0);
  for (double w : a.ref_offsets.weight) CHECK(w == 0.0);
  for (double w : a.attn.weight) CHECK(w == 0.0);
}

TEST_CASE("zero-initialized offset head yields zero offsets") {
  Fixture fx = make_fixture(1, 4, 8, 4, 8, 16, /*randomize=*/false);
  SgcOffsets out = sgc_offsets(fx.q, fx.refs, fx.mask, fx.params);
  REQUIRE(out.rows.size() == 4);
  for (double d : out.offsets.dphi) CHECK(d == 0.0);
  for (double d : out.offsets.dtheta) CHECK(d == 0.0);
}

TEST_CASE("zero-initialized weight head yields uniform attention") {
  Fixture fx = make_fixture(2, 3, 8, 4, 8, 16, /*randomize=*/false);
  AttentionWeights w = attention_weights(fx.q, fx.params);
  for (double a : w.v) CHECK(a == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("sgc_offsets matches a straight-line oracle") {
  Fixture fx = make_fixture(3);
  SgcOffsets out = sgc_offsets(fx.q, fx.refs, fx.mask, fx.params);
  const LinearParams& p = fx.params;
  for (std::size_t i = 0; i < 4; ++i) {
    // independent re-implementation: explicit index arithmetic
    double expect[2];
    for (int o = 0; o < 2; ++o) {
      double acc = p.sph_offsets.bias[o];
      for (std::size_t cidx = 0; cidx < 8; ++cidx) {
        double enc = p.pos.bias[cidx] +
                     p.pos.weight[cidx * 2] * fx.refs.angles[i].phi +
                     p.pos.weight[cidx * 2 + 1] * fx.refs.angles[i].theta;
        acc += p.sph_offsets.weight[o * 8 + cidx] *
               (fx.q.at(i, cidx) + enc);
      }
      expect[o] = acc;
    }
    CHECK(out.offsets.dphi[i] == doctest::Approx(expect[0]).epsilon(1e-6));
    CHECK(out.offsets.dtheta[i] == doctest::Approx(expect[1]).epsilon(1e-6));
  }
}

TEST_CASE("sgc_offsets drops masked rows") {
  Fixture fx = make_fixture(4);
  fx.mask = {1, 0, 1, 0};
  SgcOffsets out = sgc_offsets(fx.q, fx.refs, fx.mask, fx.params);
  CHECK(out.rows == std::vector<uint32_t>{0, 2});
  CHECK(out.offsets.size() == 2);

  fx.mask = {0, 0, 0, 0};
  SgcOffsets none = sgc_offsets(fx.q, fx.refs, fx.mask, fx.params);
  CHECK(none.rows.empty());
  CHECK(none.offsets.size() == 0);
}

TEST_CASE("tanh bounding keeps offsets under delta_max") {
  Fixture fx = make_fixture(5);
  randomize_params(fx.params, 50, 5.0);  // large raw offsets
  OffsetBound bound{true, M_PI / 8.0};
  SgcOffsets out = sgc_offsets(fx.q, fx.refs, fx.mask, fx.params, bound);
  for (std::size_t i = 0; i < out.offsets.size(); ++i) {
    CHECK(std::abs(out.offsets.dphi[i]) <= M_PI / 8.0);
    CHECK(std::abs(out.offsets.dtheta[i]) <= M_PI / 8.0);
  }
}

TEST_CASE("apply_offsets wraps azimuth and clamps polar") {
  SphericalRefs refs;
  refs.angles = {{0.0, 1.0},
                 {-0.1, 1.0},  // azimuth 2pi - 0.1
                 {0.5, 3.0}};
  AngularOffsets d;
  d.dphi = {0.0, 0.2, 0.0};
  d.dtheta = {0.0, 0.0, 0.5};
  SphericalRefs out = apply_offsets(refs, d);
  CHECK(out.angles[0].phi == doctest::Approx(0.0));
  CHECK(out.angles[0].theta == doctest::Approx(1.0));
  CHECK(out.angles[1].azimuth_0_2pi() == doctest::Approx(0.1));
  CHECK(out.angles[2].theta == doctest::Approx(M_PI));  // clamped
  AngularOffsets bad;
  bad.dphi = {0.0};
  bad.dtheta = {0.0};
  CHECK_THROWS_AS(apply_offsets(refs, bad), Error);
}

TEST_CASE("sgc_index delegates per point and stays in bounds") {
  Fixture fx = make_fixture(6, 16);
  std::vector<PixelIndex> batch = sgc_index(fx.refs, 8, 16);
  for (std::size_t i = 0; i < fx.refs.size(); ++i)
    CHECK(batch[i] == sph_to_pixel(fx.refs.angles[i], 8, 16));

  Rng rng(61);
  for (int i = 0; i < 100000; ++i) {
    SphericalAngle a{rng.uniform(-10.0, 10.0), rng.uniform(-1.0, 4.0)};
    PixelIndex idx = sph_to_pixel(a, 8, 16);
    CHECK(idx.row >= 0);
    CHECK(idx.row < 8);
    CHECK(idx.col >= 0);
    CHECK(idx.col < 16);
  }
}

TEST_CASE("sda hand-evaluated cases on a 2x2 feature map") {
  FeatureMap f(1, 2, 2);
  f.at(0, 0, 0) = 1.0;
  f.at(0, 0, 1) = 2.0;
  f.at(0, 1, 0) = 3.0;
  f.at(0, 1, 1) = 4.0;

  SUBCASE("two exact samples with equal weights average to 2.5") {
    SampleGrid grid;
    grid.count = 1;
    grid.n_ref = 2;
    grid.row = {0.0, 1.0};
    grid.col = {0.0, 1.0};
    AttentionWeights w(1, 2);
    w.at(0, 0) = 0.5;
    w.at(0, 1) = 0.5;
    Mat out = sda_aggregate(grid, w, f);
    CHECK(out.at(0, 0) == doctest::Approx(2.5));
  }
  SUBCASE("one-hot weight at an exact cell is a plain gather") {
    SampleGrid grid;
    grid.count = 1;
    grid.n_ref = 1;
    grid.row = {1.0};
    grid.col = {1.0};
    AttentionWeights w(1, 1);
    w.at(0, 0) = 1.0;
    Mat out = sda_aggregate(grid, w, f);
    CHECK(out.at(0, 0) == 4.0);  // exact
  }
  SUBCASE("bilinear sample at (0.5, 0.5) is 2.5") {
    CHECK(bilinear_sample(f, 0, 0.5, 0.5) == doctest::Approx(2.5));
  }
  SUBCASE("columns wrap azimuthally, rows clamp") {
    // halfway between col 1 and wrapped col 0 on row 0: (2 + 1) / 2
    CHECK(bilinear_sample(f, 0, 0.0, 1.5) == doctest::Approx(1.5));
    // above the top row clamps to it
    CHECK(bilinear_sample(f, 0, -3.0, 0.0) == doctest::Approx(1.0));
  }
}

TEST_CASE("softmax with a single reference is exactly one-hot") {
  Fixture fx = make_fixture(7, 4, 8, 1);
  AttentionWeights w = attention_weights(fx.q, fx.params);
  for (double a : w.v) CHECK(a == 1.0);  // exact

  // with zero 2D offsets the forward equals a direct feature lookup
  for (double& x : fx.params.ref_offsets.weight) x = 0.0;
  for (double& x : fx.params.ref_offsets.bias) x = 0.0;
  std::vector<PixelIndex> idx = sgc_index(fx.refs, 8, 16);
  SdaResult r = sda_forward(fx.q, idx, fx.f, fx.params);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t ch = 0; ch < 8; ++ch)
      CHECK(r.output.at(i, ch) == fx.f.at(ch, idx[i].row, idx[i].col));
}

TEST_CASE("attention rows sum to one and outputs stay convex") {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 1 + rng.below(6);
    std::size_t c = 1 + rng.below(6);
    std::size_t k = 1 + rng.below(5);
    Fixture fx = make_fixture(1000 + trial, n, c, k, 4, 8);
    std::vector<PixelIndex> idx = sgc_index(fx.refs, 4, 8);
    SampleGrid grid = sample_locations(fx.q, idx, fx.params);
    SdaResult r = sda_forward(fx.q, idx, fx.f, fx.params);
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        CHECK(r.weights.at(i, j) >= 0.0);
        sum += r.weights.at(i, j);
      }
      CHECK(std::abs(sum - 1.0) <= 1e-6);
      for (std::size_t ch = 0; ch < c; ++ch) {
        double lo = 1e300, hi = -1e300;
        for (std::size_t j = 0; j < k; ++j) {
          double v = bilinear_sample(fx.f, ch, grid.row_at(i, j),
                                     grid.col_at(i, j));
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        CHECK(r.output.at(i, ch) >= lo - 1e-9);
        CHECK(r.output.at(i, ch) <= hi + 1e-9);
      }
    }
  }
}

TEST_CASE("forward is deterministic") {
  Fixture fx = make_fixture(9);
  PdAttentionResult a =
      pd_attention_forward(fx.q, fx.refs, fx.mask, fx.f, fx.params);
  PdAttentionResult b =
      pd_attention_forward(fx.q, fx.refs, fx.mask, fx.f, fx.params);
  CHECK(std::memcmp(a.output.v.data(), b.output.v.data(),
                    a.output.v.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(a.weights.v.data(), b.weights.v.data(),
                    a.weights.v.size() * sizeof(double)) == 0);
}

TEST_CASE("masked rows produce no output and no gradient") {
  Fixture fx = make_fixture(10);
  fx.mask = {1, 0, 1, 1};
  std::shared_ptr<PdAttentionCache> cache;
  PdAttentionResult r = pd_attention_forward(fx.q, fx.refs, fx.mask, fx.f,
                                             fx.params, {}, &cache);
  CHECK(r.output.rows == 3);
  CHECK(r.rows == std::vector<uint32_t>{0, 2, 3});

  Mat upstream(3, 8);
  for (double& x : upstream.v) x = 1.0;
  PdAttentionGrads g = sda_backward(*cache, upstream);
  for (std::size_t ch = 0; ch < 8; ++ch)
    CHECK(g.d_queries.at(1, ch) == 0.0);
}

TEST_CASE("zero upstream gradient zeroes every gradient") {
  Fixture fx = make_fixture(11);
  std::shared_ptr<PdAttentionCache> cache;
  pd_attention_forward(fx.q, fx.refs, fx.mask, fx.f, fx.params, {}, &cache);
  Mat upstream(4, 8);
  PdAttentionGrads g = sda_backward(*cache, upstream);
  for (double v : g.d_queries.v) CHECK(v == 0.0);
  for (double v : g.d_features.v) CHECK(v == 0.0);
  for (double v : g.d_params.attn.weight) CHECK(v == 0.0);
  for (double v : g.d_params.ref_offsets.weight) CHECK(v == 0.0);
}

TEST_CASE("gather adjoint: one-hot weights route upstream into dF") {
  Fixture fx = make_fixture(12, 2, 3, 1, 4, 8, /*randomize=*/false);
  // zero offsets, single reference -> exact gather at the base index
  std::shared_ptr<PdAttentionCache> cache;
  PdAttentionResult r = pd_attention_forward(fx.q, fx.refs, fx.mask, fx.f,
                                             fx.params, {}, &cache);
  std::vector<PixelIndex> idx = sgc_index(fx.refs, 4, 8);
  Mat upstream(2, 3);
  upstream.at(0, 0) = 2.0;
  upstream.at(1, 2) = -1.5;
  PdAttentionGrads g = sda_backward(*cache, upstream);
  CHECK(g.d_features.at(0, idx[0].row, idx[0].col) == doctest::Approx(2.0));
  CHECK(g.d_features.at(2, idx[1].row, idx[1].col) == doctest::Approx(-1.5));
  double total = 0.0;
  for (double v : g.d_features.v) total += std::abs(v);
  CHECK(total == doctest::Approx(3.5));
  (void)r;
}

TEST_CASE("analytic gradients match central finite differences") {
  GradCheckReport report = run_gradient_check(4, 8, 4, 8, 16, 2025, 1e-4);
  CHECK(report.checked > 1000);
  CHECK(report.max_rel_err <= 1e-4);
}

TEST_CASE("multi-level wrapper sums per-level outputs") {
  Fixture fx = make_fixture(13);
  std::vector<FeatureMap> levels{fx.f, fx.f};
  PdAttentionResult one =
      pd_attention_forward(fx.q, fx.refs, fx.mask, fx.f, fx.params);
  PdAttentionResult two = pd_attention_forward_multi(fx.q, fx.refs, fx.mask,
                                                     levels, fx.params);
  for (std::size_t i = 0; i < one.output.v.size(); ++i)
    CHECK(two.output.v[i] == doctest::Approx(2.0 * one.output.v[i]));
}

TEST_CASE("params pack/unpack round trip through pbt") {
  auto dir = testutil::temp_dir("params");
  LinearParams p = init_params(8, 4, 7);
  randomize_params(p, 8, 0.2);
  write_pbt(pack_params(p), (dir / "p.pbt").string());
  LinearParams q = unpack_params(read_pbt((dir / "p.pbt").string()));
  CHECK(q.channels == p.channels);
  CHECK(q.n_ref == p.n_ref);
  for (std::size_t i = 0; i < p.attn.weight.size(); ++i)
    CHECK(q.attn.weight[i] ==
          doctest::Approx(p.attn.weight[i]).epsilon(1e-6));
}

TEST_CASE("shape mismatches are rejected") {
  Fixture fx = make_fixture(14);
  BevQueries bad(3, 8);  // refs have 4 rows
  CHECK_THROWS_AS(sgc_offsets(bad, fx.refs, fx.mask, fx.params), Error);
  FeatureMap narrow(4, 8, 16);  // channels != query width
  CHECK_THROWS_AS(
      pd_attention_forward(fx.q, fx.refs, fx.mask, narrow, fx.params), Error);
}
