#include "panobev/attention.hpp"

#include <algorithm>
#include <cmath>

#include "panobev/errors.hpp"
#include "panobev/rng.hpp"

namespace panobev {

LinearParams init_params(uint32_t channels, uint32_t n_ref, uint64_t seed) {
  require(channels >= 1 && n_ref >= 1, ErrorCode::invalid_argument,
          "init_params: channels and n_ref must be >= 1");
  LinearParams p;
  p.channels = channels;
  p.n_ref = n_ref;
  p.pos = LinearLayer(2, channels);
  p.sph_offsets = LinearLayer(channels, 2);
  p.ref_offsets = LinearLayer(channels, 2 * n_ref);
  p.attn = LinearLayer(channels, n_ref);
  Rng rng(seed);
  double a = std::sqrt(6.0 / (2.0 + channels));
  for (double& w : p.pos.weight) w = rng.uniform(-a, a);
  // offset and weight heads stay zero: initial samples sit on the
  // geometric reference with uniform attention
  return p;
}

void randomize_params(LinearParams& params, uint64_t seed, double scale) {
  Rng rng(seed);
  auto fill = [&](LinearLayer& l) {
    for (double& w : l.weight) w = scale * rng.normal();
    for (double& b : l.bias) b = 0.5 * scale * rng.normal();
  };
  fill(params.pos);
  fill(params.sph_offsets);
  fill(params.ref_offsets);
  fill(params.attn);
}

SphericalRefs refs_from_points(const std::vector<Vec3>& points) {
  SphericalRefs refs;
  refs.angles.reserve(points.size());
  for (const Vec3& p : points) refs.angles.push_back(cart_to_sph(p));
  return refs;
}

SgcOffsets sgc_offsets(const BevQueries& queries, const SphericalRefs& refs,
                       const ValidMask& mask, const LinearParams& params,
                       const OffsetBound& bound) {
  require(queries.rows == refs.size() && queries.rows == mask.size(),
          ErrorCode::invalid_argument,
          "sgc_offsets: queries, refs and mask lengths must agree");
  require(queries.cols == params.channels, ErrorCode::invalid_argument,
          "sgc_offsets: query width must equal params.channels");
  SgcOffsets out;
  std::vector<double> encoded(params.channels);
  std::vector<double> summed(params.channels);
  double raw[2];
  for (std::size_t i = 0; i < queries.rows; ++i) {
    if (!mask[i]) continue;
    double angles[2] = {refs.angles[i].phi, refs.angles[i].theta};
    params.pos.apply(angles, encoded.data());
    for (std::size_t c = 0; c < params.channels; ++c)
      summed[c] = queries.at(i, c) + encoded[c];
    params.sph_offsets.apply(summed.data(), raw);
    double dphi = raw[0];
    double dtheta = raw[1];
    if (bound.enabled) {
      dphi = std::tanh(dphi) * bound.delta_max;
      dtheta = std::tanh(dtheta) * bound.delta_max;
    }
    out.offsets.dphi.push_back(dphi);
    out.offsets.dtheta.push_back(dtheta);
    out.rows.push_back(static_cast<uint32_t>(i));
  }
  return out;
}

SphericalRefs apply_offsets(const SphericalRefs& refs,
                            const AngularOffsets& offsets) {
  require(refs.size() == offsets.size(), ErrorCode::invalid_argument,
          "apply_offsets: lengths must agree");
  SphericalRefs out;
  out.angles.reserve(refs.size());
  for (std::size_t i = 0; i < refs.size(); ++i) {
    double phi = refs.angles[i].azimuth_0_2pi() + offsets.dphi[i];
    phi = std::fmod(phi, 2.0 * M_PI);
    if (phi < 0.0) phi += 2.0 * M_PI;
    double theta =
        std::clamp(refs.angles[i].theta + offsets.dtheta[i], 0.0, M_PI);
    SphericalAngle a;
    a.phi = phi > M_PI ? phi - 2.0 * M_PI : phi;
    a.theta = theta;
    out.angles.push_back(a);
  }
  return out;
}

std::vector<PixelIndex> sgc_index(const SphericalRefs& refs, uint32_t height,
                                  uint32_t width) {
  std::vector<PixelIndex> out;
  out.reserve(refs.size());
  for (const SphericalAngle& a : refs.angles)
    out.push_back(sph_to_pixel(a, height, width));
  return out;
}

SampleGrid sample_locations(const BevQueries& queries,
                            const std::vector<PixelIndex>& index,
                            const LinearParams& params) {
  require(queries.rows == index.size(), ErrorCode::invalid_argument,
          "sample_locations: queries and index lengths must agree");
  require(queries.cols == params.channels, ErrorCode::invalid_argument,
          "sample_locations: query width must equal params.channels");
  SampleGrid grid;
  grid.count = queries.rows;
  grid.n_ref = params.n_ref;
  grid.row.resize(grid.count * grid.n_ref);
  grid.col.resize(grid.count * grid.n_ref);
  std::vector<double> offsets(2 * params.n_ref);
  for (std::size_t q = 0; q < queries.rows; ++q) {
    params.ref_offsets.apply(queries.row(q), offsets.data());
    for (std::size_t j = 0; j < params.n_ref; ++j) {
      grid.row_at(q, j) = index[q].row + offsets[2 * j];
      grid.col_at(q, j) = index[q].col + offsets[2 * j + 1];
    }
  }
  return grid;
}

AttentionWeights attention_weights(const BevQueries& queries,
                                   const LinearParams& params) {
  require(queries.cols == params.channels, ErrorCode::invalid_argument,
          "attention_weights: query width must equal params.channels");
  AttentionWeights w(queries.rows, params.n_ref);
  std::vector<double> logits(params.n_ref);
  for (std::size_t q = 0; q < queries.rows; ++q) {
    params.attn.apply(queries.row(q), logits.data());
    double peak = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t j = 0; j < params.n_ref; ++j) {
      logits[j] = std::exp(logits[j] - peak);
      sum += logits[j];
    }
    for (std::size_t j = 0; j < params.n_ref; ++j)
      w.at(q, j) = logits[j] / sum;
  }
  return w;
}

namespace {

// Corner taps of a bilinear lookup; columns wrap azimuthally, rows clamp
// at the poles (saturated rows contribute no spatial gradient).
struct BilinearTaps {
  std::size_t r0, r1, c0, c1;
  double fr, fc;
  bool row_saturated;
};

BilinearTaps make_taps(const FeatureMap& f, double row, double col) {
  BilinearTaps t{};
  double h1 = static_cast<double>(f.height - 1);
  t.row_saturated = row <= 0.0 || row >= h1;
  double rc = std::clamp(row, 0.0, h1);
  t.r0 = static_cast<std::size_t>(rc);
  if (t.r0 >= f.height - 1) t.r0 = f.height - 1;
  t.r1 = std::min<std::size_t>(t.r0 + 1, f.height - 1);
  t.fr = rc - static_cast<double>(t.r0);
  double w = static_cast<double>(f.width);
  double cw = col - w * std::floor(col / w);
  if (cw >= w || cw < 0.0) cw = 0.0;
  t.c0 = static_cast<std::size_t>(cw);
  if (t.c0 >= f.width) t.c0 = f.width - 1;
  t.c1 = (t.c0 + 1) % f.width;
  t.fc = cw - static_cast<double>(t.c0);
  return t;
}

double tap_value(const FeatureMap& f, std::size_t ch, const BilinearTaps& t) {
  return (1.0 - t.fr) * ((1.0 - t.fc) * f.at(ch, t.r0, t.c0) +
                         t.fc * f.at(ch, t.r0, t.c1)) +
         t.fr * ((1.0 - t.fc) * f.at(ch, t.r1, t.c0) +
                 t.fc * f.at(ch, t.r1, t.c1));
}

double tap_drow(const FeatureMap& f, std::size_t ch, const BilinearTaps& t) {
  if (t.row_saturated) return 0.0;
  return (1.0 - t.fc) * (f.at(ch, t.r1, t.c0) - f.at(ch, t.r0, t.c0)) +
         t.fc * (f.at(ch, t.r1, t.c1) - f.at(ch, t.r0, t.c1));
}

double tap_dcol(const FeatureMap& f, std::size_t ch, const BilinearTaps& t) {
  return (1.0 - t.fr) * (f.at(ch, t.r0, t.c1) - f.at(ch, t.r0, t.c0)) +
         t.fr * (f.at(ch, t.r1, t.c1) - f.at(ch, t.r1, t.c0));
}

void tap_accumulate(FeatureMap& df, std::size_t ch, const BilinearTaps& t,
                    double g) {
  df.at(ch, t.r0, t.c0) += g * (1.0 - t.fr) * (1.0 - t.fc);
  df.at(ch, t.r0, t.c1) += g * (1.0 - t.fr) * t.fc;
  df.at(ch, t.r1, t.c0) += g * t.fr * (1.0 - t.fc);
  df.at(ch, t.r1, t.c1) += g * t.fr * t.fc;
}

}  // namespace

double bilinear_sample(const FeatureMap& f, std::size_t channel, double row,
                       double col) {
  require(channel < f.channels, ErrorCode::invalid_argument,
          "bilinear_sample: channel out of range");
  return tap_value(f, channel, make_taps(f, row, col));
}

Mat sda_aggregate(const SampleGrid& where, const AttentionWeights& weights,
                  const FeatureMap& f) {
  require(where.count == weights.rows && where.n_ref == weights.cols,
          ErrorCode::invalid_argument,
          "sda_aggregate: locations and weights disagree");
  Mat out(where.count, f.channels);
  for (std::size_t q = 0; q < where.count; ++q) {
    for (std::size_t j = 0; j < where.n_ref; ++j) {
      BilinearTaps t = make_taps(f, where.row_at(q, j), where.col_at(q, j));
      double a = weights.at(q, j);
      for (std::size_t ch = 0; ch < f.channels; ++ch)
        out.at(q, ch) += a * tap_value(f, ch, t);
    }
  }
  return out;
}

SdaResult sda_forward(const BevQueries& queries,
                      const std::vector<PixelIndex>& index,
                      const FeatureMap& f, const LinearParams& params) {
  require(queries.cols == f.channels, ErrorCode::invalid_argument,
          "sda_forward: feature channels must equal query width");
  SampleGrid grid = sample_locations(queries, index, params);
  AttentionWeights w = attention_weights(queries, params);
  Mat out = sda_aggregate(grid, w, f);
  return {std::move(out), std::move(w)};
}

struct PdAttentionCache {
  Mat queries;                 // kept x C (compacted)
  std::vector<uint32_t> rows;  // original row per kept row
  std::size_t full_rows = 0;
  SampleGrid grid;
  AttentionWeights weights;
  FeatureMap features;
  LinearParams params;
};

PdAttentionResult pd_attention_forward(
    const BevQueries& queries, const SphericalRefs& refs,
    const ValidMask& mask, const FeatureMap& features,
    const LinearParams& params, const OffsetBound& bound,
    std::shared_ptr<PdAttentionCache>* cache_out) {
  require(queries.cols == features.channels, ErrorCode::invalid_argument,
          "pd_attention_forward: feature channels must equal query width");
  SgcOffsets sgc = sgc_offsets(queries, refs, mask, params, bound);

  // Compact the masked rows once; everything downstream runs dense.
  std::size_t kept = sgc.rows.size();
  Mat q(kept, queries.cols);
  SphericalRefs kept_refs;
  kept_refs.angles.reserve(kept);
  for (std::size_t i = 0; i < kept; ++i) {
    const double* src = queries.row(sgc.rows[i]);
    std::copy(src, src + queries.cols, q.row(i));
    kept_refs.angles.push_back(refs.angles[sgc.rows[i]]);
  }

  SphericalRefs shifted = apply_offsets(kept_refs, sgc.offsets);
  std::vector<PixelIndex> index =
      sgc_index(shifted, static_cast<uint32_t>(features.height),
                static_cast<uint32_t>(features.width));
  SampleGrid grid = sample_locations(q, index, params);
  AttentionWeights w = attention_weights(q, params);
  Mat out = sda_aggregate(grid, w, features);

  if (cache_out) {
    auto cache = std::make_shared<PdAttentionCache>();
    cache->queries = q;
    cache->rows = sgc.rows;
    cache->full_rows = queries.rows;
    cache->grid = grid;
    cache->weights = w;
    cache->features = features;
    cache->params = params;
    *cache_out = std::move(cache);
  }
  return {std::move(out), std::move(w), std::move(sgc.rows)};
}

PdAttentionResult pd_attention_forward_multi(
    const BevQueries& queries, const SphericalRefs& refs,
    const ValidMask& mask, const std::vector<FeatureMap>& levels,
    const LinearParams& params, const OffsetBound& bound) {
  require(!levels.empty(), ErrorCode::invalid_argument,
          "pd_attention_forward_multi: need at least one level");
  PdAttentionResult total =
      pd_attention_forward(queries, refs, mask, levels[0], params, bound);
  for (std::size_t l = 1; l < levels.size(); ++l) {
    PdAttentionResult r =
        pd_attention_forward(queries, refs, mask, levels[l], params, bound);
    for (std::size_t i = 0; i < total.output.v.size(); ++i)
      total.output.v[i] += r.output.v[i];
  }
  return total;
}

PdAttentionGrads sda_backward(const PdAttentionCache& cache,
                              const Mat& upstream) {
  const std::size_t kept = cache.queries.rows;
  const std::size_t C = cache.queries.cols;
  const std::size_t K = cache.grid.n_ref;
  require(upstream.rows == kept && upstream.cols == C,
          ErrorCode::invalid_argument,
          "sda_backward: upstream shape must match the forward output");

  PdAttentionGrads g;
  g.d_queries = Mat(cache.full_rows, C);
  g.d_features = FeatureMap(cache.features.channels, cache.features.height,
                            cache.features.width);
  g.d_params.channels = C;
  g.d_params.n_ref = K;
  g.d_params.pos = LinearLayer(2, C);
  g.d_params.sph_offsets = LinearLayer(C, 2);
  g.d_params.ref_offsets = LinearLayer(C, 2 * K);
  g.d_params.attn = LinearLayer(C, K);

  // The quantized base index is a constant of the graph, so the
  // spherical heads (pos, sph_offsets) keep zero gradients; flow runs
  // through the fractional 2D offsets, the weight head, Q and F.
  std::vector<double> d_weight_row(K);
  std::vector<double> d_logits(K);
  std::vector<double> d_offsets(2 * K);
  for (std::size_t i = 0; i < kept; ++i) {
    const double* up = upstream.row(i);

    std::fill(d_offsets.begin(), d_offsets.end(), 0.0);
    for (std::size_t j = 0; j < K; ++j) {
      BilinearTaps t = make_taps(cache.features, cache.grid.row_at(i, j),
                                 cache.grid.col_at(i, j));
      double a = cache.weights.at(i, j);
      double dot_sample = 0.0;
      double d_row = 0.0;
      double d_col = 0.0;
      for (std::size_t ch = 0; ch < C; ++ch) {
        double u = up[ch];
        dot_sample += u * tap_value(cache.features, ch, t);
        double ds = a * u;  // dL/d(sample value)
        tap_accumulate(g.d_features, ch, t, ds);
        d_row += ds * tap_drow(cache.features, ch, t);
        d_col += ds * tap_dcol(cache.features, ch, t);
      }
      d_weight_row[j] = dot_sample;  // dL/dA_ij
      d_offsets[2 * j] = d_row;
      d_offsets[2 * j + 1] = d_col;
    }

    // Softmax backward into the weight head.
    double inner = 0.0;
    for (std::size_t j = 0; j < K; ++j)
      inner += cache.weights.at(i, j) * d_weight_row[j];
    for (std::size_t j = 0; j < K; ++j)
      d_logits[j] = cache.weights.at(i, j) * (d_weight_row[j] - inner);

    const double* q = cache.queries.row(i);
    double* dq = g.d_queries.row(cache.rows[i]);
    for (std::size_t j = 0; j < K; ++j) {
      double dl = d_logits[j];
      double* wgrad = g.d_params.attn.weight.data() + j * C;
      const double* w = cache.params.attn.weight.data() + j * C;
      for (std::size_t c = 0; c < C; ++c) {
        wgrad[c] += dl * q[c];
        dq[c] += dl * w[c];
      }
      g.d_params.attn.bias[j] += dl;
    }
    for (std::size_t r = 0; r < 2 * K; ++r) {
      double dr = d_offsets[r];
      double* wgrad = g.d_params.ref_offsets.weight.data() + r * C;
      const double* w = cache.params.ref_offsets.weight.data() + r * C;
      for (std::size_t c = 0; c < C; ++c) {
        wgrad[c] += dr * q[c];
        dq[c] += dr * w[c];
      }
      g.d_params.ref_offsets.bias[r] += dr;
    }
  }
  return g;
}

namespace {

// Everything the finite-difference check perturbs, flattened in a fixed
// group order.
struct GradCheckFixture {
  BevQueries queries;
  SphericalRefs refs;
  ValidMask mask;
  FeatureMap features;
  LinearParams params;
};

GradCheckFixture make_fixture(uint32_t n, uint32_t c, uint32_t k, uint32_t h,
                              uint32_t w, uint64_t seed) {
  GradCheckFixture f;
  Rng rng(seed);
  f.queries = Mat(n, c);
  for (double& x : f.queries.v) x = rng.normal();
  f.refs.angles.resize(n);
  for (auto& a : f.refs.angles) {
    a.phi = rng.uniform(-M_PI * 0.95, M_PI * 0.95);
    a.theta = rng.uniform(0.35, M_PI - 0.35);
  }
  f.mask.assign(n, 1);
  f.features = FeatureMap(c, h, w);
  for (double& x : f.features.v) x = rng.normal();
  f.params = init_params(c, k, seed);
  randomize_params(f.params, Rng::derive(seed, 1), 0.08);
  return f;
}

double fixture_loss(const GradCheckFixture& f, const Mat& upstream) {
  PdAttentionResult r = pd_attention_forward(f.queries, f.refs, f.mask,
                                             f.features, f.params);
  double loss = 0.0;
  for (std::size_t i = 0; i < r.output.v.size(); ++i)
    loss += upstream.v[i] * r.output.v[i];
  return loss;
}

// Distance of every quantization-sensitive quantity from its switching
// boundary, in cell units. The check only trusts finite differences away
// from ceil/bilinear kinks.
double fixture_margin(const GradCheckFixture& f) {
  SgcOffsets sgc = sgc_offsets(f.queries, f.refs, f.mask, f.params, {});
  SphericalRefs kept;
  for (uint32_t r : sgc.rows) kept.angles.push_back(f.refs.angles[r]);
  SphericalRefs shifted = apply_offsets(kept, sgc.offsets);
  double margin = 1e9;
  auto boundary_distance = [](double v) {
    return std::abs(v - std::round(v));
  };
  double h = static_cast<double>(f.features.height);
  double w = static_cast<double>(f.features.width);
  for (const SphericalAngle& a : shifted.angles) {
    margin = std::min(margin, boundary_distance(h * a.theta / M_PI));
    margin = std::min(
        margin, boundary_distance((a.azimuth_0_2pi() / M_PI - 1.0 / w) * w / 2.0));
  }
  std::vector<PixelIndex> index = sgc_index(
      shifted, static_cast<uint32_t>(f.features.height),
      static_cast<uint32_t>(f.features.width));
  Mat q(sgc.rows.size(), f.queries.cols);
  for (std::size_t i = 0; i < sgc.rows.size(); ++i) {
    const double* src = f.queries.row(sgc.rows[i]);
    std::copy(src, src + f.queries.cols, q.row(i));
  }
  SampleGrid grid = sample_locations(q, index, f.params);
  for (std::size_t i = 0; i < grid.row.size(); ++i) {
    margin = std::min(margin, boundary_distance(grid.row[i]));
    margin = std::min(margin, boundary_distance(grid.col[i]));
    // stay off the row-clamp saturation edge as well
    margin = std::min(margin, std::abs(grid.row[i]));
    margin = std::min(margin, std::abs(h - 1.0 - grid.row[i]));
  }
  return margin;
}

}  // namespace

GradCheckReport run_gradient_check(uint32_t n_queries, uint32_t channels,
                                   uint32_t n_ref, uint32_t height,
                                   uint32_t width, uint64_t seed,
                                   double step) {
  GradCheckFixture f =
      make_fixture(n_queries, channels, n_ref, height, width, seed);
  require(fixture_margin(f) > 50.0 * step, ErrorCode::invalid_argument,
          "run_gradient_check: fixture sits too close to a quantization "
          "boundary for this seed; pick another seed");

  Rng rng(Rng::derive(seed, 2));
  Mat upstream(n_queries, channels);
  for (double& x : upstream.v) x = rng.normal();

  std::shared_ptr<PdAttentionCache> cache;
  pd_attention_forward(f.queries, f.refs, f.mask, f.features, f.params, {},
                       &cache);
  PdAttentionGrads grads = sda_backward(*cache, upstream);

  GradCheckReport report;
  auto check = [&](double* value, double analytic) {
    double keep = *value;
    *value = keep + step;
    double up = fixture_loss(f, upstream);
    *value = keep - step;
    double down = fixture_loss(f, upstream);
    *value = keep;
    double numeric = (up - down) / (2.0 * step);
    double denom = std::max({1.0, std::abs(numeric), std::abs(analytic)});
    report.max_rel_err =
        std::max(report.max_rel_err, std::abs(numeric - analytic) / denom);
    ++report.checked;
  };

  for (std::size_t i = 0; i < f.queries.v.size(); ++i)
    check(&f.queries.v[i], grads.d_queries.v[i]);
  for (std::size_t i = 0; i < f.features.v.size(); ++i)
    check(&f.features.v[i], grads.d_features.v[i]);
  auto check_layer = [&](LinearLayer& live, const LinearLayer& grad) {
    for (std::size_t i = 0; i < live.weight.size(); ++i)
      check(&live.weight[i], grad.weight[i]);
    for (std::size_t i = 0; i < live.bias.size(); ++i)
      check(&live.bias[i], grad.bias[i]);
  };
  check_layer(f.params.pos, grads.d_params.pos);
  check_layer(f.params.sph_offsets, grads.d_params.sph_offsets);
  check_layer(f.params.ref_offsets, grads.d_params.ref_offsets);
  check_layer(f.params.attn, grads.d_params.attn);
  return report;
}

Mat mat_from_tensor(const Tensor& t) {
  require(t.dtype() == DType::f32 && t.ndim() == 2,
          ErrorCode::invalid_argument, "expected f32 NxC tensor");
  Mat m(t.dim(0), t.dim(1));
  auto v = t.as<float>();
  for (std::size_t i = 0; i < v.size(); ++i) m.v[i] = v[i];
  return m;
}

Tensor mat_to_tensor(const Mat& m) {
  Tensor t = Tensor::of<float>({static_cast<uint32_t>(m.rows),
                                static_cast<uint32_t>(m.cols)});
  auto v = t.as<float>();
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = static_cast<float>(m.v[i]);
  return t;
}

FeatureMap feature_map_from_tensor(const Tensor& t) {
  require(t.dtype() == DType::f32 && t.ndim() == 3,
          ErrorCode::invalid_argument, "expected f32 CxHxW tensor");
  FeatureMap f(t.dim(0), t.dim(1), t.dim(2));
  auto v = t.as<float>();
  for (std::size_t i = 0; i < v.size(); ++i) f.v[i] = v[i];
  return f;
}

Tensor feature_map_to_tensor(const FeatureMap& f) {
  Tensor t = Tensor::of<float>({static_cast<uint32_t>(f.channels),
                                static_cast<uint32_t>(f.height),
                                static_cast<uint32_t>(f.width)});
  auto v = t.as<float>();
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = static_cast<float>(f.v[i]);
  return t;
}

namespace {

void append_layer(std::vector<float>& out, const LinearLayer& l) {
  for (double w : l.weight) out.push_back(static_cast<float>(w));
  for (double b : l.bias) out.push_back(static_cast<float>(b));
}

std::size_t take_layer(LinearLayer& l, std::span<const float> v,
                       std::size_t pos) {
  for (double& w : l.weight) w = v[pos++];
  for (double& b : l.bias) b = v[pos++];
  return pos;
}

}  // namespace

Tensor pack_params(const LinearParams& params) {
  std::vector<float> flat;
  flat.push_back(static_cast<float>(params.channels));
  flat.push_back(static_cast<float>(params.n_ref));
  append_layer(flat, params.pos);
  append_layer(flat, params.sph_offsets);
  append_layer(flat, params.ref_offsets);
  append_layer(flat, params.attn);
  return Tensor::from<float>({static_cast<uint32_t>(flat.size())},
                             {flat.data(), flat.size()});
}

LinearParams unpack_params(const Tensor& t) {
  require(t.dtype() == DType::f32 && t.ndim() == 1 && t.dim(0) >= 2,
          ErrorCode::format, "params tensor must be a 1-D f32 vector");
  auto v = t.as<float>();
  uint32_t channels = static_cast<uint32_t>(v[0]);
  uint32_t n_ref = static_cast<uint32_t>(v[1]);
  require(channels >= 1 && n_ref >= 1, ErrorCode::format,
          "params tensor header is invalid");
  LinearParams p = init_params(channels, n_ref, 0);
  std::size_t expected = 2 + (p.pos.weight.size() + p.pos.bias.size()) +
                         (p.sph_offsets.weight.size() + p.sph_offsets.bias.size()) +
                         (p.ref_offsets.weight.size() + p.ref_offsets.bias.size()) +
                         (p.attn.weight.size() + p.attn.bias.size());
  require(v.size() == expected, ErrorCode::format,
          "params tensor length mismatch");
  std::size_t pos = 2;
  pos = take_layer(p.pos, v, pos);
  pos = take_layer(p.sph_offsets, v, pos);
  pos = take_layer(p.ref_offsets, v, pos);
  pos = take_layer(p.attn, v, pos);
  return p;
}

}  // namespace panobev
