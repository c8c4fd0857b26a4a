#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lmdpinn/common.hpp"
#include "lmdpinn/jet.hpp"

namespace lmdpinn::net {

enum class OutputTransform { softplus, linear };

inline const char* to_string(OutputTransform t) {
  return t == OutputTransform::softplus ? "softplus" : "linear";
}

// ---------------------------------------------------------------------------
// NetworkConfig: shape and initialization of one fully connected network.
// Hidden layers use tanh; the output layer applies `output_transform`.
// ---------------------------------------------------------------------------

struct NetworkConfig {
  int hidden_layers = 3;
  int width = 64;
  int input_dim = 4;  // (x, y, z, t), scaled to [-1, 1]
  int output_dim = 1;
  OutputTransform output_transform = OutputTransform::softplus;
  std::uint64_t init_seed = 1;

  /// Temperature network of the two-network architecture: 3x64, one softplus
  /// output so predicted temperatures stay positive.
  static NetworkConfig temperature_default() { return NetworkConfig{}; }

  /// Stress-displacement network: 10x64 and nine linear outputs
  /// (u, v, w, sxx, syy, szz, sxy, syz, szx).
  static NetworkConfig mechanical_default() {
    NetworkConfig c;
    c.hidden_layers = 10;
    c.output_dim = 9;
    c.output_transform = OutputTransform::linear;
    c.init_seed = 2;
    return c;
  }

  void validate() const {
    if (width <= 0) throw ConfigError("network: width must be positive");
    if (hidden_layers <= 0) throw ConfigError("network: hidden_layers must be positive");
    if (input_dim <= 0 || output_dim <= 0)
      throw ConfigError("network: input/output dimensions must be positive");
  }

  /// Number of affine layers (= hidden_layers + output layer).
  int affine_count() const { return hidden_layers + 1; }

  int layer_in(int l) const { return l == 0 ? input_dim : width; }
  int layer_out(int l) const { return l == hidden_layers ? output_dim : width; }

  std::size_t param_count() const {
    std::size_t n = 0;
    for (int l = 0; l < affine_count(); ++l)
      n += static_cast<std::size_t>(layer_out(l)) * layer_in(l) + layer_out(l);
    return n;
  }

  bool operator==(const NetworkConfig&) const = default;
};

// ---------------------------------------------------------------------------
// MlpParams: flat parameter storage with per-layer Eigen views.
//
// Layout per affine layer l: weight matrix W_l (out x in, column-major),
// then bias b_l. This is also the serialized order.
// ---------------------------------------------------------------------------

struct MlpParams {
  NetworkConfig config;
  std::vector<double> data;

  MlpParams() = default;
  explicit MlpParams(const NetworkConfig& cfg) : config(cfg), data(cfg.param_count(), 0.0) {}

  std::size_t weight_offset(int l) const {
    std::size_t off = 0;
    for (int i = 0; i < l; ++i)
      off += static_cast<std::size_t>(config.layer_out(i)) * config.layer_in(i) +
             config.layer_out(i);
    return off;
  }
  std::size_t bias_offset(int l) const {
    return weight_offset(l) + static_cast<std::size_t>(config.layer_out(l)) * config.layer_in(l);
  }

  Eigen::Map<const Eigen::MatrixXd> weight(int l) const {
    return {data.data() + weight_offset(l), config.layer_out(l), config.layer_in(l)};
  }
  Eigen::Map<Eigen::MatrixXd> weight(int l) {
    return {data.data() + weight_offset(l), config.layer_out(l), config.layer_in(l)};
  }
  Eigen::Map<const Eigen::VectorXd> bias(int l) const {
    return {data.data() + bias_offset(l), config.layer_out(l)};
  }
  Eigen::Map<Eigen::VectorXd> bias(int l) {
    return {data.data() + bias_offset(l), config.layer_out(l)};
  }

  bool finite() const {
    for (double x : data)
      if (!std::isfinite(x)) return false;
    return true;
  }
};

/// Glorot-uniform initialization: weights uniform in +-sqrt(6/(fan_in+fan_out)),
/// biases exactly zero. Deterministic per config.init_seed.
inline MlpParams init_glorot(const NetworkConfig& cfg) {
  cfg.validate();
  MlpParams p(cfg);
  Rng rng(cfg.init_seed);
  for (int l = 0; l < cfg.affine_count(); ++l) {
    const double bound = std::sqrt(6.0 / (cfg.layer_in(l) + cfg.layer_out(l)));
    auto w = p.weight(l);
    // Column-major fill so the draw order matches the storage order.
    for (int c = 0; c < w.cols(); ++c)
      for (int r = 0; r < w.rows(); ++r) w(r, c) = rng.uniform(-bound, bound);
  }
  return p;
}

// ---------------------------------------------------------------------------
// ScaleSet: affine maps between physical quantities and network units.
//
// Inputs: each axis of the domain box (and the time horizon) maps onto
// [-1, 1]. Outputs: temperature uses offset/scale around the softplus head;
// displacements and stresses are pure scalings of the linear head.
// ---------------------------------------------------------------------------

struct ScaleSet {
  // per-axis midpoints and half-ranges, x/y/z in meters, t in seconds
  std::array<double, 4> mid{};
  std::array<double, 4> half{};
  double temperature_offset = 298.0;   // K
  double temperature_scale = 2000.0;   // K
  double displacement_scale = 1.8e-5;  // m
  double stress_scale = 3.762e9;       // Pa
  double char_length = 1e-3;           // m, used by residual normalization

  static ScaleSet for_box(double lx, double ly, double lz, double t_end, double t_offset_k,
                          double t_scale_k, double alpha, double youngs, double char_len) {
    if (lx <= 0 || ly <= 0 || lz <= 0 || t_end <= 0)
      throw ConfigError("scales: domain extents and time horizon must be positive");
    if (t_scale_k <= 0) throw ConfigError("scales: temperature scale must be positive");
    ScaleSet s;
    s.mid = {lx / 2, ly / 2, lz / 2, t_end / 2};
    s.half = {lx / 2, ly / 2, lz / 2, t_end / 2};
    s.temperature_offset = t_offset_k;
    s.temperature_scale = t_scale_k;
    s.char_length = char_len;
    s.displacement_scale = alpha * t_scale_k * char_len;
    s.stress_scale = youngs * alpha * t_scale_k;
    return s;
  }

  std::array<double, 4> scale_point(const Point4& p) const {
    const std::array<double, 4> q = {p.x, p.y, p.z, p.t};
    std::array<double, 4> out{};
    static constexpr const char* axis_names[4] = {"x", "y", "z", "t"};
    for (int a = 0; a < 4; ++a) {
      out[a] = (q[a] - mid[a]) / half[a];
      if (out[a] < -1.0 - 1e-12 || out[a] > 1.0 + 1e-12)
        throw GeometryError(std::string("scale_point: coordinate out of domain on axis ") +
                            axis_names[a] + " (value " + format_double(q[a]) + ")");
    }
    return out;
  }

  Point4 unscale_point(const std::array<double, 4>& s) const {
    return {s[0] * half[0] + mid[0], s[1] * half[1] + mid[1], s[2] * half[2] + mid[2],
            s[3] * half[3] + mid[3]};
  }

  double temperature_from_raw(double raw_transformed) const {
    return temperature_offset + temperature_scale * raw_transformed;
  }

  bool operator==(const ScaleSet&) const = default;
};

// ---------------------------------------------------------------------------
// Generic forward pass over any scalar type supporting the Jet2/double
// arithmetic surface. Returns transformed raw outputs (post output transform,
// still in network units). Physical conversion is the caller's job via
// ScaleSet, which keeps this path shared between inference, jets, and tests.
// ---------------------------------------------------------------------------

template <class S>
std::vector<S> forward_raw(const MlpParams& p, std::span<const S> input) {
  const NetworkConfig& cfg = p.config;
  if (static_cast<int>(input.size()) != cfg.input_dim)
    throw ConfigError("forward: input dimension mismatch");
  std::vector<S> cur(input.begin(), input.end());
  std::vector<S> nxt;
  for (int l = 0; l < cfg.affine_count(); ++l) {
    const auto W = p.weight(l);
    const auto b = p.bias(l);
    nxt.assign(static_cast<std::size_t>(cfg.layer_out(l)), S(0.0));
    for (int r = 0; r < cfg.layer_out(l); ++r) {
      S acc(b[r]);
      for (int c = 0; c < cfg.layer_in(l); ++c) acc += W(r, c) * cur[static_cast<std::size_t>(c)];
      nxt[static_cast<std::size_t>(r)] = acc;
    }
    if (l < cfg.hidden_layers) {
      using ad::tanh;
      using std::tanh;
      for (auto& v : nxt) v = tanh(v);
    } else if (cfg.output_transform == OutputTransform::softplus) {
      using ad::softplus;
      for (auto& v : nxt) v = softplus(v);
    }
    cur.swap(nxt);
  }
  return cur;
}

/// Physical temperature at a physical point (temperature network).
inline double predict_temperature(const MlpParams& p, const ScaleSet& scales, const Point4& pt) {
  const auto xs = scales.scale_point(pt);
  const auto raw = forward_raw<double>(p, std::span<const double>(xs.data(), 4));
  return scales.temperature_from_raw(raw[0]);
}

/// Physical displacements (m) and stresses (Pa) at a physical point
/// (stress-displacement network): {u, v, w, sxx, syy, szz, sxy, syz, szx}.
inline std::array<double, 9> predict_mechanical(const MlpParams& p, const ScaleSet& scales,
                                                const Point4& pt) {
  const auto xs = scales.scale_point(pt);
  const auto raw = forward_raw<double>(p, std::span<const double>(xs.data(), 4));
  if (raw.size() != 9) throw ConfigError("predict_mechanical: network must have 9 outputs");
  std::array<double, 9> out{};
  for (int i = 0; i < 3; ++i) out[static_cast<std::size_t>(i)] = scales.displacement_scale * raw[static_cast<std::size_t>(i)];
  for (int i = 3; i < 9; ++i) out[static_cast<std::size_t>(i)] = scales.stress_scale * raw[static_cast<std::size_t>(i)];
  return out;
}

}  // namespace lmdpinn::net
