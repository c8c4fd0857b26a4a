#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <vector>

#include "lmdpinn/common.hpp"
#include "lmdpinn/jet.hpp"
#include "lmdpinn/network.hpp"

namespace lmdpinn::ad {

// ---------------------------------------------------------------------------
// Scalar path: exact directional derivatives of network outputs via Jet2
// propagation. One direction at a time; directions are axis-aligned because
// every residual in this problem needs only dT/dt, dT/dx_i, d2T/dx_i2 and
// first derivatives of the mechanical outputs.
// ---------------------------------------------------------------------------

/// Propagate a second-order jet through the network along `direction`
/// (exactly one nonzero component). Returns one Jet2 per network output,
/// post output-transform, in network units with respect to scaled inputs.
inline std::vector<Jet2> directional_jet(const net::MlpParams& params,
                                         const std::array<double, 4>& scaled_input,
                                         const std::array<double, 4>& direction) {
  int nonzero = -1;
  for (int a = 0; a < 4; ++a) {
    if (direction[a] != 0.0) {
      if (nonzero >= 0) throw ConfigError("directional_jet: direction must be axis-aligned");
      nonzero = a;
    }
  }
  if (nonzero < 0) throw ConfigError("directional_jet: direction is zero");

  std::array<Jet2, 4> in;
  for (int a = 0; a < 4; ++a) in[a] = Jet2(scaled_input[a], direction[a], 0.0);
  auto out = net::forward_raw<Jet2>(params, std::span<const Jet2>(in.data(), in.size()));
  for (const auto& o : out) {
    if (!is_finite(o))
      throw NumericsError("directional_jet: non-finite output at scaled input (" +
                          format_double(scaled_input[0]) + ", " + format_double(scaled_input[1]) +
                          ", " + format_double(scaled_input[2]) + ", " +
                          format_double(scaled_input[3]) + ")");
  }
  return out;
}

/// Convenience overload: unit direction along one scaled axis (0..3).
inline std::vector<Jet2> directional_jet(const net::MlpParams& params,
                                         const std::array<double, 4>& scaled_input, int axis) {
  std::array<double, 4> dir{};
  dir[axis] = 1.0;
  return directional_jet(params, scaled_input, dir);
}

// ---------------------------------------------------------------------------
// Batched path: the training engine.
//
// GradTape evaluates the same jet propagation over a block of points as dense
// matrix kernels, recording per-layer state (the operation sequence), and
// then reverse-accumulates d(scalar)/d(parameter) from adjoints seeded on the
// recorded outputs. Reverse-over-forward: the forward jets supply the input
// derivatives appearing in the loss, and the reverse sweep differentiates the
// whole recorded computation with respect to the parameters.
//
// All kernels are dense Eigen operations with a fixed reduction order, so
// results are bit-identical across runs and thread counts.
// ---------------------------------------------------------------------------

/// One differentiation direction along a scaled input axis.
struct JetDir {
  int axis = 0;
  bool second = false;  // carry second-order coefficients for this direction
};

using JetPlan = std::vector<JetDir>;

class GradTape {
 public:
  /// Record a forward evaluation on a block of scaled inputs X (input_dim x n).
  void forward(const net::MlpParams& params, const Eigen::Ref<const Eigen::MatrixXd>& X,
               const JetPlan& plan) {
    params_ = &params;
    plan_ = plan;
    const auto& cfg = params.config;
    if (X.rows() != cfg.input_dim) throw ConfigError("GradTape: input row count mismatch");
    n_ = static_cast<int>(X.cols());
    K_ = static_cast<int>(plan.size());
    const int L = cfg.affine_count();
    X_ = X;
    stages_.resize(L);

    for (int s = 0; s < L; ++s) {
      Stage& st = stages_[s];
      const auto W = params.weight(s);
      const auto b = params.bias(s);
      st.Z1.resize(K_);
      st.Z2.resize(K_);

      if (s == 0) {
        st.A.noalias() = W * X_;
        st.A.colwise() += b;
        for (int k = 0; k < K_; ++k) {
          // The input's first-order seed is a one-hot row, so Z1 columns all
          // equal the weight column of that axis; the second-order seed is
          // identically zero and Z2 is left empty.
          st.Z1[k] = W.col(plan_[k].axis).replicate(1, n_);
          st.Z2[k].resize(0, 0);
        }
      } else {
        const Stage& pv = stages_[s - 1];
        activation_derivs(s - 1, pv);
        st.A.noalias() = W * pv.A;
        st.A.colwise() += b;
        for (int k = 0; k < K_; ++k) {
          scratch_ = gp_.cwiseProduct(pv.Z1[k]);
          st.Z1[k].noalias() = W * scratch_;
          if (plan_[k].second) {
            scratch_ = gpp_.cwiseProduct(pv.Z1[k].cwiseProduct(pv.Z1[k]));
            if (pv.Z2[k].size() > 0) scratch_ += gp_.cwiseProduct(pv.Z2[k]);
            st.Z2[k].noalias() = W * scratch_;
          } else {
            st.Z2[k].resize(0, 0);
          }
        }
      }
      apply_activation(s, st.A);
    }

    // Materialize post-transform output jets for the loss heads.
    const Stage& last = stages_.back();
    out_d1_.resize(K_);
    out_d2_.resize(K_);
    activation_derivs(L - 1, last);
    for (int k = 0; k < K_; ++k) {
      out_d1_[k] = gp_.cwiseProduct(last.Z1[k]);
      if (plan_[k].second) {
        out_d2_[k] = gpp_.cwiseProduct(last.Z1[k].cwiseProduct(last.Z1[k]));
        if (last.Z2[k].size() > 0) out_d2_[k] += gp_.cwiseProduct(last.Z2[k]);
      } else {
        out_d2_[k].resize(0, 0);
      }
    }
  }

  int cols() const { return n_; }
  int dirs() const { return K_; }

  /// Post-transform outputs (network units), out_dim x n.
  const Eigen::MatrixXd& value() const { return stages_.back().A; }
  const Eigen::MatrixXd& d1(int k) const { return out_d1_[k]; }
  const Eigen::MatrixXd& d2(int k) const { return out_d2_[k]; }

  /// Zero-initialize adjoint buffers for the recorded outputs.
  void begin_adjoints() {
    const int out = static_cast<int>(stages_.back().A.rows());
    vbar_.setZero(out, n_);
    d1bar_.resize(K_);
    d2bar_.resize(K_);
    for (int k = 0; k < K_; ++k) {
      d1bar_[k].setZero(out, n_);
      if (plan_[k].second)
        d2bar_[k].setZero(out, n_);
      else
        d2bar_[k].resize(0, 0);
    }
  }

  Eigen::MatrixXd& value_bar() { return vbar_; }
  Eigen::MatrixXd& d1_bar(int k) { return d1bar_[k]; }
  Eigen::MatrixXd& d2_bar(int k) { return d2bar_[k]; }

  /// Reverse sweep: accumulate gradients of the seeded scalar with respect to
  /// every parameter into `grad` (flat, MlpParams layout, += semantics).
  void backward(std::span<double> grad) {
    const auto& cfg = params_->config;
    if (grad.size() != cfg.param_count()) throw ConfigError("GradTape: gradient size mismatch");
    const int L = cfg.affine_count();

    Abar_ = vbar_;
    D1bar_ = d1bar_;
    D2bar_ = d2bar_;
    Z1bar_.resize(K_);
    Z2bar_.resize(K_);

    for (int s = L - 1; s >= 0; --s) {
      const Stage& st = stages_[s];
      const auto W = params_->weight(s);

      // Pull adjoints through the activation: post-activation adjoints become
      // adjoints of the recorded pre-activation jets.
      if (is_identity_stage(s)) {
        Zbar_ = Abar_;
        for (int k = 0; k < K_; ++k) {
          Z1bar_[k] = D1bar_[k];
          Z2bar_[k] = D2bar_[k];
        }
      } else {
        activation_derivs(s, st);
        Zbar_ = Abar_.cwiseProduct(gp_);
        for (int k = 0; k < K_; ++k) {
          const auto& Z1 = st.Z1[k];
          Zbar_ += D1bar_[k].cwiseProduct(gpp_).cwiseProduct(Z1);
          Z1bar_[k] = D1bar_[k].cwiseProduct(gp_);
          if (plan_[k].second) {
            const auto& D2b = D2bar_[k];
            scratch_ = gppp_.cwiseProduct(Z1.cwiseProduct(Z1));
            if (st.Z2[k].size() > 0) scratch_ += gpp_.cwiseProduct(st.Z2[k]);
            Zbar_ += D2b.cwiseProduct(scratch_);
            Z1bar_[k] += 2.0 * D2b.cwiseProduct(gpp_).cwiseProduct(Z1);
            Z2bar_[k] = D2b.cwiseProduct(gp_);
          } else {
            Z2bar_[k].resize(0, 0);
          }
        }
      }

      // Parameter gradients of this affine layer. Accumulate into owned
      // (Eigen-aligned) scratch first: the caller's buffer has arbitrary
      // alignment, and Eigen's vectorized kernels round reductions
      // differently depending on destination alignment. The final elementwise
      // add below is one FP op per coefficient and therefore bit-stable.
      Eigen::Map<Eigen::MatrixXd> gW(grad.data() + params_->weight_offset(s), cfg.layer_out(s),
                                     cfg.layer_in(s));
      Eigen::Map<Eigen::VectorXd> gb(grad.data() + params_->bias_offset(s), cfg.layer_out(s));
      gb_acc_.noalias() = Zbar_.rowwise().sum();
      gb += gb_acc_;

      if (s == 0) {
        gW_acc_.noalias() = Zbar_ * X_.transpose();
        for (int k = 0; k < K_; ++k)
          gW_acc_.col(plan_[k].axis) += Z1bar_[k].rowwise().sum();
        // input jets carry zero second-order seeds: no Z2 term at the input
        gW += gW_acc_;
        break;
      }

      const Stage& pv = stages_[s - 1];
      gW_acc_.noalias() = Zbar_ * pv.A.transpose();
      activation_derivs(s - 1, pv);
      for (int k = 0; k < K_; ++k) {
        scratch_ = gp_.cwiseProduct(pv.Z1[k]);  // previous stage post-activation d1
        gW_acc_.noalias() += Z1bar_[k] * scratch_.transpose();
        if (plan_[k].second) {
          scratch_ = gpp_.cwiseProduct(pv.Z1[k].cwiseProduct(pv.Z1[k]));
          if (pv.Z2[k].size() > 0) scratch_ += gp_.cwiseProduct(pv.Z2[k]);
          gW_acc_.noalias() += Z2bar_[k] * scratch_.transpose();
        }
      }
      gW += gW_acc_;

      // Propagate adjoints to the previous stage's post-activation state.
      Abar_.noalias() = W.transpose() * Zbar_;
      for (int k = 0; k < K_; ++k) {
        D1bar_[k].noalias() = W.transpose() * Z1bar_[k];
        if (plan_[k].second) D2bar_[k].noalias() = W.transpose() * Z2bar_[k];
      }
    }
  }

  /// Number of scalar states recorded by the last forward().
  std::size_t node_count() const {
    std::size_t n = static_cast<std::size_t>(X_.size());
    for (const auto& st : stages_) {
      n += static_cast<std::size_t>(st.A.size());
      for (const auto& m : st.Z1) n += static_cast<std::size_t>(m.size());
      for (const auto& m : st.Z2) n += static_cast<std::size_t>(m.size());
    }
    for (const auto& m : out_d1_) n += static_cast<std::size_t>(m.size());
    for (const auto& m : out_d2_) n += static_cast<std::size_t>(m.size());
    return n;
  }

 private:
  struct Stage {
    Eigen::MatrixXd A;                // post-activation values
    std::vector<Eigen::MatrixXd> Z1;  // pre-activation first-order jets
    std::vector<Eigen::MatrixXd> Z2;  // pre-activation second-order jets (may be empty)
  };

  bool is_identity_stage(int s) const {
    const auto& cfg = params_->config;
    return s == cfg.hidden_layers && cfg.output_transform == net::OutputTransform::linear;
  }

  void apply_activation(int s, Eigen::MatrixXd& A) const {
    const auto& cfg = params_->config;
    if (s < cfg.hidden_layers) {
      A = A.array().tanh().matrix();
    } else if (cfg.output_transform == net::OutputTransform::softplus) {
      A = (A.array().max(0.0) + (-A.array().abs()).exp().log1p()).matrix();
    }
    // linear output: nothing to apply
  }

  /// Fill gp_/gpp_/gppp_ (activation derivative factors) from the recorded
  /// post-activation values of stage s.
  ///   tanh:     g' = 1 - a^2,        g'' = -2 a g',      g''' = g' (4a^2 - 2g')
  ///   softplus: sigma = 1 - e^{-a},  g' = sigma,         g'' = sigma (1 - sigma),
  ///             g''' = g'' (1 - 2 sigma)
  void activation_derivs(int s, const Stage& st) {
    const auto& cfg = params_->config;
    if (s < cfg.hidden_layers) {
      gp_ = (1.0 - st.A.array().square()).matrix();
      gpp_ = (-2.0 * st.A.array() * gp_.array()).matrix();
      gppp_ = (gp_.array() * (4.0 * st.A.array().square() - 2.0 * gp_.array())).matrix();
    } else if (cfg.output_transform == net::OutputTransform::softplus) {
      gp_ = (1.0 - (-st.A.array()).exp()).matrix();
      gpp_ = (gp_.array() * (1.0 - gp_.array())).matrix();
      gppp_ = (gpp_.array() * (1.0 - 2.0 * gp_.array())).matrix();
    } else {
      gp_.setOnes(st.A.rows(), st.A.cols());
      gpp_.setZero(st.A.rows(), st.A.cols());
      gppp_.setZero(st.A.rows(), st.A.cols());
    }
  }

  const net::MlpParams* params_ = nullptr;
  JetPlan plan_;
  int n_ = 0;
  int K_ = 0;
  Eigen::MatrixXd X_;
  std::vector<Stage> stages_;
  std::vector<Eigen::MatrixXd> out_d1_, out_d2_;

  // adjoint and scratch buffers, reused across blocks
  Eigen::MatrixXd vbar_;
  std::vector<Eigen::MatrixXd> d1bar_, d2bar_;
  Eigen::MatrixXd Abar_, Zbar_;
  std::vector<Eigen::MatrixXd> D1bar_, D2bar_, Z1bar_, Z2bar_;
  Eigen::MatrixXd gp_, gpp_, gppp_, scratch_;
  Eigen::MatrixXd gW_acc_;
  Eigen::VectorXd gb_acc_;
};

// ---------------------------------------------------------------------------
// Self-check: directional jets against central finite differences on random
// inputs. Report-only; exposed through the CLI for field diagnosis.
// ---------------------------------------------------------------------------

struct SelfCheckReport {
  double max_rel_d1 = 0.0;
  double max_rel_d2 = 0.0;
  int samples = 0;
};

inline SelfCheckReport derivative_selfcheck(const net::MlpParams& params, int samples,
                                            std::uint64_t seed) {
  Rng rng(seed);
  SelfCheckReport rep;
  rep.samples = samples;
  const double h1 = 1e-6, h2 = 1e-4;
  auto eval = [&](const std::array<double, 4>& x) {
    return net::forward_raw<double>(params, std::span<const double>(x.data(), 4));
  };
  for (int i = 0; i < samples; ++i) {
    std::array<double, 4> x{};
    for (auto& c : x) c = rng.uniform(-0.95, 0.95);
    const int axis = static_cast<int>(rng.next_u64() % 4);
    const auto jets = directional_jet(params, x, axis);

    auto shifted = [&](double h) {
      std::array<double, 4> y = x;
      y[axis] += h;
      return eval(y);
    };
    const auto fp1 = shifted(h1), fm1 = shifted(-h1);
    const auto fp2 = shifted(h2), f0 = eval(x), fm2 = shifted(-h2);
    for (std::size_t o = 0; o < jets.size(); ++o) {
      const double d1_fd = (fp1[o] - fm1[o]) / (2.0 * h1);
      const double d2_fd = (fp2[o] - 2.0 * f0[o] + fm2[o]) / (h2 * h2);
      const double r1 = std::abs(jets[o].d1 - d1_fd) / std::max(std::abs(d1_fd), 1e-6);
      const double r2 = std::abs(jets[o].d2 - d2_fd) / std::max(std::abs(d2_fd), 1e-3);
      rep.max_rel_d1 = std::max(rep.max_rel_d1, r1);
      rep.max_rel_d2 = std::max(rep.max_rel_d2, r2);
    }
  }
  return rep;
}

}  // namespace lmdpinn::ad
