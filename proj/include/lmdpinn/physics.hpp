#pragma once

#include <array>
#include <cmath>
#include <string>

#include "lmdpinn/common.hpp"
#include "lmdpinn/jet.hpp"

namespace lmdpinn::physics {

enum class LaserModel {
  radial,  // Gaussian in both (x - beam) and (y - beam): radially symmetric spot
  line_x,  // y-independent profile (Gaussian in x only)
};

// ---------------------------------------------------------------------------
// ProcessSetup: laser, material, environment, and geometry constants for a
// single-track scan of Ti-6Al-4V. Defaults follow the benchmark process
// (100 W, 10 mm/s, 18x8x4 mm substrate).
// ---------------------------------------------------------------------------

struct ProcessSetup {
  // laser and scan
  double laser_power = 100.0;        // W
  double absorption = 0.4;           // eta, dimensionless
  double beam_radius = 1.5e-3;       // m
  double scan_speed = 10e-3;         // m/s
  double scan_start_x = 4e-3;        // m
  double scan_start_y = 4e-3;        // m
  double scan_duration = 1.0;        // s (also the simulated horizon)
  LaserModel laser_model = LaserModel::radial;

  // material
  double density = 4122.0;           // kg/m^3
  double heat_capacity = 831.0;      // J/(kg K)
  double conductivity = 35.0;        // W/(m K)
  double emissivity = 0.4;           // dimensionless
  double youngs_modulus = 209e9;     // Pa
  double poisson_ratio = 0.28;       // dimensionless
  double thermal_expansion = 9.0e-6; // 1/K

  // environment
  double convection_coeff = 20.0;    // W/(m^2 K)
  double stefan_boltzmann = 5.670374419e-8;  // W/(m^2 K^4)
  double ambient_temperature = 298.0;        // K
  double reference_temperature = 298.0;      // K, stress-free state

  // domain box [0,Lx] x [0,Ly] x [0,Lz]
  double length_x = 18e-3;  // m
  double length_y = 8e-3;   // m
  double length_z = 4e-3;   // m

  // keep the inertia terms of the equilibrium equations (default: quasi-static)
  bool inertia_enabled = false;

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0)) throw ConfigError(std::string("process: ") + name + " must be positive");
    };
    if (laser_power < 0.0) throw ConfigError("process: laser_power must be >= 0");
    positive(beam_radius, "beam_radius");
    positive(density, "density");
    positive(heat_capacity, "heat_capacity");
    positive(conductivity, "conductivity");
    positive(youngs_modulus, "youngs_modulus");
    positive(thermal_expansion, "thermal_expansion");
    positive(length_x, "length_x");
    positive(length_y, "length_y");
    positive(length_z, "length_z");
    positive(scan_duration, "scan_duration");
    if (!(poisson_ratio > 0.0 && poisson_ratio < 0.5))
      throw ConfigError("process: poisson_ratio must lie in (0, 0.5)");
    if (emissivity < 0.0 || emissivity > 1.0)
      throw ConfigError("process: emissivity must lie in [0, 1]");
    if (absorption < 0.0 || absorption > 1.0)
      throw ConfigError("process: absorption must lie in [0, 1]");
    if (convection_coeff < 0.0) throw ConfigError("process: convection_coeff must be >= 0");
    if (scan_speed < 0.0) throw ConfigError("process: scan_speed must be >= 0");
  }

  /// Beam center position on the top surface at time t.
  double beam_x(double t) const { return scan_start_x + scan_speed * t; }
  double beam_y(double) const { return scan_start_y; }

  bool operator==(const ProcessSetup&) const = default;
};

// ---------------------------------------------------------------------------
// Field state bundles. Values and the derivatives each residual consumes, in
// physical units. Templated so the same evaluators serve plain doubles
// (oracle, tests) and jets (derivative checks).
// ---------------------------------------------------------------------------

template <class S>
struct ThermalState {
  S T{};                      // K
  S T_t{};                    // K/s
  S T_x{}, T_y{}, T_z{};      // K/m
  S T_xx{}, T_yy{}, T_zz{};   // K/m^2
};

template <class S>
struct MechanicalState {
  // displacements (m) and their first spatial derivatives
  S u{}, v{}, w{};
  S u_x{}, u_y{}, u_z{};
  S v_x{}, v_y{}, v_z{};
  S w_x{}, w_y{}, w_z{};
  // stresses (Pa): order xx, yy, zz, xy, yz, zx
  std::array<S, 6> sigma{};
  // first spatial derivatives of each stress component, [component][axis]
  std::array<std::array<S, 3>, 6> dsigma{};
  // second time derivatives, used only with inertia enabled
  S u_tt{}, v_tt{}, w_tt{};
};

inline constexpr int kSxx = 0, kSyy = 1, kSzz = 2, kSxy = 3, kSyz = 4, kSzx = 5;

// ---------------------------------------------------------------------------
// Boundary fluxes (W/m^2, positive = heat leaving the body)
// ---------------------------------------------------------------------------

/// Signed Gaussian laser flux at a point on the top surface. Negative values
/// carry heat into the body. The radial model spreads the beam in both
/// in-plane coordinates; line_x drops the y-dependence.
template <class S = double>
S laser_flux(const S& x, const S& y, double t, const ProcessSetup& s) {
  using ad::exp;
  using std::exp;
  const double peak = 2.0 * s.absorption * s.laser_power / (M_PI * s.beam_radius * s.beam_radius);
  const double rb2 = s.beam_radius * s.beam_radius;
  S r2 = (x - s.beam_x(t)) * (x - s.beam_x(t));
  if (s.laser_model == LaserModel::radial) r2 += (y - s.beam_y(t)) * (y - s.beam_y(t));
  return -peak * exp(-2.0 * r2 / rb2);
}

/// Convective loss h (T - T0).
template <class S>
S convective_flux(const S& T, const ProcessSetup& s) {
  return s.convection_coeff * (T - s.ambient_temperature);
}

/// Radiative loss sigma_SB * eps * (T^4 - T0^4).
template <class S>
S radiative_flux(const S& T, const ProcessSetup& s) {
  if (ad::value(T) < 0.0) throw NumericsError("radiative_flux: negative absolute temperature");
  const double T0 = s.ambient_temperature;
  const S T2 = T * T;
  return s.stefan_boltzmann * s.emissivity * (T2 * T2 - (T0 * T0) * (T0 * T0));
}

// ---------------------------------------------------------------------------
// Governing-equation residuals
// ---------------------------------------------------------------------------

/// Transient heat conduction residual rho*Cp*dT/dt - k*lap(T), in W/m^3.
/// Zero for an exact solution of the energy equation.
template <class S>
S energy_residual(const ThermalState<S>& st, const ProcessSetup& s) {
  return s.density * s.heat_capacity * st.T_t - s.conductivity * (st.T_xx + st.T_yy + st.T_zz);
}

/// Throws unless the point lies on the named face of the domain box.
inline void require_on_face(Face face, const Point4& p, const ProcessSetup& s,
                            double face_tol = 1e-9) {
  const double coords[3] = {p.x, p.y, p.z};
  const double extent[3] = {s.length_x, s.length_y, s.length_z};
  const int axis = face_axis(face);
  const double expected = face_normal_sign(face) > 0 ? extent[axis] : 0.0;
  if (std::abs(coords[axis] - expected) > face_tol)
    throw GeometryError(std::string("point not on face ") + face_name(face));
}

/// Thermal boundary residual. Flux faces (top and lateral):
///   -k dT/dn - (Q_laser [top only] + Q_conv + Q_rad)    [W/m^2]
/// Bottom face: Dirichlet at ambient, residual T - T0    [K].
template <class S>
S thermal_bc_residual(Face face, const Point4& p, const ThermalState<S>& st,
                      const ProcessSetup& s, double face_tol = 1e-9) {
  require_on_face(face, p, s, face_tol);
  const int axis = face_axis(face);

  if (face == Face::zmin) return st.T - s.ambient_temperature;

  const S* grad[3] = {&st.T_x, &st.T_y, &st.T_z};
  const S dTdn = face_normal_sign(face) * (*grad[axis]);
  S q = convective_flux(st.T, s) + radiative_flux(st.T, s);
  if (face == Face::zmax) q += laser_flux<double>(p.x, p.y, p.t, s);
  return -s.conductivity * dTdn - q;
}

/// Strains from displacement gradients with the thermal strain removed from
/// the normal components. Order: xx, yy, zz, xy, yz, zx.
template <class S, class ST>
std::array<S, 6> strain_from_displacement(const MechanicalState<S>& m, const ST& T,
                                          const ProcessSetup& s) {
  const S th = s.thermal_expansion * (T - s.reference_temperature);
  return {m.u_x - th,
          m.v_y - th,
          m.w_z - th,
          0.5 * (m.u_y + m.v_x),
          0.5 * (m.v_z + m.w_y),
          0.5 * (m.u_z + m.w_x)};
}

/// Isotropic linear-elastic constitutive law. Input/output order matches
/// strain_from_displacement.
template <class S>
std::array<S, 6> stress_from_strain(const std::array<S, 6>& e, const ProcessSetup& s) {
  const double nu = s.poisson_ratio;
  if (!(nu < 0.5)) throw ConfigError("stress_from_strain: poisson_ratio >= 0.5 is singular");
  const double E = s.youngs_modulus;
  const double c = E / ((1.0 + nu) * (1.0 - 2.0 * nu));
  const double shear = E / (1.0 + nu);
  return {c * ((1.0 - nu) * e[0] + nu * (e[1] + e[2])),
          c * ((1.0 - nu) * e[1] + nu * (e[0] + e[2])),
          c * ((1.0 - nu) * e[2] + nu * (e[0] + e[1])),
          shear * e[3],
          shear * e[4],
          shear * e[5]};
}

/// Momentum balance residual per axis (N/m^3):
///   rho * d2u_i/dt2 - sum_j dsigma_ij/dx_j
/// The inertia term is dropped in the quasi-static default.
template <class S>
std::array<S, 3> equilibrium_residual(const MechanicalState<S>& m, const ProcessSetup& s) {
  std::array<S, 3> r = {
      -(m.dsigma[kSxx][0] + m.dsigma[kSxy][1] + m.dsigma[kSzx][2]),
      -(m.dsigma[kSxy][0] + m.dsigma[kSyy][1] + m.dsigma[kSyz][2]),
      -(m.dsigma[kSzx][0] + m.dsigma[kSyz][1] + m.dsigma[kSzz][2]),
  };
  if (s.inertia_enabled) {
    r[0] += s.density * m.u_tt;
    r[1] += s.density * m.v_tt;
    r[2] += s.density * m.w_tt;
  }
  return r;
}

/// Difference between the directly predicted stresses and the stresses
/// implied by the predicted displacement field through the strain and
/// constitutive laws. Ties the two halves of the stress-displacement network
/// together; zero when they are mutually consistent.
template <class S, class ST>
std::array<S, 6> constitutive_consistency_residual(const MechanicalState<S>& m, const ST& T,
                                                   const ProcessSetup& s) {
  const auto implied = stress_from_strain(strain_from_displacement(m, T, s), s);
  std::array<S, 6> r{};
  for (int c = 0; c < 6; ++c) r[static_cast<std::size_t>(c)] = m.sigma[static_cast<std::size_t>(c)] - implied[static_cast<std::size_t>(c)];
  return r;
}

/// Mechanical boundary residual. Bottom: clamped, residual (u, v, w) in m.
/// All other faces: traction components sum_j sigma_ij n_j in Pa.
template <class S>
std::array<S, 3> mechanical_bc_residual(Face face, const Point4& p, const MechanicalState<S>& m,
                                        const ProcessSetup& s, double face_tol = 1e-9) {
  require_on_face(face, p, s, face_tol);
  if (face == Face::zmin) return {m.u, m.v, m.w};
  const double n = face_normal_sign(face);
  switch (face_axis(face)) {
    case 0: return {n * m.sigma[kSxx], n * m.sigma[kSxy], n * m.sigma[kSzx]};
    case 1: return {n * m.sigma[kSxy], n * m.sigma[kSyy], n * m.sigma[kSyz]};
    default: return {n * m.sigma[kSzx], n * m.sigma[kSyz], n * m.sigma[kSzz]};
  }
}

}  // namespace lmdpinn::physics
