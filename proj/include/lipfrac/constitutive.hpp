#pragma once

namespace lipfrac {

/// Symmetric 2x2 tensor stored by its three independent components.
/// `xy` is the tensor component (not the engineering shear strain).
struct SymTensor2 {
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;

  double trace() const { return xx + yy; }
  /// Double contraction A:B.
  double dot(const SymTensor2& o) const { return xx * o.xx + yy * o.yy + 2.0 * xy * o.xy; }

  friend SymTensor2 operator+(SymTensor2 a, const SymTensor2& b) {
    return {a.xx + b.xx, a.yy + b.yy, a.xy + b.xy};
  }
  friend SymTensor2 operator-(SymTensor2 a, const SymTensor2& b) {
    return {a.xx - b.xx, a.yy - b.yy, a.xy - b.xy};
  }
  friend SymTensor2 operator*(double s, SymTensor2 a) { return {s * a.xx, s * a.yy, s * a.xy}; }
};

using Strain2D = SymTensor2;
using Stress2D = SymTensor2;

/// Plane-strain isotropic material with Lip-field damage parameters.
struct MaterialParams {
  double E;       ///< Young's modulus [Pa]
  double nu;      ///< Poisson ratio
  double rho;     ///< density [kg/m^3]
  double Yc;      ///< critical energy [J/m^3]
  double l;       ///< Lipschitz regularizing length [m]
  double lambda;  ///< Lame first parameter [Pa]
  double mu;      ///< shear modulus [Pa]

  /// Validates the inputs and derives the Lame constants.
  static MaterialParams create(double E, double nu, double rho, double Yc, double l);
};

struct LameConstants {
  double lambda;
  double mu;
};

LameConstants lame_plane_strain(double E, double nu);

struct WaveSpeeds {
  double c_d;  ///< dilatational
  double c_s;  ///< shear
  double c_R;  ///< Rayleigh (Viktorov approximation)
};

WaveSpeeds wave_speeds(const MaterialParams& p);
WaveSpeeds wave_speeds(double lambda, double mu, double rho, double nu);

/// Yc such that Gc = 4 Yc l for the default degradation/softening pair.
double yc_from_gc(double Gc, double l);

// Degradation g(d) = (1-d)^2 + 0.1 (1-d) d^3 and softening h(d) = 2d + 3d^2.
// The checked versions throw ArgumentError outside [0,1].
double degradation(double d);
double degradation_slope(double d);
double softening(double d);
double softening_slope(double d);

namespace detail {
inline double g(double d) { return (1 - d) * (1 - d) + 0.1 * (1 - d) * d * d * d; }
inline double dg(double d) { return -2.0 * (1 - d) + 0.3 * d * d - 0.4 * d * d * d; }
inline double d2g(double d) { return 2.0 + 0.6 * d - 1.2 * d * d; }
inline double h(double d) { return 2.0 * d + 3.0 * d * d; }
inline double dh(double d) { return 2.0 + 6.0 * d; }
inline double d2h(double) { return 6.0; }
}  // namespace detail

/// Spectral split of a strain into tensile and compressive parts, with the
/// matching undamaged energy densities.
struct StrainSplit {
  Strain2D plus;
  Strain2D minus;
  double trace_plus = 0.0;   ///< <tr eps>_+
  double trace_minus = 0.0;  ///< <tr eps>_-
  double e_plus = 0.0;       ///< lambda/2 <tr>_+^2 + mu eps+ : eps+   [J/m^3]
  double e_minus = 0.0;      ///< same with the negative parts          [J/m^3]
};

StrainSplit eigen_split(const Strain2D& eps, double lambda, double mu);
inline StrainSplit eigen_split(const Strain2D& eps, const MaterialParams& p) {
  return eigen_split(eps, p.lambda, p.mu);
}

/// psi = g(d) e_plus + e_minus
double free_energy(const StrainSplit& split, double d);

/// sigma = d psi / d eps
Stress2D stress(const StrainSplit& split, double d, const MaterialParams& p);

/// Y = -d psi / d d = -g'(d) e_plus
double driving_energy(const StrainSplit& split, double d);

}  // namespace lipfrac
