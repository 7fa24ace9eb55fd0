#include "lipfrac/constitutive.hpp"

#include <cmath>
#include <string>

#include "lipfrac/error.hpp"

namespace lipfrac {

namespace {

void check_damage(double d, const char* who) {
  if (!(d >= 0.0 && d <= 1.0)) {
    throw ArgumentError(std::string(who) + ": damage " + std::to_string(d) + " outside [0,1]");
  }
}

double pos(double p) { return 0.5 * (p + std::abs(p)); }
double neg(double p) { return 0.5 * (p - std::abs(p)); }

}  // namespace

LameConstants lame_plane_strain(double E, double nu) {
  if (!(E > 0)) throw ArgumentError("Young's modulus must be positive");
  if (!(nu >= 0.0 && nu < 0.5)) throw ArgumentError("Poisson ratio must lie in [0, 0.5)");
  return {E * nu / (1 + nu) / (1 - 2 * nu), E / 2 / (1 + nu)};
}

MaterialParams MaterialParams::create(double E, double nu, double rho, double Yc, double l) {
  const auto lame = lame_plane_strain(E, nu);
  if (!(rho > 0)) throw ArgumentError("density must be positive");
  if (!(Yc > 0)) throw ArgumentError("Yc must be positive");
  if (!(l > 0)) throw ArgumentError("regularizing length l must be positive");
  return {E, nu, rho, Yc, l, lame.lambda, lame.mu};
}

WaveSpeeds wave_speeds(double lambda, double mu, double rho, double nu) {
  const double c_d = std::sqrt((lambda + 2 * mu) / rho);
  const double c_s = std::sqrt(mu / rho);
  return {c_d, c_s, (0.862 + 1.14 * nu) / (1 + nu) * c_s};
}

WaveSpeeds wave_speeds(const MaterialParams& p) { return wave_speeds(p.lambda, p.mu, p.rho, p.nu); }

double yc_from_gc(double Gc, double l) {
  if (!(Gc > 0) || !(l > 0)) throw ArgumentError("Gc and l must be positive");
  return Gc / (4.0 * l);
}

double degradation(double d) {
  check_damage(d, "degradation");
  return detail::g(d);
}
double degradation_slope(double d) {
  check_damage(d, "degradation_slope");
  return detail::dg(d);
}
double softening(double d) {
  check_damage(d, "softening");
  return detail::h(d);
}
double softening_slope(double d) {
  check_damage(d, "softening_slope");
  return detail::dh(d);
}

StrainSplit eigen_split(const Strain2D& eps, double lambda, double mu) {
  const double norm = std::sqrt(eps.xx * eps.xx + eps.yy * eps.yy + 2 * eps.xy * eps.xy);
  double l1, l2, c, s;
  if (std::abs(eps.xy) <= 1e-14 * norm) {
    // Already diagonal (covers coalesced eigenvalues): split the axes directly.
    l1 = eps.xx;
    l2 = eps.yy;
    c = 1.0;
    s = 0.0;
  } else {
    const double mean = 0.5 * (eps.xx + eps.yy);
    const double half_diff = 0.5 * (eps.xx - eps.yy);
    const double r = std::hypot(half_diff, eps.xy);
    l1 = mean + r;
    l2 = mean - r;
    const double theta = 0.5 * std::atan2(eps.xy, half_diff);
    c = std::cos(theta);
    s = std::sin(theta);
  }
  // n1 = (c, s), n2 = (-s, c)
  auto assemble = [&](double a1, double a2) {
    return Strain2D{a1 * c * c + a2 * s * s, a1 * s * s + a2 * c * c, (a1 - a2) * c * s};
  };

  StrainSplit out;
  out.plus = assemble(pos(l1), pos(l2));
  out.minus = assemble(neg(l1), neg(l2));
  const double tr = eps.trace();
  out.trace_plus = pos(tr);
  out.trace_minus = neg(tr);
  out.e_plus = 0.5 * lambda * out.trace_plus * out.trace_plus +
               mu * (pos(l1) * pos(l1) + pos(l2) * pos(l2));
  out.e_minus = 0.5 * lambda * out.trace_minus * out.trace_minus +
                mu * (neg(l1) * neg(l1) + neg(l2) * neg(l2));
  return out;
}

double free_energy(const StrainSplit& split, double d) {
  check_damage(d, "free_energy");
  return detail::g(d) * split.e_plus + split.e_minus;
}

Stress2D stress(const StrainSplit& split, double d, const MaterialParams& p) {
  check_damage(d, "stress");
  const double g = detail::g(d);
  const Stress2D tensile{p.lambda * split.trace_plus + 2 * p.mu * split.plus.xx,
                         p.lambda * split.trace_plus + 2 * p.mu * split.plus.yy,
                         2 * p.mu * split.plus.xy};
  const Stress2D compressive{p.lambda * split.trace_minus + 2 * p.mu * split.minus.xx,
                             p.lambda * split.trace_minus + 2 * p.mu * split.minus.yy,
                             2 * p.mu * split.minus.xy};
  return g * tensile + compressive;
}

double driving_energy(const StrainSplit& split, double d) {
  check_damage(d, "driving_energy");
  return -detail::dg(d) * split.e_plus;
}

}  // namespace lipfrac
