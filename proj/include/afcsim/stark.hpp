#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "afcsim/units.hpp"

namespace afcsim {

// Electrode field geometry, expressed as E_y per applied volt along the
// resonator axis. Ideal profiles are analytic; measured profiles load from
// CSV tables and interpolate linearly (no extrapolation).
struct FieldProfile {
  enum class Kind { ideal_parallel, ideal_quadrupole, tabulated };
  Kind kind = Kind::ideal_parallel;
  double scale_parallel = 314.8;  // (V/cm) per volt
  double scale_gradient = 5.0;    // (V/cm/um) per volt
  std::vector<std::pair<double, double>> table;  // x_um -> (V/cm) per volt, ascending x

  void validate() const {
    if (kind == Kind::tabulated) {
      if (table.size() < 2) throw std::invalid_argument("FieldProfile: table needs >= 2 points");
      for (std::size_t i = 1; i < table.size(); ++i)
        if (!(table[i].first > table[i - 1].first))
          throw std::invalid_argument("FieldProfile: table x values must be strictly increasing");
    }
  }

  double e_per_volt(double x_um) const {
    switch (kind) {
      case Kind::ideal_parallel: return scale_parallel;
      case Kind::ideal_quadrupole: return scale_gradient * x_um;
      case Kind::tabulated: {
        if (table.size() < 2 || x_um < table.front().first || x_um > table.back().first)
          throw std::out_of_range("FieldProfile: x outside tabulated span");
        const auto it = std::lower_bound(table.begin(), table.end(), x_um,
            [](const std::pair<double, double>& p, double x) { return p.first < x; });
        if (it == table.begin()) return it->second;
        const auto& [x1, e1] = *(it - 1);
        const auto& [x2, e2] = *it;
        return e1 + (e2 - e1) * (x_um - x1) / (x2 - x1);
      }
    }
    throw std::logic_error("FieldProfile: bad kind");
  }

  // least-squares gradient per volt over [-half_span, half_span]
  double gradient_per_volt(double half_span_um) const {
    if (kind == Kind::ideal_quadrupole) return scale_gradient;
    if (kind == Kind::ideal_parallel) return 0.0;
    double sxx = 0.0, sxe = 0.0;
    const int np = 101;
    for (int i = 0; i < np; ++i) {
      const double x = -half_span_um + 2.0 * half_span_um * i / (np - 1);
      sxx += x * x;
      sxe += x * e_per_volt(x);
    }
    return sxe / sxx;
  }
};

// Load a profile table from CSV with header "x_um,e_per_volt".
inline FieldProfile load_profile_csv(std::istream& in) {
  FieldProfile p;
  p.kind = FieldProfile::Kind::tabulated;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("profile CSV: empty file");
  if (line.size() && line.back() == '\r') line.pop_back();
  if (line != "x_um,e_per_volt") throw std::runtime_error("profile CSV: expected header 'x_um,e_per_volt'");
  while (std::getline(in, line)) {
    if (line.size() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    double x, e;
    char comma;
    if (!(row >> x >> comma >> e) || comma != ',')
      throw std::runtime_error("profile CSV: bad row '" + line + "'");
    p.table.emplace_back(x, e);
  }
  p.validate();
  return p;
}

inline FieldProfile load_profile_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("profile CSV: cannot open " + path);
  return load_profile_csv(f);
}

struct Envelope {
  enum class Kind { rect, smoothed };
  Kind kind = Kind::rect;
  double rise_ns = 0.0;  // cosine ramp length, smoothed only
};

// One time-windowed electrode bias pulse.
struct ElectricPulse {
  double t_center_ns = 0.0;
  double duration_ns = 0.0;
  double volts = 0.0;
  FieldProfile profile;
  Envelope envelope;

  void validate() const {
    if (!(duration_ns > 0.0)) throw std::invalid_argument("ElectricPulse: duration must be > 0");
    if (envelope.kind == Envelope::Kind::smoothed) {
      if (envelope.rise_ns < 0.0 || envelope.rise_ns > duration_ns / 4.0)
        throw std::invalid_argument("ElectricPulse: smoothed rise must be <= duration/4");
    }
    profile.validate();
  }

  double start_ns() const { return t_center_ns - 0.5 * duration_ns; }
  double end_ns() const { return t_center_ns + 0.5 * duration_ns; }

  // dimensionless envelope in [0, 1]
  double envelope_value(double t_ns) const {
    const double u = t_ns - start_ns();
    if (u <= 0.0 || u >= duration_ns) return 0.0;
    if (envelope.kind == Envelope::Kind::rect || envelope.rise_ns <= 0.0) return 1.0;
    const double r = envelope.rise_ns;
    if (u < r) return 0.5 * (1.0 - std::cos(pi * u / r));
    if (u > duration_ns - r) return 0.5 * (1.0 - std::cos(pi * (duration_ns - u) / r));
    return 1.0;
  }

  // exact integral of the envelope, in ns
  double envelope_area_ns() const {
    if (envelope.kind == Envelope::Kind::rect || envelope.rise_ns <= 0.0) return duration_ns;
    return duration_ns - envelope.rise_ns;  // each cosine ramp integrates to rise/2
  }
};

struct StarkModel {
  double s_b_hz_per_vcm = 11.8e3;     // Stark parameter along the b-axis
  double gamma_s_hz_per_vcm = 0.0;    // inhomogeneity FWHM of the Stark parameter
  double impedance_factor = 2.0;      // source/electrode impedance mismatch

  void validate() const {
    if (!(s_b_hz_per_vcm > 0.0)) throw std::invalid_argument("StarkModel: s_b must be > 0");
    if (gamma_s_hz_per_vcm < 0.0) throw std::invalid_argument("StarkModel: gamma_s must be >= 0");
    if (!(impedance_factor > 0.0)) throw std::invalid_argument("StarkModel: impedance_factor must be > 0");
  }
};

// Superposed field of all active pulses at position x and time t, in V/cm.
inline double eval_field(std::span<const ElectricPulse> pulses, double x_um, double t_ns,
                         const StarkModel& model) {
  double field = 0.0;
  for (const auto& p : pulses) {
    const double env = p.envelope_value(t_ns);
    if (env != 0.0) field += env * p.profile.e_per_volt(x_um) * p.volts * model.impedance_factor;
  }
  return field;
}

// Stark shift of one ion, rad/s: 2 pi * subclass * s * E.
inline double ion_shift(double subclass, double s_hz_per_vcm, double field_v_per_cm) {
  return two_pi * subclass * s_hz_per_vcm * field_v_per_cm;
}

// Phase accumulated between the two subclasses over one pulse, at position
// x: 2 pi * 2 s_b * E(x) * integral(envelope). Uses the exact envelope area,
// so smoothed pulses stay exact.
inline double inter_subclass_phase(const ElectricPulse& pulse, const StarkModel& model,
                                   double x_um = 0.0) {
  const double field = pulse.profile.e_per_volt(x_um) * pulse.volts * model.impedance_factor;
  return two_pi * 2.0 * model.s_b_hz_per_vcm * field * ns_to_s(pulse.envelope_area_ns());
}

// Two equal-and-opposite pulses whose first member imposes an exact pi phase
// between the subclasses and whose second cancels it. The pulse length is
// t_pi = 1 / (4 s_b E); for smoothed envelopes the duration is extended so
// the envelope area still equals t_pi.
inline std::pair<ElectricPulse, ElectricPulse> design_pi_pair(
    const StarkModel& model, const FieldProfile& profile, double field_amplitude_v_per_cm,
    double t_first_ns, double t_second_ns, Envelope envelope = {}) {
  model.validate();
  if (!(field_amplitude_v_per_cm > 0.0))
    throw std::invalid_argument("design_pi_pair: field amplitude must be > 0");
  if (!(t_second_ns > t_first_ns))
    throw std::invalid_argument("design_pi_pair: t_second must be > t_first");

  const double t_pi_ns = s_to_ns(1.0 / (4.0 * model.s_b_hz_per_vcm * field_amplitude_v_per_cm));
  double duration_ns = t_pi_ns;
  if (envelope.kind == Envelope::Kind::smoothed) duration_ns += envelope.rise_ns;
  if (duration_ns > t_second_ns - t_first_ns)
    throw std::invalid_argument("design_pi_pair: pulses would overlap (t_pi exceeds the separation)");

  const double ref = profile.e_per_volt(0.0);
  if (!(std::abs(ref) > 0.0))
    throw std::invalid_argument("design_pi_pair: profile has zero field at the resonator center");
  const double volts = field_amplitude_v_per_cm / (ref * model.impedance_factor);

  ElectricPulse first{t_first_ns, duration_ns, volts, profile, envelope};
  ElectricPulse second{t_second_ns, duration_ns, -volts, profile, envelope};
  first.validate();
  second.validate();
  return {first, second};
}

}  // namespace afcsim
