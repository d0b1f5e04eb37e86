#include "fracmc/potential.hpp"

#include <cmath>
#include <numbers>

#include "fracmc/errors.hpp"

namespace fracmc {

namespace {
constexpr double pi = std::numbers::pi;
}

PotentialKind potential_kind_from_string(const std::string& name) {
    if (name == "quartic") return PotentialKind::quartic;
    if (name == "cosine") return PotentialKind::cosine;
    throw Error(ErrorKind::invalid_parameter, "unknown potential kind '" + name + "'");
}

std::string to_string(PotentialKind kind) { return kind == PotentialKind::quartic ? "quartic" : "cosine"; }

Potential::Potential(PotentialKind kind, double scale) : kind_(kind), scale_(scale) {
    if (!(scale > 0.0)) throw Error(ErrorKind::invalid_parameter, "potential scale must be positive");
}

double Potential::W(double u) const {
    if (kind_ == PotentialKind::quartic) return scale_ * u * u * (1.0 - u) * (1.0 - u);
    return scale_ * (1.0 - std::cos(2.0 * pi * u)) / (4.0 * pi);
}

double Potential::Wp(double u) const {
    if (kind_ == PotentialKind::quartic) return scale_ * 2.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
    return scale_ * 0.5 * std::sin(2.0 * pi * u);
}

double Potential::Wpp(double u) const {
    if (kind_ == PotentialKind::quartic) return scale_ * 2.0 * (1.0 - 6.0 * u + 6.0 * u * u);
    return scale_ * pi * std::cos(2.0 * pi * u);
}

double Potential::max_wpp() const {
    // Quartic is unbounded; the bound covers u in [-0.1, 1.1].
    if (kind_ == PotentialKind::quartic) return scale_ * 2.0 * (1.0 + 0.6 + 0.06);
    return scale_ * pi;
}

Potential make_potential(PotentialKind kind) { return Potential(kind); }
Potential make_potential(const std::string& name) { return Potential(potential_kind_from_string(name)); }

}  // namespace fracmc
