#pragma once

#include <string>

namespace fracmc {

enum class PotentialKind { quartic, cosine };

PotentialKind potential_kind_from_string(const std::string& name);
std::string to_string(PotentialKind kind);

// Double well with minima at 0 and 1, optionally multiplied by a constant.
class Potential {
public:
    explicit Potential(PotentialKind kind, double scale = 1.0);

    PotentialKind kind() const { return kind_; }
    double scale() const { return scale_; }
    double W(double u) const;
    double Wp(double u) const;
    double Wpp(double u) const;
    double wpp0() const { return Wpp(0.0); }
    // Upper bound of |W''| on [-0.1, 1.1], the range the evolution allows.
    double max_wpp() const;
    Potential scaled(double factor) const { return Potential(kind_, scale_ * factor); }

private:
    PotentialKind kind_;
    double scale_;
};

Potential make_potential(PotentialKind kind);
Potential make_potential(const std::string& name);

}  // namespace fracmc
