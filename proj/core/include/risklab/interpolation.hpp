#pragma once

#include <span>
#include <vector>

namespace risklab {

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch-Carlson
/// slopes). Nodes must be strictly increasing. Evaluation outside the node
/// range throws unless `extrapolate` was requested, in which case the end
/// cubics are continued.
class MonotoneCubic {
  public:
    MonotoneCubic(std::span<const double> xs, std::span<const double> ys,
                  bool extrapolate = false);

    double operator()(double x) const;
    double derivative(double x) const;

    double x_min() const { return xs_.front(); }
    double x_max() const { return xs_.back(); }

  private:
    std::size_t segment(double x) const;

    std::vector<double> xs_, ys_, slopes_;
    bool extrapolate_;
};

}  // namespace risklab
