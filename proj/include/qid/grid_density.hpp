#pragma once

#include <complex>
#include <vector>

#include "qid/atomic_measure.hpp"

namespace qid {

// Density sampled on a uniform grid; the represented density is the
// piecewise-linear interpolation of the samples, zero outside
// [x_min, x_max]. All integrals below are exact for that density.
class GridDensity {
public:
    GridDensity() = default;
    static GridDensity from_samples(double x_min, double step, std::vector<double> samples);

    static GridDensity uniform(double a, double b, int n = 1025);
    // Triangular density on [a, b] with peak at c.
    static GridDensity triangular(double a, double c, double b, int n = 1025);

    double x_min() const { return x_min_; }
    double x_max() const { return x_min_ + step_ * (static_cast<double>(samples_.size()) - 1); }
    double step() const { return step_; }
    const std::vector<double>& samples() const { return samples_; }

    double integral() const;
    double abs_integral() const;
    // Total variation of the density including the jumps to zero at both ends.
    double bv_norm() const;
    // int |x| |v(x)| dx, a Lipschitz constant for the characteristic function.
    double mean_abs_x() const;

    bool is_probability(double tol = 1e-8) const;

    double value_at(double x) const;
    std::complex<double> cf(double t) const;

    GridDensity scaled(double factor) const;
    GridDensity shifted(double by) const;

    // Density of the pushforward sum with an atomic measure:
    // v'(x) = sum_k w_k v(x - x_k), resampled on a grid with this step.
    GridDensity convolved_with_atoms(const AtomicMeasure& m) const;
    GridDensity convolved_with_density(const GridDensity& other) const;

    // Pointwise sum of densities, resampled onto a common grid.
    static GridDensity sum(const std::vector<GridDensity>& parts);

private:
    double x_min_ = 0.0;
    double step_ = 1.0;
    std::vector<double> samples_;
};

}  // namespace qid
