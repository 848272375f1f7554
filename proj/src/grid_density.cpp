#include "qid/grid_density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qid {

namespace {

using cplx = std::complex<double>;

// E0(z) = int_0^1 e^{izs} ds, E1(z) = int_0^1 s e^{izs} ds.
void interval_kernels(double z, cplx& e0, cplx& e1) {
    if (std::abs(z) < 0.01) {
        double z2 = z * z, z3 = z2 * z, z4 = z2 * z2, z5 = z4 * z, z6 = z4 * z2;
        e0 = cplx(1.0 - z2 / 6.0 + z4 / 120.0 - z6 / 5040.0,
                  z / 2.0 - z3 / 24.0 + z5 / 720.0);
        e1 = cplx(0.5 - z2 / 8.0 + z4 / 144.0 - z6 / 5760.0,
                  z / 3.0 - z3 / 30.0 + z5 / 840.0);
        return;
    }
    cplx iz(0.0, z);
    cplx em1(-2.0 * std::sin(0.5 * z) * std::sin(0.5 * z), std::sin(z));  // e^{iz} - 1
    e0 = em1 / iz;
    cplx eiz = em1 + 1.0;
    e1 = (eiz * (iz - 1.0) + 1.0) / (iz * iz);
}

}  // namespace

GridDensity GridDensity::from_samples(double x_min, double step, std::vector<double> samples) {
    if (!(step > 0.0)) throw std::invalid_argument("GridDensity: step must be positive");
    if (samples.size() < 2) throw std::invalid_argument("GridDensity: need at least two samples");
    for (double v : samples)
        if (!std::isfinite(v)) throw std::invalid_argument("GridDensity: non-finite sample");
    GridDensity g;
    g.x_min_ = x_min;
    g.step_ = step;
    g.samples_ = std::move(samples);
    return g;
}

GridDensity GridDensity::uniform(double a, double b, int n) {
    if (!(b > a)) throw std::invalid_argument("uniform: need b > a");
    double h = (b - a) / (n - 1);
    return from_samples(a, h, std::vector<double>(n, 1.0 / (b - a)));
}

GridDensity GridDensity::triangular(double a, double c, double b, int n) {
    if (!(a < c && c < b)) throw std::invalid_argument("triangular: need a < c < b");
    double h = (b - a) / (n - 1);
    // apex snapped onto the sample grid so the represented piecewise-linear
    // density integrates to exactly one
    int apex = std::clamp(static_cast<int>(std::lround((c - a) / h)), 1, n - 2);
    double ca = a + h * apex;
    double peak = 2.0 / (b - a);
    std::vector<double> v(n);
    for (int j = 0; j < n; ++j) {
        double x = a + h * j;
        v[j] = x <= ca ? peak * (x - a) / (ca - a) : peak * (b - x) / (b - ca);
    }
    return from_samples(a, h, std::move(v));
}

double GridDensity::integral() const {
    double s = 0.0;
    for (size_t j = 0; j + 1 < samples_.size(); ++j) s += samples_[j] + samples_[j + 1];
    return 0.5 * step_ * s;
}

double GridDensity::abs_integral() const {
    // Exact integral of |piecewise linear|; sign changes split an interval.
    double s = 0.0;
    for (size_t j = 0; j + 1 < samples_.size(); ++j) {
        double u = samples_[j], w = samples_[j + 1];
        if (u * w >= 0.0) {
            s += 0.5 * step_ * (std::abs(u) + std::abs(w));
        } else {
            double frac = u / (u - w);  // zero crossing within the cell
            s += 0.5 * step_ * (std::abs(u) * frac + std::abs(w) * (1.0 - frac));
        }
    }
    return s;
}

double GridDensity::bv_norm() const {
    double s = std::abs(samples_.front()) + std::abs(samples_.back());
    for (size_t j = 0; j + 1 < samples_.size(); ++j) s += std::abs(samples_[j + 1] - samples_[j]);
    return s;
}

double GridDensity::mean_abs_x() const {
    double s = 0.0;
    for (size_t j = 0; j + 1 < samples_.size(); ++j) {
        double x0 = x_min_ + step_ * j, x1 = x0 + step_;
        s += 0.5 * step_ * (std::abs(x0 * samples_[j]) + std::abs(x1 * samples_[j + 1]));
    }
    return s;
}

bool GridDensity::is_probability(double tol) const {
    for (double v : samples_)
        if (v < 0.0) return false;
    return std::abs(integral() - 1.0) <= tol;
}

double GridDensity::value_at(double x) const {
    double pos = (x - x_min_) / step_;
    if (pos < 0.0 || pos > static_cast<double>(samples_.size() - 1)) return 0.0;
    size_t j = std::min(static_cast<size_t>(pos), samples_.size() - 2);
    double f = pos - static_cast<double>(j);
    return samples_[j] * (1.0 - f) + samples_[j + 1] * f;
}

std::complex<double> GridDensity::cf(double t) const {
    cplx e0, e1;
    interval_kernels(t * step_, e0, e1);
    // sum over cells of e^{i t x_j} h (v_j E0 + (v_{j+1}-v_j) E1)
    cplx rot(std::cos(t * step_), std::sin(t * step_));
    cplx phase(std::cos(t * x_min_), std::sin(t * x_min_));
    cplx acc{0.0, 0.0};
    for (size_t j = 0; j + 1 < samples_.size(); ++j) {
        acc += phase * (samples_[j] * e0 + (samples_[j + 1] - samples_[j]) * e1);
        phase *= rot;
        // Rotation drift is ~n*eps; refresh occasionally.
        if ((j & 1023) == 1023) {
            double x = x_min_ + step_ * static_cast<double>(j + 1);
            phase = cplx(std::cos(t * x), std::sin(t * x));
        }
    }
    return step_ * acc;
}

GridDensity GridDensity::scaled(double factor) const {
    GridDensity g = *this;
    for (double& v : g.samples_) v *= factor;
    return g;
}

GridDensity GridDensity::shifted(double by) const {
    GridDensity g = *this;
    g.x_min_ += by;
    return g;
}

GridDensity GridDensity::convolved_with_atoms(const AtomicMeasure& m) const {
    if (m.empty()) throw std::invalid_argument("convolved_with_atoms: empty measure");
    if (m.size() == 1 && std::abs(m.atoms()[0].weight - 1.0) < 1e-15)
        return shifted(m.atoms()[0].loc.value);
    double lo = x_min() + m.atoms().front().loc.value;
    double hi = x_max() + m.atoms().back().loc.value;
    int n = static_cast<int>(std::ceil((hi - lo) / step_)) + 1;
    std::vector<double> v(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double x = lo + step_ * j;
        double s = 0.0;
        for (const auto& a : m.atoms()) s += a.weight * value_at(x - a.loc.value);
        v[j] = s;
    }
    return from_samples(lo, step_, std::move(v));
}

GridDensity GridDensity::convolved_with_density(const GridDensity& other) const {
    double h = std::min(step_, other.step_);
    double lo = x_min() + other.x_min();
    double hi = x_max() + other.x_max();
    int n = static_cast<int>(std::ceil((hi - lo) / h)) + 1;
    int m = static_cast<int>(other.samples_.size());
    std::vector<double> v(n, 0.0);
    // Trapezoid in y against other's grid; fine enough for part bookkeeping.
    for (int j = 0; j < n; ++j) {
        double x = lo + h * j;
        double s = 0.0;
        for (int k = 0; k < m; ++k) {
            double w = (k == 0 || k == m - 1) ? 0.5 : 1.0;
            s += w * other.samples_[k] * value_at(x - (other.x_min_ + other.step_ * k));
        }
        v[j] = s * other.step_;
    }
    return from_samples(lo, h, std::move(v));
}

GridDensity GridDensity::sum(const std::vector<GridDensity>& parts) {
    if (parts.empty()) throw std::invalid_argument("sum: no parts");
    if (parts.size() == 1) return parts[0];
    double h = parts[0].step_, lo = parts[0].x_min(), hi = parts[0].x_max();
    for (const auto& p : parts) {
        h = std::min(h, p.step_);
        lo = std::min(lo, p.x_min());
        hi = std::max(hi, p.x_max());
    }
    int n = static_cast<int>(std::ceil((hi - lo) / h)) + 1;
    std::vector<double> v(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double x = lo + h * j;
        for (const auto& p : parts) v[j] += p.value_at(x);
    }
    return from_samples(lo, h, std::move(v));
}

}  // namespace qid
