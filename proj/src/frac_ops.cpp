#include "fogrid/frac_ops.hpp"

#include "fogrid/error.hpp"
#include "fogrid/simd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace fogrid {

FracOrder::FracOrder(double alpha) : alpha_(alpha) {
    if (!std::isfinite(alpha) || std::abs(alpha) > 2.0) {
        throw ConfigError("fractional order " + std::to_string(alpha) + " outside [-2, 2]");
    }
}

bool FracOrder::is_integer() const noexcept { return alpha_ == std::round(alpha_); }

std::vector<double> gl_coefficients(double alpha, std::size_t n) {
    std::vector<double> w(n + 1);
    w[0] = 1.0;
    for (std::size_t j = 1; j <= n; ++j) {
        w[j] = w[j - 1] * (1.0 - (alpha + 1.0) / static_cast<double>(j));
    }
    return w;
}

GLDifferintegrator::GLDifferintegrator(FracOrder order, double h, std::size_t mem_len)
    : order_(order), h_(h), mem_len_(mem_len) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw ConfigError("GL step h must be positive and finite");
    }
    if (mem_len == 0) {
        throw ConfigError("GL memory window must hold at least one sample");
    }
    const double a = order.value();
    scale_ = std::pow(h, -a);
    coeffs_ = gl_coefficients(a, mem_len - 1);
    active_len_ = mem_len;

    if (order.is_identity()) {
        mode_ = Mode::Identity;
    } else if (a == -1.0) {
        mode_ = Mode::RunningSum;
    } else if (a == -2.0) {
        mode_ = Mode::DoubleSum;
    } else {
        mode_ = Mode::Window;
        if (order.is_integer()) {
            // Weights past index alpha are exactly zero for positive integers.
            active_len_ = std::min<std::size_t>(mem_len, static_cast<std::size_t>(a) + 1);
        }
    }
    ring_.assign(2 * mem_len_, 0.0);
    pos_ = 0;
}

double GLDifferintegrator::step(double x) {
    if (!std::isfinite(x)) {
        throw NumericInputError("non-finite sample fed to GL operator of order " +
                                std::to_string(order_.value()));
    }
    pos_ = (pos_ == 0 ? mem_len_ : pos_) - 1;
    ring_[pos_] = x;
    ring_[pos_ + mem_len_] = x;
    if (count_ < mem_len_) ++count_;
    ++seen_;

    switch (mode_) {
    case Mode::Identity:
        last_ = x;
        break;
    case Mode::RunningSum:
        sum1_ += x;
        last_ = scale_ * sum1_;
        break;
    case Mode::DoubleSum:
        sum1_ += x;
        sum2_ += sum1_;
        last_ = scale_ * sum2_;
        break;
    case Mode::Window: {
        const std::size_t n = std::min(count_, active_len_);
        last_ = scale_ * simd::dot(coeffs_.data(), ring_.data() + pos_, n);
        break;
    }
    }
    return last_;
}

void GLDifferintegrator::reset() {
    std::fill(ring_.begin(), ring_.end(), 0.0);
    pos_ = 0;
    count_ = 0;
    seen_ = 0;
    sum1_ = 0.0;
    sum2_ = 0.0;
    last_ = 0.0;
}

GLDifferintegrator gl_compose(FracOrder outer, FracOrder inner, double h, std::size_t mem_len) {
    const double total = outer.value() + inner.value();
    if (std::abs(total) > 2.0) {
        throw ConfigError("composed order " + std::to_string(total) + " outside [-2, 2]");
    }
    return GLDifferintegrator(FracOrder(total), h, mem_len);
}

OustaloupApprox oustaloup_design(double alpha, double omega_b, double omega_h, int n_cells) {
    if (!(omega_b > 0.0) || !(omega_h > omega_b) || !std::isfinite(omega_h)) {
        throw ConfigError("Oustaloup band must satisfy 0 < omega_b < omega_h");
    }
    if (n_cells < 1) {
        throw ConfigError("Oustaloup approximation needs n_cells >= 1");
    }
    if (!std::isfinite(alpha) || alpha == 0.0 || std::abs(alpha) > 1.0) {
        throw ConfigError("Oustaloup order must satisfy 0 < |alpha| <= 1");
    }

    OustaloupApprox f;
    f.order_ = FracOrder(alpha);
    f.omega_b_ = omega_b;
    f.omega_h_ = omega_h;
    f.n_cells_ = n_cells;
    f.gain_ = std::pow(omega_h, alpha);

    const double ratio = omega_h / omega_b;
    const double cells = 2.0 * n_cells + 1.0;
    for (int k = -n_cells; k <= n_cells; ++k) {
        const double base = k + n_cells;
        f.zeros_.push_back(omega_b * std::pow(ratio, (base + 0.5 * (1.0 - alpha)) / cells));
        f.poles_.push_back(omega_b * std::pow(ratio, (base + 0.5 * (1.0 + alpha)) / cells));
    }
    return f;
}

std::complex<double> OustaloupApprox::response(double omega) const {
    const std::complex<double> s(0.0, omega);
    std::complex<double> h(gain_, 0.0);
    for (std::size_t k = 0; k < zeros_.size(); ++k) {
        h *= (s + zeros_[k]) / (s + poles_[k]);
    }
    return h;
}

void OustaloupApprox::discretize(double h) {
    if (!(h > 0.0) || omega_h_ >= std::numbers::pi / h) {
        throw ConfigError("Oustaloup band edge " + std::to_string(omega_h_) +
                          " rad/s is not below the Nyquist rate for h = " + std::to_string(h));
    }
    h_ = h;
    sections_.clear();
    const double k = 2.0 / h;
    for (std::size_t i = 0; i < zeros_.size(); ++i) {
        const double z = zeros_[i];
        const double p = poles_[i];
        const double norm = k + p;
        sections_.push_back(Section{(k + z) / norm, (z - k) / norm, (p - k) / norm});
    }
}

double OustaloupApprox::step(double x, double h) {
    if (!std::isfinite(x)) {
        throw NumericInputError("non-finite sample fed to Oustaloup filter");
    }
    if (sections_.empty() || h != h_) {
        discretize(h);
    }
    double v = x;
    for (Section& s : sections_) {
        const double y = s.b0 * v + s.b1 * s.x_prev - s.a1 * s.y_prev;
        s.x_prev = v;
        s.y_prev = y;
        v = y;
    }
    return gain_ * v;
}

std::vector<double> OustaloupApprox::discrete_poles() const {
    std::vector<double> out;
    out.reserve(sections_.size());
    for (const Section& s : sections_) {
        out.push_back(-s.a1);
    }
    return out;
}

void OustaloupApprox::reset() {
    for (Section& s : sections_) {
        s.x_prev = 0.0;
        s.y_prev = 0.0;
    }
}

} // namespace fogrid
