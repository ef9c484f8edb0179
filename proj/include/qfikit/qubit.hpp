#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qfikit/linalg.hpp"
#include "qfikit/model.hpp"
#include "qfikit/parallel.hpp"

namespace qfikit {

using Vec3 = std::array<double, 3>;

// Below this rotation angle the closed-form coefficients switch to their
// Taylor expansions.
inline constexpr double kSmallAngle = 1e-6;
// How close to 1 a Bloch length must be for the closed-form fast path.
inline constexpr double kUnitBlochTol = 1e-9;

inline double dot(const Vec3& u, const Vec3& v) {
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
}
inline double norm(const Vec3& u) { return std::sqrt(dot(u, u)); }
inline Vec3 cross(const Vec3& u, const Vec3& v) {
    return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0]};
}
inline Vec3 operator+(const Vec3& u, const Vec3& v) {
    return {u[0] + v[0], u[1] + v[1], u[2] + v[2]};
}
inline Vec3 operator-(const Vec3& u, const Vec3& v) {
    return {u[0] - v[0], u[1] - v[1], u[2] - v[2]};
}
inline Vec3 operator*(double c, const Vec3& u) {
    return {c * u[0], c * u[1], c * u[2]};
}

inline Vec3 normalized(const Vec3& v) {
    const double n = norm(v);
    if (!(n > 0.0))
        throw ValidationError("Bloch vector must be nonzero");
    return (1.0 / n) * v;
}

/// sin(x)/x with a series fallback near zero.
inline double sinc(double x) {
    const double x2 = x * x;
    if (std::abs(x) < 1e-4) return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
    return std::sin(x) / x;
}

namespace detail {

inline void require_unit(const Vec3& v, const char* name) {
    if (std::abs(norm(v) - 1.0) > kUnitBlochTol)
        throw ValidationError(std::string(name) +
                              " must be a unit Bloch vector (|" + name +
                              "| = " + std::to_string(norm(v)) + ")");
}

}  // namespace detail

/// Bloch vector of the time-averaged generator for a qubit with generator
/// a.sigma and disturbance b.sigma (a, b unit): the averaged operator is
/// m.sigma, and the peak QFI is 4 |m|^2.
inline Vec3 m_vector(const Vec3& a, const Vec3& b, double lambda,
                     double eta) {
    detail::require_unit(a, "a");
    detail::require_unit(b, "b");
    const Vec3 n = lambda * a + eta * b;
    const double theta = norm(n);
    double s2, g;  // sinc(2 theta) and (1 - sinc(2 theta)) / (2 theta^2)
    if (theta < kSmallAngle) {
        const double t2 = theta * theta;
        s2 = 1.0 - 2.0 * t2 / 3.0;
        g = 1.0 / 3.0;
    } else {
        s2 = std::sin(2.0 * theta) / (2.0 * theta);
        g = (1.0 - s2) / (2.0 * theta * theta);
    }
    const double sc = sinc(theta);
    const Vec3 ba = cross(b, a);
    return 0.5 * (1.0 + s2) * a - (eta * sc * sc) * ba +
           g * (dot(n, a) * n - eta * cross(ba, n));
}

/// Peak QFI of the disturbed qubit, 4 |m|^2.
inline double qmax_qubit(const Vec3& a, const Vec3& b, double lambda,
                         double eta) {
    const Vec3 m = m_vector(a, b, lambda, eta);
    return 4.0 * dot(m, m);
}

struct SweepResult {
    std::vector<double> grid;           // ascending lambda values
    std::vector<double> q_over_4;       // |m|^2 per grid point
    double lambda_min_located = 0.0;    // refined location of the QFI dip
    double q_at_min = 0.0;              // peak QFI at that location
    bool flat = false;                  // curve constant over the grid
};

/// Golden-section minimizer; f must be unimodal on [lo, hi]. Returns
/// {argmin, f(argmin)} once the bracket is narrower than tol.
template <typename F>
std::pair<double, double> golden_section_min(F&& f, double lo, double hi,
                                             double tol = 1e-10) {
    constexpr double invphi = 0.61803398874989484820;
    double a = lo, b = hi;
    if (!(b - a > tol)) {
        const double x = 0.5 * (a + b);
        return {x, f(x)};
    }
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, f(x)};
}

/// Evaluates |m|^2 over an ascending lambda grid and refines the location
/// of the minimum by golden section inside the best grid bracket. A curve
/// that is constant over the grid (eta = 0, or a parallel to b) is flagged
/// flat and reported at the grid start.
inline SweepResult sweep(const Vec3& a, const Vec3& b, double eta,
                         const std::vector<double>& lambda_grid,
                         unsigned jobs = 1) {
    if (lambda_grid.size() < 2)
        throw ValidationError("sweep grid needs at least 2 points, got " +
                              std::to_string(lambda_grid.size()));
    for (std::size_t i = 1; i < lambda_grid.size(); ++i)
        if (!(lambda_grid[i] > lambda_grid[i - 1]))
            throw ValidationError(
                "sweep grid must be strictly ascending near index " +
                std::to_string(i));
    detail::require_unit(a, "a");
    detail::require_unit(b, "b");

    SweepResult r;
    r.grid = lambda_grid;
    r.q_over_4.resize(lambda_grid.size());
    parallel_for_index(lambda_grid.size(), jobs, [&](std::size_t i) {
        const Vec3 m = m_vector(a, b, lambda_grid[i], eta);
        r.q_over_4[i] = dot(m, m);
    });

    double lo = r.q_over_4[0], hi = r.q_over_4[0];
    std::size_t best = 0;
    for (std::size_t i = 1; i < r.q_over_4.size(); ++i) {
        lo = std::min(lo, r.q_over_4[i]);
        hi = std::max(hi, r.q_over_4[i]);
        if (r.q_over_4[i] < r.q_over_4[best]) best = i;
    }
    if (hi - lo <= 1e-12 * (1.0 + hi)) {
        r.flat = true;
        r.lambda_min_located = lambda_grid.front();
        r.q_at_min = 4.0 * r.q_over_4.front();
        return r;
    }
    const std::size_t left = best > 0 ? best - 1 : best;
    const std::size_t right =
        best + 1 < lambda_grid.size() ? best + 1 : best;
    auto f = [&](double l) {
        const Vec3 m = m_vector(a, b, l, eta);
        return dot(m, m);
    };
    const auto [x, fx] =
        golden_section_min(f, lambda_grid[left], lambda_grid[right]);
    r.lambda_min_located = x;
    r.q_at_min = 4.0 * fx;
    return r;
}

/// Lambda interval on which raising the disturbance strength from eta to
/// eta_tilde raises the peak QFI (deliberate dithering pays off). Scans
/// a window of +/- 10 (eta_tilde + 1) around zero, picks the positive-gain
/// run closest to the undisturbed dip at -eta (a.b), and sharpens its
/// endpoints by bisection. Returns nullopt when no gain exists anywhere
/// in the window.
inline std::optional<std::pair<double, double>> dithering_interval(
    const Vec3& a, const Vec3& b, double eta, double eta_tilde) {
    if (!(eta >= 0.0) || !(eta_tilde > eta))
        throw ValidationError(
            "dithering comparison needs eta_tilde > eta >= 0");
    detail::require_unit(a, "a");
    detail::require_unit(b, "b");

    auto gain = [&](double l) {
        return qmax_qubit(a, b, l, eta_tilde) - qmax_qubit(a, b, l, eta);
    };
    const double window = 10.0 * (eta_tilde + 1.0);
    const std::size_t points = std::min<std::size_t>(
        100001, static_cast<std::size_t>(std::ceil(2.0 * window / 0.01)) + 1);
    const double step = 2.0 * window / static_cast<double>(points - 1);
    const double anchor = -eta * dot(a, b);

    // contiguous runs of positive gain over the scan grid
    struct Run {
        std::size_t first, last;
    };
    std::vector<Run> runs;
    std::vector<double> values(points);
    for (std::size_t i = 0; i < points; ++i) {
        values[i] = gain(-window + step * static_cast<double>(i));
        if (values[i] > 0.0) {
            if (!runs.empty() && runs.back().last + 1 == i)
                runs.back().last = i;
            else
                runs.push_back({i, i});
        }
    }
    if (runs.empty()) return std::nullopt;

    auto grid_at = [&](std::size_t i) {
        return -window + step * static_cast<double>(i);
    };
    const Run* pick = &runs.front();
    double pick_dist = std::numeric_limits<double>::infinity();
    for (const Run& run : runs) {
        const double lo = grid_at(run.first), hi = grid_at(run.last);
        const double dist = anchor < lo   ? lo - anchor
                            : anchor > hi ? anchor - hi
                                          : 0.0;
        if (dist < pick_dist) {
            pick_dist = dist;
            pick = &run;
        }
    }

    auto bisect = [&](double neg, double pos) {
        // invariant: gain(neg) <= 0 < gain(pos)
        while (std::abs(pos - neg) > 1e-8) {
            const double mid = 0.5 * (neg + pos);
            (gain(mid) > 0.0 ? pos : neg) = mid;
        }
        return 0.5 * (neg + pos);
    };
    double lo = grid_at(pick->first);
    double hi = grid_at(pick->last);
    if (pick->first > 0) lo = bisect(grid_at(pick->first - 1), lo);
    if (pick->last + 1 < points) hi = bisect(grid_at(pick->last + 1), hi);
    return std::make_pair(lo, hi);
}

/// v . sigma for a 2-dimensional Hermitian build.
inline ComplexMatrix bloch_matrix(const Vec3& v) {
    ComplexMatrix h(2, 2);
    h(0, 0) = Complex(v[2], 0.0);
    h(0, 1) = Complex(v[0], -v[1]);
    h(1, 0) = Complex(v[0], v[1]);
    h(1, 1) = Complex(-v[2], 0.0);
    return h;
}

/// Bloch vector of a traceless unit-Bloch 2x2 Hermitian matrix; nullopt
/// when the matrix has a trace component or a non-unit Bloch length.
inline std::optional<Vec3> unit_bloch_of(const ComplexMatrix& h) {
    if (h.rows() != 2 || h.cols() != 2) return std::nullopt;
    const double scale = 1.0 + max_abs(h);
    const double c0 = 0.5 * (h(0, 0).real() + h(1, 1).real());
    if (std::abs(c0) > 1e-12 * scale) return std::nullopt;
    const Vec3 v = {h(0, 1).real(), -h(0, 1).imag(),
                    0.5 * (h(0, 0).real() - h(1, 1).real())};
    if (std::abs(norm(v) - 1.0) > kUnitBlochTol) return std::nullopt;
    return v;
}

}  // namespace qfikit
