#pragma once

#include <string>
#include <utility>

#include <unsupported/Eigen/KroneckerProduct>

#include "qfikit/linalg.hpp"
#include "qfikit/model.hpp"
#include "qfikit/qfi.hpp"

namespace qfikit {

// Collective Hilbert space cap; d^n beyond this is refused rather than
// silently ground through dense linear algebra.
inline constexpr Eigen::Index kMaxCollectiveDim = 256;

/// n independent probes driven by the same local generator, each exposed
/// to its own copy of the local disturbance.
struct ProbeEnsemble {
    int n = 1;
    HermitianOperator local_generator;
    HermitianOperator local_disturbance;

    ProbeEnsemble(int count, HermitianOperator g, HermitianOperator d)
        : n(count),
          local_generator(std::move(g)),
          local_disturbance(std::move(d)) {
        if (n < 1)
            throw ValidationError("probe count must be >= 1, got " +
                                  std::to_string(n));
        if (local_generator.dim() != local_disturbance.dim())
            throw ValidationError(
                "local generator and disturbance dimensions differ: " +
                std::to_string(local_generator.dim()) + " vs " +
                std::to_string(local_disturbance.dim()));
        Eigen::Index total = 1;
        for (int j = 0; j < n; ++j) {
            total *= local_generator.dim();
            if (total > kMaxCollectiveDim)
                throw ValidationError(
                    "collective dimension " + std::to_string(n) + " probes x " +
                    std::to_string(local_generator.dim()) +
                    " levels exceeds the cap of " +
                    std::to_string(kMaxCollectiveDim));
        }
    }

    Eigen::Index local_dim() const { return local_generator.dim(); }
    Eigen::Index collective_dim() const {
        Eigen::Index total = 1;
        for (int j = 0; j < n; ++j) total *= local_dim();
        return total;
    }
};

/// sum_j I x ... x h x ... x I over n tensor factors.
inline ComplexMatrix kronecker_sum(const ComplexMatrix& h, int n) {
    const Eigen::Index d = h.rows();
    Eigen::Index total = 1;
    for (int j = 0; j < n; ++j) total = total * d;
    ComplexMatrix acc = ComplexMatrix::Zero(total, total);
    for (int j = 0; j < n; ++j) {
        Eigen::Index left = 1, right = 1;
        for (int k = 0; k < j; ++k) left *= d;
        for (int k = j + 1; k < n; ++k) right *= d;
        const ComplexMatrix mid = Eigen::kroneckerProduct(
            ComplexMatrix(ComplexMatrix::Identity(left, left)), h);
        acc += Eigen::kroneckerProduct(
            mid, ComplexMatrix(ComplexMatrix::Identity(right, right)));
    }
    return acc;
}

/// Collective generator and disturbance on the n-probe space, both plain
/// Kronecker sums of the local operators.
inline std::pair<HermitianOperator, HermitianOperator> build_collective(
    const ProbeEnsemble& pe) {
    return {HermitianOperator::unchecked(
                kronecker_sum(pe.local_generator.matrix(), pe.n)),
            HermitianOperator::unchecked(
                kronecker_sum(pe.local_disturbance.matrix(), pe.n))};
}

struct ScalingReport {
    double q_n = 0.0;       // peak QFI of the n-probe ensemble
    double q_1 = 0.0;       // peak QFI of a single probe
    double ratio = 0.0;     // q_n / q_1
    double expected = 0.0;  // n^2
};

/// Peak-QFI ratio between the n-probe ensemble and a single probe at the
/// same operating point. For probe-local disturbance the averaged
/// collective generator is the Kronecker sum of local averages, so the
/// spectral width scales linearly in n and the ratio is exactly n^2.
inline ScalingReport heisenberg_scaling_check(const ProbeEnsemble& pe,
                                              double lambda, double eta) {
    const DisturbedModel single(pe.local_generator, pe.local_disturbance,
                                lambda, eta);
    auto [g, d] = build_collective(pe);
    const DisturbedModel collective(std::move(g), std::move(d), lambda, eta);
    ScalingReport r;
    r.q_1 = qfi_max(single).qfi;
    r.q_n = qfi_max(collective).qfi;
    r.ratio = r.q_1 > 0.0 ? r.q_n / r.q_1 : 0.0;
    r.expected = static_cast<double>(pe.n) * static_cast<double>(pe.n);
    return r;
}

/// Same ratio when the disturbance is replaced by an arbitrary collective
/// operator (e.g. a coupling between probes). No n^2 law is implied here;
/// the report carries the same fields for side-by-side comparison.
inline ScalingReport coupled_scaling_check(const ProbeEnsemble& pe,
                                           const HermitianOperator& coupled,
                                           double lambda, double eta) {
    if (coupled.dim() != pe.collective_dim())
        throw ValidationError(
            "coupled disturbance dimension " + std::to_string(coupled.dim()) +
            " does not match the collective dimension " +
            std::to_string(pe.collective_dim()));
    const DisturbedModel single(pe.local_generator, pe.local_disturbance,
                                lambda, eta);
    auto [g, d] = build_collective(pe);
    const DisturbedModel collective(std::move(g), coupled, lambda, eta);
    ScalingReport r;
    r.q_1 = qfi_max(single).qfi;
    r.q_n = qfi_max(collective).qfi;
    r.ratio = r.q_1 > 0.0 ? r.q_n / r.q_1 : 0.0;
    r.expected = static_cast<double>(pe.n) * static_cast<double>(pe.n);
    return r;
}

}  // namespace qfikit
