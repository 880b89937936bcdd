#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace mvfs {

struct QuadratureConfig {
    double abs_tolerance = 1e-10;
    double rel_tolerance = 1e-12;
    int max_subdivisions = 2000;
};

template <typename Scalar>
struct QuadratureResult {
    Scalar value = 0;
    Scalar error = 0;
    int subdivisions = 0;
    bool converged = false;
};

namespace detail {

// 15-point Kronrod nodes on [-1, 1] (nonnegative half) with the embedded
// 7-point Gauss weights on the odd-indexed nodes.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename Scalar>
struct Panel {
    Scalar a, b, value, error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

template <typename Scalar, typename F>
Panel<Scalar> gauss_kronrod_15(F& f, Scalar a, Scalar b) {
    const Scalar center = (a + b) / 2;
    const Scalar half = (b - a) / 2;
    const Scalar fc = f(center);
    Scalar kronrod = fc * Scalar(kKronrodWeights[7]);
    Scalar gauss = fc * Scalar(kGaussWeights[3]);
    for (int i = 0; i < 7; ++i) {
        const Scalar dx = half * Scalar(kKronrodNodes[i]);
        const Scalar sum = f(center - dx) + f(center + dx);
        kronrod += Scalar(kKronrodWeights[i]) * sum;
        if (i % 2 == 1) gauss += Scalar(kGaussWeights[i / 2]) * sum;
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b]:
/// repeatedly bisects the panel with the largest error estimate.
template <typename Scalar, typename F>
QuadratureResult<Scalar> integrate_adaptive(F&& f, Scalar a, Scalar b, const QuadratureConfig& config = {}) {
    std::priority_queue<detail::Panel<Scalar>> panels;
    auto first = detail::gauss_kronrod_15(f, a, b);
    Scalar total = first.value;
    Scalar error = first.error;
    panels.push(first);

    QuadratureResult<Scalar> result;
    while (true) {
        const Scalar target = std::max(Scalar(config.abs_tolerance), Scalar(config.rel_tolerance) * std::abs(total));
        if (error <= target) {
            result.converged = true;
            break;
        }
        if (result.subdivisions >= config.max_subdivisions) break;
        const auto worst = panels.top();
        panels.pop();
        const Scalar mid = (worst.a + worst.b) / 2;
        const auto left = detail::gauss_kronrod_15(f, worst.a, mid);
        const auto right = detail::gauss_kronrod_15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++result.subdivisions;
    }

    // Re-sum to shed the drift of the incremental updates.
    total = 0;
    error = 0;
    while (!panels.empty()) {
        total += panels.top().value;
        error += panels.top().error;
        panels.pop();
    }
    result.value = total;
    result.error = error;
    return result;
}

}  // namespace mvfs
