#pragma once
#include <numbers>
#include <vector>

#include "types.hpp"

namespace ratiep {

// insertion order of the m-th roots of unity: start at index 0, then repeatedly take the index farthest
// (circularly) from all placed ones, ties to the smallest index; for m a power of two this is plain
// largest-gap bisection
inline std::vector<Eigen::Index> farthest_point_order(Eigen::Index m) {
    std::vector<Eigen::Index> order;
    if (m <= 0) return order;
    order.reserve(m);
    std::vector<Eigen::Index> dist(m, std::numeric_limits<Eigen::Index>::max());
    std::vector<bool> placed(m, false);
    Eigen::Index next = 0;
    for (Eigen::Index n = 0; n < m; ++n) {
        order.push_back(next);
        placed[next] = true;
        Eigen::Index best = -1;
        for (Eigen::Index k = 0; k < m; ++k) {
            if (placed[k]) continue;
            Eigen::Index d = std::abs(k - next);
            dist[k] = std::min(dist[k], std::min(d, m - d));
            if (best < 0 || dist[k] > dist[best]) best = k;
        }
        next = best;
    }
    return order;
}

inline std::vector<double> unit_circle_angles(Eigen::Index m) {
    std::vector<double> a;
    a.reserve(m);
    for (auto k : farthest_point_order(m)) a.push_back(2.0 * std::numbers::pi * double(k) / double(m));
    return a;
}

inline Vector nodes_from_angles(const std::vector<double>& angles) {
    Vector z(Eigen::Index(angles.size()));
    for (size_t k = 0; k < angles.size(); ++k) z(Eigen::Index(k)) = std::polar(1.0, angles[k]);
    return z;
}

inline Vector unit_circle_nodes(Eigen::Index m) { return nodes_from_angles(unit_circle_angles(m)); }

// for m >= m_p: the m-1 equidistant nodes in insertion order, with node m_p (1-based) placed at angular
// distance theta after node m_p - 1; for m < m_p the perturbation has not happened yet
inline std::vector<double> perturbed_angles(Eigen::Index m, Eigen::Index mp, double theta) {
    if (mp < 2) throw Error(ErrorCode::DegenerateInput, "perturbation index must be at least 2");
    if (m < mp) return unit_circle_angles(m);
    std::vector<double> a = unit_circle_angles(m - 1);
    a.insert(a.begin() + (mp - 1), a[mp - 2] + theta);
    return a;
}

inline Vector perturbed_nodes(Eigen::Index m, Eigen::Index mp, double theta) {
    Vector z = nodes_from_angles(perturbed_angles(m, mp, theta));
    if (m >= mp) {
        const cplx p = z(mp - 1);
        for (Eigen::Index k = 0; k < m; ++k)
            if (k != mp - 1 && std::abs(z(k) - p) <= 4.0 * kEps)
                throw Error(ErrorCode::DuplicateNode, "perturbed node collides with an existing node", int(mp));
    }
    return z;
}

// insertion order over 1..m: both ends first, then midpoints breadth first
inline std::vector<Eigen::Index> bisection_order(Eigen::Index m) {
    std::vector<Eigen::Index> order;
    if (m <= 0) return order;
    order.push_back(1);
    if (m == 1) return order;
    order.push_back(m);
    std::vector<std::pair<Eigen::Index, Eigen::Index>> queue{{1, m}};
    for (size_t q = 0; q < queue.size(); ++q) {
        auto [lo, hi] = queue[q];
        if (hi - lo < 2) continue;
        Eigen::Index mid = (lo + hi) / 2;
        order.push_back(mid);
        queue.emplace_back(lo, mid);
        queue.emplace_back(mid, hi);
    }
    return order;
}

// cos((2k-1) pi / (2m)), k = 1..m, in bisection order of k
inline Vector chebyshev_nodes(Eigen::Index m) {
    Vector z(m);
    auto order = bisection_order(m);
    for (Eigen::Index i = 0; i < m; ++i)
        z(i) = std::cos(double(2 * order[i] - 1) * std::numbers::pi / double(2 * m));
    return z;
}

inline Vector ellipse_nodes(Eigen::Index m, double height = 0.01) {
    if (!(height > 0.0)) throw Error(ErrorCode::DegenerateInput, "ellipse height must be positive");
    const auto angles = unit_circle_angles(m);
    Vector z(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        z(k) = cplx(std::cos(angles[k]), height * std::sin(angles[k]));
    }
    return z;
}

inline PoleList circle_poles(Eigen::Index n, double radius, double phase_offset = 0.0) {
    if (!(radius > 0.0)) throw Error(ErrorCode::DegenerateInput, "radius must be positive");
    PoleList p;
    p.reserve(n);
    for (Eigen::Index k = 0; k < n; ++k)
        p.push_back(Pole::finite(std::polar(radius, 2.0 * std::numbers::pi * double(k) / double(n) + phase_offset)));
    return p;
}

} // namespace ratiep
