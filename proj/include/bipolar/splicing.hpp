#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bipolar/state.hpp"

namespace bipolar {

/// Two propagations of the same packet: `left` started from the V0 = V_L
/// decomposition, `right` from the V0 = V_R one. Both must share the grid
/// and the snapshot schedule.
struct SplicePlan {
    double x_divide = 0.0;
    std::span<const BipolarState> left;
    std::span<const BipolarState> right;
};

/// Largest node-wise difference between the two runs' total psi at a snapshot.
double splice_mismatch(const SplicePlan& plan, std::size_t snapshot_index);

/// Components taken from the left run for x <= x_D (the node nearest x_D
/// included) and from the right run beyond. Throws std::invalid_argument on
/// mismatched shapes or std::runtime_error when the two totals differ by more
/// than `tolerance` at any node.
BipolarState splice(const SplicePlan& plan, std::size_t snapshot_index, double tolerance = 1e-6);

std::vector<BipolarState> splice_all(const SplicePlan& plan, double tolerance = 1e-6);

}  // namespace bipolar
