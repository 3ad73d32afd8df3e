#include "bipolar/splicing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bipolar {

namespace {

void check_shapes(const SplicePlan& plan, std::size_t index) {
    if (plan.left.size() != plan.right.size())
        throw std::invalid_argument("splice: runs have different snapshot counts");
    if (index >= plan.left.size()) throw std::invalid_argument("splice: snapshot index out of range");
    const auto& l = plan.left[index];
    const auto& r = plan.right[index];
    l.check_consistent();
    r.check_consistent();
    if (l.n_surfaces() != r.n_surfaces()) throw std::invalid_argument("splice: surface counts differ");
    if (!(l.grid() == r.grid())) throw std::invalid_argument("splice: runs use different grids");
    if (std::abs(l.t - r.t) > 1e-9 * std::max(1.0, std::abs(l.t)))
        throw std::invalid_argument("splice: snapshot times differ");
}

}  // namespace

double splice_mismatch(const SplicePlan& plan, std::size_t snapshot_index) {
    check_shapes(plan, snapshot_index);
    const auto& l = plan.left[snapshot_index];
    const auto& r = plan.right[snapshot_index];
    double worst = 0.0;
    for (std::size_t i = 0; i < l.n_surfaces(); ++i) {
        const auto& lp = l.surfaces[i];
        const auto& rp = r.surfaces[i];
        for (std::size_t k = 0; k < lp.plus.size(); ++k) {
            const Complex diff = (lp.plus[k] + lp.minus[k]) - (rp.plus[k] + rp.minus[k]);
            worst = std::max(worst, std::abs(diff));
        }
    }
    return worst;
}

BipolarState splice(const SplicePlan& plan, std::size_t snapshot_index, double tolerance) {
    const double mismatch = splice_mismatch(plan, snapshot_index);
    if (mismatch > tolerance) {
        std::ostringstream msg;
        msg << "splice: run totals differ by " << mismatch << " at snapshot " << snapshot_index << " (limit "
            << tolerance << ")";
        throw std::runtime_error(msg.str());
    }
    const auto& l = plan.left[snapshot_index];
    const auto& r = plan.right[snapshot_index];
    const std::size_t last_left = l.grid().nearest_node(plan.x_divide);

    BipolarState out = r;
    for (std::size_t i = 0; i < out.n_surfaces(); ++i) {
        for (Sign s : {Sign::plus, Sign::minus}) {
            const auto& src = l.surfaces[i][s];
            auto& dst = out.surfaces[i][s];
            for (std::size_t k = 0; k <= last_left; ++k) dst[k] = src[k];
        }
    }
    return out;
}

std::vector<BipolarState> splice_all(const SplicePlan& plan, double tolerance) {
    if (plan.left.size() != plan.right.size())
        throw std::invalid_argument("splice: runs have different snapshot counts");
    std::vector<BipolarState> out;
    out.reserve(plan.left.size());
    for (std::size_t i = 0; i < plan.left.size(); ++i) out.push_back(splice(plan, i, tolerance));
    return out;
}

}  // namespace bipolar
