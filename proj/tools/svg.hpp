#pragma once

#include <optional>
#include <string>

#include "subriem/montecarlo.hpp"

namespace subriem::svg {

// Static log-linear tail plot: estimate with confidence band, plus an optional
// closed-form bound overlay. Self-contained SVG, no external dependencies.
std::string tail_plot(const mc::TailCurve& curve, const std::optional<Eigen::ArrayXd>& bound,
                      const std::string& title);

}  // namespace subriem::svg
