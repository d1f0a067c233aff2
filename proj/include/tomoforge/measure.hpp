// Copyright 2026 The Tomoforge Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Simulated measurement data: ideal Born probabilities for the measured
 * effects, optionally perturbed by uniform noise.
 */

#pragma once

#include "tomoforge/cxmat.hpp"
#include "tomoforge/error.hpp"
#include "tomoforge/povm.hpp"
#include "tomoforge/rng.hpp"
#include "tomoforge/states.hpp"

#include <algorithm>
#include <cstddef>
#include <random>
#include <string_view>
#include <vector>

namespace tomoforge {

enum class NoiseModel {
    Relative, ///< p (1 + eps)
    Additive, ///< p + eps
};

constexpr std::string_view noise_model_name(NoiseModel m) noexcept {
    return m == NoiseModel::Relative ? "relative" : "additive";
}

struct FrequencyVector {
    std::vector<double> values;
    double noise_level = 0.0;
    NoiseModel noise_model = NoiseModel::Relative;
    std::vector<std::size_t> indices; ///< SubsetPlan::measured
};

inline FrequencyVector expectations(const DensityMatrix &rho, const Povm &povm,
                                    const SubsetPlan &plan) {
    if (rho.dim() != povm.dim()) {
        throw Error(Errc::DimMismatch, "state and POVM dimensions differ");
    }
    FrequencyVector f;
    f.indices = plan.measured;
    f.values.reserve(plan.measured.size());
    for (std::size_t i : plan.measured) {
        f.values.push_back(trace_product(povm[i], rho.mat()));
    }
    return f;
}

/// Each value gets an independent eps ~ U(-level, level); results are
/// clipped to [0, 1]. Draws happen in index order even when level is 0.
inline FrequencyVector add_uniform_noise(FrequencyVector f, double level, Rng &rng,
                                         NoiseModel model = NoiseModel::Relative) {
    if (!(level >= 0.0 && level < 1.0)) {
        throw Error(Errc::InvalidArgument, "noise level must lie in [0, 1)");
    }
    f.noise_level = level;
    f.noise_model = model;
    if (level == 0.0) {
        return f;
    }
    std::uniform_real_distribution<double> eps(-level, level);
    for (double &p : f.values) {
        const double e = eps(rng);
        const double noisy = model == NoiseModel::Relative ? p * (1.0 + e) : p + e;
        p = std::clamp(noisy, 0.0, 1.0);
    }
    return f;
}

} // namespace tomoforge
