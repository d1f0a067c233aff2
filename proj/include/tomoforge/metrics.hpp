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
 * Unmeasured-probability vector u = (tr(rho E_k))_{k unmeasured} and its
 * Kullback-Leibler divergence from the uniform distribution.
 */

#pragma once

#include "tomoforge/error.hpp"
#include "tomoforge/povm.hpp"
#include "tomoforge/states.hpp"

#include <cmath>
#include <vector>

namespace tomoforge {

struct UnmeasuredVector {
    std::vector<double> values;
    double total_mass = 0.0;
};

/// Values follow plan.unmeasured order.
inline UnmeasuredVector unmeasured_vector(const DensityMatrix &rho,
                                          const Povm &povm,
                                          const SubsetPlan &plan) {
    if (plan.unmeasured.empty()) {
        throw Error(Errc::EmptyUnmeasuredSet, "no unmeasured effects");
    }
    if (povm.dim() != rho.dim()) {
        throw Error(Errc::DimMismatch, "state and POVM dimensions differ");
    }
    UnmeasuredVector u;
    u.values.reserve(plan.unmeasured.size());
    for (std::size_t k : plan.unmeasured) {
        const double p = trace_product(povm[k], rho.mat());
        u.values.push_back(p);
        u.total_mass += p;
    }
    return u;
}

/// D(u/|u| || uniform) = sum_k uh_k ln(uh_k M), negative entries clipped to 0.
inline double kl_from_uniform(const UnmeasuredVector &u) {
    double mass = 0.0;
    for (double v : u.values) {
        mass += std::max(v, 0.0);
    }
    if (u.values.empty() || !(mass > 0.0)) {
        throw Error(Errc::ZeroMass, "unmeasured vector has no mass");
    }
    const auto m = static_cast<double>(u.values.size());
    double kl = 0.0;
    for (double v : u.values) {
        const double p = std::max(v, 0.0) / mass;
        if (p > 0.0) {
            kl += p * std::log(p * m);
        }
    }
    return std::max(kl, 0.0);
}

} // namespace tomoforge
