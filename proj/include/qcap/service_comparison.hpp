#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "qcap/capacity.hpp"
#include "qcap/distributions.hpp"
#include "qcap/errors.hpp"

namespace qcap {

// One (lambda, service-law) cell of the comparison table.
struct ServiceComparisonCell {
    double lambda = 0.0;
    std::string service;
    double alpha = 0.0;
    double capacity = 0.0;
    double deterministic_capacity = 0.0; // reference at the same lambda
    double margin = 0.0;                 // deterministic - this law
};

struct DominanceReport {
    std::vector<ServiceComparisonCell> cells;
    bool deterministic_dominates = true; // margin >= -1e-12 everywhere
    double worst_margin = 0.0;
};

// Evaluates the M/GI/1 closed form for each unit-mean service law on the
// lambda grid and checks that Deterministic(1) service weakly dominates all
// of them. Laws must have mean 1 (tolerance 1e-9) and no mass at zero.
inline DominanceReport compare_service_laws(std::span<const double> lambda_grid, double kappa,
                                            std::span<const DistributionSpec> laws) {
    if (lambda_grid.empty()) throw ValidationError("lambda_grid", "empty grid");
    if (!(kappa > 0.0)) throw ValidationError("kappa", "decoherence rate must be positive");
    for (const auto& law : laws) {
        if (std::abs(law.mean() - 1.0) > 1e-9)
            throw ValidationError("laws", law.describe() + " is not unit-mean");
        if (const auto* e = std::get_if<Empirical>(&law.raw()); e && law.min_support() <= 0.0)
            throw ValidationError("laws", law.describe() + " has mass at zero service time");
    }

    const DistributionSpec det{Deterministic{1.0}};
    const double alpha_det = mg1_alpha(det, kappa);

    DominanceReport rep;
    rep.worst_margin = HUGE_VAL;
    for (double lam : lambda_grid) {
        const double cap_det = mg1_closed_form(lam, alpha_det).value;
        for (const auto& law : laws) {
            ServiceComparisonCell cell;
            cell.lambda = lam;
            cell.service = law.describe();
            cell.alpha = mg1_alpha(law, kappa);
            cell.capacity = mg1_closed_form(lam, cell.alpha).value;
            cell.deterministic_capacity = cap_det;
            cell.margin = cap_det - cell.capacity;
            if (cell.margin < rep.worst_margin) rep.worst_margin = cell.margin;
            if (cell.margin < -1e-12) rep.deterministic_dominates = false;
            rep.cells.push_back(std::move(cell));
        }
    }
    if (rep.cells.empty()) rep.worst_margin = 0.0;
    return rep;
}

} // namespace qcap
