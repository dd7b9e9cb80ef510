#pragma once

#include <string>

#include "mflq/auxiliary.hpp"
#include "mflq/epsilon.hpp"
#include "mflq/montecarlo.hpp"

namespace mflq {

/// CSV emitters for the per-node path families.  All numbers use
/// shortest round-trip formatting so downstream comparisons are
/// bit-faithful.

void write_riccati_csv(const std::string& path, const RiccatiSolution& sol);

void write_aux_csv(const std::string& path, const AuxiliarySolution& aux, const TimeGrid& grid);

void write_moments_csv(const std::string& path, const ValidatedProblem& vp,
                       const AffineControlLaw& law, const MomentPath& moments);

void write_epsilon_csv(const std::string& path, const EpsilonReport& report);

void write_paths_csv(const std::string& path, const PathEnsemble& ensemble);

}  // namespace mflq
