#pragma once

#include <string>

#include "mflq/problem.hpp"

namespace mflq {

/// A problem description as read from (or written to) a config file:
/// coefficients plus the initial law and the default solver resolution.
struct ProblemConfig {
    ProblemSpec spec;
    InitialLaw initial;
    int default_steps = 2000;
};

/// Parse the key/value problem format:
///
///   [dimensions]  n, m
///   [horizon]     t0, T, steps
///   [dynamics]    A Abar B Bbar C Cbar D Dbar b sigma
///   [cost]        Q Qbar S Sbar R Rbar G Gbar q qbar rho rhobar g gbar
///   [initial]     kind (gaussian|deterministic), mean, cov
///
/// Matrix values are nested bracket lists of scalar expressions in `s`
/// ("[[1, s], [0, exp(-s)]]"); 1x1 coefficients may be bare expressions;
/// vectors may be single-level lists.  Omitted coefficients are zero.
/// `#` starts a comment.  Throws ConfigError / ParseError.
ProblemConfig parse_problem_config(const std::string& text);

ProblemConfig load_problem_config(const std::string& path);

/// Emit a config that parses back to identical evaluations.  Only
/// expression/constant coefficients are emittable (sampled ones have no
/// text form).
std::string emit_problem_config(const ProblemConfig& config);

}  // namespace mflq
