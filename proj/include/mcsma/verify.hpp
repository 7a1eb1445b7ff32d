#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcsma/state_space.hpp"

namespace mcsma {

struct CheckResult {
    std::string instance;
    std::string check;
    bool pass = false;
    std::string detail;
};

struct VerifyOptions {
    std::uint64_t state_cap = kDefaultStateCap;
    std::vector<double> nu_grid = {1e2, 1e3, 1e4};
    double slope_tolerance = 0.15;
    std::size_t ultrametric_state_limit = 2000;
    std::size_t value_iteration_state_limit = 10000;
    std::size_t exponent_state_limit = 10000;
    bool include_paper_figures = false;
};

// Runs every invariant suite applicable to one network file; the file
// may carry an "expected" block with frozen values to compare against.
std::vector<CheckResult> verify_instance(const std::string& path, const VerifyOptions& options);

// Runs verify_instance over every .json file in a directory (the
// paper_figures/ subdirectory only when enabled). Throws InputError
// when the directory yields no instances.
std::vector<CheckResult> verify_corpus(const std::string& directory,
                                       const VerifyOptions& options);

}  // namespace mcsma
