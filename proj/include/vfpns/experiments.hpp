#pragma once

#include "vfpns/config.hpp"

namespace vfpns {

struct ExperimentResult {
    int exit_code = 0;  // 0 pass, 1 check failure, 2 config error, 3 runtime abort
    std::string summary_json;
};

/// Runs one experiment and writes config echo, CSV series and the JSON
/// summary into config.output_dir.  Exit status 0 iff all declared checks
/// pass.
ExperimentResult run_experiment(const Config& config);

}  // namespace vfpns
