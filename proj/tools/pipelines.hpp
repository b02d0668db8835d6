#pragma once

#include <string>

#include "config.hpp"

namespace slgcli {

// A verification that ran and failed (drift violation, reachability miss,
// admissibility fail); maps to exit code 2.
struct VerificationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Runs one subcommand end to end: builds handles over the C API, writes all
// artifacts plus resolved_config and manifest under out_dir.  Throws
// UsageError for config problems, VerificationFailure for scientific fails.
void run_pipeline(const std::string& command, RunConfig& cfg, const std::string& out_dir,
                  int threads);

}  // namespace slgcli
