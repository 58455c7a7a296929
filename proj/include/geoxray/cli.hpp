#pragma once

#include <iosfwd>
#include <string>

#include "geoxray/io.hpp"
#include "geoxray/xray.hpp"

namespace geoxray {

// Exit codes of the command-line verbs.
enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitDiverged = 2 };

ScanConfig scan_config(const RunConfig& cfg);

// Writes the phantom (f, or f1/f2 for vector phantoms), the attenuation a and
// the sound speed c = exp(-lambda) to output_dir, with images and manifest.json.
int cmd_phantom(const RunConfig& cfg, std::ostream& log);

// Reads the phantom files from input_dir and writes data.{bin,json}, data.pgm
// and manifest.json to output_dir.
int cmd_forward(const RunConfig& cfg, std::ostream& log);

// Reads data (and f when present, as truth) from input_dir and writes the
// estimate, the pointwise error image, iterations.csv and manifest.json.
// Returns kExitDiverged when the outer loop diverged.
int cmd_invert(const RunConfig& cfg, std::ostream& log);

// Reduced invariant suites; prints one row per check.
int cmd_selftest(const RunConfig& cfg, std::ostream& log);

}  // namespace geoxray
