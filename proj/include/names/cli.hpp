// Copyright (c) the sdsi-names authors. All rights reserved.
// Licensed under the Apache 2.0 License.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace names::cli {

// Runs one command-line invocation. `args` holds the arguments without the
// program name. All regular output goes to `out`, diagnostics to `err`.
//
// Exit codes:
//   0  success (UNSAT and FALSE are successful computations)
//   1  usage errors and input parse errors
//   2  semantic errors (unknown viewpoint key, kind mismatches)
//   3  resource limit reached
//   4  internal sentinel: the independent resolution engines disagreed or
//      an internal invariant failed
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace names::cli
