#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bimodal::cli {

/// Full command-line entry point. Returns 0 on success, 2 on usage or
/// configuration errors, 1 on runtime failures.
int run(int argc, const char* const* argv);

/// Same, with explicit output streams (tests capture them).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct Recipe {
    std::string name;  // file stem, e.g. "fig5_scan"
    std::string text;
};

/// Reproduction recipes compiled into the binary.
const std::vector<Recipe>& bundled_recipes();

}  // namespace bimodal::cli
