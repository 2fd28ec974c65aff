#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace predreg::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kDataError = 2,
  kDegenerate = 3,
};

//! Entry point shared by the executable and the tests. `args` excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace predreg::cli
