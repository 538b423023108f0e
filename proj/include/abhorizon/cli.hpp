// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef ABHORIZON_CLI_HPP
#define ABHORIZON_CLI_HPP

#include <string>
#include <vector>

namespace abh {

/// Command-line entry point. Exit codes: 0 success, 1 usage error,
/// 2 data error, 3 fit non-convergence (partial output still written).
int run_cli(const std::vector<std::string>& args);

}  // namespace abh

#endif  // ABHORIZON_CLI_HPP
