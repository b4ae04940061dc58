#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace permlab {

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace permlab

#include "permlab/cli_impl.hpp"
