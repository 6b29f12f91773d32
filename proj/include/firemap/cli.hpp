#pragma once

#include <string>
#include <vector>

namespace firemap {

// Entry point shared by the binary and the tests. argv-style arguments
// without the program name. Returns the process exit status.
int cli_main(const std::vector<std::string>& args);

}  // namespace firemap
