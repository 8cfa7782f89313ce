#include <string>
#include <vector>

#include "odp/cli.hpp"

int main(int argc, char** argv) {
    return odp::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
