#include "flf/harness.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return flf::cli_dispatch(argc, argv, std::cout, std::cerr);
}
