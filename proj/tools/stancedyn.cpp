#include "stancedyn/cli.hpp"

int main(int argc, char** argv) {
    return stancedyn::cli::run(argc, argv);
}
