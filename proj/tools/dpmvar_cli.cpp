#include "dpmvar/cli.hpp"

int main(int argc, char** argv) { return dpmvar::cli::run(argc, argv); }
