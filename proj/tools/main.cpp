#include "hexinspect/cli.hpp"

int main(int argc, char** argv) { return hexinspect::cli::run(argc, argv); }
