#include "cli.hpp"

int main(int argc, char** argv) { return gpass::cli::run(argc, argv); }
