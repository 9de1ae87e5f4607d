#include "brease/cli.hpp"

int main(int argc, char** argv) { return brease::cli::run(argc, argv); }
