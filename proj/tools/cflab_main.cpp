#include "cflab/runner.hpp"

int main(int argc, char** argv) { return cflab::cli::run_main(argc, argv); }
