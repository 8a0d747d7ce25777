#include "nfield/cli.hpp"

int main(int argc, char** argv) { return nf::cli::run(argc, argv); }
