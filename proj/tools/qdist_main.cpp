#include "qdist/cli.hpp"

int main(int argc, char** argv) { return qdist::cli::run(argc, argv); }
