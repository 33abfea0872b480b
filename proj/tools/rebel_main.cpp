#include "rebel/cli.hpp"

int main(int argc, char** argv) { return rebel::cli::run(argc, argv); }
