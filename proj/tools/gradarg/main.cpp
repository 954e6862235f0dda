#include "cli.hpp"

int main(int argc, char** argv) { return gradarg::cli::run(argc, argv); }
