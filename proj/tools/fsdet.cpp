#include "fsdet/cli.hpp"

int main(int argc, char** argv) { return fsdet::cli::run(argc, argv); }
