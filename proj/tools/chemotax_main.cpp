#include "chemotax/cli.hpp"

int main(int argc, char** argv) { return chemotax::cli::cli_main(argc, argv); }
