#include "cli.hpp"

int main(int argc, char** argv) { return vltrack::cli::run(argc, argv); }
