#include "springcurl/cli.hpp"

int main(int argc, char** argv) { return springcurl::cli::run(argc, argv); }
