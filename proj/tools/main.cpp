#include "rewritekit/cli.hpp"

int main(int argc, char** argv) { return rewritekit::run(argc, argv); }
