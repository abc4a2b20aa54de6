#include "contour/gateway/cli.hpp"

int main(int argc, char** argv) { return contour::gateway::run_cli(argc, argv); }
