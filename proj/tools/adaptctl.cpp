// SPDX-License-Identifier: Apache-2.0
#include "adaptctl/cli.hpp"

int main(int argc, char** argv) { return adaptctl::run_cli(argc, argv); }
