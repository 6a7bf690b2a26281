// Copyright 2026 The goalpred Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "goalpred/cli.hpp"

int main(int argc, char** argv) { return goalpred::run_cli(argc, argv, std::cout, std::cerr); }
