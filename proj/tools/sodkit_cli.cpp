// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sodkit Authors

#include "sodkit/cli.hpp"

int main(int argc, char** argv) { return sodkit::cli::run_cli(argc, argv); }
