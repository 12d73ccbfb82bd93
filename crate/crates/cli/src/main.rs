// Copyright 2026 The qstab Authors
// SPDX-License-Identifier: Apache-2.0

fn main() {
    std::process::exit(qstab::run_cli(std::env::args_os()));
}
