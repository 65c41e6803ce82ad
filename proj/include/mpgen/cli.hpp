// SPDX-License-Identifier: Apache-2.0
//
// mpgen: urban RF multipath dataset generator
// Copyright (C) 2026 mpgen contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mpgen {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitIo = 2, kExitQc = 3 };

/// Entry point behind the `mpgen` binary; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mpgen
