// SPDX-License-Identifier: Apache-2.0
//
// usbf: joint user scheduling and beamforming for multiuser MISO downlink
// Copyright (C) 2026 The usbf authors
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

#ifndef USBF_CLI_HPP
#define USBF_CLI_HPP

#include <ostream>

namespace usbf {

// Entry point of the command-line tool. Returns the process exit status; every
// failure is reported on err and yields a nonzero status.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace usbf

#endif
