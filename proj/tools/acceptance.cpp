// Copyright 2026 The Qubus Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance runner: one line per criterion, then the detail of any failed
// check and every flag. Exit status 1 if any criterion fails.

#include <cstdio>
#include <cstring>
#include <iostream>

#include "qubus/verify.hpp"

int main(int argc, char **argv) {
    qubus::verify::Options opt;
    for (int i = 1; i < argc; i++) {
        if (std::strcmp(argv[i], "--quick") == 0) {
            opt.quick = true;
        } else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) {
            opt.threads = static_cast<unsigned>(std::stoul(argv[++i]));
        } else {
            std::fprintf(stderr, "usage: %s [--quick] [--threads N]\n", argv[0]);
            return 2;
        }
    }
    auto results = qubus::verify::run_all(opt);
    bool failed = false;
    for (const auto &r : results) {
        std::printf("criterion %2d: %s  %s\n", r.id, qubus::verify::status_name(r.status), r.title.c_str());
        failed = failed || r.status == qubus::verify::Status::Fail;
    }
    std::printf("\n%s", qubus::verify::report(results, false).c_str());
    return failed ? 1 : 0;
}
