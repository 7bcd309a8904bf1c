// Copyright 2026 The QSUP Simulator Authors
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

#ifndef QSUP_ACCEPTANCE_HPP
#define QSUP_ACCEPTANCE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace qsup {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
};

struct AcceptanceOptions {
  int workers = 1;
  std::uint64_t seed = 20260;
};

std::vector<int> acceptance_ids();
CriterionResult run_criterion(int id, const AcceptanceOptions& options = {});
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

std::string format_result(const CriterionResult& r);

}  // namespace qsup

#endif  // QSUP_ACCEPTANCE_HPP
