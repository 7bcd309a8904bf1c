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

#ifndef QSUP_CSV_HPP
#define QSUP_CSV_HPP

#include <string>
#include <string_view>
#include <vector>

namespace qsup::csv {

// RFC 4180: quote fields containing separators, quotes or line breaks.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string>& fields);

// Splits one record. Quoted fields may contain commas and doubled quotes;
// embedded line breaks are not supported by this reader.
std::vector<std::string> split(std::string_view line);

}  // namespace qsup::csv

#endif  // QSUP_CSV_HPP
