// Copyright 2026 The kgdelta Authors
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

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kgdelta::text {

/// Unicode NFC normalization. Invalid UTF-8 sequences are replaced by U+FFFD.
std::string nfc(std::string_view s);

/// Full Unicode lowercase mapping (root locale), followed by NFC.
std::string lower_nfc(std::string_view s);

/// Strips ASCII and Unicode whitespace from both ends.
std::string_view trim(std::string_view s);

/// Trim + NFC; the literal normalization applied at ingest.
std::string normalize_literal(std::string_view s);

/// Key used to detect surface-form collisions between labels and aliases:
/// lowercase NFC, punctuation and symbols folded to spaces, whitespace
/// collapsed.
std::string surface_key(std::string_view s);

/// Splits on runs of whitespace.
std::vector<std::string> split_whitespace(std::string_view s);

/// True if the first code point of `s` is Unicode punctuation.
bool starts_with_punct(std::string_view s);
bool ends_with_punct(std::string_view s);

/// Removes Unicode punctuation code points from both ends.
std::string_view strip_punct(std::string_view s);

/// JSON string escaping (without the surrounding quotes), byte-identical to
/// nlohmann::json's default dump for valid UTF-8 input.
void append_json_escaped(std::string& out, std::string_view s);

}  // namespace kgdelta::text
