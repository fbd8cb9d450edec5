#pragma once

#include <string>
#include <vector>

namespace fewlabel {

std::string read_text_file(const std::string& path);

// Lines without their trailing newline; a lone trailing newline does not
// produce an empty final entry.
std::vector<std::string> read_lines(const std::string& path);

// Writes to a temporary sibling and renames into place, so a failure mid-write
// never leaves a partial artifact at `path`.
void write_text_file(const std::string& path, const std::string& content);

// "fnv1a64:<16 hex digits>" over the raw file bytes.
std::string file_content_hash(const std::string& path);

} // namespace fewlabel
