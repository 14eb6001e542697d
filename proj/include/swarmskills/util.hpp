#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace swarmskills {

std::string trim(const std::string& s);
std::string to_lower(std::string s);

// Case-folds and collapses every whitespace run to one space. Used to compare
// message texts for the redundancy detector.
std::string normalize_text(const std::string& s);

std::vector<std::string> split_lines(const std::string& text);

// Throws ParseError naming the path on any failure.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

// Sorted relative paths of all regular files under dir, skipping the given
// top-level entries (archive directory, lock file).
std::vector<std::string> list_tree(const std::filesystem::path& dir,
                                   const std::vector<std::string>& skip_top = {});

void copy_tree(const std::filesystem::path& from, const std::filesystem::path& to,
               const std::vector<std::string>& skip_top = {});

// Removes everything under dir except the named top-level entries.
void wipe_dir_except(const std::filesystem::path& dir,
                     const std::vector<std::string>& keep_top);

} // namespace swarmskills
