// File output helpers: full-precision CSV, atomic replace, content hashing.

#ifndef NFRAG_IO_HPP_
#define NFRAG_IO_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace nfrag {

/// Shortest round-trippable decimal form (%.17g) of v.
std::string format_double(double v);

/// Writes content to path via a temporary file and rename, so readers never
/// observe a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

/// SHA-1 of the blob "blob <size>\0<content>", hex-encoded (the content hash
/// git assigns to a file with these bytes).
std::string git_blob_hash(const std::string& content);

}  // namespace nfrag

#endif  // NFRAG_IO_HPP_
