#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace rngccs {

// Input errors (bad files, bad schemas, bad arguments). The CLI maps these
// to exit code 1.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Deterministic uniform generator. splitmix64 seeds an xoshiro-style state;
// we avoid std::uniform_* distributions so output is identical across
// standard library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed);
  uint64_t next_u64();
  double next_double();                      // [0, 1)
  double uniform(double lo, double hi);      // [lo, hi)
  int uniform_int(int lo, int hi);           // [lo, hi] inclusive
  // Fork a decorrelated stream, stable under changes to sibling draws.
  Rng fork(uint64_t stream) const;

 private:
  uint64_t s_[4];
  uint64_t seed_;
};

// Fixed-format number printing: shortest of up-to-10 significant digits that
// stays stable across runs. Used by every CSV/SVG emitter so artifacts are
// byte-reproducible.
std::string format_number(double v);

// Shortest round-trip formatting: parsing the string recovers the exact
// double. Used where files feed back into computation (solution tables).
std::string format_exact(double v);

// 64-bit FNV-1a, used for provenance config hashes and seed mixing.
uint64_t fnv1a64(const std::string& s);

std::string lower(std::string s);
std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);

// ---------------------------------------------------------------------------
// Strict CSV: header row mandatory, exact column set (unknown columns
// rejected), no quoting (generated files never need it).

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path& file,
                  const std::vector<std::string>& expected_columns);
void write_csv(const std::filesystem::path& file,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

double parse_double_field(const std::string& raw, const std::string& file,
                          const std::string& column, size_t row);

// ---------------------------------------------------------------------------
// Flat key-value parameter file: `[section]` headers, `key = value` lines,
// `#` comments. Keys are returned as "section.key".

using KeyValueMap = std::map<std::string, std::string>;

KeyValueMap read_keyvalue_file(const std::filesystem::path& file);
void write_keyvalue_file(const std::filesystem::path& file,
                         const std::vector<std::string>& lines);

// Atomic write: stream to <file>.tmp then rename.
void write_file_atomic(const std::filesystem::path& file,
                       const std::string& content);

}  // namespace rngccs
