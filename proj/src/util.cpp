#include "rngccs/util.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rngccs {

namespace {

uint64_t splitmix64(uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(uint64_t seed) : seed_(seed) {
  uint64_t x = seed;
  for (auto& s : s_) s = splitmix64(x);
}

uint64_t Rng::next_u64() {
  // xoshiro256**
  uint64_t result = rotl(s_[1] * 5, 7) * 9;
  uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * next_double();
}

int Rng::uniform_int(int lo, int hi) {
  uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(next_u64() % span);
}

Rng Rng::fork(uint64_t stream) const {
  return Rng(seed_ ^ (0xa0761d6478bd642fULL * (stream + 1)));
}

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string format_exact(double v) {
  if (std::isnan(v)) return "NA";
  if (v == 0.0) v = 0.0;
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, end);
}

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

CsvTable read_csv(const std::filesystem::path& file,
                  const std::vector<std::string>& expected_columns) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot open " + file.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw InputError(file.string() + ": missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  table.header = split(line, ',');
  for (auto& h : table.header) h = trim(h);

  for (const auto& col : table.header) {
    if (std::find(expected_columns.begin(), expected_columns.end(), col) ==
        expected_columns.end()) {
      throw InputError(file.string() + ": unknown column '" + col + "'");
    }
  }
  for (const auto& col : expected_columns) {
    if (std::find(table.header.begin(), table.header.end(), col) ==
        table.header.end()) {
      throw InputError(file.string() + ": missing column '" + col + "'");
    }
  }

  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != table.header.size()) {
      throw InputError(file.string() + ":" + std::to_string(lineno) +
                       ": expected " + std::to_string(table.header.size()) +
                       " fields, got " + std::to_string(fields.size()));
    }
    for (auto& f : fields) f = trim(f);
    table.rows.push_back(std::move(fields));
  }
  return table;
}

void write_csv(const std::filesystem::path& file,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
  write_file_atomic(file, out.str());
}

double parse_double_field(const std::string& raw, const std::string& file,
                          const std::string& column, size_t row) {
  try {
    size_t pos = 0;
    double v = std::stod(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw InputError(file + " row " + std::to_string(row) + " column '" +
                     column + "': not a number: '" + raw + "'");
  }
}

KeyValueMap read_keyvalue_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot open " + file.string());
  KeyValueMap out;
  std::string line, section;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty())
        throw InputError(file.string() + ":" + std::to_string(lineno) +
                         ": empty section name");
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw InputError(file.string() + ":" + std::to_string(lineno) +
                       ": expected 'key = value'");
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    if (key.empty())
      throw InputError(file.string() + ":" + std::to_string(lineno) + ": empty key");
    std::string full = section.empty() ? key : section + "." + key;
    if (out.count(full))
      throw InputError(file.string() + ":" + std::to_string(lineno) +
                       ": duplicate key '" + full + "'");
    out[full] = val;
  }
  return out;
}

void write_keyvalue_file(const std::filesystem::path& file,
                         const std::vector<std::string>& lines) {
  std::ostringstream out;
  for (const auto& l : lines) out << l << '\n';
  write_file_atomic(file, out.str());
}

void write_file_atomic(const std::filesystem::path& file,
                       const std::string& content) {
  std::filesystem::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << content;
    if (!out) throw InputError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

}  // namespace rngccs
