#include "secretgame/cost_ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>
#include <vector>

namespace secretgame {

namespace {

bool numeric_field(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isdigit(c); });
}

std::uint64_t parse_positive(const std::string& s, std::size_t line_no,
                             const char* what) {
  if (!numeric_field(s))
    throw model_error("line " + std::to_string(line_no) + ": " + what +
                      " must be a positive integer, got \"" + s + "\"");
  std::uint64_t value = 0;
  for (char c : s) {
    if (value > (~std::uint64_t{0} - (c - '0')) / 10)
      throw model_error("line " + std::to_string(line_no) + ": " + what +
                        " overflows");
    value = value * 10 + static_cast<std::uint64_t>(c - '0');
  }
  if (value == 0)
    throw model_error("line " + std::to_string(line_no) + ": " + what +
                      " must be positive");
  return value;
}

struct Line {
  std::size_t no;
  std::string first;
  std::string second;
};

}  // namespace

PartitionProfile from_frequency_text(const std::string& text,
                                     FreqFormat format) {
  std::istringstream in(text);
  std::string raw;
  std::vector<Line> lines;
  std::size_t no = 0;
  bool all_numeric_first = true;
  while (std::getline(in, raw)) {
    ++no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) continue;
    const std::size_t tab = raw.find('\t');
    if (tab == std::string::npos)
      throw model_error("line " + std::to_string(no) +
                        ": expected two tab-separated fields");
    Line line{no, raw.substr(0, tab), raw.substr(tab + 1)};
    if (line.first.empty() || line.second.empty())
      throw model_error("line " + std::to_string(no) + ": empty field");
    if (!numeric_field(line.first)) all_numeric_first = false;
    lines.push_back(std::move(line));
  }
  if (lines.empty()) throw model_error("frequency input has no data lines");
  if (format == FreqFormat::Auto)
    format = all_numeric_first ? FreqFormat::CountMultiplicity
                               : FreqFormat::SecretCount;

  // multiplicity (number of distinct secrets) per frequency count
  std::map<std::uint64_t, count_t> classes;
  if (format == FreqFormat::CountMultiplicity) {
    for (const Line& line : lines) {
      const std::uint64_t count = parse_positive(line.first, line.no, "count");
      const std::uint64_t mult =
          parse_positive(line.second, line.no, "multiplicity");
      classes[count] += static_cast<count_t>(mult);
    }
  } else {
    std::unordered_set<std::string> seen;
    for (const Line& line : lines) {
      if (!seen.insert(line.first).second)
        throw model_error("line " + std::to_string(line.no) +
                          ": duplicate secret \"" + line.first + "\"");
      const std::uint64_t count = parse_positive(line.second, line.no, "count");
      classes[count] += 1;
    }
  }

  // Rarest class (smallest count) is anchored at cost 1; more frequent
  // classes are cheaper in proportion to their frequency.
  const std::uint64_t min_count = classes.begin()->first;
  std::vector<Partition> parts;
  parts.reserve(classes.size());
  for (auto it = classes.rbegin(); it != classes.rend(); ++it)
    parts.push_back({it->second,
                     static_cast<double>(min_count) /
                         static_cast<double>(it->first)});
  return PartitionProfile(std::move(parts));
}

PartitionProfile from_frequency_file(const std::string& path,
                                     FreqFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw model_error("cannot open frequency file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_frequency_text(buf.str(), format);
}

PartitionProfile synthetic_key_model(unsigned max_bits, KeyCostShape shape) {
  if (max_bits < 1 || max_bits > 64)
    throw model_error("max_bits must be between 1 and 64");
  std::vector<Partition> parts;
  parts.reserve(max_bits + 1);
  for (unsigned l = 0; l <= max_bits; ++l) {
    const double x = static_cast<double>(l) / static_cast<double>(max_bits);
    parts.push_back({static_cast<count_t>(1) << l,
                     shape == KeyCostShape::Linear ? x : x * x * x});
  }
  return PartitionProfile(std::move(parts));
}

PartitionProfile prune(const PartitionProfile& profile,
                       double merge_tolerance) {
  if (!(merge_tolerance >= 0.0))
    throw model_error("merge tolerance must be non-negative");
  std::vector<Partition> out;
  for (const Partition& p : profile.partitions()) {
    if (!out.empty() && p.cost - out.back().cost < merge_tolerance) {
      Partition& m = out.back();
      const double total = to_double(m.size) + to_double(p.size);
      m.cost = (m.cost * to_double(m.size) + p.cost * to_double(p.size)) / total;
      m.size += p.size;
    } else {
      out.push_back(p);
    }
  }
  return PartitionProfile(std::move(out));
}

}  // namespace secretgame
