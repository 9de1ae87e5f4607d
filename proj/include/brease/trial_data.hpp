#ifndef BREASE_TRIAL_DATA_HPP
#define BREASE_TRIAL_DATA_HPP

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "brease/errors.hpp"

namespace brease {

// Observed 2x2 counts of a binary experiment: events y_z out of N_z in arm z.
struct TrialData {
  std::int64_t y0 = 0;
  std::int64_t N0 = 0;
  std::int64_t y1 = 0;
  std::int64_t N1 = 0;

  std::int64_t N() const { return N0 + N1; }
  std::int64_t events() const { return y0 + y1; }

  // Arms exchanged: the treatment arm becomes the reference arm.
  TrialData swapped() const { return TrialData{y1, N1, y0, N0}; }

  friend bool operator==(const TrialData&, const TrialData&) = default;
};

inline std::vector<std::string> validate(const TrialData& d) {
  std::vector<std::string> out;
  if (d.y0 < 0) out.emplace_back("y0 < 0");
  if (d.N0 < 0) out.emplace_back("N0 < 0");
  if (d.y1 < 0) out.emplace_back("y1 < 0");
  if (d.N1 < 0) out.emplace_back("N1 < 0");
  if (d.y0 > d.N0) out.emplace_back("y0 > N0");
  if (d.y1 > d.N1) out.emplace_back("y1 > N1");
  // Keeps every count sum exactly representable as a double.
  constexpr std::int64_t kMax = std::int64_t{1} << 52;
  if (d.N0 > kMax || d.N1 > kMax) out.emplace_back("arm size exceeds 2^52");
  return out;
}

inline void require_valid(const TrialData& d) {
  const auto v = validate(d);
  if (v.empty()) return;
  std::string msg = "invalid trial data:";
  for (const auto& s : v) msg += " " + s + ";";
  throw ValidationError(msg);
}

// FNV-1a over the four counts; used to refuse Bayes factors across datasets.
inline std::uint64_t fingerprint(const TrialData& d) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::int64_t v : {d.y0, d.N0, d.y1, d.N1}) {
    auto u = static_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      h ^= (u >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

struct Study {
  std::string id;
  TrialData data;
};

struct StudyCorpus {
  std::vector<Study> studies;
};

struct Stratum {
  std::string label;
  TrialData data;
};

struct StratifiedTrialData {
  std::vector<Stratum> strata;
};

inline void require_valid(const StratifiedTrialData& s) {
  if (s.strata.empty()) throw ValidationError("stratified data needs at least one stratum");
  std::unordered_set<std::string> seen;
  for (const auto& st : s.strata) {
    if (!seen.insert(st.label).second) throw ValidationError("duplicate stratum label '" + st.label + "'");
    require_valid(st.data);
  }
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

inline std::int64_t parse_count(std::string_view cell, std::size_t line_no, const char* column) {
  std::int64_t v = 0;
  const auto* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (cell.empty() || ec != std::errc() || ptr != end)
    throw ParseError(line_no, std::string("column ") + column + ": '" + std::string(cell) + "' is not an integer");
  return v;
}

// Rows of `label,y0,N0,y1,N1` after the header; comment and blank lines skipped.
inline std::vector<std::pair<std::string, TrialData>> parse_rows(std::string_view text,
                                                                 std::string_view label_column) {
  std::vector<std::pair<std::string, TrialData>> rows;
  std::unordered_set<std::string> seen;
  bool header_seen = false;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    line = trim(line);
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split_commas(line);
    if (!header_seen) {
      const std::string expected = std::string(label_column) + ",y0,N0,y1,N1";
      std::string got;
      for (std::size_t i = 0; i < cells.size(); ++i) got += (i ? "," : "") + std::string(cells[i]);
      if (got != expected) throw ParseError(line_no, "expected header '" + expected + "', got '" + got + "'");
      header_seen = true;
      continue;
    }
    if (cells.size() != 5) throw ParseError(line_no, "expected 5 cells, got " + std::to_string(cells.size()));
    if (cells[0].empty()) throw ParseError(line_no, "empty " + std::string(label_column));
    TrialData d{parse_count(cells[1], line_no, "y0"), parse_count(cells[2], line_no, "N0"),
                parse_count(cells[3], line_no, "y1"), parse_count(cells[4], line_no, "N1")};
    const auto violations = validate(d);
    if (!violations.empty())
      throw ValidationError("line " + std::to_string(line_no) + ": " + violations.front());
    std::string label(cells[0]);
    if (!seen.insert(label).second) throw ValidationError("line " + std::to_string(line_no) + ": duplicate '" + label + "'");
    rows.emplace_back(std::move(label), d);
  }
  if (!header_seen) throw ParseError(line_no, "missing header row");
  return rows;
}

}  // namespace detail

/// Parses `study,y0,N0,y1,N1` CSV. Lines starting with '#' are comments.
inline StudyCorpus parse_trials(std::string_view text) {
  StudyCorpus c;
  for (auto& [id, d] : detail::parse_rows(text, "study")) c.studies.push_back({std::move(id), d});
  return c;
}

inline std::string serialize_trials(const StudyCorpus& c) {
  std::ostringstream os;
  os << "study,y0,N0,y1,N1\n";
  for (const auto& s : c.studies)
    os << s.id << ',' << s.data.y0 << ',' << s.data.N0 << ',' << s.data.y1 << ',' << s.data.N1 << '\n';
  return os.str();
}

// Strata files share the schema with a leading `stratum` column.
inline StratifiedTrialData parse_strata(std::string_view text) {
  StratifiedTrialData s;
  for (auto& [label, d] : detail::parse_rows(text, "stratum")) s.strata.push_back({std::move(label), d});
  if (s.strata.empty()) throw ValidationError("strata file has no data rows");
  return s;
}

inline std::string serialize_strata(const StratifiedTrialData& s) {
  std::ostringstream os;
  os << "stratum,y0,N0,y1,N1\n";
  for (const auto& st : s.strata)
    os << st.label << ',' << st.data.y0 << ',' << st.data.N0 << ',' << st.data.y1 << ',' << st.data.N1 << '\n';
  return os.str();
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace brease

#endif  // BREASE_TRIAL_DATA_HPP
