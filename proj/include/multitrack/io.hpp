#pragma once

// Plain-text file formats: campaign files, element tables, cost matrices and
// comma-separated result tables. Grammar reference: docs/file_formats.md.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <optional>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "assignment.hpp"
#include "fitness.hpp"
#include "scenario.hpp"

namespace multitrack {

class ParseError : public std::runtime_error {

  public:

    ParseError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), _line(line) {}

    std::size_t line() const { return _line; }

  private:

    std::size_t _line;
};

// A file that cannot be opened.
class FileError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// ----------------------------------------------------------------------------
// Number formatting
// ----------------------------------------------------------------------------

// Shortest decimal form that parses back to the same double.
inline std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

// Angles are stored in degrees on disk and radians in memory. The degree
// text is converted in extended precision so that every double survives
// the trip: not every radian value has a double degree counterpart.
inline constexpr long double kRadPerDeg = std::numbers::pi_v<long double> / 180.0L;

inline double degrees_to_radians(long double deg) {
  return static_cast<double>(deg * kRadPerDeg);
}

inline bool parse_degrees(std::string_view s, double& rad);

// Shortest degree text that converts back to `rad` bit for bit.
inline std::string format_degrees(double rad) {
  if(!std::isfinite(rad)) return format_number(rad);
  const long double deg = static_cast<long double>(rad) / kRadPerDeg;
  char buf[64];
  double back = 0.0;
  for(int digits = 1; digits <= 21; ++digits) {
    std::snprintf(buf, sizeof(buf), "%.*Lg", digits, deg);
    if(parse_degrees(buf, back) && back == rad) break;
  }
  return buf;
}

inline bool parse_degrees(std::string_view s, double& rad) {
  if(!s.empty() && s.front() == '+') s.remove_prefix(1);
  long double deg = 0.0L;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), deg);
  if(res.ec != std::errc() || res.ptr != s.data() + s.size()) return false;
  rad = degrees_to_radians(deg);
  return true;
}

inline bool parse_number(std::string_view s, double& out) {
  if(!s.empty() && s.front() == '+') s.remove_prefix(1);
  if(s == "inf") { out = HUGE_VAL; return true; }
  if(s == "-inf") { out = -HUGE_VAL; return true; }
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream iss(line);
  for(std::string tok; iss >> tok; ) out.push_back(tok);
  return out;
}

inline std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

// Line reader that skips blank and comment lines and tracks line numbers.
class TokenLines {

  public:

    TokenLines(std::istream& in, std::string source) : _in(in), _source(std::move(source)) {}

    bool next(std::vector<std::string>& tokens) {
      for(std::string line; std::getline(_in, line); ) {
        ++_line;
        tokens = split_ws(strip_comment(line));
        if(!tokens.empty()) return true;
      }
      return false;
    }

    std::vector<std::string> expect(std::string_view keyword, std::size_t args) {
      std::vector<std::string> tokens;
      if(!next(tokens)) fail("unexpected end of file, expected '" + std::string(keyword) + "'");
      if(!keyword.empty() && tokens.front() != keyword) {
        fail("expected '" + std::string(keyword) + "', found '" + tokens.front() + "'");
      }
      const std::size_t have = tokens.size() - (keyword.empty() ? 0 : 1);
      if(have != args) {
        fail("'" + std::string(keyword.empty() ? tokens.front() : keyword) + "' needs " +
             std::to_string(args) + " values, found " + std::to_string(have));
      }
      if(!keyword.empty()) tokens.erase(tokens.begin());
      return tokens;
    }

    double number(const std::string& tok) {
      double v;
      if(!parse_number(tok, v)) fail("not a number: '" + tok + "'");
      return v;
    }

    double degrees(const std::string& tok) {
      double v;
      if(!parse_degrees(tok, v)) fail("not an angle: '" + tok + "'");
      return v;
    }

    std::size_t count(const std::string& tok) {
      const double v = number(tok);
      if(!(v >= 0.0) || v != std::floor(v) || v > 1e9) fail("not a count: '" + tok + "'");
      return static_cast<std::size_t>(v);
    }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(_source, _line, what); }

    std::size_t line() const { return _line; }

  private:

    std::istream& _in;
    std::string _source;
    std::size_t _line {0};
};

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if(!in) throw FileError("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if(!out) throw FileError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace detail

// ----------------------------------------------------------------------------
// Campaign files
// ----------------------------------------------------------------------------

// Labels and truth are optional: an unlabeled campaign has empty labels and
// an empty truth candidate.
inline void write_campaign(std::ostream& out, const LabeledObservationSet& set) {
  const ObservationSet& obs = set.observations;
  const GroundStation& st = obs.station;
  out << "# multitrack observation campaign; angles in degrees, times in seconds\n";
  out << "format multitrack-campaign 1\n";
  out << "station " << format_degrees(st.longitude) << ' ' << format_degrees(st.latitude) << ' '
      << format_number(st.earth_radius) << ' ' << format_number(st.earth_rotation_rate) << ' '
      << format_degrees(st.rotation_epoch_angle) << '\n';
  out << "gravity " << format_number(obs.gravity.mu) << '\n';
  out << "truth " << set.truth.size() << '\n';
  for(const auto& el : set.truth.elements) {
    out << format_number(el.a) << ' ' << format_number(el.e) << ' ' << format_degrees(el.inc) << ' '
        << format_degrees(el.raan) << ' ' << format_degrees(el.theta) << ' '
        << format_number(el.epoch) << '\n';
  }
  out << "dates " << obs.date_count() << ' ' << (set.labels.empty() ? "unlabeled" : "labeled") << '\n';
  for(std::size_t j = 0; j < obs.date_count(); ++j) {
    out << "date " << format_number(obs.dates[j]) << ' ' << obs.nights[j] << ' '
        << obs.batches[j].size() << ' ' << format_degrees(obs.sigmas[j].elevation) << ' '
        << format_degrees(obs.sigmas[j].azimuth) << '\n';
    for(const auto& z : obs.batches[j]) {
      out << format_degrees(z.elevation) << ' ' << format_degrees(z.azimuth) << '\n';
    }
    if(!set.labels.empty()) {
      out << "labels";
      for(int label : set.labels[j]) {
        out << ' ';
        if(label == kFictitious) out << 'F';
        else out << label + 1;
      }
      out << '\n';
    }
  }
  out << "end\n";
}

inline LabeledObservationSet read_campaign(std::istream& in, const std::string& source = "campaign") {
  detail::TokenLines lines(in, source);
  LabeledObservationSet set;
  ObservationSet& obs = set.observations;

  auto header = lines.expect("format", 2);
  if(header[0] != "multitrack-campaign" || header[1] != "1") {
    lines.fail("unsupported format '" + header[0] + " " + header[1] + "'");
  }

  auto st = lines.expect("station", 5);
  obs.station.longitude = lines.degrees(st[0]);
  obs.station.latitude = lines.degrees(st[1]);
  obs.station.earth_radius = lines.number(st[2]);
  obs.station.earth_rotation_rate = lines.number(st[3]);
  obs.station.rotation_epoch_angle = lines.degrees(st[4]);
  try {
    validate(obs.station);
  }
  catch(const std::exception& ex) {
    lines.fail(ex.what());
  }

  obs.gravity.mu = lines.number(lines.expect("gravity", 1)[0]);

  const std::size_t n_truth = lines.count(lines.expect("truth", 1)[0]);
  for(std::size_t i = 0; i < n_truth; ++i) {
    auto t = lines.expect("", 6);
    OrbitalElements el {lines.number(t[0]), lines.number(t[1]), lines.degrees(t[2]),
                        lines.degrees(t[3]), lines.degrees(t[4]),
                        lines.number(t[5])};
    try {
      validate(el);
    }
    catch(const std::exception& ex) {
      lines.fail(ex.what());
    }
    set.truth.elements.push_back(el);
  }

  auto dates = lines.expect("dates", 2);
  const std::size_t M = lines.count(dates[0]);
  bool labeled = false;
  if(dates[1] == "labeled") labeled = true;
  else if(dates[1] != "unlabeled") lines.fail("expected 'labeled' or 'unlabeled'");

  for(std::size_t j = 0; j < M; ++j) {
    auto d = lines.expect("date", 5);
    const double epoch = lines.number(d[0]);
    const double night = lines.number(d[1]);
    const std::size_t m = lines.count(d[2]);
    Uncertainty sigma {lines.degrees(d[3]), lines.degrees(d[4])};
    if(!(sigma.elevation > 0.0) || !(sigma.azimuth > 0.0)) lines.fail("sigma must be positive");
    if(!obs.dates.empty() && !(epoch > obs.dates.back())) lines.fail("dates must be strictly increasing");

    std::vector<Measurement> rows;
    rows.reserve(m);
    for(std::size_t k = 0; k < m; ++k) {
      auto r = lines.expect("", 2);
      Measurement z {lines.degrees(r[0]), lines.degrees(r[1]), epoch};
      if(!(std::abs(z.elevation) <= kPi / 2.0) || !std::isfinite(z.azimuth)) {
        lines.fail("measurement angles out of range");
      }
      rows.push_back(z);
    }
    obs.dates.push_back(epoch);
    obs.nights.push_back(static_cast<int>(night));
    obs.sigmas.push_back(sigma);
    obs.batches.push_back(std::move(rows));

    if(labeled) {
      auto l = lines.expect("labels", m);
      std::vector<int> labels;
      std::vector<char> seen(n_truth, 0);
      for(const auto& tok : l) {
        if(tok == "F") {
          labels.push_back(kFictitious);
          continue;
        }
        const std::size_t obj = lines.count(tok);
        if(obj < 1 || obj > n_truth) lines.fail("label '" + tok + "' is not a truth object");
        if(seen[obj - 1]) lines.fail("label '" + tok + "' repeated within one date");
        seen[obj - 1] = 1;
        labels.push_back(static_cast<int>(obj) - 1);
      }
      set.labels.push_back(std::move(labels));
    }
  }
  lines.expect("end", 0);
  return set;
}

inline void save_campaign(const std::string& path, const LabeledObservationSet& set) {
  auto out = detail::open_out(path);
  write_campaign(out, set);
}

inline LabeledObservationSet load_campaign(const std::string& path) {
  auto in = detail::open_in(path);
  return read_campaign(in, path);
}

// ----------------------------------------------------------------------------
// Comma-separated tables
// ----------------------------------------------------------------------------

// Columns whose name ends in "_deg" hold radians in memory and are written
// and read as degrees.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(std::string_view name) const {
    for(std::size_t c = 0; c < header.size(); ++c) {
      if(header[c] == name) return c;
    }
    throw std::out_of_range("table has no column '" + std::string(name) + "'");
  }

  bool is_angle(std::size_t c) const {
    const std::string& h = header[c];
    return h.size() >= 4 && h.compare(h.size() - 4, 4, "_deg") == 0;
  }
};

inline void write_table(std::ostream& out, const Table& t) {
  for(std::size_t c = 0; c < t.header.size(); ++c) out << (c ? "," : "") << t.header[c];
  out << '\n';
  for(const auto& row : t.rows) {
    for(std::size_t c = 0; c < row.size(); ++c) {
      out << (c ? "," : "") << (t.is_angle(c) ? format_degrees(row[c]) : format_number(row[c]));
    }
    out << '\n';
  }
}

inline Table read_table(std::istream& in, const std::string& source = "table") {
  Table t;
  std::string line;
  std::size_t lineno = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for(std::string cell; std::getline(ss, cell, ','); ) {
      const auto b = cell.find_first_not_of(" \t\r");
      const auto e = cell.find_last_not_of(" \t\r");
      out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    return out;
  };
  while(std::getline(in, line)) {
    ++lineno;
    if(line.empty() || line[0] == '#') continue;
    if(t.header.empty()) {
      t.header = split(line);
      continue;
    }
    const auto cells = split(line);
    if(cells.size() != t.header.size()) {
      throw ParseError(source, lineno, "expected " + std::to_string(t.header.size()) +
                                       " columns, found " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    for(std::size_t c = 0; c < cells.size(); ++c) {
      const std::string& cell = cells[c];
      double v;
      const bool ok = t.is_angle(c) ? parse_degrees(cell, v) : parse_number(cell, v);
      if(!ok) throw ParseError(source, lineno, "not a number: '" + cell + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if(t.header.empty()) throw ParseError(source, lineno, "missing header row");
  return t;
}

inline void save_table(const std::string& path, const Table& t) {
  auto out = detail::open_out(path);
  write_table(out, t);
}

inline Table load_table(const std::string& path) {
  auto in = detail::open_in(path);
  return read_table(in, path);
}

// ----------------------------------------------------------------------------
// Element tables
// ----------------------------------------------------------------------------

inline Table elements_table(const Candidate& c) {
  Table t;
  t.header = {"object", "a_km", "e", "inc_deg", "raan_deg", "theta_deg", "lambda_deg", "epoch_s"};
  for(std::size_t i = 0; i < c.size(); ++i) {
    const auto& el = c.elements[i];
    t.rows.push_back({static_cast<double>(i + 1), el.a, el.e, el.inc, el.raan, el.theta,
                      el.longitude(), el.epoch});
  }
  return t;
}

// Reads object rows in file order. lambda_deg is informational and ignored;
// a missing epoch_s column means epoch 0.
inline Candidate candidate_from_table(const Table& t, const std::string& source = "elements") {
  Candidate c;
  std::size_t ca, ce, ci, cr, ct;
  try {
    ca = t.column("a_km");
    ce = t.column("e");
    ci = t.column("inc_deg");
    cr = t.column("raan_deg");
    ct = t.column("theta_deg");
  }
  catch(const std::out_of_range& ex) {
    throw ParseError(source, 1, ex.what());
  }
  std::optional<std::size_t> cepoch;
  for(std::size_t k = 0; k < t.header.size(); ++k) {
    if(t.header[k] == "epoch_s") cepoch = k;
  }
  for(std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    OrbitalElements el {row[ca], row[ce], row[ci], row[cr], row[ct],
                        cepoch ? row[*cepoch] : 0.0};
    try {
      validate(el);
    }
    catch(const std::exception& ex) {
      throw ParseError(source, r + 2, ex.what());
    }
    c.elements.push_back(el);
  }
  if(c.elements.empty()) throw ParseError(source, 1, "no element rows");
  return c;
}

// ----------------------------------------------------------------------------
// Cost matrices: one row per line, whitespace separated
// ----------------------------------------------------------------------------

inline CostMatrix read_matrix(std::istream& in, const std::string& source = "matrix") {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while(std::getline(in, line)) {
    ++lineno;
    const auto tokens = detail::split_ws(detail::strip_comment(line));
    if(tokens.empty()) continue;
    std::vector<double> row;
    for(const auto& tok : tokens) {
      double v;
      if(!parse_number(tok, v)) throw ParseError(source, lineno, "not a number: '" + tok + "'");
      row.push_back(v);
    }
    if(!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(source, lineno, "row has " + std::to_string(row.size()) +
                                       " entries, expected " + std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if(rows.empty()) throw ParseError(source, lineno, "empty matrix");
  CostMatrix C(rows.size(), rows.front().size());
  for(std::size_t r = 0; r < rows.size(); ++r) {
    for(std::size_t c = 0; c < rows[r].size(); ++c) C(r, c) = rows[r][c];
  }
  return C;
}

}  // end of namespace multitrack -------------------------------------------
