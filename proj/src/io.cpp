#include "probstab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>
#include <system_error>
#include <vector>

namespace probstab {

namespace {

[[noreturn]] void parse_error(std::size_t line, std::size_t column, const std::string& what) {
  throw Error(ErrorKind::ParseError,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::pair<std::string_view, std::size_t>> split(std::string_view line, char sep) {
  std::vector<std::pair<std::string_view, std::size_t>> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    const std::size_t end = pos == std::string_view::npos ? line.size() : pos;
    fields.emplace_back(line.substr(start, end - start), start + 1);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

template <class T>
T parse_number(std::string_view text, std::size_t line, std::size_t column) {
  text = trim(text);
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) {
    parse_error(line, column, "expected a number, got '" + std::string(text) + "'");
  }
  return value;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

Graph read_edge_list(std::istream& in) {
  std::string raw;
  std::size_t line_no = 0;
  int n = -1;
  std::set<VertexPair> seen;
  Matrix a;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    if (trim(line).empty()) continue;
    if (n < 0) {
      const std::string_view head = trim(line);
      if (head.size() < 2 || head[0] != 'n' || (head[1] != ' ' && head[1] != '\t')) {
        parse_error(line_no, 1, "expected header 'n <count>'");
      }
      n = parse_number<int>(head.substr(2), line_no, 3);
      if (n < 0) parse_error(line_no, 3, "vertex count must be nonnegative");
      a = Matrix::Zero(n, n);
      continue;
    }
    const auto fields = split(line, '\t');
    if (fields.size() != 2 && fields.size() != 3) {
      parse_error(line_no, 1, "expected 'u<TAB>v[<TAB>w]'");
    }
    const int u = parse_number<int>(fields[0].first, line_no, fields[0].second);
    const int v = parse_number<int>(fields[1].first, line_no, fields[1].second);
    const double w =
        fields.size() == 3 ? parse_number<double>(fields[2].first, line_no, fields[2].second) : 1.0;
    if (u < 0 || u >= n || v < 0 || v >= n) {
      parse_error(line_no, 1, "vertex index out of range [0, " + std::to_string(n) + ")");
    }
    if (u == v) {
      throw Error(ErrorKind::InvariantViolation,
                  "line " + std::to_string(line_no) + ": zero diagonal (self-loop)");
    }
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw Error(ErrorKind::InvariantViolation,
                  "line " + std::to_string(line_no) + ": edge weights must be positive");
    }
    if (!seen.insert(VertexPair(u, v)).second) {
      throw Error(ErrorKind::InvariantViolation,
                  "line " + std::to_string(line_no) + ": duplicate edge (simple graph)");
    }
    a(u, v) = w;
    a(v, u) = w;
  }
  if (n < 0) parse_error(line_no + 1, 1, "missing header 'n <count>'");
  return Graph(std::move(a));
}

Graph read_edge_list_file(const std::string& path) {
  auto in = open_input(path);
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "n " << g.n() << '\n';
  for (const auto& e : g.edges()) {
    const double w = g.adjacency()(e.u, e.v);
    out << e.u << '\t' << e.v;
    if (w != 1.0) out << '\t' << format_double(w);
    out << '\n';
  }
}

void write_edge_list_file(const std::string& path, const Graph& g) {
  auto out = open_output(path);
  write_edge_list(out, g);
}

Matrix read_matrix_csv(std::istream& in) {
  std::string raw;
  std::size_t line_no = 0;
  if (!std::getline(in, raw)) parse_error(1, 1, "empty CSV (missing header row)");
  ++line_no;
  const std::size_t cols = split(trim(raw), ',').size();
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != cols) {
      parse_error(line_no, 1,
                  "expected " + std::to_string(cols) + " fields, got " +
                      std::to_string(fields.size()));
    }
    for (const auto& [text, column] : fields) {
      values.push_back(parse_number<double>(text, line_no, column));
    }
    ++rows;
  }
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r * cols + c];
    }
  }
  return m;
}

Matrix read_matrix_csv_file(const std::string& path) {
  auto in = open_input(path);
  return read_matrix_csv(in);
}

void write_matrix_csv(std::ostream& out, const Matrix& m, const std::string& column_prefix) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    if (c) out << ',';
    out << column_prefix << c;
  }
  out << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

void write_matrix_csv_file(const std::string& path, const Matrix& m,
                           const std::string& column_prefix) {
  auto out = open_output(path);
  write_matrix_csv(out, m, column_prefix);
}

std::string read_text_file(const std::string& path) {
  auto in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
}

}  // namespace probstab
