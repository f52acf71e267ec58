#pragma once

#include "probstab/core.hpp"
#include "probstab/graph.hpp"

#include <iosfwd>
#include <string>

namespace probstab {

// Edge-list text format:
//   # comment
//   n <vertex count>
//   u<TAB>v[<TAB>w]
// Unit weights are written without the third column; other weights use the
// shortest round-trip form so that write -> read -> write is byte-identical.
Graph read_edge_list(std::istream& in);
Graph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& g);
void write_edge_list_file(const std::string& path, const Graph& g);

// Matrix CSV: header row, comma separated, '.' decimal, LF line endings,
// shortest round-trip doubles. Rows are vertices; columns are samples.
Matrix read_matrix_csv(std::istream& in);
Matrix read_matrix_csv_file(const std::string& path);
void write_matrix_csv(std::ostream& out, const Matrix& m, const std::string& column_prefix = "c");
void write_matrix_csv_file(const std::string& path, const Matrix& m,
                           const std::string& column_prefix = "c");

/// Shortest text that reads back to the same double (at most 17 digits).
std::string format_double(double x);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace probstab
