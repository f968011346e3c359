#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rdr/matrix.hpp"
#include "rdr/sdr.hpp"

namespace rdr {

// File formats used by the command line tool.
//
// Matrices travel as headerless numeric CSV: one sample per row, comma
// separated, '.' decimal point, LF line endings, values printed with 17
// significant digits so a write/parse cycle reproduces every double bit for
// bit.  Models travel as versioned JSON with the basis embedded as a base64
// payload of column-major little-endian doubles: metadata stays readable,
// numerics stay exact.

// ---------------------------------------------------------------------------
// CSV.  Parse errors carry "<name>:<line>: <reason>".

Matrix parse_csv_matrix(const std::string& text, const std::string& name = "<string>");
std::string format_csv_matrix(const Matrix& m);

Matrix read_csv_matrix(const std::string& path);
void write_csv_matrix(const std::string& path, const Matrix& m);

// Single-column files for response vectors.
std::vector<double> read_csv_vector(const std::string& path);
void write_csv_vector(const std::string& path, const std::vector<double>& v);

// ---------------------------------------------------------------------------
// Base64 (standard alphabet, '=' padding; decoding is strict).

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

// Exact matrix payloads for embedding in JSON: column-major doubles,
// little-endian bytes, base64 text.
std::string encode_matrix_payload(const Matrix& m);
Matrix decode_matrix_payload(const std::string& text, std::size_t rows, std::size_t cols);

// ---------------------------------------------------------------------------
// Model files (JSON, format tag "rdr-model", version 1).

void save_model(const std::string& path, const EdrModel& model);
EdrModel load_model(const std::string& path);

std::string method_name(EdrMethod method);
EdrMethod method_from_name(const std::string& name);

// Whole-file text helpers shared by the tool and the tests.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace rdr
