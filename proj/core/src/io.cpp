#include "rdr/io.hpp"

#include <bit>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace rdr {

namespace {

using OrderedJson = nlohmann::ordered_json;

[[noreturn]] void fail_at(const std::string& name, std::size_t line, const std::string& why) {
  throw std::invalid_argument(name + ":" + std::to_string(line) + ": " + why);
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_value(const std::string& token, const std::string& name, std::size_t line) {
  const char* begin = token.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    fail_at(name, line, "cannot parse '" + token + "' as a number");
  return v;
}

constexpr char kBase64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int base64_index(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

}  // namespace

Matrix parse_csv_matrix(const std::string& text, const std::string& name) {
  std::vector<double> data;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t line_no = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      // A blank line is only tolerated as trailing whitespace.
      std::string rest;
      while (std::getline(in, rest)) {
        if (!rest.empty() && rest.back() == '\r') rest.pop_back();
        if (!rest.empty()) fail_at(name, line_no, "blank line inside the matrix body");
      }
      break;
    }
    std::size_t fields = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string token = line.substr(start, comma == std::string::npos
                                                       ? std::string::npos
                                                       : comma - start);
      data.push_back(parse_value(token, name, line_no));
      ++fields;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      cols = fields;
    } else if (fields != cols) {
      fail_at(name, line_no,
              "expected " + std::to_string(cols) + " fields, got " + std::to_string(fields));
    }
    ++rows;
  }
  if (rows == 0) throw std::invalid_argument(name + ": empty matrix file");
  return Matrix(rows, cols, std::move(data));
}

std::string format_csv_matrix(const Matrix& m) {
  std::string out;
  out.reserve(m.rows() * m.cols() * 20);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out.push_back(',');
      out += format_value(m(i, j));
    }
    out.push_back('\n');
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument(path + ": cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::invalid_argument(path + ": cannot open for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::invalid_argument(path + ": write failed");
}

Matrix read_csv_matrix(const std::string& path) {
  return parse_csv_matrix(read_text_file(path), path);
}

void write_csv_matrix(const std::string& path, const Matrix& m) {
  write_text_file(path, format_csv_matrix(m));
}

std::vector<double> read_csv_vector(const std::string& path) {
  const Matrix m = read_csv_matrix(path);
  if (m.cols() != 1)
    throw std::invalid_argument(path + ": expected a single column, got " +
                                std::to_string(m.cols()));
  return m.col_vector(0);
}

void write_csv_vector(const std::string& path, const std::vector<double>& v) {
  Matrix m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  write_csv_matrix(path, m);
}

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    const std::uint32_t b = (std::uint32_t{bytes[i]} << 16) |
                            (std::uint32_t{bytes[i + 1]} << 8) | bytes[i + 2];
    out.push_back(kBase64Alphabet[(b >> 18) & 63]);
    out.push_back(kBase64Alphabet[(b >> 12) & 63]);
    out.push_back(kBase64Alphabet[(b >> 6) & 63]);
    out.push_back(kBase64Alphabet[b & 63]);
  }
  const std::size_t rem = bytes.size() - i;
  if (rem == 1) {
    const std::uint32_t b = std::uint32_t{bytes[i]} << 16;
    out.push_back(kBase64Alphabet[(b >> 18) & 63]);
    out.push_back(kBase64Alphabet[(b >> 12) & 63]);
    out += "==";
  } else if (rem == 2) {
    const std::uint32_t b = (std::uint32_t{bytes[i]} << 16) | (std::uint32_t{bytes[i + 1]} << 8);
    out.push_back(kBase64Alphabet[(b >> 18) & 63]);
    out.push_back(kBase64Alphabet[(b >> 12) & 63]);
    out.push_back(kBase64Alphabet[(b >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  if (text.size() % 4 != 0)
    throw std::invalid_argument("base64: length must be a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int vals[4];
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=') {
        // Padding may only occupy the final one or two positions.
        if (i + 4 != text.size() || k < 2)
          throw std::invalid_argument("base64: misplaced '=' padding");
        vals[k] = 0;
        ++pad;
      } else {
        if (pad > 0) throw std::invalid_argument("base64: data after '=' padding");
        vals[k] = base64_index(c);
        if (vals[k] < 0)
          throw std::invalid_argument(std::string("base64: invalid character '") + c + "'");
      }
    }
    const std::uint32_t b = (std::uint32_t(vals[0]) << 18) | (std::uint32_t(vals[1]) << 12) |
                            (std::uint32_t(vals[2]) << 6) | std::uint32_t(vals[3]);
    out.push_back(static_cast<std::uint8_t>((b >> 16) & 0xff));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>((b >> 8) & 0xff));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(b & 0xff));
  }
  return out;
}

std::string encode_matrix_payload(const Matrix& m) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(m.rows() * m.cols() * 8);
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const std::uint64_t w = std::bit_cast<std::uint64_t>(m(i, j));
      for (int k = 0; k < 8; ++k)
        bytes.push_back(static_cast<std::uint8_t>((w >> (8 * k)) & 0xff));
    }
  return base64_encode(bytes);
}

Matrix decode_matrix_payload(const std::string& text, std::size_t rows, std::size_t cols) {
  const std::vector<std::uint8_t> bytes = base64_decode(text);
  if (bytes.size() != rows * cols * 8)
    throw std::invalid_argument("matrix payload: expected " +
                                std::to_string(rows * cols * 8) + " bytes, got " +
                                std::to_string(bytes.size()));
  Matrix m(rows, cols);
  std::size_t pos = 0;
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) {
      std::uint64_t w = 0;
      for (int k = 0; k < 8; ++k) w |= std::uint64_t{bytes[pos++]} << (8 * k);
      m(i, j) = std::bit_cast<double>(w);
    }
  return m;
}

std::string method_name(EdrMethod method) {
  switch (method) {
    case EdrMethod::kPca: return "pca";
    case EdrMethod::kSir: return "sir";
    case EdrMethod::kLsir: return "lsir";
    case EdrMethod::kLpp: return "lpp";
  }
  throw std::invalid_argument("method_name: unknown method");
}

EdrMethod method_from_name(const std::string& name) {
  if (name == "pca") return EdrMethod::kPca;
  if (name == "sir") return EdrMethod::kSir;
  if (name == "lsir") return EdrMethod::kLsir;
  if (name == "lpp") return EdrMethod::kLpp;
  throw std::invalid_argument("unknown method '" + name + "' (want pca, sir, lsir or lpp)");
}

void save_model(const std::string& path, const EdrModel& model) {
  OrderedJson doc;
  doc["format"] = "rdr-model";
  doc["version"] = 1;
  doc["method"] = method_name(model.method);
  doc["rows"] = model.g.rows();
  doc["cols"] = model.g.cols();
  doc["r"] = model.r;
  doc["d_star"] = model.d_star;
  doc["t_star"] = model.t_star;
  doc["y_mean"] = model.y_mean;
  doc["x_means"] = model.x_means;
  doc["g_base64"] = encode_matrix_payload(model.g);
  write_text_file(path, doc.dump(2) + "\n");
}

EdrModel load_model(const std::string& path) {
  OrderedJson doc;
  try {
    doc = OrderedJson::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path + ": not valid JSON: " + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "rdr-model")
      throw std::invalid_argument(path + ": not a model file (bad format tag)");
    if (doc.at("version").get<int>() != 1)
      throw std::invalid_argument(path + ": unsupported model version " +
                                  doc.at("version").dump());
    EdrModel model;
    model.method = method_from_name(doc.at("method").get<std::string>());
    const auto rows = doc.at("rows").get<std::size_t>();
    const auto cols = doc.at("cols").get<std::size_t>();
    model.g = decode_matrix_payload(doc.at("g_base64").get<std::string>(), rows, cols);
    model.r = doc.at("r").get<std::size_t>();
    model.d_star = doc.at("d_star").get<std::size_t>();
    model.t_star = doc.at("t_star").get<std::size_t>();
    model.y_mean = doc.at("y_mean").get<double>();
    model.x_means = doc.at("x_means").get<std::vector<double>>();
    if (model.x_means.size() != rows)
      throw std::invalid_argument(path + ": x_means length does not match the basis rows");
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path + ": malformed model file: " + e.what());
  }
}

}  // namespace rdr
