#include "intdim/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "intdim/errors.hpp"

namespace intdim {

namespace {

static_assert(std::endian::native == std::endian::little, "NPY reader assumes a little-endian host");

constexpr std::string_view kNpyMagic = "\x93NUMPY";

struct NpyHeader {
  Precision precision = Precision::f64;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t data_offset = 0;
};

std::uint32_t read_le(std::string_view bytes, std::size_t at, std::size_t width) {
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < width; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + i])) << (8 * i);
  }
  return v;
}

// Minimal reader for the python-literal dict in an NPY header, e.g.
// {'descr': '<f8', 'fortran_order': False, 'shape': (3, 2), }
class HeaderDictParser {
 public:
  HeaderDictParser(std::string_view text, std::size_t base) : text_(text), base_(base) {}

  void parse(std::optional<std::string>& descr, std::optional<bool>& fortran,
             std::optional<std::vector<std::size_t>>& shape) {
    skip_ws();
    expect('{');
    while (true) {
      skip_ws();
      if (peek() == '}') break;
      const std::string key = quoted();
      skip_ws();
      expect(':');
      skip_ws();
      if (key == "descr") {
        descr = quoted();
      } else if (key == "fortran_order") {
        fortran = boolean();
      } else if (key == "shape") {
        shape = tuple();
      } else {
        fail("unknown header key '" + key + "'");
      }
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      skip_ws();
      if (peek() != '}') fail("expected ',' or '}' in header");
    }
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("NPY header: " + what, base_ + pos_, ParseError::Unit::byte);
  }
  char peek() const {
    if (pos_ >= text_.size()) fail("unexpected end of header");
    return text_[pos_];
  }
  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  std::string quoted() {
    const char q = peek();
    if (q != '\'' && q != '"') fail("expected quoted string");
    const std::size_t end = text_.find(q, pos_ + 1);
    if (end == std::string_view::npos) fail("unterminated string");
    std::string s(text_.substr(pos_ + 1, end - pos_ - 1));
    pos_ = end + 1;
    return s;
  }
  bool boolean() {
    if (text_.substr(pos_, 4) == "True") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "False") {
      pos_ += 5;
      return false;
    }
    fail("expected True or False");
  }
  std::vector<std::size_t> tuple() {
    expect('(');
    std::vector<std::size_t> dims;
    while (true) {
      skip_ws();
      if (peek() == ')') {
        ++pos_;
        return dims;
      }
      std::size_t v = 0;
      const char* first = text_.data() + pos_;
      const auto [ptr, ec] = std::from_chars(first, text_.data() + text_.size(), v);
      if (ec != std::errc()) fail("expected integer in shape");
      pos_ += static_cast<std::size_t>(ptr - first);
      dims.push_back(v);
      skip_ws();
      if (peek() == ',') ++pos_;
    }
  }

  std::string_view text_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

// Parses magic, version and header dict from the leading bytes of an NPY file.
// Returns nullopt if `bytes` is too short to contain the whole header.
std::optional<NpyHeader> parse_npy_header(std::string_view bytes) {
  if (bytes.size() < 10) return std::nullopt;
  if (bytes.substr(0, 6) != kNpyMagic) {
    throw ParseError("not an NPY file (bad magic)", 0, ParseError::Unit::byte);
  }
  const auto major = static_cast<unsigned char>(bytes[6]);
  std::size_t len_width = 0;
  if (major == 1) {
    len_width = 2;
  } else if (major == 2 || major == 3) {
    len_width = 4;
  } else {
    throw ParseError("unsupported NPY version " + std::to_string(major), 6, ParseError::Unit::byte);
  }
  if (bytes.size() < 8 + len_width) return std::nullopt;
  const std::size_t header_len = read_le(bytes, 8, len_width);
  const std::size_t header_start = 8 + len_width;
  if (bytes.size() < header_start + header_len) return std::nullopt;

  std::optional<std::string> descr;
  std::optional<bool> fortran;
  std::optional<std::vector<std::size_t>> shape;
  HeaderDictParser(bytes.substr(header_start, header_len), header_start).parse(descr, fortran, shape);

  if (!descr || !fortran || !shape) {
    throw ParseError("NPY header lacks descr, fortran_order or shape", header_start,
                     ParseError::Unit::byte);
  }
  NpyHeader h;
  if (*descr == "<f8" || *descr == "=f8") {
    h.precision = Precision::f64;
  } else if (*descr == "<f4" || *descr == "=f4") {
    h.precision = Precision::f32;
  } else {
    throw ParseError("unsupported dtype '" + *descr + "' (need little-endian float32/float64)",
                     header_start, ParseError::Unit::byte);
  }
  if (*fortran) {
    throw ParseError("Fortran-ordered arrays are not supported", header_start, ParseError::Unit::byte);
  }
  if (shape->size() != 2) {
    throw ParseError("expected a 2-D array, got " + std::to_string(shape->size()) + " dimensions",
                     header_start, ParseError::Unit::byte);
  }
  h.rows = (*shape)[0];
  h.cols = (*shape)[1];
  h.data_offset = header_start + header_len;
  return h;
}

template <class T>
ActivationMatrix matrix_from_payload(const NpyHeader& h, std::vector<T> values) {
  return ActivationMatrix(h.rows, h.cols, std::move(values));
}

std::size_t element_size(Precision p) { return p == Precision::f32 ? 4 : 8; }

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

MatrixFormat format_from_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".npy") return MatrixFormat::npy;
  if (ext == ".csv" || ext == ".txt") return MatrixFormat::csv;
  throw ConfigError("cannot infer matrix format from extension of '" + path.string() +
                    "' (expected .npy or .csv)");
}

ActivationMatrix parse_npy(std::string_view bytes) {
  const auto header = parse_npy_header(bytes);
  if (!header) throw ParseError("truncated NPY header", bytes.size(), ParseError::Unit::byte);
  const std::size_t expected = header->rows * header->cols * element_size(header->precision);
  if (bytes.size() - header->data_offset != expected) {
    throw ParseError("payload holds " + std::to_string(bytes.size() - header->data_offset) +
                         " bytes, shape requires " + std::to_string(expected),
                     header->data_offset, ParseError::Unit::byte);
  }
  const char* payload = bytes.data() + header->data_offset;
  if (header->precision == Precision::f32) {
    std::vector<float> v(header->rows * header->cols);
    std::memcpy(v.data(), payload, expected);
    return matrix_from_payload(*header, std::move(v));
  }
  std::vector<double> v(header->rows * header->cols);
  std::memcpy(v.data(), payload, expected);
  return matrix_from_payload(*header, std::move(v));
}

ActivationMatrix parse_csv(std::string_view text) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;

    std::size_t fields = 0;
    while (true) {
      const std::size_t comma = line.find(',');
      const std::string_view field = trim(line.substr(0, comma));
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
        throw ParseError("malformed number '" + std::string(field) + "' in field " +
                             std::to_string(fields + 1),
                         line_no, ParseError::Unit::line);
      }
      if (!std::isfinite(v)) {
        throw ValidationError("non-finite entry at row " + std::to_string(rows) + " (line " +
                              std::to_string(line_no) + ")");
      }
      values.push_back(v);
      ++fields;
      if (comma == std::string_view::npos) break;
      line = line.substr(comma + 1);
    }
    if (rows == 0) {
      cols = fields;
    } else if (fields != cols) {
      throw ParseError("row has " + std::to_string(fields) + " fields, expected " + std::to_string(cols),
                       line_no, ParseError::Unit::line);
    }
    ++rows;
  }
  if (rows == 0) throw ParseError("no data rows", line_no, ParseError::Unit::line);
  return ActivationMatrix(rows, cols, std::move(values));
}

ActivationMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");

  if (format == MatrixFormat::csv) {
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
  }

  // Read the header separately so large payloads go straight into the
  // matrix buffer without an intermediate copy.
  std::string head(16, '\0');
  in.read(head.data(), static_cast<std::streamsize>(head.size()));
  head.resize(static_cast<std::size_t>(in.gcount()));
  std::optional<NpyHeader> header = parse_npy_header(head);
  while (!header) {
    const std::size_t before = head.size();
    head.resize(before + 4096);
    in.read(head.data() + before, 4096);
    head.resize(before + static_cast<std::size_t>(in.gcount()));
    if (head.size() == before) {
      throw ParseError("truncated NPY header", head.size(), ParseError::Unit::byte);
    }
    header = parse_npy_header(head);
  }

  const std::size_t count = header->rows * header->cols;
  const std::size_t expected = count * element_size(header->precision);
  const auto file_size = static_cast<std::size_t>(std::filesystem::file_size(path));
  if (file_size < header->data_offset || file_size - header->data_offset != expected) {
    throw ParseError("payload holds " + std::to_string(file_size - std::min(file_size, header->data_offset)) +
                         " bytes, shape requires " + std::to_string(expected),
                     header->data_offset, ParseError::Unit::byte);
  }
  in.clear();
  in.seekg(static_cast<std::streamoff>(header->data_offset));
  auto read_payload = [&](auto& v) {
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(expected));
    if (static_cast<std::size_t>(in.gcount()) != expected) {
      throw IoError("short read from '" + path.string() + "'");
    }
  };
  if (header->precision == Precision::f32) {
    std::vector<float> v(count);
    read_payload(v);
    return matrix_from_payload(*header, std::move(v));
  }
  std::vector<double> v(count);
  read_payload(v);
  return matrix_from_payload(*header, std::move(v));
}

ActivationMatrix load_matrix(const std::filesystem::path& path) {
  return load_matrix(path, format_from_path(path));
}

void save_npy(const std::filesystem::path& path, const ActivationMatrix& m) {
  const char* descr = m.precision() == Precision::f32 ? "<f4" : "<f8";
  std::string dict = std::string("{'descr': '") + descr + "', 'fortran_order': False, 'shape': (" +
                     std::to_string(m.rows()) + ", " + std::to_string(m.cols()) + "), }";
  // magic(6) + version(2) + len(2) + dict + padding + '\n' is a multiple of 64.
  const std::size_t unpadded = 10 + dict.size() + 1;
  dict.append((64 - unpadded % 64) % 64, ' ');
  dict.push_back('\n');
  if (dict.size() > 0xffff) throw ConfigError("NPY header too long");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(kNpyMagic.data(), static_cast<std::streamsize>(kNpyMagic.size()));
  const char version[2] = {1, 0};
  out.write(version, 2);
  const char len[2] = {static_cast<char>(dict.size() & 0xff), static_cast<char>(dict.size() >> 8)};
  out.write(len, 2);
  out.write(dict.data(), static_cast<std::streamsize>(dict.size()));
  m.visit([&](auto values) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size_bytes()));
  });
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void save_csv(const std::filesystem::path& path, const ActivationMatrix& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  char buf[64];
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, m(r, c));
      out.write(buf, ptr - buf);
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void save_matrix(const std::filesystem::path& path, const ActivationMatrix& m) {
  if (format_from_path(path) == MatrixFormat::npy) {
    save_npy(path, m);
  } else {
    save_csv(path, m);
  }
}

}  // namespace intdim
