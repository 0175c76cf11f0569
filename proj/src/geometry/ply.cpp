#include "hoikit/geometry/ply.h"

#include "hoikit/error.h"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace hoikit::geometry::ply {
namespace {

enum class Type { i8, u8, i16, u16, i32, u32, f32, f64 };

Type parse_type(const std::string& name, std::size_t line) {
  if (name == "char" || name == "int8") return Type::i8;
  if (name == "uchar" || name == "uint8") return Type::u8;
  if (name == "short" || name == "int16") return Type::i16;
  if (name == "ushort" || name == "uint16") return Type::u16;
  if (name == "int" || name == "int32") return Type::i32;
  if (name == "uint" || name == "uint32") return Type::u32;
  if (name == "float" || name == "float32") return Type::f32;
  if (name == "double" || name == "float64") return Type::f64;
  throw ParseError("ply: unknown property type '" + name + "' at header line " +
                   std::to_string(line));
}

std::size_t type_size(Type t) {
  switch (t) {
    case Type::i8:
    case Type::u8: return 1;
    case Type::i16:
    case Type::u16: return 2;
    case Type::i32:
    case Type::u32:
    case Type::f32: return 4;
    case Type::f64: return 8;
  }
  return 0;
}

struct PropertySpec {
  std::string name;
  bool is_list = false;
  Type count_type = Type::u8;
  Type value_type = Type::f32;
};

struct ElementSpec {
  std::string name;
  std::size_t count = 0;
  std::vector<PropertySpec> properties;
};

static_assert(std::endian::native == std::endian::little,
              "binary PLY reader assumes a little-endian host");

class BinaryCursor {
 public:
  BinaryCursor(const std::string& data, std::size_t offset) : data_(data), pos_(offset) {}

  double read(Type t) {
    const std::size_t n = type_size(t);
    if (pos_ + n > data_.size()) {
      throw ParseError("ply: unexpected end of binary data at byte offset " +
                       std::to_string(pos_));
    }
    const char* p = data_.data() + pos_;
    pos_ += n;
    switch (t) {
      case Type::i8: return static_cast<double>(static_cast<std::int8_t>(*p));
      case Type::u8: return static_cast<double>(static_cast<std::uint8_t>(*p));
      case Type::i16: return load<std::int16_t>(p);
      case Type::u16: return load<std::uint16_t>(p);
      case Type::i32: return load<std::int32_t>(p);
      case Type::u32: return load<std::uint32_t>(p);
      case Type::f32: return load<float>(p);
      case Type::f64: return load<double>(p);
    }
    return 0.0;
  }

  std::size_t offset() const { return pos_; }

 private:
  template <typename T>
  static double load(const char* p) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    return static_cast<double>(v);
  }

  const std::string& data_;
  std::size_t pos_;
};

class AsciiCursor {
 public:
  explicit AsciiCursor(std::istringstream& in, std::size_t first_line)
      : in_(in), line_(first_line) {}

  double read() {
    while (tokens_.eof() || !(tokens_ >> std::ws) || tokens_.peek() == EOF) {
      std::string line;
      if (!std::getline(in_, line)) {
        throw ParseError("ply: unexpected end of file at line " + std::to_string(line_));
      }
      ++line_;
      tokens_.clear();
      tokens_.str(line);
    }
    std::string tok;
    tokens_ >> tok;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw ParseError("ply: bad number '" + tok + "' at line " + std::to_string(line_));
    }
    return v;
  }

  std::size_t line() const { return line_; }

 private:
  std::istringstream& in_;
  std::istringstream tokens_;
  std::size_t line_;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

const std::vector<double>& Element::column(const std::string& property) const {
  const auto it = scalars.find(property);
  if (it == scalars.end()) {
    throw ParseError("ply: element '" + name + "' has no property '" + property + "'");
  }
  return it->second;
}

const Element* Document::find(const std::string& name) const {
  for (const auto& e : elements) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

Document read(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  std::istringstream in(data);
  std::string line;
  std::size_t line_no = 0;

  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  if (!next_line() || line != "ply") throw ParseError("ply: missing magic at line 1");

  bool binary = false;
  bool have_format = false;
  std::vector<ElementSpec> specs;
  while (true) {
    if (!next_line()) throw ParseError("ply: header not terminated");
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "end_header") break;
    if (kw == "comment" || kw == "obj_info" || kw.empty()) continue;
    if (kw == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "ascii") {
        binary = false;
      } else if (fmt == "binary_little_endian") {
        binary = true;
      } else {
        throw ParseError("ply: unsupported format '" + fmt + "' at line " +
                         std::to_string(line_no));
      }
      have_format = true;
    } else if (kw == "element") {
      ElementSpec e;
      long long count = -1;
      ls >> e.name >> count;
      if (!ls || count < 0) {
        throw ParseError("ply: bad element declaration at line " + std::to_string(line_no));
      }
      e.count = static_cast<std::size_t>(count);
      specs.push_back(std::move(e));
    } else if (kw == "property") {
      if (specs.empty()) {
        throw ParseError("ply: property before element at line " + std::to_string(line_no));
      }
      PropertySpec p;
      std::string type;
      ls >> type;
      if (type == "list") {
        std::string ct, vt;
        ls >> ct >> vt >> p.name;
        p.is_list = true;
        p.count_type = parse_type(ct, line_no);
        p.value_type = parse_type(vt, line_no);
      } else {
        p.value_type = parse_type(type, line_no);
        ls >> p.name;
      }
      if (p.name.empty()) {
        throw ParseError("ply: property without name at line " + std::to_string(line_no));
      }
      specs.back().properties.push_back(p);
    } else {
      throw ParseError("ply: unknown header keyword '" + kw + "' at line " +
                       std::to_string(line_no));
    }
  }
  if (!have_format) throw ParseError("ply: missing format line");

  Document doc;
  const std::size_t body_offset = static_cast<std::size_t>(in.tellg());
  BinaryCursor bin(data, body_offset);
  AsciiCursor ascii(in, line_no);

  for (const auto& spec : specs) {
    Element el;
    el.name = spec.name;
    el.count = spec.count;
    for (const auto& p : spec.properties) {
      if (p.is_list) {
        el.lists[p.name].reserve(spec.count);
      } else {
        el.scalar_names.push_back(p.name);
        el.scalars[p.name].reserve(spec.count);
      }
    }
    for (std::size_t i = 0; i < spec.count; ++i) {
      for (const auto& p : spec.properties) {
        if (p.is_list) {
          const double n = binary ? bin.read(p.count_type) : ascii.read();
          if (n < 0 || n != static_cast<double>(static_cast<long long>(n))) {
            throw ParseError("ply: bad list length in element '" + spec.name + "' row " +
                             std::to_string(i));
          }
          std::vector<std::int64_t> values(static_cast<std::size_t>(n));
          for (auto& v : values) {
            v = static_cast<std::int64_t>(binary ? bin.read(p.value_type) : ascii.read());
          }
          el.lists[p.name].push_back(std::move(values));
        } else {
          el.scalars[p.name].push_back(binary ? bin.read(p.value_type) : ascii.read());
        }
      }
    }
    doc.elements.push_back(std::move(el));
  }
  return doc;
}

namespace {

void append_ascii(std::string& out, double v, ScalarType type) {
  char buf[64];
  std::to_chars_result r{};
  switch (type) {
    case ScalarType::float32:
      r = std::to_chars(buf, buf + sizeof(buf), static_cast<float>(v));
      break;
    case ScalarType::float64:
      r = std::to_chars(buf, buf + sizeof(buf), v);
      break;
    case ScalarType::uint8:
    case ScalarType::int32:
      r = std::to_chars(buf, buf + sizeof(buf), static_cast<long long>(v));
      break;
  }
  out.append(buf, r.ptr);
}

template <typename T>
void append_binary(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

void append_binary(std::string& out, double v, ScalarType type) {
  switch (type) {
    case ScalarType::float32: append_binary(out, static_cast<float>(v)); break;
    case ScalarType::float64: append_binary(out, v); break;
    case ScalarType::uint8: append_binary(out, static_cast<std::uint8_t>(v)); break;
    case ScalarType::int32: append_binary(out, static_cast<std::int32_t>(v)); break;
  }
}

const char* type_name(ScalarType t) {
  switch (t) {
    case ScalarType::float32: return "float";
    case ScalarType::float64: return "double";
    case ScalarType::uint8: return "uchar";
    case ScalarType::int32: return "int";
  }
  return "double";
}

}  // namespace

void write(const std::filesystem::path& path, const std::vector<OutElement>& elements,
           Encoding encoding) {
  std::string out = "ply\n";
  out += encoding == Encoding::ascii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n";
  for (const auto& el : elements) {
    out += "element " + el.name + " " + std::to_string(el.count) + "\n";
    for (const auto& c : el.columns) {
      if (c.values.size() != el.count) {
        throw InvalidArgument("ply: column '" + c.name + "' length mismatch");
      }
      out += std::string("property ") + type_name(c.type) + " " + c.name + "\n";
    }
    if (!el.list_name.empty()) {
      if (el.list_values.size() != el.count) {
        throw InvalidArgument("ply: list '" + el.list_name + "' length mismatch");
      }
      out += "property list uchar int " + el.list_name + "\n";
    }
  }
  out += "end_header\n";

  for (const auto& el : elements) {
    for (std::size_t i = 0; i < el.count; ++i) {
      bool first = true;
      for (const auto& c : el.columns) {
        if (encoding == Encoding::ascii) {
          if (!first) out += ' ';
          append_ascii(out, c.values[i], c.type);
        } else {
          append_binary(out, c.values[i], c.type);
        }
        first = false;
      }
      if (!el.list_name.empty()) {
        const auto& list = el.list_values[i];
        if (encoding == Encoding::ascii) {
          if (!first) out += ' ';
          out += std::to_string(list.size());
          for (auto v : list) out += " " + std::to_string(v);
        } else {
          append_binary(out, static_cast<std::uint8_t>(list.size()));
          for (auto v : list) append_binary(out, static_cast<std::int32_t>(v));
        }
      }
      if (encoding == Encoding::ascii) out += '\n';
    }
  }

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace hoikit::geometry::ply
