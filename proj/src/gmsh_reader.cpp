#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "thinc/errors.hpp"
#include "thinc/mesh.hpp"

namespace thinc {

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  }

  std::string expect(const char* context) {
    std::string line;
    if (!next(line)) throw ParseError(std::string("unexpected end of file in ") + context, line_no_);
    return line;
  }

  int line() const { return line_no_; }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

long parse_long(const std::string& token, int line) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) throw ParseError("expected integer, got '" + token + "'", line);
  return v;
}

double parse_double(const std::string& token, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw ParseError("expected number, got '" + token + "'", line);
  }
}

std::vector<std::string> split(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

// Element types that carry no area and are ignored: points and (possibly curved) lines.
bool is_skipped_type(long type) { return type == 15 || type == 1 || type == 8 || type == 26 || type == 27 || type == 28; }

}  // namespace

Mesh parse_gmsh(std::istream& in) {
  LineReader reader(in);
  bool have_format = false;
  bool have_nodes = false;
  bool have_elements = false;
  std::unordered_map<long, int> node_index;
  std::vector<Vec3> nodes;
  std::vector<std::array<int, 3>> triangles;

  std::string line;
  while (reader.next(line)) {
    const std::string header = trim(line);
    if (header.empty() || header[0] != '$') throw ParseError("expected section header, got '" + header + "'", reader.line());
    const std::string name = header.substr(1);
    if (name.rfind("End", 0) == 0) throw ParseError("unmatched section terminator '" + header + "'", reader.line());
    const std::string terminator = "$End" + name;

    if (name == "MeshFormat") {
      const auto tok = split(reader.expect("$MeshFormat"));
      if (tok.size() != 3) throw ParseError("malformed $MeshFormat line", reader.line());
      if (tok[0] != "2.2") throw ParseError("unsupported MSH version " + tok[0] + " (only 2.2 ASCII is supported)", reader.line());
      if (tok[1] != "0") throw ParseError("binary MSH files are not supported", reader.line());
      if (tok[2] != "8") throw ParseError("unsupported data size " + tok[2], reader.line());
      have_format = true;
    } else if (name == "Nodes") {
      if (!have_format) throw ParseError("$Nodes before $MeshFormat", reader.line());
      const auto count_tok = split(reader.expect("$Nodes"));
      if (count_tok.size() != 1) throw ParseError("malformed node count", reader.line());
      const long count = parse_long(count_tok[0], reader.line());
      if (count < 0) throw ParseError("negative node count", reader.line());
      nodes.reserve(static_cast<std::size_t>(count));
      for (long n = 0; n < count; ++n) {
        const auto tok = split(reader.expect("$Nodes"));
        if (tok.size() != 4) throw ParseError("malformed node record", reader.line());
        const long id = parse_long(tok[0], reader.line());
        const Vec3 p{parse_double(tok[1], reader.line()), parse_double(tok[2], reader.line()),
                     parse_double(tok[3], reader.line())};
        if (!node_index.emplace(id, static_cast<int>(nodes.size())).second)
          throw ParseError("duplicate node id " + tok[0], reader.line());
        nodes.push_back({p.x, p.y, 0.0});
      }
      have_nodes = true;
    } else if (name == "Elements") {
      if (!have_nodes) throw ParseError("$Elements before $Nodes", reader.line());
      const auto count_tok = split(reader.expect("$Elements"));
      if (count_tok.size() != 1) throw ParseError("malformed element count", reader.line());
      const long count = parse_long(count_tok[0], reader.line());
      if (count < 0) throw ParseError("negative element count", reader.line());
      for (long e = 0; e < count; ++e) {
        const auto tok = split(reader.expect("$Elements"));
        if (tok.size() < 3) throw ParseError("malformed element record", reader.line());
        const long type = parse_long(tok[1], reader.line());
        const long ntags = parse_long(tok[2], reader.line());
        if (ntags < 0) throw ParseError("negative tag count", reader.line());
        if (is_skipped_type(type)) continue;
        if (type != 2) throw ParseError("unsupported element type " + tok[1] + " (only 3-node triangles)", reader.line());
        if (tok.size() != static_cast<std::size_t>(3 + ntags + 3)) throw ParseError("malformed triangle record", reader.line());
        std::array<int, 3> tri{};
        for (int k = 0; k < 3; ++k) {
          const auto& t = tok[static_cast<std::size_t>(3 + ntags + k)];
          const auto it = node_index.find(parse_long(t, reader.line()));
          if (it == node_index.end()) throw ParseError("element references unknown node " + t, reader.line());
          tri[static_cast<std::size_t>(k)] = it->second;
        }
        triangles.push_back(tri);
      }
      have_elements = true;
    } else {
      // Unknown sections ($PhysicalNames, $NodeData, ...) are skipped.
    }

    const std::string end = trim(reader.expect(terminator.c_str()));
    if (name != "MeshFormat" && name != "Nodes" && name != "Elements") {
      std::string skip = end;
      while (skip != terminator) skip = trim(reader.expect(terminator.c_str()));
    } else if (end != terminator) {
      throw ParseError("expected " + terminator + ", got '" + end + "'", reader.line());
    }
  }

  if (!have_format) throw ParseError("missing $MeshFormat section", reader.line());
  if (!have_elements || triangles.empty()) throw ParseError("no triangular elements", reader.line());
  try {
    return build_triangles(std::move(nodes), triangles);
  } catch (const ConfigError& e) {
    throw ParseError(e.what(), 0);
  }
}

Mesh load_gmsh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file " + path.string());
  return parse_gmsh(in);
}

}  // namespace thinc
