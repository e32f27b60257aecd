#include "vortexlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace vlab {

namespace fs = std::filesystem;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw FormatError("not a number: '" + text + "'");
  }
  if (used != text.size()) throw FormatError("not a number: '" + text + "'");
  return v;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + tmp.string());
    out << content;
    if (!out) throw FormatError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string format_snapshot(const SnapshotHeader& h, const ScalarField& field) {
  std::string out = "# snapshot kind=" + h.kind + " time=" + format_double(h.time) +
                    " n=" + std::to_string(h.n) + " G=" + std::to_string(h.grid) +
                    " eps=" + format_double(h.epsilon) + " nu=" + format_double(h.nu) +
                    " M=" + format_double(h.speed_bound) + " seed=" + std::to_string(h.seed) +
                    "\n";
  const int g = field.grid.size();
  for (int b = 0; b < g; ++b) {
    for (int a = 0; a < g; ++a) {
      if (a) out += ' ';
      out += format_double(field.at(a, b));
    }
    out += '\n';
  }
  return out;
}

void write_snapshot(const fs::path& path, const SnapshotHeader& header, const ScalarField& field) {
  write_file(path, format_snapshot(header, field));
}

Snapshot parse_snapshot(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# snapshot", 0) != 0) {
    throw FormatError("snapshot: missing header line");
  }
  std::map<std::string, std::string> kv;
  std::istringstream hs(line.substr(10));
  std::string tok;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw FormatError("snapshot: bad header token '" + tok + "'");
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  auto need = [&](const char* k) -> const std::string& {
    auto it = kv.find(k);
    if (it == kv.end()) throw FormatError(std::string("snapshot: header lacks ") + k);
    return it->second;
  };
  Snapshot s;
  s.header.kind = need("kind");
  s.header.time = parse_double(need("time"));
  s.header.n = std::stoi(need("n"));
  s.header.grid = std::stoi(need("G"));
  s.header.epsilon = parse_double(need("eps"));
  s.header.nu = parse_double(need("nu"));
  s.header.speed_bound = parse_double(need("M"));
  s.header.seed = std::stoull(need("seed"));
  const int g = s.header.grid;
  s.field = ScalarField(NodeGrid(g));
  for (int b = 0; b < g; ++b) {
    if (!std::getline(in, line)) throw FormatError("snapshot: truncated at row " + std::to_string(b));
    std::istringstream row(line);
    for (int a = 0; a < g; ++a) {
      if (!(row >> tok)) {
        throw FormatError("snapshot: row " + std::to_string(b) + " has too few values");
      }
      s.field.at(a, b) = parse_double(tok);
    }
    if (row >> tok) throw FormatError("snapshot: row " + std::to_string(b) + " has extra values");
  }
  return s;
}

Snapshot read_snapshot(const fs::path& path) {
  try {
    return parse_snapshot(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string snapshot_name(int k) { return "t_" + std::to_string(k) + ".snap"; }

std::string format_particles(const SimState& state) {
  const auto& p = state.particles;
  std::string out = "# index sign t_i zeta_x zeta_y w_i x y k_total\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    out += std::to_string(i) + ' ' + std::to_string(p.sign[i]) + ' ' +
           format_double(p.birth_time[i]) + ' ' + format_double(p.zeta_x[i]) + ' ' +
           format_double(p.zeta_y[i]) + ' ' + format_double(p.weight[i]) + ' ' +
           format_double(p.x[i]) + ' ' + format_double(p.y[i]) + ' ' +
           format_double(p.reflection_total[i]) + '\n';
  }
  return out;
}

namespace {

std::string csv_field(const std::string& f) {
  if (f.find_first_of(",\"\n\r") == std::string::npos) return f;
  std::string q = "\"";
  for (char c : f) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

void append_row(std::string& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ',';
    out += csv_field(row[i]);
  }
  out += '\n';
}

}  // namespace

std::string format_csv(const CsvTable& table) {
  std::string out;
  append_row(out, table.header);
  for (const auto& row : table.rows) append_row(out, row);
  return out;
}

CsvTable parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  std::size_t line = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(row));
      row.clear();
      any = false;
      ++line;
    } else if (c != '\r') {
      field += c;
      any = true;
    }
  }
  if (quoted) throw FormatError("csv: unterminated quote at line " + std::to_string(line));
  if (any) {
    row.push_back(std::move(field));
    records.push_back(std::move(row));
  }
  if (records.empty()) throw FormatError("csv: no header row");
  CsvTable table;
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      throw FormatError("csv: line " + std::to_string(r + 1) + " has " +
                        std::to_string(records[r].size()) + " fields, expected " +
                        std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

}  // namespace vlab
