#include "elm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace elm {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_number(std::string_view text, double& out) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size() && std::isfinite(out);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

// Splits into lines without the trailing newline characters.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::size_t parse_count(std::string_view text, std::string_view what) {
  std::size_t v = 0;
  text = trim(text);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw DataError("model file: bad " + std::string(what) + " '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

Matrix parse_csv_columns(std::string_view text, bool skip_header, std::string_view source) {
  auto lines = split_lines(text);
  std::size_t first = skip_header && !lines.empty() ? 1 : 0;
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  for (std::size_t i = first; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    auto cells = split(lines[i], ',');
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_number(cells[c], row[c])) {
        throw DataError(std::string(source) + ":" + std::to_string(i + 1) + ": non-numeric cell '" +
                        std::string(trim(cells[c])) + "'");
      }
    }
    if (rows.empty()) {
      width = row.size();
    } else if (row.size() != width) {
      throw DataError(std::string(source) + ":" + std::to_string(i + 1) + ": expected " +
                      std::to_string(width) + " columns, found " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(std::string(source) + ": no data rows");
  Matrix out(width, rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (std::size_t c = 0; c < width; ++c) out(c, k) = rows[k][c];
  return out;
}

Matrix load_csv_columns(const std::filesystem::path& path, bool skip_header) {
  return parse_csv_columns(read_file(path), skip_header, path.string());
}

void save_csv_columns(const std::filesystem::path& path, const Matrix& columns) {
  std::string text;
  for (std::size_t k = 0; k < columns.cols(); ++k) {
    for (std::size_t c = 0; c < columns.rows(); ++c) {
      if (c) text += ',';
      text += format_double(columns(c, k));
    }
    text += '\n';
  }
  write_file(path, text);
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw DataError("format_double: conversion failed");
  return std::string(buf, ptr);
}

ModelFile model_file_from_session(const Session& s) {
  ModelFile f;
  f.model = s.model;
  f.k0sq = s.k0sq();
  f.variant = s.variant;
  if (const auto* q = std::get_if<QState>(&s.engine)) {
    f.factors = EngineFactors{q->q};
  } else {
    f.factors = EngineFactors{std::get<LdlState>(s.engine).factors};
  }
  return f;
}

namespace {

void write_section(std::string& out, std::string_view name, const Matrix& m) {
  out += '\n';
  out += name;
  out += ' ' + std::to_string(m.rows()) + ' ' + std::to_string(m.cols()) + '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out += ' ';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
}

struct Section {
  std::string name;
  Matrix values;
};

}  // namespace

std::string serialize_model(const ModelFile& file, bool light) {
  const ElmModel& m = file.model;
  if (!m.trained()) throw StateError("serialize_model: model has no output weights");
  const bool full = !light && file.factors.has_value();
  std::string out = "ELMV1\n";
  out += "activation " + std::string(to_string(m.activation)) + '\n';
  out += "l " + std::to_string(m.hidden()) + '\n';
  out += "N " + std::to_string(m.inputs()) + '\n';
  out += "M " + std::to_string(m.output_weights.rows()) + '\n';
  out += "k0sq " + format_double(file.k0sq) + '\n';
  out += "variant " + std::string(to_string(file.variant)) + '\n';
  out += std::string("state ") + (full ? "full" : "light") + '\n';
  if (file.x_path) out += "x_path " + *file.x_path + '\n';
  if (file.y_path) out += "y_path " + *file.y_path + '\n';
  if (file.x_path || file.y_path) out += std::string("header ") + (file.header ? "1" : "0") + '\n';

  write_section(out, "A", m.input_weights);
  write_section(out, "d", Matrix::column(m.biases));
  write_section(out, "W", m.output_weights);
  if (full) {
    if (const auto* q = std::get_if<Matrix>(&*file.factors)) {
      if (file.variant != Variant::q) throw StateError("serialize_model: Q stored for ldl variant");
      write_section(out, "Q", *q);
    } else {
      if (file.variant != Variant::ldl) throw StateError("serialize_model: LDL stored for q variant");
      const auto& f = std::get<InverseLdl>(*file.factors);
      write_section(out, "L", f.unit_upper);
      write_section(out, "D", Matrix::column(f.diag));
    }
  }
  if (m.scaler) {
    write_section(out, "xmin", Matrix::column(m.scaler->lo));
    write_section(out, "xmax", Matrix::column(m.scaler->hi));
  }
  return out;
}

ModelFile parse_model(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "ELMV1") throw DataError("model file: missing ELMV1 magic");

  ModelFile file;
  std::size_t l = 0, n = 0, m = 0;
  bool full = false, have_l = false, have_n = false, have_m = false;
  std::size_t i = 1;
  for (; i < lines.size() && !lines[i].empty(); ++i) {
    const std::string_view line = lines[i];
    const std::size_t sp = line.find(' ');
    if (sp == std::string_view::npos) throw DataError("model file: bad header line '" + std::string(line) + "'");
    const std::string_view key = line.substr(0, sp);
    const std::string_view value = line.substr(sp + 1);
    if (key == "activation") {
      file.model.activation = parse_activation(value);
    } else if (key == "l") {
      l = parse_count(value, "l");
      have_l = true;
    } else if (key == "N") {
      n = parse_count(value, "N");
      have_n = true;
    } else if (key == "M") {
      m = parse_count(value, "M");
      have_m = true;
    } else if (key == "k0sq") {
      if (!parse_number(value, file.k0sq) || file.k0sq < 0.0) throw DataError("model file: bad k0sq");
    } else if (key == "variant") {
      file.variant = parse_variant(value);
    } else if (key == "state") {
      if (value != "full" && value != "light") throw DataError("model file: bad state");
      full = value == "full";
    } else if (key == "x_path") {
      file.x_path = std::string(value);
    } else if (key == "y_path") {
      file.y_path = std::string(value);
    } else if (key == "header") {
      file.header = value == "1";
    } else {
      throw DataError("model file: unknown header key '" + std::string(key) + "'");
    }
  }
  if (!have_l || !have_n || !have_m) throw DataError("model file: header lacks l, N or M");

  std::vector<Section> sections;
  while (i < lines.size()) {
    if (lines[i].empty()) {
      ++i;
      continue;
    }
    const auto head = split(lines[i], ' ');
    if (head.size() != 3) throw DataError("model file: bad section header '" + std::string(lines[i]) + "'");
    const std::size_t rows = parse_count(head[1], "rows");
    const std::size_t cols = parse_count(head[2], "cols");
    Matrix values(rows, cols);
    ++i;
    for (std::size_t r = 0; r < rows; ++r, ++i) {
      if (i >= lines.size()) throw DataError("model file: section " + std::string(head[0]) + " truncated");
      const auto cells = cols == 0 ? std::vector<std::string_view>{} : split(lines[i], ' ');
      if (cells.size() != cols) {
        throw DataError("model file: section " + std::string(head[0]) + " row " +
                        std::to_string(r) + " has " + std::to_string(cells.size()) +
                        " values, expected " + std::to_string(cols));
      }
      for (std::size_t c = 0; c < cols; ++c)
        if (!parse_number(cells[c], values(r, c))) {
          throw DataError("model file: bad number in section " + std::string(head[0]));
        }
    }
    sections.push_back({std::string(head[0]), std::move(values)});
  }

  auto take = [&](std::string_view name, std::size_t rows, std::size_t cols) -> std::optional<Matrix> {
    for (auto& s : sections) {
      if (s.name != name) continue;
      if (s.values.rows() != rows || s.values.cols() != cols) {
        throw DataError("model file: section " + s.name + " is " + std::to_string(s.values.rows()) +
                        "x" + std::to_string(s.values.cols()) + ", header implies " +
                        std::to_string(rows) + "x" + std::to_string(cols));
      }
      return std::move(s.values);
    }
    return std::nullopt;
  };
  auto require = [&](std::string_view name, std::size_t rows, std::size_t cols) {
    auto v = take(name, rows, cols);
    if (!v) throw DataError("model file: missing section " + std::string(name));
    return std::move(*v);
  };

  file.model.input_weights = require("A", l, n);
  file.model.biases = require("d", l, 1).data();
  file.model.output_weights = require("W", m, l);
  if (full) {
    if (file.variant == Variant::q) {
      file.factors = EngineFactors{require("Q", l, l)};
    } else {
      InverseLdl f{require("L", l, l), require("D", l, 1).data()};
      file.factors = EngineFactors{std::move(f)};
    }
  }
  auto lo = take("xmin", n, 1);
  auto hi = take("xmax", n, 1);
  if (lo.has_value() != hi.has_value()) throw DataError("model file: xmin/xmax must appear together");
  if (lo) file.model.scaler = MinMaxScaler{lo->data(), hi->data()};
  return file;
}

void save_model(const std::filesystem::path& path, const ModelFile& file, bool light) {
  write_file(path, serialize_model(file, light));
}

ModelFile load_model(const std::filesystem::path& path) {
  return parse_model(read_file(path));
}

}  // namespace elm
