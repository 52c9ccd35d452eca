#include "cdsp/model_io.h"

#include <cctype>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <vector>

#include "cdsp/text.h"

namespace cdsp {

namespace {

constexpr int kTermsPerLine = 8;

std::string model_name(const MipModel& m) {
  std::string name = m.label().empty() ? "cdsp" : m.label();
  for (char& c : name) {
    if (std::isspace(static_cast<unsigned char>(c))) c = '_';
  }
  return name;
}

void write_terms(std::ostream& out, const MipModel& m,
                 const std::vector<std::pair<int, double>>& terms) {
  const auto& vars = m.variables();
  if (terms.empty()) {
    out << " 0 " << vars.front().name();
    return;
  }
  for (std::size_t k = 0; k < terms.size(); ++k) {
    if (k > 0 && k % kTermsPerLine == 0) out << "\n   ";
    const auto& [col, coef] = terms[k];
    const std::string name = vars[static_cast<std::size_t>(col)].name();
    const double magnitude = std::abs(coef);
    out << ' ' << (coef < 0 ? "-" : (k == 0 ? "" : "+"));
    if (coef < 0 || k > 0) out << ' ';
    if (magnitude != 1.0) out << format_number(magnitude) << ' ';
    out << name;
  }
}

std::string_view lp_sense(Sense s) {
  switch (s) {
    case Sense::kLessEqual: return "<=";
    case Sense::kEqual: return "=";
    case Sense::kGreaterEqual: return ">=";
  }
  return "=";
}

char mps_sense(Sense s) {
  switch (s) {
    case Sense::kLessEqual: return 'L';
    case Sense::kEqual: return 'E';
    case Sense::kGreaterEqual: return 'G';
  }
  return 'E';
}

}  // namespace

std::optional<ModelFormat> parse_model_format(std::string_view s) {
  if (s == "lp" || s == "LP") return ModelFormat::kLp;
  if (s == "mps" || s == "MPS") return ModelFormat::kMps;
  return std::nullopt;
}

std::string_view file_extension(ModelFormat format) {
  return format == ModelFormat::kLp ? ".lp" : ".mps";
}

void write_lp(const MipModel& m, std::ostream& out) {
  out << "\\ " << model_name(m) << ": n=" << m.num_requests() << " K=" << m.fleet_size() << "\n";
  out << "Minimize\n obj:";
  write_terms(out, m, m.objective());
  out << "\nSubject To\n";
  for (const LinearConstraint& c : m.constraints()) {
    out << ' ' << c.name << ':';
    write_terms(out, m, c.terms);
    out << ' ' << lp_sense(c.sense) << ' ' << format_number(c.rhs) << '\n';
  }
  out << "Bounds\n";
  for (const VariableRef& v : m.variables()) {
    const std::string name = v.name();
    if (v.kind == VarKind::kBinary) {
      if (v.lower == v.upper) out << ' ' << name << " = " << format_number(v.lower) << '\n';
      continue;
    }
    if (std::isinf(v.upper)) {
      out << ' ' << name << " >= " << format_number(v.lower) << '\n';
    } else {
      out << ' ' << format_number(v.lower) << " <= " << name << " <= " << format_number(v.upper)
          << '\n';
    }
  }
  out << "Binaries\n";
  int on_line = 0;
  for (const VariableRef& v : m.variables()) {
    if (v.kind != VarKind::kBinary) continue;
    out << ' ' << v.name();
    if (++on_line == 10) {
      out << '\n';
      on_line = 0;
    }
  }
  if (on_line) out << '\n';
  out << "End\n";
}

void write_mps(const MipModel& m, std::ostream& out) {
  const auto& rows = m.constraints();
  const auto& vars = m.variables();
  out << "NAME " << model_name(m) << "\n";
  out << "ROWS\n N obj\n";
  for (const LinearConstraint& c : rows) out << ' ' << mps_sense(c.sense) << ' ' << c.name << '\n';

  // Column-major view, rows in model order.
  std::vector<std::vector<std::pair<std::size_t, double>>> by_column(vars.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& [col, coef] : rows[r].terms) {
      by_column[static_cast<std::size_t>(col)].emplace_back(r, coef);
    }
  }
  std::vector<double> cost(vars.size(), 0.0);
  for (const auto& [col, coef] : m.objective()) cost[static_cast<std::size_t>(col)] = coef;

  out << "COLUMNS\n";
  bool in_integer_block = false;
  for (std::size_t c = 0; c < vars.size(); ++c) {
    const bool integer = vars[c].kind == VarKind::kBinary;
    if (integer != in_integer_block) {
      out << "    MARKER 'MARKER' " << (integer ? "'INTORG'" : "'INTEND'") << '\n';
      in_integer_block = integer;
    }
    const std::string name = vars[c].name();
    bool wrote = false;
    if (cost[c] != 0.0) {
      out << "    " << name << " obj " << format_number(cost[c]) << '\n';
      wrote = true;
    }
    for (const auto& [r, coef] : by_column[c]) {
      out << "    " << name << ' ' << rows[r].name << ' ' << format_number(coef) << '\n';
      wrote = true;
    }
    if (!wrote) out << "    " << name << " obj 0\n";
  }
  if (in_integer_block) out << "    MARKER 'MARKER' 'INTEND'\n";

  out << "RHS\n";
  for (const LinearConstraint& c : rows) {
    if (c.rhs != 0.0) out << "    RHS " << c.name << ' ' << format_number(c.rhs) << '\n';
  }

  out << "BOUNDS\n";
  for (const VariableRef& v : vars) {
    const std::string name = v.name();
    if (v.lower == v.upper) {
      out << " FX BND " << name << ' ' << format_number(v.lower) << '\n';
      continue;
    }
    if (v.kind == VarKind::kBinary || v.lower != 0.0) {
      out << " LO BND " << name << ' ' << format_number(v.lower) << '\n';
    }
    if (!std::isinf(v.upper)) out << " UP BND " << name << ' ' << format_number(v.upper) << '\n';
  }
  out << "ENDATA\n";
}

void emit_model(const MipModel& m, ModelFormat format, std::ostream& out) {
  if (format == ModelFormat::kLp) {
    write_lp(m, out);
  } else {
    write_mps(m, out);
  }
}

std::string emit_model(const MipModel& m, ModelFormat format) {
  std::ostringstream out;
  emit_model(m, format, out);
  return out.str();
}

void emit_model_file(const MipModel& m, ModelFormat format, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file " + path.string());
  emit_model(m, format, out);
  out.flush();
  if (!out) throw std::runtime_error("write failed for model file " + path.string());
}

}  // namespace cdsp
