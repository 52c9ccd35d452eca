#include "cdsp/instance.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cdsp/text.h"
#include "json.hpp"

namespace cdsp {

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                  : what),
      line_(line) {}

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

struct Line {
  std::size_t number;
  std::vector<std::string_view> tokens;
  std::string_view text;
};

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  // Next line with at least one token, or nullopt at end of input.
  std::optional<Line> next() {
    while (pos_ < text_.size()) {
      std::size_t end = text_.find('\n', pos_);
      if (end == std::string_view::npos) end = text_.size();
      std::string_view raw = text_.substr(pos_, end - pos_);
      pos_ = end + 1;
      ++line_;
      auto tokens = split_whitespace(raw);
      if (!tokens.empty()) return Line{line_, std::move(tokens), raw};
    }
    return std::nullopt;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

double number_field(const Line& line, std::size_t index) {
  auto value = parse_double(line.tokens[index]);
  if (!value) {
    throw ParseError(line.number, "non-numeric field '" +
                                      std::string(line.tokens[index]) + "'");
  }
  return *value;
}

Line expect_line(LineReader& reader, std::string_view what) {
  auto line = reader.next();
  if (!line) throw ParseError(0, "unexpected end of input, expected " + std::string(what));
  return *line;
}

}  // namespace

RawInstance parse_solomon(std::string_view text) {
  LineReader reader(text);
  RawInstance raw;

  Line title = expect_line(reader, "title line");
  raw.title = std::string(trim(title.text));

  Line vehicle = expect_line(reader, "VEHICLE section");
  if (upper(vehicle.tokens[0]) != "VEHICLE") {
    throw ParseError(vehicle.number, "malformed header: expected 'VEHICLE'");
  }
  Line vehicle_header = expect_line(reader, "NUMBER/CAPACITY header");
  {
    const std::string h = upper(vehicle_header.text);
    if (h.find("NUMBER") == std::string::npos || h.find("CAPACITY") == std::string::npos) {
      throw ParseError(vehicle_header.number,
                       "malformed header: expected 'NUMBER CAPACITY'");
    }
  }
  Line vehicle_values = expect_line(reader, "vehicle number and capacity");
  if (vehicle_values.tokens.size() != 2) {
    throw ParseError(vehicle_values.number, "expected 2 fields (NUMBER CAPACITY)");
  }
  const double number = number_field(vehicle_values, 0);
  raw.capacity = number_field(vehicle_values, 1);
  if (number != std::floor(number) || number < 0) {
    throw ParseError(vehicle_values.number, "vehicle NUMBER must be a non-negative integer");
  }
  raw.vehicle_count = static_cast<int>(number);

  Line customer = expect_line(reader, "CUSTOMER section");
  if (upper(customer.tokens[0]) != "CUSTOMER") {
    throw ParseError(customer.number, "malformed header: expected 'CUSTOMER'");
  }
  Line columns = expect_line(reader, "customer column header");
  if (upper(columns.text).find("CUST") == std::string::npos) {
    throw ParseError(columns.number, "malformed header: expected customer column names");
  }

  std::set<NodeId> seen;
  while (auto line = reader.next()) {
    if (line->tokens.size() != 7) {
      throw ParseError(line->number, "expected 7 fields, found " +
                                         std::to_string(line->tokens.size()));
    }
    SiteRow row;
    const double id = number_field(*line, 0);
    if (id != std::floor(id) || id < 0) {
      throw ParseError(line->number, "site id must be a non-negative integer");
    }
    row.id = static_cast<NodeId>(id);
    row.x = number_field(*line, 1);
    row.y = number_field(*line, 2);
    row.demand = number_field(*line, 3);
    row.ready = number_field(*line, 4);
    row.due = number_field(*line, 5);
    row.service = number_field(*line, 6);
    if (!seen.insert(row.id).second) {
      throw ParseError(line->number, "duplicate site id " + std::to_string(row.id));
    }
    raw.rows.push_back(row);
  }
  if (!seen.contains(kDepot)) throw ParseError(0, "no depot (id 0)");
  return raw;
}

RawInstance parse_solomon(std::istream& in) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_solomon(std::string_view(buffer.str()));
}

RawInstance parse_solomon_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file " + path.string());
  return parse_solomon(in);
}

std::string write_solomon(const RawInstance& raw) {
  std::ostringstream out;
  out << raw.title << "\n\nVEHICLE\nNUMBER     CAPACITY\n"
      << raw.vehicle_count << ' ' << format_number(raw.capacity) << "\n\n"
      << "CUSTOMER\n"
      << "CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE   TIME\n\n";
  for (const SiteRow& r : raw.rows) {
    out << r.id << ' ' << format_number(r.x) << ' ' << format_number(r.y) << ' '
        << format_number(r.demand) << ' ' << format_number(r.ready) << ' '
        << format_number(r.due) << ' ' << format_number(r.service) << '\n';
  }
  return out.str();
}

std::string_view to_string(SpatialClass c) {
  switch (c) {
    case SpatialClass::kClustered: return "C";
    case SpatialClass::kRandom: return "R";
    case SpatialClass::kMixed: return "RC";
  }
  return "?";
}

std::string_view to_string(WindowClass c) {
  return c == WindowClass::kTight ? "tight" : "wide";
}

std::optional<SpatialClass> parse_spatial_class(std::string_view s) {
  const std::string u = upper(trim(s));
  if (u == "C") return SpatialClass::kClustered;
  if (u == "R") return SpatialClass::kRandom;
  if (u == "RC") return SpatialClass::kMixed;
  return std::nullopt;
}

std::optional<WindowClass> parse_window_class(std::string_view s) {
  const std::string u = upper(trim(s));
  if (u == "TIGHT") return WindowClass::kTight;
  if (u == "WIDE") return WindowClass::kWide;
  return std::nullopt;
}

std::string Setting::key() const {
  std::string k = size ? std::to_string(*size) : "?";
  k += '/';
  k += spatial ? to_string(*spatial) : "?";
  k += '/';
  k += window ? to_string(*window) : "?";
  return k;
}

std::optional<int> fleet_size_for_size_class(int size) {
  switch (size) {
    case 25: return 10;
    case 50: return 15;
    case 100: return 25;
    default: return std::nullopt;
  }
}

std::vector<TriangleViolation> triangle_violations(const TravelMatrix& travel,
                                                   double tolerance) {
  std::vector<TriangleViolation> violations;
  const auto nodes = static_cast<NodeId>(travel.nodes());
  for (NodeId i = 0; i < nodes; ++i) {
    for (NodeId j = 0; j < nodes; ++j) {
      if (j == i) continue;
      for (NodeId k = 0; k < nodes; ++k) {
        if (k == i || k == j) continue;
        const double direct = travel(i, k);
        const double slack = travel(i, j) + travel(j, k) - direct;
        if (slack < -tolerance * std::max(1.0, direct)) {
          violations.push_back({i, j, k, slack});
        }
      }
    }
  }
  return violations;
}

Instance build_instance(const RawInstance& raw, const InstanceConfig& cfg,
                        const Setting& setting, std::string label) {
  if (cfg.rounding_decimals && *cfg.rounding_decimals < 0) {
    throw ConstructionError("rounding precision must be >= 0");
  }
  Instance inst;
  inst.setting = setting;
  inst.label = label.empty() ? raw.title : std::move(label);

  // Depot first, then requests in ascending id order; ids must be 0..n.
  std::vector<SiteRow> rows = raw.rows;
  std::sort(rows.begin(), rows.end(),
            [](const SiteRow& a, const SiteRow& b) { return a.id < b.id; });
  if (rows.empty() || rows.front().id != kDepot) {
    throw ConstructionError("no depot (id 0)");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].id != static_cast<NodeId>(i)) {
      throw ConstructionError("site ids must be contiguous 0..n; missing id " +
                              std::to_string(i));
    }
    const SiteRow& r = rows[i];
    if (r.ready > r.due) {
      throw ConstructionError("site " + std::to_string(r.id) +
                              ": release time exceeds deadline");
    }
    if (r.ready < 0 || r.service < 0) {
      throw ConstructionError("site " + std::to_string(r.id) +
                              ": negative release or service time");
    }
    inst.sites.push_back({r.id, r.x, r.y, r.ready, r.due, r.service});
  }
  if (inst.sites.front().release != 0) {
    throw ConstructionError("depot release time must be 0");
  }
  inst.sites.front().service = 0;
  inst.depot_deadline = inst.sites.front().deadline;
  if (inst.depot_deadline <= 0) throw ConstructionError("depot deadline must be positive");

  const std::size_t nodes = inst.sites.size();
  inst.travel = TravelMatrix(nodes);
  const double scale =
      cfg.rounding_decimals ? std::pow(10.0, *cfg.rounding_decimals) : 1.0;
  for (std::size_t i = 0; i < nodes; ++i) {
    for (std::size_t j = 0; j < nodes; ++j) {
      if (i == j) continue;
      const Site& a = inst.sites[i];
      const Site& b = inst.sites[j];
      double d = std::hypot(a.x - b.x, a.y - b.y);
      if (cfg.rounding_decimals) d = std::round(d * scale) / scale;
      if (cfg.service_mode == ServiceTimeMode::kFoldIntoOutgoingArcs) d += a.service;
      inst.travel.at(static_cast<NodeId>(i), static_cast<NodeId>(j)) = d;
    }
  }
  if (auto v = triangle_violations(inst.travel); !v.empty()) {
    throw ConstructionError(
        "triangle inequality violated at (" + std::to_string(v.front().i) + "," +
        std::to_string(v.front().j) + "," + std::to_string(v.front().k) +
        ") with slack " + format_number(v.front().slack) + " (" +
        std::to_string(v.size()) + " violations)");
  }

  if (cfg.fleet_size) {
    inst.fleet_size = *cfg.fleet_size;
  } else {
    const int size_key = setting.size.value_or(inst.n());
    inst.fleet_size = fleet_size_for_size_class(size_key).value_or(raw.vehicle_count);
  }
  if (inst.fleet_size < 1) throw ConstructionError("fleet size K must be >= 1");

  inst.shift_cap = cfg.shift_cap.value_or(inst.depot_deadline);
  if (inst.shift_cap <= 0) throw ConstructionError("shift cap must be positive");
  return inst;
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest " + path.string());
  const std::filesystem::path base = path.parent_path();

  auto make_entry = [&](std::string_view file, std::string_view size,
                        std::string_view spatial, std::string_view window,
                        std::string_view label, std::size_t line) {
    ManifestEntry e;
    std::filesystem::path p{std::string(trim(file))};
    if (p.empty()) throw ParseError(line, "manifest entry without path");
    e.path = p.is_relative() ? base / p : p;
    if (!trim(size).empty()) {
      auto v = parse_double(trim(size));
      if (!v || *v != std::floor(*v)) throw ParseError(line, "bad size '" + std::string(size) + "'");
      e.setting.size = static_cast<int>(*v);
    }
    if (!trim(spatial).empty()) {
      e.setting.spatial = parse_spatial_class(spatial);
      if (!e.setting.spatial) throw ParseError(line, "bad class '" + std::string(spatial) + "'");
    }
    if (!trim(window).empty()) {
      e.setting.window = parse_window_class(window);
      if (!e.setting.window) throw ParseError(line, "bad tw '" + std::string(window) + "'");
    }
    e.label = trim(label).empty() ? e.path.stem().string() : std::string(trim(label));
    return e;
  };

  std::vector<ManifestEntry> entries;
  if (path.extension() == ".json") {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(0, std::string("manifest JSON: ") + ex.what());
    }
    if (!doc.is_array()) throw ParseError(0, "manifest JSON must be an array");
    std::size_t index = 0;
    for (const auto& item : doc) {
      ++index;
      auto field = [&](const char* key) -> std::string {
        if (!item.contains(key) || item[key].is_null()) return {};
        const auto& v = item[key];
        return v.is_string() ? v.get<std::string>() : v.dump();
      };
      entries.push_back(make_entry(field("path"), field("size"), field("class"),
                                   field("tw"), field("label"), index));
    }
    return entries;
  }

  std::string line;
  std::size_t number = 0;
  std::map<std::string, std::size_t> column;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty() || trim(line).front() == '#') continue;
    auto fields = split_csv(line);
    if (column.empty()) {
      for (std::size_t i = 0; i < fields.size(); ++i) column[std::string(trim(fields[i]))] = i;
      if (!column.contains("path")) throw ParseError(number, "manifest header lacks 'path'");
      continue;
    }
    auto get = [&](const char* key) -> std::string_view {
      auto it = column.find(key);
      if (it == column.end() || it->second >= fields.size()) return {};
      return fields[it->second];
    };
    entries.push_back(
        make_entry(get("path"), get("size"), get("class"), get("tw"), get("label"), number));
  }
  return entries;
}

}  // namespace cdsp
