// Solomon-format instance parsing and CDSP instance assembly.

#ifndef CDSP_INSTANCE_H_
#define CDSP_INSTANCE_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cdsp {

using NodeId = int;
inline constexpr NodeId kDepot = 0;

// Raised for malformed instance text. line() is 1-based, 0 when the problem
// is not tied to a single line (e.g. a missing depot row).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Raised when a parsed record cannot be turned into a valid Instance.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One row of the CUSTOMER block, verbatim.
struct SiteRow {
  NodeId id = 0;
  double x = 0;
  double y = 0;
  double demand = 0;
  double ready = 0;
  double due = 0;
  double service = 0;

  friend bool operator==(const SiteRow&, const SiteRow&) = default;
};

// Result of parse_solomon. Capacity and demand are kept for fidelity only.
struct RawInstance {
  std::string title;
  int vehicle_count = 0;
  double capacity = 0;
  std::vector<SiteRow> rows;  // file order; depot guaranteed present

  friend bool operator==(const RawInstance&, const RawInstance&) = default;
};

RawInstance parse_solomon(std::istream& in);
RawInstance parse_solomon(std::string_view text);
RawInstance parse_solomon_file(const std::filesystem::path& path);

// Writes the record back in Solomon layout. Numbers use the shortest
// round-trip representation, so parse_solomon(write_solomon(r)) == r.
std::string write_solomon(const RawInstance& raw);

enum class SpatialClass { kClustered, kRandom, kMixed };
enum class WindowClass { kTight, kWide };

std::string_view to_string(SpatialClass c);
std::string_view to_string(WindowClass c);
std::optional<SpatialClass> parse_spatial_class(std::string_view s);
std::optional<WindowClass> parse_window_class(std::string_view s);

// Benchmark grouping metadata. Every field is optional.
struct Setting {
  std::optional<int> size;
  std::optional<SpatialClass> spatial;
  std::optional<WindowClass> window;

  // "25/C/tight", with "?" for missing parts.
  std::string key() const;
  friend auto operator<=>(const Setting&, const Setting&) = default;
};

struct Site {
  NodeId id = 0;
  double x = 0;
  double y = 0;
  double release = 0;
  double deadline = 0;
  double service = 0;
};

// Dense (n+1)x(n+1) travel-time matrix, node 0 is the depot.
class TravelMatrix {
 public:
  TravelMatrix() = default;
  explicit TravelMatrix(std::size_t nodes)
      : nodes_(nodes), data_(nodes * nodes, 0.0) {}

  std::size_t nodes() const { return nodes_; }
  double operator()(NodeId i, NodeId j) const {
    return data_[static_cast<std::size_t>(i) * nodes_ + static_cast<std::size_t>(j)];
  }
  double& at(NodeId i, NodeId j) {
    return data_[static_cast<std::size_t>(i) * nodes_ + static_cast<std::size_t>(j)];
  }

 private:
  std::size_t nodes_ = 0;
  std::vector<double> data_;
};

enum class ServiceTimeMode { kIgnore, kFoldIntoOutgoingArcs };

struct InstanceConfig {
  // Explicit fleet size K. When unset the size-class rule applies
  // (25 -> 10, 50 -> 15, 100 -> 25) and falls back to the file's NUMBER.
  std::optional<int> fleet_size;
  // Explicit shift cap. When unset the cap equals the depot deadline.
  std::optional<double> shift_cap;
  ServiceTimeMode service_mode = ServiceTimeMode::kIgnore;
  // Round distances to this many decimals; unset keeps full precision.
  std::optional<int> rounding_decimals;
};

struct Instance {
  std::vector<Site> sites;  // depot first, then requests 1..n
  TravelMatrix travel;
  int fleet_size = 1;
  double shift_cap = 0;
  double depot_deadline = 0;
  std::string label;
  Setting setting;

  int n() const { return static_cast<int>(sites.size()) - 1; }
};

// Fleet size for the benchmark size classes, nullopt for any other size.
std::optional<int> fleet_size_for_size_class(int size);

// Euclidean travel times, optional rounding and service folding, fleet and
// shift cap rules. Throws ConstructionError if the triangle inequality fails
// on the final matrix or K < 1.
Instance build_instance(const RawInstance& raw, const InstanceConfig& cfg,
                        const Setting& setting = {}, std::string label = {});

struct TriangleViolation {
  NodeId i = 0;
  NodeId j = 0;
  NodeId k = 0;
  double slack = 0;  // c_ij + c_jk - c_ik, negative
};

// All ordered triples with c_ij + c_jk < c_ik beyond a relative tolerance.
std::vector<TriangleViolation> triangle_violations(const TravelMatrix& travel,
                                                   double tolerance = 1e-9);

struct ManifestEntry {
  std::filesystem::path path;
  Setting setting;
  std::string label;  // defaults to the file stem
};

// Reads a .json (array of {path,size,class,tw,label}) or .csv manifest with a
// header row naming the same columns. Relative paths resolve against the
// manifest's directory.
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

}  // namespace cdsp

#endif  // CDSP_INSTANCE_H_
