#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vortexlab/field.hpp"
#include "vortexlab/particle_system.hpp"

namespace vlab {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// %.17g, with inf / -inf / nan spelled out.
std::string format_double(double v);
double parse_double(const std::string& text);

std::string read_file(const std::filesystem::path& path);
/// Writes to a temporary sibling, then renames over the target.
void write_file(const std::filesystem::path& path, const std::string& content);

struct SnapshotHeader {
  std::string kind = "particle";  // particle | pde
  double time = 0.0;
  int n = 0;
  int grid = 0;
  double epsilon = 0.0;
  double nu = 0.0;
  double speed_bound = 0.0;
  std::uint64_t seed = 0;
};

/// Header line "# snapshot kind=.. time=.. n=.. G=.. eps=.. nu=.. M=.. seed=..",
/// then G lines of G values (row b = y index).
std::string format_snapshot(const SnapshotHeader& header, const ScalarField& field);
void write_snapshot(const std::filesystem::path& path, const SnapshotHeader& header,
                    const ScalarField& field);

struct Snapshot {
  SnapshotHeader header;
  ScalarField field;
};
Snapshot parse_snapshot(const std::string& text);
Snapshot read_snapshot(const std::filesystem::path& path);

std::string snapshot_name(int k);  // t_<k>.snap

/// Columns: index sign t_i zeta_x zeta_y w_i x y k_total.
std::string format_particles(const SimState& state);

/// RFC-4180 style CSV with LF line endings.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
std::string format_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);

}  // namespace vlab
