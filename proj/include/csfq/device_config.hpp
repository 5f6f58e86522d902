#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "csfq/circuit.hpp"
#include "csfq/photon_noise.hpp"
#include "csfq/rb.hpp"

namespace csfq {

struct DeviceConfig {
  CircuitParams circuit;
  std::optional<CavityParams> cavity;
  std::optional<PhotonNoiseParams> photon;  // n_th filled in by the caller
  std::optional<PulseSpec> pulse;
};

// Key/value device file with unit-annotated entries ("c13 = 17.91 fF").
// Frequencies convert to angular rad/s; rates stay 1/s.
DeviceConfig load_device_config(const std::string& path);

struct RunManifest {
  std::string subcommand;
  std::string version = "0.1.0";
  std::vector<std::pair<std::string, std::string>> params;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> timestamp;  // emitted only when stamping is on
};

struct Table {
  std::vector<std::string> columns;
  Eigen::MatrixXd data;
};

void write_table(std::ostream& os, const RunManifest& manifest,
                 const Table& table);
void write_table_file(const std::string& path, const RunManifest& manifest,
                      const Table& table);

// Reads a table written by write_table; '#' header lines are returned raw.
struct ReadTable {
  std::vector<std::string> header;
  std::vector<std::string> columns;
  Eigen::MatrixXd data;
};
ReadTable read_table_file(const std::string& path);

// Generic whitespace/comma numeric table (plain columns, '#' comments,
// optional non-numeric header line skipped).
Eigen::MatrixXd read_numeric_table(const std::string& path, int min_cols);

// Spectroscopy CSV: header flux,tag,ghz[,weight].
struct SpectroCsv {
  std::vector<double> flux;
  std::vector<std::string> tag;
  std::vector<double> ghz;
  std::vector<double> weight;
};
SpectroCsv read_spectroscopy_csv(const std::string& path);

// Small key = value [unit] file (rates, design targets).
std::map<std::string, std::pair<double, std::string>> read_keyvalue_file(
    const std::string& path);

}  // namespace csfq
