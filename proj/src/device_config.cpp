#include "csfq/device_config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace csfq {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& s) {
  const auto h = s.find('#');
  return h == std::string::npos ? s : s.substr(0, h);
}

enum class Kind { capacitance, frequency, rate, time, dimensionless,
                  current_density, area, cap_density, current };

double unit_factor(Kind kind, const std::string& unit, int line) {
  auto fail = [&]() -> double {
    throw ParseError("line " + std::to_string(line) + ": unit '" + unit +
                     "' not valid here");
  };
  switch (kind) {
    case Kind::capacitance:
      if (unit == "aF") return 1e-18;
      if (unit == "fF") return 1e-15;
      if (unit == "pF") return 1e-12;
      if (unit == "F") return 1.0;
      return fail();
    case Kind::frequency:  // stored angular
      if (unit == "Hz") return 2.0 * pi;
      if (unit == "kHz") return 2.0 * pi * 1e3;
      if (unit == "MHz") return 2.0 * pi * 1e6;
      if (unit == "GHz") return 2.0 * pi * 1e9;
      if (unit == "rad/s") return 1.0;
      return fail();
    case Kind::rate:  // plain 1/s
      if (unit == "Hz" || unit == "1/s") return 1.0;
      if (unit == "kHz") return 1e3;
      if (unit == "MHz") return 1e6;
      return fail();
    case Kind::time:
      if (unit == "ps") return 1e-12;
      if (unit == "ns") return 1e-9;
      if (unit == "us") return 1e-6;
      if (unit == "ms") return 1e-3;
      if (unit == "s") return 1.0;
      return fail();
    case Kind::dimensionless:
      if (unit.empty()) return 1.0;
      return fail();
    case Kind::current_density:
      if (unit == "uA/um^2") return 1e6;
      if (unit == "A/m^2") return 1.0;
      return fail();
    case Kind::area:
      if (unit == "um^2") return 1e-12;
      if (unit == "nm^2") return 1e-18;
      if (unit == "m^2") return 1.0;
      return fail();
    case Kind::cap_density:
      if (unit == "fF/um^2") return 1e-3;
      if (unit == "F/m^2") return 1.0;
      return fail();
    case Kind::current:
      if (unit == "nA") return 1e-9;
      if (unit == "uA") return 1e-6;
      if (unit == "A") return 1.0;
      return fail();
  }
  return fail();
}

struct RawEntry {
  double value = 0;
  std::string unit;
  int line = 0;
  bool used = false;
};

using Section = std::map<std::string, RawEntry>;

std::map<std::string, Section> parse_sections(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::map<std::string, Section> sections;
  std::string current = "";
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw ParseError("line " + std::to_string(line) + ": malformed section");
      current = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(line) + ": expected key = value");
    const std::string key = trim(s.substr(0, eq));
    std::istringstream vs(trim(s.substr(eq + 1)));
    RawEntry e;
    e.line = line;
    if (!(vs >> e.value))
      throw ParseError("line " + std::to_string(line) + ": field '" + key +
                       "' has no numeric value");
    vs >> e.unit;
    sections[current][key] = e;
  }
  return sections;
}

double take(Section& sec, const std::string& key, Kind kind,
            const std::string& section_name) {
  auto it = sec.find(key);
  if (it == sec.end())
    throw ParseError("missing field '" + key + "' in section [" +
                     section_name + "]");
  it->second.used = true;
  return it->second.value *
         unit_factor(kind, it->second.unit, it->second.line);
}

std::optional<double> take_opt(Section& sec, const std::string& key, Kind kind,
                               double fallback) {
  auto it = sec.find(key);
  if (it == sec.end()) return fallback;
  it->second.used = true;
  return it->second.value * unit_factor(kind, it->second.unit, it->second.line);
}

}  // namespace

DeviceConfig load_device_config(const std::string& path) {
  auto sections = parse_sections(path);
  DeviceConfig cfg;

  if (!sections.count("capacitance"))
    throw ParseError("missing [capacitance] section in " + path);
  Section& cap = sections["capacitance"];
  CapacitanceSet& c = cfg.circuit.caps;
  c.c13 = take(cap, "c13", Kind::capacitance, "capacitance");
  c.c21 = take(cap, "c21", Kind::capacitance, "capacitance");
  c.c32 = take(cap, "c32", Kind::capacitance, "capacitance");
  c.c01 = take(cap, "c01", Kind::capacitance, "capacitance");
  c.c02 = take(cap, "c02", Kind::capacitance, "capacitance");
  c.c03 = take(cap, "c03", Kind::capacitance, "capacitance");
  c.c1b = take(cap, "c1b", Kind::capacitance, "capacitance");
  c.c2b = take(cap, "c2b", Kind::capacitance, "capacitance");
  c.c3b = take(cap, "c3b", Kind::capacitance, "capacitance");
  c.c1d = take(cap, "c1d", Kind::capacitance, "capacitance");
  c.c2d = take(cap, "c2d", Kind::capacitance, "capacitance");
  c.c3d = take(cap, "c3d", Kind::capacitance, "capacitance");
  c.c1g = *take_opt(cap, "c1g", Kind::capacitance, 0.0);
  c.c2g = *take_opt(cap, "c2g", Kind::capacitance, 0.0);
  c.c3g = *take_opt(cap, "c3g", Kind::capacitance, 0.0);

  if (!sections.count("junction"))
    throw ParseError("missing [junction] section in " + path);
  Section& jn = sections["junction"];
  cfg.circuit.jc = take(jn, "jc", Kind::current_density, "junction");
  cfg.circuit.alpha_j = take(jn, "alpha_j", Kind::dimensionless, "junction");
  cfg.circuit.area_large = take(jn, "area_large", Kind::area, "junction");
  cfg.circuit.c_tilde = take(jn, "c_tilde", Kind::cap_density, "junction");
  cfg.circuit.validate();

  if (sections.count("cavity")) {
    Section& cv = sections["cavity"];
    CavityParams cav;
    cav.omega_r = take(cv, "omega_r", Kind::frequency, "cavity");
    cav.q_factor = take(cv, "q_factor", Kind::dimensionless, "cavity");
    cav.coupling_g = *take_opt(cv, "coupling_g", Kind::frequency, 0.0);
    cav.chi_direct = *take_opt(cv, "chi", Kind::frequency, 0.0);
    cav.validate();
    cfg.cavity = cav;
  }

  if (sections.count("photon")) {
    if (!cfg.cavity)
      throw ParseError("[photon] section requires a [cavity] section");
    Section& ph = sections["photon"];
    PhotonNoiseParams p;
    p.omega_r = cfg.cavity->omega_r;
    p.q_factor = cfg.cavity->q_factor;
    p.chi = take(ph, "chi", Kind::frequency, "photon");
    p.n_th = *take_opt(ph, "n_th", Kind::dimensionless, 0.0);
    p.validate();
    cfg.photon = p;
  }

  if (sections.count("pulse")) {
    Section& pu = sections["pulse"];
    PulseSpec ps;
    ps.drive_strength = take(pu, "drive_strength", Kind::frequency, "pulse");
    ps.t_half = take(pu, "t_half", Kind::time, "pulse");
    ps.t_full = take(pu, "t_full", Kind::time, "pulse");
    ps.t_rise = take(pu, "t_rise", Kind::time, "pulse");
    ps.t_fall = take(pu, "t_fall", Kind::time, "pulse");
    ps.gap = take(pu, "gap", Kind::time, "pulse");
    ps.validate();
    cfg.pulse = ps;
  }

  for (const auto& [name, sec] : sections)
    for (const auto& [key, entry] : sec)
      if (!entry.used)
        throw ParseError("line " + std::to_string(entry.line) +
                         ": unknown field '" + key + "' in section [" + name +
                         "]");
  return cfg;
}

void write_table(std::ostream& os, const RunManifest& manifest,
                 const Table& table) {
  os << "# csfq " << manifest.subcommand << "\n";
  os << "# version: " << manifest.version << "\n";
  if (manifest.seed) os << "# seed: " << *manifest.seed << "\n";
  for (const auto& [k, v] : manifest.params)
    os << "# param: " << k << " = " << v << "\n";
  if (manifest.timestamp) os << "# timestamp: " << *manifest.timestamp << "\n";
  os << "# columns:";
  for (const auto& c : table.columns) os << ' ' << c;
  os << "\n";
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < table.data.rows(); ++i) {
    for (Eigen::Index j = 0; j < table.data.cols(); ++j) {
      if (j) os << ' ';
      os << table.data(i, j);
    }
    os << "\n";
  }
}

void write_table_file(const std::string& path, const RunManifest& manifest,
                      const Table& table) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_table(out, manifest, table);
}

ReadTable read_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  ReadTable out;
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const std::string s = trim(line);
    if (s.empty()) continue;
    if (s.front() == '#') {
      out.header.push_back(s);
      const std::string tag = "# columns:";
      if (s.rfind(tag, 0) == 0) {
        std::istringstream cs(s.substr(tag.size()));
        std::string col;
        while (cs >> col) out.columns.push_back(col);
      }
      continue;
    }
    std::istringstream vs(s);
    std::vector<double> row;
    double v;
    while (vs >> v) row.push_back(v);
    if (!row.empty()) rows.push_back(row);
  }
  if (!rows.empty()) {
    out.data.resize(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows[0].size())
        throw ParseError(path + ": ragged rows");
      for (std::size_t j = 0; j < rows[i].size(); ++j)
        out.data(i, j) = rows[i][j];
    }
  }
  return out;
}

Eigen::MatrixXd read_numeric_table(const std::string& path, int min_cols) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(strip_comment(line));
    if (s.empty()) continue;
    for (auto& ch : s)
      if (ch == ',' || ch == '\t') ch = ' ';
    std::vector<double> row;
    bool numeric = true;
    std::string tok;
    std::istringstream probe(s);
    while (probe >> tok) {
      try {
        std::size_t pos;
        row.push_back(std::stod(tok, &pos));
        if (pos != tok.size()) numeric = false;
      } catch (...) {
        numeric = false;
      }
      if (!numeric) break;
    }
    if (!numeric) {
      if (rows.empty()) continue;  // header line
      throw ParseError(path + " line " + std::to_string(lineno) +
                       ": non-numeric row");
    }
    if (static_cast<int>(row.size()) < min_cols)
      throw ParseError(path + " line " + std::to_string(lineno) +
                       ": expected at least " + std::to_string(min_cols) +
                       " columns");
    rows.push_back(row);
  }
  if (rows.empty()) throw ParseError(path + ": no data rows");
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw ParseError(path + ": ragged rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

SpectroCsv read_spectroscopy_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  SpectroCsv out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(strip_comment(line));
    if (s.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) fields.push_back(trim(tok));
    if (fields.size() < 3)
      throw ParseError(path + " line " + std::to_string(lineno) +
                       ": expected flux,tag,ghz[,weight]");
    if (fields[0] == "flux") continue;  // header
    try {
      out.flux.push_back(std::stod(fields[0]));
      out.tag.push_back(fields[1]);
      out.ghz.push_back(std::stod(fields[2]));
      out.weight.push_back(fields.size() > 3 ? std::stod(fields[3]) : 1.0);
    } catch (const ParseError&) {
      throw;
    } catch (...) {
      throw ParseError(path + " line " + std::to_string(lineno) +
                       ": malformed number");
    }
  }
  if (out.flux.empty()) throw ParseError(path + ": no data rows");
  return out;
}

std::map<std::string, std::pair<double, std::string>> read_keyvalue_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::map<std::string, std::pair<double, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(strip_comment(line));
    if (s.empty() || s.front() == '[') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ParseError(path + " line " + std::to_string(lineno) +
                       ": expected key = value");
    const std::string key = trim(s.substr(0, eq));
    std::istringstream vs(trim(s.substr(eq + 1)));
    double value;
    std::string unit;
    if (!(vs >> value))
      throw ParseError(path + " line " + std::to_string(lineno) +
                       ": field '" + key + "' has no numeric value");
    vs >> unit;
    out[key] = {value, unit};
  }
  return out;
}

}  // namespace csfq
