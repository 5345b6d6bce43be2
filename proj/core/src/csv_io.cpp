#include "ekrylov/csv_io.hpp"

#include <charconv>
#include <limits>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "ekrylov/errors.hpp"

namespace ekrylov {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream s(line);
  while (std::getline(s, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool is_blank_or_comment(const std::string& line) {
  const std::string t = trim(line);
  return t.empty() || t.front() == '#';
}

void write_header(std::ostream& out, const Metadata& meta, const std::vector<std::string>& notes = {}) {
  out << header_line(meta) << '\n';
  for (const auto& note : notes) out << "# " << note << '\n';
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  double x = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), x);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw InvalidArgument("not a number: '" + text + "'");
  return x;
}

std::string header_line(const Metadata& meta) {
  std::string line = "# ekrylov " EKRYLOV_VERSION;
  for (const auto& [k, v] : meta) {
    std::string value = v;
    for (char& c : value)
      if (c == ' ' || c == '\t') c = '_';
    line += ' ' + k + '=' + value;
  }
  return line;
}

Metadata parse_header_line(const std::string& line) {
  std::istringstream s(line);
  std::string hash, tool, version;
  s >> hash >> tool >> version;
  if (hash != "#" || tool != "ekrylov") throw InvalidArgument("missing '# ekrylov' header line");
  Metadata meta{{"ekrylov", version}};
  std::string token;
  while (s >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw InvalidArgument("malformed header field '" + token + "'");
    meta.emplace_back(token.substr(0, eq), token.substr(eq + 1));
  }
  return meta;
}

std::string lookup(const Metadata& meta, const std::string& key) {
  for (const auto& [k, v] : meta)
    if (k == key) return v;
  return {};
}

void write_coefficients(std::ostream& out, const ChainCoefficients& c, Metadata meta) {
  meta.emplace_back("provenance", to_string(c.provenance));
  meta.emplace_back("mode", to_string(c.mode));
  meta.emplace_back("g_eff", format_double(c.g_eff));
  meta.emplace_back("center", format_double(c.center));
  meta.emplace_back("valid_order", std::to_string(c.valid_order));
  meta.emplace_back("terminated", c.terminated ? "1" : "0");
  write_header(out, meta);
  out << "n,alpha,beta\n";
  for (int n = 0; n < c.size(); ++n) {
    out << n << ',' << format_double(c.alphas[n]) << ',';
    if (n >= 1 && n <= static_cast<int>(c.betas.size())) out << format_double(c.beta(n));
    out << '\n';
  }
}

ChainCoefficients read_coefficients(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("coefficient CSV is empty");
  const Metadata meta = parse_header_line(line);
  ChainCoefficients c;
  c.provenance = Provenance::Imported;
  if (const auto mode = lookup(meta, "mode"); !mode.empty()) c.mode = parse_chain_mode(mode);
  if (const auto g = lookup(meta, "g_eff"); !g.empty()) c.g_eff = parse_double(g);
  if (const auto ctr = lookup(meta, "center"); !ctr.empty()) c.center = parse_double(ctr);
  c.terminated = lookup(meta, "terminated") == "1";

  bool saw_columns = false;
  while (std::getline(in, line)) {
    if (is_blank_or_comment(line)) continue;
    if (!saw_columns) {
      if (trim(line) != "n,alpha,beta") throw InvalidArgument("coefficient CSV needs columns n,alpha,beta");
      saw_columns = true;
      continue;
    }
    const auto cells = split(trim(line), ',');
    if (cells.size() != 3) throw InvalidArgument("coefficient CSV row needs three cells: '" + line + "'");
    const int n = static_cast<int>(parse_double(cells[0]));
    if (n != c.size()) throw InvalidArgument("coefficient CSV rows must be consecutive from n = 0");
    c.alphas.push_back(parse_double(cells[1]));
    if (n >= 1) {
      if (trim(cells[2]).empty()) throw InvalidArgument("coefficient CSV row n >= 1 needs a beta");
      c.betas.push_back(parse_double(cells[2]));
    }
  }
  if (c.alphas.empty()) throw InvalidArgument("coefficient CSV has no rows");
  const auto valid = lookup(meta, "valid_order");
  c.valid_order = valid.empty() ? static_cast<int>(c.betas.size()) : std::stoi(valid);
  return c;
}

void write_discrete(std::ostream& out, const Discrete& ensemble, Metadata meta) {
  write_header(out, meta);
  out << "omega,g\n";
  for (const auto& s : ensemble.spins) out << format_double(s.omega) << ',' << format_double(s.g) << '\n';
}

Discrete read_discrete(std::istream& in) {
  std::string line;
  bool saw_header = false;
  Discrete ens;
  int row = 0;
  while (std::getline(in, line)) {
    if (is_blank_or_comment(line)) continue;
    ++row;
    if (!saw_header) {
      if (trim(line) != "omega,g") throw InvalidArgument("ensemble CSV needs the header row 'omega,g'");
      saw_header = true;
      continue;
    }
    const auto cells = split(trim(line), ',');
    if (cells.size() != 2) {
      std::ostringstream msg;
      msg << "ensemble CSV row " << row << " needs two cells";
      throw InvalidArgument(msg.str());
    }
    ens.spins.push_back({parse_double(cells[0]), parse_double(cells[1])});
  }
  if (!saw_header) throw InvalidArgument("ensemble CSV needs the header row 'omega,g'");
  validate(SpectralDistribution{ens});
  return ens;
}

void write_amplitudes(std::ostream& out, const EvolutionResult& res, const Metadata& meta,
                      const std::vector<std::string>& notes) {
  Metadata m = meta;
  m.emplace_back("method", to_string(res.method));
  m.emplace_back("norm_drift", format_double(res.norm_drift));
  write_header(out, m, notes);
  out << "t,n,re,im,prob\n";
  for (int k = 0; k < res.steps(); ++k) {
    const std::string t = format_double(res.times[k]);
    for (int n = 0; n < res.dimension(); ++n) {
      const Complex c = res.amplitudes(k, n);
      out << t << ',' << n << ',' << format_double(c.real()) << ',' << format_double(c.imag()) << ','
          << format_double(std::norm(c)) << '\n';
    }
  }
}

void write_complexity(std::ostream& out, const std::vector<double>& times, const std::vector<double>& k,
                      const Metadata& meta) {
  write_header(out, meta);
  out << "t,K\n";
  for (std::size_t i = 0; i < times.size(); ++i) out << format_double(times[i]) << ',' << format_double(k[i]) << '\n';
}

void write_correlator(std::ostream& out, const CorrelatorGrid& grid, const Metadata& meta) {
  write_header(out, meta);
  out << "r,t,C\n";
  for (Eigen::Index r = 0; r < grid.values.rows(); ++r)
    for (Eigen::Index k = 0; k < grid.values.cols(); ++k)
      out << r << ',' << format_double(grid.times[k]) << ',' << format_double(grid.values(r, k)) << '\n';
}

void write_qsl(std::ostream& out, const QSLReport& report, Metadata meta) {
  meta.emplace_back("tau0", format_double(report.tau0));
  meta.emplace_back("tauL", format_double(report.tauL));
  meta.emplace_back("g_ens", format_double(report.g_ens));
  meta.emplace_back("sigma", format_double(report.sigma));
  write_header(out, meta);
  out << "i,j,F_target,tau\n";
  for (const auto& e : report.entries)
    out << e.i << ',' << e.j << ',' << format_double(e.target) << ',' << format_double(e.tau) << '\n';
}

void write_velocity(std::ostream& out, const VelocityProfile& profile, const std::vector<double>& betas,
                    Metadata meta) {
  meta.emplace_back("v_max", format_double(profile.v_max));
  if (profile.analytic_bound) meta.emplace_back("v_bound", format_double(*profile.analytic_bound));
  write_header(out, meta);
  out << "k,beta,v\n";
  for (std::size_t k = 0; k < profile.v.size(); ++k)
    out << k + 1 << ',' << format_double(k < betas.size() ? betas[k] : 0.0) << ',' << format_double(profile.v[k])
        << '\n';
}

}  // namespace ekrylov
