#include "ekrylov_cli/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace ekrylov::cli {

namespace {

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

int to_int(const std::string& key, const std::string& v) {
  const double x = parse_double(v);
  if (x != static_cast<double>(static_cast<long long>(x))) throw InvalidArgument(key + ": expected an integer, got '" + v + "'");
  return static_cast<int>(x);
}

std::vector<double> to_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream s(v);
  std::string cell;
  while (std::getline(s, cell, ',')) out.push_back(parse_double(cell));
  return out;
}

std::vector<std::pair<int, int>> to_pairs(const std::string& v) {
  std::vector<std::pair<int, int>> out;
  std::stringstream s(v);
  std::string cell;
  while (std::getline(s, cell, ',')) {
    const auto colon = cell.find(':');
    if (colon == std::string::npos) throw InvalidArgument("metrics.pairs: expected i:j entries, got '" + cell + "'");
    out.emplace_back(to_int("metrics.pairs", cell.substr(0, colon)), to_int("metrics.pairs", cell.substr(colon + 1)));
  }
  return out;
}

std::string one_of(const std::string& key, const std::string& v, std::initializer_list<const char*> allowed) {
  std::string list;
  for (const char* a : allowed) {
    if (v == a) return v;
    list += std::string(list.empty() ? "" : ", ") + a;
  }
  throw InvalidArgument(key + ": '" + v + "' is not one of " + list);
}

#define EK_DOUBLE(k, member)                                                              \
  Field {                                                                                 \
    k, [](RunConfig& c, const std::string& v) { c.member = parse_double(v); },             \
        [](const RunConfig& c) { return format_double(c.member); }                        \
  }
#define EK_INT(k, member)                                                                 \
  Field {                                                                                 \
    k, [](RunConfig& c, const std::string& v) { c.member = to_int(k, v); },                \
        [](const RunConfig& c) { return std::to_string(c.member); }                       \
  }
#define EK_CHOICE(k, member, ...)                                                         \
  Field {                                                                                 \
    k, [](RunConfig& c, const std::string& v) { c.member = one_of(k, v, {__VA_ARGS__}); }, \
        [](const RunConfig& c) { return c.member; }                                       \
  }
#define EK_TEXT(k, member)                                                                \
  Field {                                                                                 \
    k, [](RunConfig& c, const std::string& v) { c.member = v; },                           \
        [](const RunConfig& c) { return c.member; }                                       \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      EK_CHOICE("distribution.family", family, "gaussian", "qgauss", "tsallis", "uniform", "discrete"),
      EK_DOUBLE("distribution.mean", mean),
      EK_DOUBLE("distribution.sigma", sigma),
      EK_DOUBLE("distribution.q", q),
      EK_TEXT("distribution.ensemble", ensemble),
      EK_INT("distribution.spins", spins),
      Field{"distribution.seed",
            [](RunConfig& c, const std::string& v) {
              std::size_t used = 0;
              c.seed = std::stoull(v, &used);
              if (used != v.size()) throw InvalidArgument("distribution.seed: expected an unsigned integer");
            },
            [](const RunConfig& c) { return std::to_string(c.seed); }},
      EK_CHOICE("chain.mode", mode, "ensemble-only", "cavity-coupled"),
      EK_CHOICE("chain.route", route, "auto", "closed-form", "hankel", "stieltjes"),
      EK_DOUBLE("chain.omega_c", omega_c),
      EK_DOUBLE("chain.g_eff", g_eff),
      EK_INT("chain.M", M),
      EK_DOUBLE("time.t_max", t_max),
      EK_INT("time.points", points),
      EK_INT("time.initial", initial),
      EK_CHOICE("time.method", method, "eig", "laguerre", "spectral"),
      EK_CHOICE("time.units", units, "sigma", "absolute"),
      EK_INT("metrics.r_max", r_max),
      Field{"metrics.targets", [](RunConfig& c, const std::string& v) { c.targets = to_list(v); },
            [](const RunConfig& c) {
              std::string s;
              for (double x : c.targets) s += (s.empty() ? "" : ",") + format_double(x);
              return s;
            }},
      Field{"metrics.pairs", [](RunConfig& c, const std::string& v) { c.pairs = to_pairs(v); },
            [](const RunConfig& c) {
              std::string s;
              for (const auto& [i, j] : c.pairs)
                s += (s.empty() ? "" : ",") + std::to_string(i) + ":" + std::to_string(j);
              return s;
            }},
      EK_DOUBLE("check.tolerance", tolerance),
      EK_INT("check.orders", orders),
      EK_CHOICE("check.against", against, "lanczos", "closed-form"),
      EK_TEXT("output.dir", out),
  };
  return table;
}

#undef EK_DOUBLE
#undef EK_INT
#undef EK_CHOICE
#undef EK_TEXT

}  // namespace

void set(RunConfig& config, const std::string& key, const std::string& value) {
  for (const auto& f : fields()) {
    if (f.key == key) {
      try {
        f.set(config, value);
      } catch (const InvalidArgument&) {
        throw;
      } catch (const std::exception&) {
        throw InvalidArgument(key + ": cannot parse '" + value + "'");
      }
      return;
    }
  }
  throw InvalidArgument("unknown configuration key '" + key + "'");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

std::string canonical_text(const RunConfig& config) {
  std::string out;
  std::string section;
  for (const auto& f : fields()) {
    const auto dot = f.key.find('.');
    const std::string sec = f.key.substr(0, dot);
    if (sec != section) {
      out += (section.empty() ? "" : "\n") + ("[" + sec + "]\n");
      section = sec;
    }
    out += f.key.substr(dot + 1) + " = " + f.get(config) + "\n";
  }
  return out;
}

RunConfig parse_config(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw InvalidArgument(std::string("config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  RunConfig config;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw InvalidArgument("config: key '" + section + "' must sit inside a [section]");
    for (const auto& [key, value] : body) set(config, section + "." + key, value.data());
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_hash(const RunConfig& config) {
  RunConfig physics = config;
  physics.out.clear();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canonical_text(physics)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SpectralDistribution make_distribution(const RunConfig& c) {
  SpectralDistribution dist;
  if (c.family == "gaussian") {
    dist = Gaussian{c.mean, c.sigma};
  } else if (c.family == "qgauss") {
    dist = QGaussianAskey{c.mean, c.sigma, c.q};
  } else if (c.family == "tsallis") {
    dist = TsallisQGaussian{c.mean, c.sigma, c.q};
  } else if (c.family == "uniform") {
    dist = Uniform{c.mean, c.sigma};
  } else {
    if (c.ensemble.empty()) throw InvalidArgument("family discrete needs distribution.ensemble (an omega,g CSV)");
    std::ifstream in(c.ensemble);
    if (!in) throw InvalidArgument("cannot open ensemble CSV '" + c.ensemble + "'");
    return read_discrete(in);
  }
  validate(dist);
  if (c.spins > 0) {
    CouplingModel coupling;
    coupling.g_eff = c.g_eff > 0.0 ? c.g_eff : 1.0;
    return sample_discrete(dist, c.spins, c.seed, coupling);
  }
  return dist;
}

}  // namespace ekrylov::cli
