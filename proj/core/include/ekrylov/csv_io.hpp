#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ekrylov/metrics.hpp"
#include "ekrylov/propagate.hpp"
#include "ekrylov/recursion.hpp"
#include "ekrylov/spectra.hpp"

namespace ekrylov {

/// Ordered key=value pairs written into the leading comment line of every CSV:
///   # ekrylov <version> key=value ...
using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Shortest round-trip decimal form of x (deterministic across runs).
std::string format_double(double x);
double parse_double(const std::string& text);

std::string header_line(const Metadata& meta);
/// Parses a header line back into key/value pairs; the version is returned
/// under the key "ekrylov".
Metadata parse_header_line(const std::string& line);
/// Value of `key` or an empty string.
std::string lookup(const Metadata& meta, const std::string& key);

/// `n,alpha,beta`; row n carries alpha_n and beta(n) (empty for n = 0). The
/// header records provenance, mode, g_eff, centre, valid_order and termination.
void write_coefficients(std::ostream& out, const ChainCoefficients& coeffs, Metadata meta = {});
ChainCoefficients read_coefficients(std::istream& in);

/// `omega,g` with a mandatory header row; lines starting with '#' are skipped.
void write_discrete(std::ostream& out, const Discrete& ensemble, Metadata meta = {});
Discrete read_discrete(std::istream& in);

/// Long format `t,n,re,im,prob`.
void write_amplitudes(std::ostream& out, const EvolutionResult& res, const Metadata& meta,
                      const std::vector<std::string>& notes = {});
/// `t,K`.
void write_complexity(std::ostream& out, const std::vector<double>& times, const std::vector<double>& k,
                      const Metadata& meta);
/// `r,t,C`.
void write_correlator(std::ostream& out, const CorrelatorGrid& grid, const Metadata& meta);
/// `i,j,F_target,tau`.
void write_qsl(std::ostream& out, const QSLReport& report, Metadata meta);
/// `k,beta,v` per bond.
void write_velocity(std::ostream& out, const VelocityProfile& profile, const std::vector<double>& betas,
                    Metadata meta);

}  // namespace ekrylov
