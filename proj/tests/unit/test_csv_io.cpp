#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <ekrylov/csv_io.hpp>
#include <ekrylov/errors.hpp>

using namespace ekrylov;

namespace {

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

std::string second_line(const std::string& text) {
  const auto a = text.find('\n') + 1;
  return text.substr(a, text.find('\n', a) - a);
}

}  // namespace

TEST_SUITE("csv_io") {
  TEST_CASE("doubles round-trip exactly") {
    for (double x : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, std::sqrt(2.0)})
      CHECK(parse_double(format_double(x)) == x);
    CHECK(format_double(0.5) == "0.5");
    CHECK(std::isinf(parse_double("inf")));
    CHECK_THROWS_AS(parse_double("1.0x"), InvalidArgument);
    CHECK_THROWS_AS(parse_double(""), InvalidArgument);
  }

  TEST_CASE("header lines carry ordered metadata") {
    const Metadata meta{{"family", "gaussian"}, {"sigma", "1"}, {"note", "two words"}};
    const std::string line = header_line(meta);
    CHECK(line.rfind("# ekrylov ", 0) == 0);
    const auto parsed = parse_header_line(line);
    CHECK(lookup(parsed, "ekrylov") == EKRYLOV_VERSION);
    CHECK(lookup(parsed, "family") == "gaussian");
    CHECK(lookup(parsed, "note") == "two_words");
    CHECK(lookup(parsed, "missing").empty());
  }

  TEST_CASE("coefficients round-trip") {
    auto c = assemble(closed_form_coefficients(Uniform{0.2, 1.1}, 9), 0.3, 0.7);
    std::ostringstream out;
    write_coefficients(out, c, {{"family", "uniform"}});
    const std::string text = out.str();
    CHECK(second_line(text) == "n,alpha,beta");
    CHECK(text.find("\n0,0.3,\n") != std::string::npos);
    std::istringstream in(text);
    const auto back = read_coefficients(in);
    CHECK(back.alphas == c.alphas);
    CHECK(back.betas == c.betas);
    CHECK(back.mode == c.mode);
    CHECK(back.g_eff == c.g_eff);
    CHECK(back.center == c.center);
    CHECK(back.valid_order == c.valid_order);
    CHECK(back.provenance == Provenance::Imported);
  }

  TEST_CASE("malformed coefficient files are rejected") {
    std::istringstream gap("n,alpha,beta\n0,0,\n2,0,1\n");
    CHECK_THROWS_AS(read_coefficients(gap), InvalidArgument);
    std::istringstream wrong("a,b\n0,1\n");
    CHECK_THROWS_AS(read_coefficients(wrong), InvalidArgument);
  }

  TEST_CASE("discrete ensembles round-trip") {
    const Discrete d{{{-0.5, 0.25}, {0.125, 1.0}, {2.0, 0.5}}};
    std::ostringstream out;
    write_discrete(out, d);
    std::istringstream in(out.str());
    const auto back = read_discrete(in);
    REQUIRE(back.spins.size() == 3);
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(back.spins[j].omega == d.spins[j].omega);
      CHECK(back.spins[j].g == d.spins[j].g);
    }
    std::istringstream no_header("1,2\n");
    CHECK_THROWS_AS(read_discrete(no_header), InvalidArgument);
    std::istringstream comments("# a comment\nomega,g\n# another\n1.5,0.5\n");
    CHECK(read_discrete(comments).spins.size() == 1);
  }

  TEST_CASE("amplitude and metric tables") {
    EvolutionResult r;
    r.times = {0.0, 0.5};
    r.amplitudes.resize(2, 2);
    r.amplitudes << Complex(1, 0), Complex(0, 0), Complex(0.6, 0), Complex(0, -0.8);
    std::ostringstream amp;
    write_amplitudes(amp, r, {{"family", "test"}}, {"boundary reflection after t=3"});
    const std::string text = amp.str();
    CHECK(lookup(parse_header_line(first_line(text)), "method") == "eig");
    CHECK(second_line(text) == "# boundary reflection after t=3");
    CHECK(text.find("t,n,re,im,prob\n") != std::string::npos);
    CHECK(text.find("0.5,1,0,-0.8,0.64") != std::string::npos);

    std::ostringstream k;
    write_complexity(k, r.times, {0.0, 0.64}, {});
    CHECK(second_line(k.str()) == "t,K");

    CorrelatorGrid g;
    g.times = {0.0};
    g.values = Eigen::MatrixXd::Constant(2, 1, 0.5);
    std::ostringstream c;
    write_correlator(c, g, {});
    CHECK(c.str().find("r,t,C\n0,0,0.5\n1,0,0.5\n") != std::string::npos);

    QSLReport q;
    q.tau0 = 1.0;
    q.tauL = std::numeric_limits<double>::infinity();
    q.entries = {{1, 2, 0.5, 0.25}};
    std::ostringstream qs;
    write_qsl(qs, q, {});
    CHECK(lookup(parse_header_line(first_line(qs.str())), "tauL") == "inf");
    CHECK(qs.str().find("i,j,F_target,tau\n1,2,0.5,0.25\n") != std::string::npos);

    VelocityProfile v;
    v.v = {2.0, 2.0};
    v.v_max = 2.0;
    std::ostringstream vs;
    write_velocity(vs, v, {1.0, 1.0}, {});
    CHECK(vs.str().find("k,beta,v\n1,1,2\n2,1,2\n") != std::string::npos);
  }
}
