#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "temperlab/catalog_cli.hpp"
#include "temperlab/rhofun.hpp"

using namespace temperlab;
using namespace temperlab::catalog_cli;

namespace {

std::pair<int, std::string> run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run_command(args, out, err);
  return {code, out.str() + err.str()};
}

}  // namespace

TEST_CASE("catalog contents") {
  const auto& entries = catalog_entries();
  // required entries
  for (const char* name :
       {"sl2-in-sl3", "sl2-in-sl4", "torus-in-sl2", "unipotent-in-sl2", "g-equals-h-sl2",
        "g-equals-h-sl3", "sl2z-lattice", "cyclic-hyperbolic", "sl5-in-sl6"})
    CHECK_NOTHROW(find_entry(name));
  CHECK_THROWS_AS(find_entry("no-such-entry"), std::invalid_argument);
  CHECK(entries.size() >= 18);

  CHECK(*find_entry("sl2-in-sl3").expected_beta == Rat(1, 2));
  CHECK(*find_entry("sl2-in-sl4").expected_beta == Rat(1, 3));
  CHECK(*find_entry("torus-in-sl2").expected_beta == Rat(0));
  CHECK(*find_entry("g-equals-h-sl3").expected_beta == Rat(1));
}

TEST_CASE("catalog pairs are reproducible from their subgroup specs") {
  for (const auto& e : catalog_entries()) {
    if (!e.pair) continue;
    auto h_basis = matgroup::lie_basis(e.h_spec);
    auto cartan = matgroup::cartan_subspace_basis(e.h_spec);
    auto self = rhofun::adjoint_weight_system(h_basis, cartan, rhofun::AdjointSpace::kSelf);
    auto amb = rhofun::adjoint_weight_system(h_basis, cartan, rhofun::AdjointSpace::kAmbient);
    REQUIRE(self.exact());
    REQUIRE(amb.exact());
    CHECK(self.system == e.pair->h_system);
    CHECK(amb.system == e.pair->g_system);
    // embedding columns express the cartan basis diagonals
    REQUIRE(static_cast<int>(e.embedding.size()) == (e.pair->dim > 0 ? e.n : 0));
    for (size_t c = 0; c < cartan.size(); ++c)
      for (int r = 0; r < e.n; ++r)
        CHECK(e.embedding[r][c].to_double() == doctest::Approx(cartan[c](r, r)));
  }
}

TEST_CASE("expected beta values hold exactly") {
  for (const auto& e : catalog_entries()) {
    if (!e.pair || !e.expected_beta) continue;
    auto res = beta_solver::beta_exact(*e.pair);
    CHECK(res.beta == *e.expected_beta);
  }
}

TEST_CASE("cli: beta subcommand output contract") {
  auto [code, text] = run({"beta", "--pair", "sl2-in-sl3"});
  CHECK(code == 0);
  auto j = ojson::parse(text);
  CHECK(j["beta"].get<std::string>() == "1/2");
  CHECK(j["verdict"].get<std::string>() == "BoundaryExact");
  CHECK(j["p"].get<std::string>() == "2");
  CHECK(j["method"]["version"].get<std::string>() == kVersion);
  CHECK(j["method"].contains("seed"));
  CHECK(j["method"].contains("det_tol"));
  CHECK(j["identity"].get<std::string>().find("theorem-a") != std::string::npos);
}

TEST_CASE("cli: byte-identical reruns with the same seed") {
  for (auto args : std::vector<std::vector<std::string>>{
           {"beta", "--pair", "sl4-in-sl5", "--samples", "5000", "--seed", "42"},
           {"delta", "--pair", "cyclic-hyperbolic", "--seed", "9"},
           {"verify", "weyl", "--n", "2", "--chi", "0.3", "--seed", "4"},
           {"catalog", "show", "--pair", "sl2-in-sl4"}}) {
    auto a = run(args);
    auto b = run(args);
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
    CHECK_FALSE(a.second.empty());
  }
}

TEST_CASE("cli: exit codes") {
  CHECK(run({"nonsense"}).first == 64);
  CHECK(run({}).first == 64);
  CHECK(run({"beta", "--pair", "does-not-exist"}).first == 1);
  CHECK(run({"beta"}).first == 1);
  CHECK(run({"verify", "weyl", "--n", "3"}).first == 1);
  // --help exits 0
  CHECK(run({"--help"}).first == 0);
}

TEST_CASE("cli: formats") {
  auto [code, text] = run({"beta", "--pair", "torus-in-sl2", "--format", "table"});
  CHECK(code == 0);
  CHECK(text.find("beta") != std::string::npos);
  bool table_like = text.find("{") == std::string::npos || text.find("method") != std::string::npos;
  CHECK(table_like);

  auto [code2, csv] = run({"delta", "--pair", "cyclic-hyperbolic", "--format", "csv"});
  CHECK(code2 == 0);
  CHECK(csv.rfind("R,N\n", 0) == 0);

  auto [code3, msg] = run({"beta", "--pair", "torus-in-sl2", "--format", "bogus"});
  CHECK(code3 == 1);
  CHECK(msg.find("unknown format") != std::string::npos);
}

TEST_CASE("cli: pair file round trip") {
  const auto& e = find_entry("sl2-in-sl4");
  std::string path = "pair_roundtrip_test.json";
  {
    std::ofstream f(path);
    f << dump_stable(e.pair->to_json());
  }
  auto [code, text] = run({"beta", "--pair-file", path});
  CHECK(code == 0);
  auto j = ojson::parse(text);
  CHECK(j["beta"].get<std::string>() == "1/3");
  // raw pair files get the Proposition-B labeling
  CHECK(j["identity"].get<std::string>().find("proposition-b") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("cli: spherical value matches the library") {
  auto [code, text] = run({"spherical", "--n", "2", "--chi", "1.0", "--t", "3.0"});
  CHECK(code == 0);
  auto j = ojson::parse(text);
  // chi = rho integrates to exactly one
  CHECK(j["value"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
}
