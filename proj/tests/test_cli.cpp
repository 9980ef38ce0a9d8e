#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "sunforest/cli.hpp"

using namespace sunforest;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("verify subcommand and exit codes") {
  auto ok = run({"verify", "f(a,b,k) f(k,c,d)",
                 "(2/N)*delta(a,c) delta(b,d) - (2/N)*delta(a,d) delta(b,c) + d(a,c,m) d(m,b,d) "
                 "- d(a,d,m) d(m,b,c)",
                 "--N", "3"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("PASS") == 0);

  auto bad = run({"verify", "d(i,j,k)", "f(i,j,k)", "--N", "3"});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("FAIL") == 0);

  auto parse_err = run({"verify", "d(i,j", "0", "--N", "3"});
  CHECK(parse_err.code == 2);
  CHECK(!parse_err.err.empty());
}

TEST_CASE("reduce subcommand") {
  auto r = run({"reduce", "d(i,a,b) d(a,c,j) d(b,c,k)"});
  CHECK(r.code == 0);
  CHECK(r.out == "(1/2*N - 6/N)*d(i,j,k)\n");

  auto budget = run({"reduce", "d(i,a,b) d(a,c,j) d(b,c,k)", "--budget", "2"});
  CHECK(budget.code == 3);
  CHECK(budget.err.find("step budget") != std::string::npos);

  auto checked = run({"reduce", "f(i,a,b) d(a,c,j) d(b,c,k)", "--check-N", "3"});
  CHECK(checked.code == 0);
  CHECK(checked.out.find("violations = 0") != std::string::npos);
}

TEST_CASE("trace subcommand") {
  auto l = run({"trace", "--word", "i,j,k", "--kind", "lambda"});
  CHECK(l.code == 0);
  CHECK(l.out == "2*d(i,j,k) + 2*I*f(i,j,k)\n");

  auto d = run({"trace", "--word", "i,j", "--kind", "D"});
  CHECK(d.code == 0);
  CHECK(d.out == "(N - 4/N)*delta(i,j)\n");
}

TEST_CASE("fit and canon subcommands") {
  auto f = run({"fit", "d(i,p,q) d(j,p,q)", "--N", "3,4,5,6"});
  CHECK(f.code == 0);
  CHECK(f.out == "(N - 4/N)*delta(i,j)\n");

  auto c = run({"canon", "d(k,i,j) + d(j,k,i)"});
  CHECK(c.code == 0);
  CHECK(c.out == "2*d(i,j,k)\n");
}

TEST_CASE("constants subcommand") {
  auto r = run({"constants", "--N", "2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("tensor,a,b,c,value") == 0);
  CHECK(r.out.find("f,1,2,3,1") != std::string::npos);
  CHECK(r.out.find("d,") == std::string::npos);  // su(2) has no d tensor

  std::string path = "cli_constants_test.csv";
  auto w = run({"constants", "--N", "3", "--out", path});
  CHECK(w.code == 0);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "tensor,a,b,c,value");
  in.close();
  std::remove(path.c_str());
}

TEST_CASE("json output is machine readable and deterministic") {
  auto a = run({"--json", "reduce", "f(i,k,l) f(j,k,l)"});
  auto b = run({"--json", "reduce", "f(i,k,l) f(j,k,l)"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  auto j = nlohmann::json::parse(a.out);
  CHECK(j["result"]["printed"] == "N*delta(i,j)");
  CHECK(j["result"]["terms"].size() == 1);

  auto v = run({"--json", "verify", "d(i,j,k)", "d(i,j,k)", "--N", "3"});
  auto jv = nlohmann::json::parse(v.out);
  CHECK(jv["pass"] == true);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run({"nonsense"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"trace", "--kind", "lambda"}).code == 2);  // missing --word
}
