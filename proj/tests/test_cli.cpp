#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <string>

#include <json.hpp>

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(SECRETGAME_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult result;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    result.out.append(buf.data(), n);
  const int status = pclose(pipe);
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string fixture(const std::string& name) {
  return std::string(SECRETGAME_FIXTURE_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("solve-capped json report") {
  const RunResult r = run("solve-capped --game " + fixture("example_a.json") +
                          " --lambda 3 --cap 2");
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["classification"] == "ordinary");
  CHECK(doc["picker_utility"].get<double>() == -1.5);
  CHECK(doc["J"] == 2);
  CHECK(doc["partitions"][0]["rho"].get<double>() == 0.5);
  // strategies in the report re-validate on re-parse
  double mass = 0.0;
  for (const auto& p : doc["partitions"])
    mass += p["picker_mass"].get<double>();
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

  // identical bytes on repeated runs
  const RunResult again = run("solve-capped --game " +
                              fixture("example_a.json") + " --lambda 3 --cap 2");
  CHECK(again.out == r.out);
}

TEST_CASE("solve-capped csv and usage errors") {
  const RunResult csv = run("solve-capped --game " + fixture("example_a.json") +
                            " --lambda 3 --cap 2 --format csv");
  REQUIRE(csv.code == 0);
  CHECK(csv.out.rfind("index,size,cost,picker_mass,rho,bias\n", 0) == 0);

  CHECK(run("solve-capped --game " + fixture("example_a.json") +
            " --lambda 3 --cap 6")
            .code == 2);  // cap must stay below the secret count
  CHECK(run("solve-capped --game /nonexistent.json --cap 1").code == 2);
  CHECK(run("solve-capped").code == 2);
}

TEST_CASE("solve-costly ne and sse reports") {
  const RunResult quits = run("solve-costly --game " +
                              fixture("example_a.json") +
                              " --gamma 0.5 --sigma 1 --mode ne");
  REQUIRE(quits.code == 0);
  CHECK(nlohmann::json::parse(quits.out)["regime"] == "guesser_quits");

  const RunResult bounded = run("solve-costly --game " +
                                fixture("example_g.json") +
                                " --gamma 3 --sigma 1 --lambda 5 --mode ne");
  REQUIRE(bounded.code == 0);
  const auto bd = nlohmann::json::parse(bounded.out);
  CHECK(bd["regime"] == "bounded");
  CHECK(bd["M"] == 2);
  CHECK(bd["utility_upper_bound"].get<double>() == -1.0);

  const RunResult sse = run("solve-costly --game " + fixture("example_d.json") +
                            " --gamma 2 --sigma 1 --lambda 10 --mode sse");
  REQUIRE(sse.code == 0);
  const auto sd = nlohmann::json::parse(sse.out);
  CHECK(sd["nu"][0].get<double>() == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(sd["picker_utility"].get<double>() ==
        doctest::Approx(-0.2).epsilon(1e-9));
  CHECK(sd["guesser_plan"]["quit"] == true);

  CHECK(run("solve-costly --game " + fixture("example_a.json") +
            " --mode nonsense")
            .code == 2);
}

TEST_CASE("sweep emits ordered csv rows with per-row errors") {
  const RunResult caps = run("sweep --game " + fixture("example_a.json") +
                             " --axis cap --from 1 --to 7 --steps 7 --lambda 3");
  REQUIRE(caps.code == 0);
  REQUIRE(caps.out.rfind("cap,picker_loss,support_size,find_probability,"
                         "classification,error\n",
                         0) == 0);
  // 7 rows; the last two (cap 6, 7) violate K < total and carry errors
  int lines = 0;
  for (char c : caps.out)
    if (c == '\n') ++lines;
  CHECK(lines == 8);
  CHECK(caps.out.find("\n6,,,,,") != std::string::npos);

  const RunResult ratio = run("sweep --game " + fixture("example_a.json") +
                              " --axis gamma_sigma --from 0.2 --to 0.8 "
                              "--steps 4 --lambda 2 --sigma 1");
  REQUIRE(ratio.code == 0);
  CHECK(ratio.out.find("guesser_quits") != std::string::npos);
  CHECK(run("sweep --game " + fixture("example_a.json") +
            " --axis bogus --from 1 --to 2 --steps 2")
            .code == 2);
}

TEST_CASE("ingest") {
  const RunResult keys = run("ingest --mode keys --max-bits 2 --cost linear");
  REQUIRE(keys.code == 0);
  const auto kd = nlohmann::json::parse(keys.out);
  REQUIRE(kd["partitions"].size() == 3);
  CHECK(kd["partitions"][2]["size"] == 4);
  CHECK(kd["partitions"][1]["cost"].get<double>() == 0.5);

  const RunResult freq =
      run("ingest --mode freq --input " + fixture("two_class.tsv"));
  REQUIRE(freq.code == 0);
  const auto fd = nlohmann::json::parse(freq.out);
  REQUIRE(fd["partitions"].size() == 2);
  CHECK(fd["partitions"][0]["cost"].get<double>() ==
        doctest::Approx(0.2).epsilon(1e-12));
  CHECK(fd["partitions"][1]["cost"].get<double>() == 1.0);

  CHECK(run("ingest --mode freq --input /nonexistent.tsv").code == 2);
  CHECK(run("ingest --mode keys --max-bits 99").code == 2);
}

TEST_CASE("verify") {
  const RunResult ok = run("verify --seed 42 --instances 25");
  REQUIRE(ok.code == 0);
  const auto doc = nlohmann::json::parse(ok.out);
  CHECK(doc["ok"] == true);
  bool saw_capped = false;
  for (const auto& suite : doc["suites"]) {
    CHECK(suite["failed"] == 0);
    if (suite["name"] == "capped_ne") {
      saw_capped = true;
      CHECK(suite["passed"] == 25);
    }
  }
  CHECK(saw_capped);
  CHECK(run("verify --instances 0").code == 2);
}
