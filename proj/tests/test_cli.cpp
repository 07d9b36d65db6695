#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "loadflow/cli.hpp"
#include "support/test_support.hpp"

using namespace loadflow;
using namespace loadflow::testing;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() /
          ("loadflow_cli_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)) + "_" +
           std::to_string(std::random_device{}()));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

cli::RunConfig config(const std::string& sub, const std::string& net, const std::string& inj,
                      const std::string& out) {
  cli::RunConfig c;
  c.subcommand = sub;
  c.network_path = net;
  c.injection_path = inj;
  c.output_path = out;
  return c;
}

int run_argv(std::vector<std::string> args) {
  args.insert(args.begin(), "loadflow");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::main_entry(static_cast<int>(argv.size()), argv.data());
}

const std::string kFeeder = data_path("ieee13/network.json");
const std::string kNext = data_path("ieee13/injections.json");
const std::string kKnown = data_path("ieee13/operating_point.json");
const std::string kZero = data_path("zero_injections.json");
const std::string kSingle = data_path("single_bus/network.json");
const std::string kSingleInj = data_path("single_bus/injections.json");

}  // namespace

TEST_CASE("check with a known state passes the theorem") {
  Scratch tmp;
  std::ostringstream err;
  auto c = config("check", kFeeder, kNext, tmp.path("check.json"));
  c.operating_point_path = kKnown;
  CHECK(cli::run(c, err) == cli::kExitPass);
  const json doc = json::parse(slurp(c.output_path));
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["condition"] == "theorem");
  CHECK(doc["passed"] == true);
  CHECK(doc["certificate"]["theorem"]["ok"] == true);
  CHECK(doc["certificate"]["corollary"]["ok"] == false);
  CHECK(doc["certificate"]["corollary"]["xi_s"].get<double>() > 0.25);
}

TEST_CASE("check without a known state fails the corollary") {
  Scratch tmp;
  std::ostringstream err;
  const auto c = config("check", kFeeder, kNext, tmp.path("check.json"));
  CHECK(cli::run(c, err) == cli::kExitConditionFailed);
  const json doc = json::parse(slurp(c.output_path));
  CHECK(doc["condition"] == "corollary");
  CHECK(doc["passed"] == false);
  CHECK(doc["certificate"]["theorem"].is_null());
  CHECK_FALSE(err.str().empty());
}

TEST_CASE("zero injection certifies a zero radius") {
  Scratch tmp;
  std::ostringstream err;
  auto c = config("check", kFeeder, kZero, tmp.path("check.json"));
  CHECK(cli::run(c, err) == cli::kExitPass);
  CHECK(json::parse(slurp(c.output_path))["certificate"]["corollary"]["rho"] == 0.0);

  c.subcommand = "solve";
  c.output_path = tmp.path("solve.json");
  CHECK(cli::run(c, err) == cli::kExitPass);
  const json doc = json::parse(slurp(c.output_path));
  const PreparedGrid g = prepare_grid(load_network(kFeeder));
  REQUIRE(doc["voltages"].size() == 12);
  for (int k = 0; k < 12; ++k) {
    CHECK(doc["voltages"][k]["bus"] == g.net.buses[k + 1].id);
    CHECK(doc["voltages"][k]["v_re"].get<double>() == doctest::Approx(g.w.w[k].real()));
    CHECK(doc["voltages"][k]["v_im"].get<double>() == doctest::Approx(g.w.w[k].imag()));
  }
}

TEST_CASE("single-bus solve matches the closed form") {
  Scratch tmp;
  std::ostringstream err;
  auto c = config("solve", kSingle, kSingleInj, tmp.path("solve.json"));
  c.tol = 1e-14;
  CHECK(cli::run(c, err) == cli::kExitPass);
  const json doc = json::parse(slurp(c.output_path));
  const Complex v{doc["voltages"][0]["v_re"].get<double>(), doc["voltages"][0]["v_im"].get<double>()};
  CHECK(std::abs(v - single_bus_closed_form({2.0, -8.0}, {-0.3, -0.1})) < 1e-10);
  CHECK(doc["solver"]["contained_in_d"] == true);
}

TEST_CASE("13-bus solve from the known state") {
  Scratch tmp;
  std::ostringstream err;
  auto c = config("solve", kFeeder, kNext, tmp.path("solve.json"));
  c.operating_point_path = kKnown;
  c.operating_point_output = tmp.path("next_state.json");
  CHECK(cli::run(c, err) == cli::kExitPass);
  const json doc = json::parse(slurp(c.output_path));
  CHECK(doc["solver"]["converged"] == true);
  CHECK(doc["solver"]["certified"] == true);
  CHECK(doc["solver"]["contained_in_d"] == true);
  for (const auto& row : doc["voltages"]) CHECK(row["v_abs"].get<double>() > 0.9);

  // the written state is itself accepted as a known state
  const NetworkDescription net = load_network(kFeeder);
  const OperatingPoint next = load_operating_point(*c.operating_point_output, net);
  CHECK(next.v.size() == 12);
}

TEST_CASE("golden single-bus outputs") {
  Scratch tmp;
  std::ostringstream err;
  auto c = config("check", kSingle, kSingleInj, tmp.path("check.json"));
  CHECK(cli::run(c, err) == 0);
  CHECK(slurp(c.output_path) == slurp(data_path("single_bus/golden/check.json")));

  c.subcommand = "solve";
  c.output_path = tmp.path("solve.json");
  CHECK(cli::run(c, err) == 0);
  CHECK(slurp(c.output_path) == slurp(data_path("single_bus/golden/solve.json")));

  c.subcommand = "sweep";
  c.output_path = tmp.path("sweep.csv");
  c.kappa_max = 3.0;
  c.steps = 16;
  c.summary_path = tmp.path("summary.json");
  CHECK(cli::run(c, err) == 0);
  CHECK(slurp(c.output_path) == slurp(data_path("single_bus/golden/sweep.csv")));
  CHECK(slurp(*c.summary_path) == slurp(data_path("single_bus/golden/sweep_summary.json")));

  c.subcommand = "dump-matrix";
  c.output_path = tmp.path("matrix.txt");
  CHECK(cli::run(c, err) == 0);
  CHECK(slurp(c.output_path) == slurp(data_path("single_bus/golden/matrix.txt")));
}

TEST_CASE("repeated runs are byte-identical") {
  Scratch tmp;
  std::ostringstream err;
  for (const char* sub : {"check", "solve", "sweep", "dump-matrix"}) {
    auto c = config(sub, kFeeder, kNext, tmp.path("a"));
    c.operating_point_path = kKnown;
    c.steps = 64;
    cli::run(c, err);
    c.output_path = tmp.path("b");
    cli::run(c, err);
    CHECK(slurp(tmp.path("a")) == slurp(tmp.path("b")));
    CHECK_FALSE(slurp(tmp.path("a")).empty());
  }
}

TEST_CASE("sweep table properties") {
  Scratch tmp;
  std::ostringstream err;
  auto c = config("sweep", kFeeder, kNext, tmp.path("sweep.csv"));
  c.operating_point_path = kKnown;
  c.kappa_max = 25.0;
  c.summary_path = tmp.path("summary.json");
  CHECK(cli::run(c, err) == cli::kExitPass);

  std::istringstream table(slurp(c.output_path));
  std::string line;
  std::getline(table, line);
  CHECK(line == "kappa,theorem,corollary,improved,prior,fp_converged");
  int rows = 0;
  bool cor_dropped = false, imp_dropped = false, pri_dropped = false;
  double last_kappa = -1.0;
  while (std::getline(table, line)) {
    double kappa;
    int th, cor, imp, pri, fp;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%d,%d,%d,%d,%d", &kappa, &th, &cor, &imp, &pri, &fp) == 6);
    CHECK(kappa > last_kappa);
    last_kappa = kappa;
    CHECK_FALSE((cor_dropped && cor));
    CHECK_FALSE((imp_dropped && imp));
    CHECK_FALSE((pri_dropped && pri));
    cor_dropped |= !cor;
    imp_dropped |= !imp;
    pri_dropped |= !pri;
    CHECK((!pri || imp));
    CHECK((!imp || cor));
    ++rows;
  }
  CHECK(rows == 512);
  CHECK(last_kappa == 25.0);

  const json summary = json::parse(slurp(*c.summary_path));
  CHECK(summary["kappa_hat"].get<double>() > summary["boundaries"]["corollary"].get<double>());
  CHECK(summary["boundaries"]["theorem_lower"].get<double>() < summary["kappa_hat"].get<double>());
}

TEST_CASE("tiny two-point sweep passes everywhere") {
  Scratch tmp;
  std::ostringstream err;
  auto c = config("sweep", kFeeder, kNext, tmp.path("sweep.csv"));
  c.kappa_max = 1e-6;
  c.steps = 2;
  CHECK(cli::run(c, err) == cli::kExitPass);
  std::istringstream table(slurp(c.output_path));
  std::string line;
  std::getline(table, line);
  int rows = 0;
  while (std::getline(table, line)) {
    CHECK(line.substr(line.find(',')) == ",0,1,1,1,1");
    ++rows;
  }
  CHECK(rows == 2);
}

TEST_CASE("input errors exit with code 2") {
  Scratch tmp;
  std::ostringstream err;
  CHECK(cli::run(config("check", tmp.path("missing.json"), kNext, tmp.path("o")), err) ==
        cli::kExitInputError);

  write(tmp.path("broken.json"), "{ nope");
  CHECK(cli::run(config("check", tmp.path("broken.json"), kNext, tmp.path("o")), err) ==
        cli::kExitInputError);

  json lossless = json::parse(slurp(kFeeder));
  lossless["branches"][2]["g"] = 0.0;
  write(tmp.path("lossless.json"), lossless.dump());
  CHECK(cli::run(config("solve", tmp.path("lossless.json"), kNext, tmp.path("o")), err) ==
        cli::kExitInputError);

  write(tmp.path("bad_inj.json"), R"({"injections": [{"bus": "650", "p_mw": 1, "q_mvar": 0}]})");
  CHECK(cli::run(config("check", kFeeder, tmp.path("bad_inj.json"), tmp.path("o")), err) ==
        cli::kExitInputError);

  // a known state that does not solve the load-flow equations
  json wrong = json::parse(slurp(kKnown));
  wrong["voltages"][0]["re"] = 0.5;
  write(tmp.path("wrong_state.json"), wrong.dump());
  auto c = config("check", kFeeder, kNext, tmp.path("o"));
  c.operating_point_path = tmp.path("wrong_state.json");
  CHECK(cli::run(c, err) == cli::kExitInputError);

  auto s = config("sweep", kFeeder, kZero, tmp.path("o"));
  CHECK(cli::run(s, err) == cli::kExitInputError);

  CHECK(cli::run(config("frobnicate", kFeeder, kNext, tmp.path("o")), err) ==
        cli::kExitInputError);
  CHECK(cli::run(config("check", kFeeder, kNext, tmp.path("no/such/dir/o.json")), err) ==
        cli::kExitInputError);
}

TEST_CASE("heavy loading without convergence exits with code 3") {
  Scratch tmp;
  write(tmp.path("heavy.json"), R"({"injections": [{"bus": "load", "p_mw": -9, "q_mvar": -6}]})");
  std::ostringstream err;
  auto c = config("solve", kSingle, tmp.path("heavy.json"), tmp.path("o.json"));
  c.max_iter = 50;
  CHECK(cli::run(c, err) == cli::kExitNotConverged);
  CHECK(err.str().find("warning") != std::string::npos);
}

TEST_CASE("command line parsing") {
  Scratch tmp;
  CHECK(run_argv({"check", "--network", kSingle, "--injections", kSingleInj, "--out",
                  tmp.path("o.json")}) == 0);
  CHECK(run_argv({"check", "--network", kSingle, "--out", tmp.path("o.json")}) == 2);
  CHECK(run_argv({"check", "--network", tmp.path("absent.json"), "--injections", kSingleInj,
                  "--out", tmp.path("o.json")}) == 2);
  CHECK(run_argv({}) == 2);
  CHECK(run_argv({"dump-matrix", "--network", kSingle, "--out", tmp.path("m.txt")}) == 0);
  CHECK(run_argv({"sweep", "--network", kSingle, "--injections", kSingleInj, "--out",
                  tmp.path("s.csv"), "--steps", "4"}) == 0);
}

TEST_CASE("slack-only network") {
  Scratch tmp;
  write(tmp.path("net.json"),
        R"({"bases": {"power_mva": 1, "voltage_kv": 1}, "buses": [{"id": "s", "kind": "slack"}],
            "branches": []})");
  std::ostringstream err;
  auto c = config("check", tmp.path("net.json"), kZero, tmp.path("check.json"));
  CHECK(cli::run(c, err) == cli::kExitPass);
  c.subcommand = "solve";
  CHECK(cli::run(c, err) == cli::kExitPass);
  c.subcommand = "dump-matrix";
  CHECK(cli::run(c, err) == cli::kExitPass);
}
