#include <doctest.h>

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "imf/remote/remote_refiner.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "imf_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run cli(const std::string& args) {
  const fs::path out = workdir() / "stdout.txt";
  const std::string cmd = "cd '" + workdir().string() + "' && '" IMF_CLI_PATH "' " + args + " > '" + out.string() +
                          "' 2> '" + (workdir() / "stderr.txt").string() + "'";
  const int status = std::system(cmd.c_str());
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("embed then extract on the same model file") {
  REQUIRE(cli("--model-file stego.imfm train --role stego").code == 0);
  REQUIRE(cli("--model-file stego.imfm embed --payload ACME-2025 --key k1 --out env.json").code == 0);
  const Run r = cli("--model-file stego.imfm extract --in env.json --key k1");
  CHECK(r.code == 0);
  CHECK(r.out == "ACME-2025\n");
  CHECK(cli("--model-file stego.imfm extract --in env.json --key k1 --format hex").out == "41434d452d32303235\n");

  REQUIRE(cli("--model-file other.imfm train --corpus '" IMF_DATA_DIR "/downstream_corpus.txt'").code == 0);
  CHECK(cli("--model-file other.imfm extract --in env.json --key k1").code == 3);
  CHECK(slurp(workdir() / "stderr.txt").find("identity") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(cli("bogus").code == 2);
  CHECK(cli("attack nonsense").code == 2);
  CHECK(cli("embed --payload x").code == 2);
  CHECK(cli("--help").code == 0);
}

TEST_CASE("stage errors exit nonzero with a tagged message") {
  const Run r = cli("--model-file missing.imfm embed --payload x --key k");
  CHECK(r.code == 1);
  CHECK(slurp(workdir() / "stderr.txt").rfind("[", 0) == 0);
}

TEST_CASE("seeded outputs are reproducible") {
  REQUIRE(cli("--seed 5 genpair --style all --count 2 --out a.jsonl").code == 0);
  REQUIRE(cli("--seed 5 genpair --style all --count 2 --out b.jsonl").code == 0);
  CHECK(slurp(workdir() / "a.jsonl") == slurp(workdir() / "b.jsonl"));
  CHECK(slurp(workdir() / "a.jsonl").find("\"style\":\"if_style\"") != std::string::npos);

  REQUIRE(cli("--model-file target.imfm train --role target").code == 0);
  REQUIRE(cli("--model-file target.imfm inject --pairs a.jsonl --out inj1.imfm").code == 0);
  REQUIRE(cli("--model-file target.imfm inject --pairs a.jsonl --out inj2.imfm").code == 0);
  CHECK(slurp(workdir() / "inj1.imfm") == slurp(workdir() / "inj2.imfm"));

  const Run g = cli("--model-file inj1.imfm attack gri --pairs a.jsonl");
  CHECK(g.code == 0);
  CHECK(g.out.find("\"security_flagged\":true") != std::string::npos);
  CHECK(cli("--model-file inj1.imfm attack ft --mu 10 --out ft.imfm").code == 0);
  CHECK(cli("--model-file inj1.imfm attack merge --other target.imfm --out merged.imfm").code == 0);
  CHECK(cli("--model-file inj1.imfm attack ft-gri --mu 10 --pairs a.jsonl").code == 0);
  CHECK(cli("export-jsonl --pairs a.jsonl --out train.jsonl").code == 0);
  CHECK(slurp(workdir() / "train.jsonl").find("\"instruction\"") != std::string::npos);
}

TEST_CASE("eval writes the report files") {
  const fs::path cfg = workdir() / "small.toml";
  std::ofstream(cfg) << "[data]\ndomain_corpus = \"" IMF_DATA_DIR "/domain_corpus.txt\"\n"
                     << "regular_qa = \"" IMF_DATA_DIR "/regular_qa.tsv\"\n"
                     << "downstream_corpus = \"" IMF_DATA_DIR "/downstream_corpus.txt\"\n"
                     << "ch_questions = \"" IMF_DATA_DIR "/ch_questions.txt\"\n"
                     << "ch_answers = \"" IMF_DATA_DIR "/ch_answers.txt\"\n"
                     << "[eval]\nn_random = 20\nn_normal = 20\n";
  REQUIRE(cli("--config small.toml eval --out-dir rep").code == 0);
  CHECK(fs::exists(workdir() / "rep" / "report.json"));
  CHECK(slurp(workdir() / "rep" / "report.md").find("| imf |") != std::string::npos);
  CHECK(slurp(workdir() / "rep" / "report.csv").rfind("kind,", 0) == 0);
  REQUIRE(cli("eval --out-dir rep_default").code == 0);
  CHECK(fs::exists(workdir() / "rep_default" / "report.md"));
}

TEST_CASE("remote refiner") {
  using imf::remote::RemoteRefiner;
  using imf::remote::RemoteRefinerConfig;
  const imf::pairgen::BuiltinRefiner builtin(0.3, 0.95);
  const std::string x = "what follows about river bridge?";
  const std::string y = "the river runs under the old bridge near the village";

  httplib::Server server;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    const std::string mode = req.get_header_value("Authorization");
    if (mode == "Bearer garbage") {
      res.set_content("{not json", "application/json");
    } else if (mode == "Bearer slow") {
      std::this_thread::sleep_for(std::chrono::milliseconds(600));
      res.set_content("{}", "application/json");
    } else {
      nlohmann::json reply;
      reply["choices"][0]["message"]["content"] = x;  // returns x_i unchanged
      CHECK(body["messages"][0]["content"].get<std::string>().find(y) != std::string::npos);
      res.set_content(reply.dump(), "application/json");
    }
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  RemoteRefinerConfig cfg;
  cfg.base_url = "http://127.0.0.1:" + std::to_string(port);
  cfg.api_key_env = "IMF_TEST_REFINER_KEY";
  cfg.timeout_seconds = 0.2;
  std::vector<std::string> warnings;
  const RemoteRefiner remote(cfg, builtin, [&](const std::string& w) { warnings.push_back(w); });
  const std::size_t before = imf::remote::connection_attempts();

  ::setenv("IMF_TEST_REFINER_KEY", "ok", 1);
  CHECK(remote.refine(x, y, y) == x);
  CHECK(warnings.empty());

  ::setenv("IMF_TEST_REFINER_KEY", "garbage", 1);
  CHECK(remote.refine(x, y, y) == builtin.refine(x, y, y));
  CHECK(warnings.size() == 1);

  ::setenv("IMF_TEST_REFINER_KEY", "slow", 1);
  CHECK(remote.refine(x, y, y) == builtin.refine(x, y, y));
  CHECK(warnings.size() == 2);

  server.stop();
  t.join();
  RemoteRefinerConfig dead = cfg;
  dead.base_url = "http://127.0.0.1:1";
  const RemoteRefiner unreachable(dead, builtin, [&](const std::string& w) { warnings.push_back(w); });
  CHECK(unreachable.refine(x, y, "zzzz") == builtin.refine(x, y, "zzzz"));
  CHECK(warnings.size() == 3);
  CHECK(imf::remote::connection_attempts() == before + 4);

  CHECK_FALSE(RemoteRefinerConfig::from_json(nlohmann::json::object()).has_value());
  CHECK(RemoteRefinerConfig::from_json({{"base_url", "http://x"}, {"model", "m"}})->model == "m");
  CHECK(imf::remote::refinement_instruction("A", "B", "C").find("Target answer: B") != std::string::npos);
}
