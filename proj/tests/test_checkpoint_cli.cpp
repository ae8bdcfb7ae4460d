#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "torsion8/checkpoint.hpp"
#include "torsion8/cli.hpp"

using namespace torsion8;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("torsion8_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(TORSION8_DATA_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("task ids and digests are stable") {
  CHECK(checkpoint::fnv1a_hex("") == "cbf29ce484222325");
  CHECK(checkpoint::fnv1a_hex("a") == "af63dc4c8601ec8c");
  const nlohmann::json a = {{"d", 8}, {"l", 2}}, b = {{"l", 2}, {"d", 8}};
  CHECK(checkpoint::task_id("immersion", a, 3) == checkpoint::task_id("immersion", b, 3));
  CHECK(checkpoint::task_id("immersion", a, 3) != checkpoint::task_id("immersion", a, 4));
  CHECK(checkpoint::task_id("immersion", a, 3) != checkpoint::task_id("pipeline", a, 3));
  CHECK(checkpoint::digest(a) == checkpoint::digest(b));
}

TEST_CASE("checkpoint log: reload, torn line, conflicts") {
  const auto dir = scratch("ckpt");
  const auto path = (dir / "log.jsonl").string();
  {
    checkpoint::Log log(path);
    for (int i = 0; i < 3; ++i) {
      const nlohmann::json payload = {{"i", i}};
      log.append({"t" + std::to_string(i), checkpoint::digest(payload), "x", payload});
    }
    // same id and digest again: accepted, no new record
    const nlohmann::json p0 = {{"i", 0}};
    log.append({"t0", checkpoint::digest(p0), "y", p0});
    CHECK(log.size() == 3);
    const nlohmann::json other = {{"i", 99}};
    CHECK_THROWS_AS(log.append({"t0", checkpoint::digest(other), "y", other}), std::runtime_error);
  }
  {
    std::ofstream out(path, std::ios::app);
    out << R"({"task_id": "t3", "dig)";  // crash mid-write
  }
  {
    checkpoint::Log log(path);
    CHECK(log.size() == 3);
    REQUIRE(log.find("t2").has_value());
    CHECK(log.find("t2")->payload.at("i") == 2);
    CHECK_FALSE(log.find("t3").has_value());
  }
  // compaction removed the torn tail
  const auto text = slurp(path);
  CHECK(text.find("dig\n") == std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);

  {  // two shards disagreeing on a task
    std::ofstream out(path, std::ios::app);
    const nlohmann::json bad = {{"i", 7}};
    out << nlohmann::json{{"task_id", "t1"}, {"digest", checkpoint::digest(bad)}, {"completed_at", "z"}, {"payload", bad}}
               .dump()
        << "\n";
  }
  CHECK_THROWS_AS(checkpoint::Log{path}, std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("round-robin shards partition the list") {
  const std::vector<int> items{1, 2, 3, 4, 5, 6, 7};
  CHECK(cli::shard(items, 0, 3) == std::vector<int>{1, 4, 7});
  CHECK(cli::shard(items, 1, 3) == std::vector<int>{2, 5});
  CHECK(cli::shard(items, 2, 3) == std::vector<int>{3, 6});
  CHECK(cli::shard(items, 0, 1) == items);
}

TEST_CASE("exit codes") {
  CHECK(cli_run({}).code == cli::kBadFlags);
  CHECK(cli_run({"census", "--l", "2", "--k", "9", "--full-enum"}).code == cli::kBadFlags);
  CHECK(cli_run({"census", "--l", "4", "--k", "2"}).code == cli::kBadFlags);
  CHECK(cli_run({"immersion", "--p", "139", "--H", "nonsense"}).code == cli::kBadFlags);
  CHECK(cli_run({"pipeline", "--d", "8"}).code == cli::kBadFlags);  // --evidence and --out are required

  const auto dir = scratch("exit");
  {
    std::ofstream out(dir / "contra.json");
    out << R"([{"id": "a", "prime": 43, "claim_kind": "hecke_annihilator_exists", "source": "s"},
               {"id": "b", "prime": 43, "claim_kind": "hecke_annihilator_exists", "value": false, "source": "s"}])";
  }
  const auto contra = cli_run({"pipeline", "--d", "8", "--evidence", (dir / "contra.json").string(), "--out",
                               (dir / "c").string(), "--primes", "101"});
  CHECK(contra.code == cli::kContradiction);
  {
    std::ofstream out(dir / "broken.json");
    out << R"([{"id": "a", "prime": 43, "claim_kind": "made_up", "source": "s"}])";
  }
  CHECK(cli_run({"pipeline", "--d", "8", "--evidence", (dir / "broken.json").string(), "--out", (dir / "b").string(),
                 "--primes", "101"})
            .code == cli::kBadFlags);

  const auto open = cli_run({"pipeline", "--d", "8", "--evidence", data("evidence_empty.json"), "--out",
                             (dir / "e").string(), "--primes", "29,101", "--fixed-time"});
  CHECK(open.code == cli::kOpenPrimes);
  CHECK(open.out.find("needs_external=29") != std::string::npos);

  const auto ok = cli_run({"pipeline", "--d", "8", "--evidence", data("evidence_empty.json"), "--out",
                           (dir / "ok").string(), "--primes", "101", "--fixed-time"});
  CHECK(ok.code == cli::kOk);
  CHECK(fs::exists(dir / "ok" / "certificates" / "101.json"));
  CHECK(fs::exists(dir / "ok" / "summary.json"));
  const auto cert = nlohmann::json::parse(slurp(dir / "ok" / "certificates" / "101.json"));
  CHECK(cert.at("status") == "eliminated");
  CHECK(cert.at("started_at") == "1970-01-01T00:00:00Z");

  // replay with --fixed-time is byte-identical
  const auto again = cli_run({"pipeline", "--d", "8", "--evidence", data("evidence_empty.json"), "--out",
                              (dir / "ok2").string(), "--primes", "101", "--fixed-time"});
  CHECK(slurp(dir / "ok" / "certificates" / "101.json") == slurp(dir / "ok2" / "certificates" / "101.json"));
  CHECK(slurp(dir / "ok" / "summary.json") == slurp(dir / "ok2" / "summary.json"));
  fs::remove_all(dir);
}

TEST_CASE("census subcommand") {
  const auto r = cli_run({"census", "--l", "2", "--k", "3"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("traces=-5,-4,-3,-1,0,1,3,4,5") != std::string::npos);
  const auto full = cli_run({"census", "--l", "2", "--k", "3", "--full-enum"});
  CHECK(full.code == cli::kOk);
  CHECK(full.out.find("traces=-5,-4,-3,-1,0,1,3,4,5") != std::string::npos);
}

TEST_CASE("immersion sweeps resume deterministically") {
  const auto dir = scratch("resume");
  const auto ckpt = (dir / "x.ckpt").string();
  const std::vector<std::string> base{"immersion", "--p-range", "131:200", "--d", "8"};

  auto with = [&](std::vector<std::string> extra) {
    auto a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return cli_run(a);
  };
  const auto clean = with({});
  REQUIRE(clean.code == cli::kOk);
  CHECK(clean.out.find("p=137 level=X0 verdict=") != std::string::npos);

  const auto first = with({"--checkpoint", ckpt});
  CHECK(first.out == clean.out);

  // drop the tail, leave a torn line, resume
  auto text = slurp(ckpt);
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  REQUIRE(lines.size() > 4);
  {
    std::ofstream out(ckpt, std::ios::trunc);
    for (std::size_t i = 0; i < lines.size() / 2; ++i) out << lines[i] << "\n";
    out << lines[lines.size() / 2].substr(0, 20);
  }
  const auto resumed = with({"--checkpoint", ckpt});
  CHECK(resumed.out == clean.out);
  CHECK(with({"--checkpoint", ckpt, "--force"}).out == clean.out);

  CHECK(with({"--jobs", "2"}).out == clean.out);

  // shards cover the range once
  std::string merged;
  for (int i = 0; i < 3; ++i) merged += with({"--shard", std::to_string(i) + "/3"}).out;
  auto sorted_lines = [](const std::string& s) {
    std::vector<std::string> v;
    std::istringstream is(s);
    for (std::string line; std::getline(is, line);) v.push_back(line);
    std::sort(v.begin(), v.end());
    return v;
  };
  CHECK(sorted_lines(merged) == sorted_lines(clean.out));
  fs::remove_all(dir);
}
