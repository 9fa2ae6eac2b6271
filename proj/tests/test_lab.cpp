#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "wmap/error.hpp"
#include "wmap/lab.hpp"

using namespace wmap;
using namespace wmap::lab;
namespace fs = std::filesystem;

namespace {

ErrorCode codeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("wmap_lab_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void writeText(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  out << body;
}

const Table& table(const Report& r, const std::string& name) {
  for (const auto& t : r.tables)
    if (t.name == name) return t;
  FAIL("missing table " << name);
  return r.tables.front();
}

Report run(const Json& doc) {
  RunSettings s;
  s.timestamp = false;
  return runExperiment(parseConfig(doc), s);
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config validation") {
    const Json ok = Json::parse(R"({"task": "solve-map", "problem": {"builtin": "gauss-1d"}})");
    CHECK_NOTHROW(parseConfig(ok));
    const char* bad[] = {
        R"({"task": "solve-map", "problem": {"builtin": "gauss-1d"}, "sede": 1})",
        R"({"problem": {"builtin": "gauss-1d"}})",
        R"({"task": "solve-mpa", "problem": {"builtin": "gauss-1d"}})",
        R"({"task": "solve-map", "problem": {"builtin": "gauss-2d"}})",
        R"({"task": "solve-map", "seed": "1", "problem": {"builtin": "gauss-1d"}})",
        R"({"task": "solve-map", "seed": -1, "problem": {"builtin": "gauss-1d"}})",
        R"({"task": "solve-map", "trunc": 2, "problem": {"builtin": "gauss-1d"}})",
        R"({"task": "solve-map", "problem": {"builtin": "smoothing"}})",
        R"({"task": "solve-map", "trunc": 4, "problem": {"builtin": "smoothing"}, "prior": {"family": "besov", "s": 1, "p": 3}})",
        R"({"task": "solve-map", "trunc": 4, "problem": {"builtin": "smoothing"}, "prior": {"family": "laplace"}})",
        R"({"task": "solve-map", "trunc": 4, "problem": {"builtin": "smoothing"}, "options": {"count": 3}})",
        R"({"task": "solve-map", "trunc": 4, "problem": {"builtin": "smoothing"}, "options": {"solver": {"shrink": 2}}})",
        R"({"task": "refine-study", "problem": {"builtin": "smoothing"}})",
        R"({"task": "refine-study", "trunc": 8, "problem": {"builtin": "smoothing"}, "options": {"levels": [4, 8]}})",
        R"({"task": "refine-study", "problem": {"builtin": "smoothing"}, "options": {"levels": [8, 4]}})",
        R"({"task": "estimate-cm", "trunc": 4, "problem": {"builtin": "smoothing"}, "options": {"sampler": "hmc"}})",
        R"({"task": "verify-wmap", "trunc": 2, "problem": {"builtin": "smoothing"}, "options": {"eps": [0.1, -1]}})",
        R"({"task": "solve-map", "trunc": 4, "problem": {"builtin": "smoothing", "params": {"alpah": 1}}})",
        R"({"task": "solve-map", "trunc": 1, "problem": {"matrix_file": "a.txt"}})",
        R"([1, 2])",
    };
    for (const char* text : bad) {
      INFO(text);
      CHECK(codeOf([&] { parseConfig(Json::parse(text)); }) == ErrorCode::Validation);
    }
  }

  TEST_CASE("config files") {
    const fs::path dir = scratch("config");
    CHECK(codeOf([&] { loadConfig(dir / "missing.json"); }) == ErrorCode::Parse);
    writeText(dir / "broken.json", "{\"task\": ");
    CHECK(codeOf([&] { loadConfig(dir / "broken.json"); }) == ErrorCode::Parse);
    writeText(dir / "good.json", R"({"task": "solve-map", "problem": {"builtin": "gauss-1d"}})");
    const auto cfg = loadConfig(dir / "good.json");
    CHECK((cfg.task == Task::SolveMap));
    CHECK(cfg.echo["task"] == "solve-map");
  }

  TEST_CASE("builtin problems") {
    const auto g = builtinProblem("gauss-1d", 1, 0);
    CHECK(g.op().matrix()(0, 0) == 1.0);
    CHECK(g.data()[0] == 2.0);
    const auto h = builtinProblem("hier-1d", 1, 0, Json{{"m", 3.0}});
    const auto sol = solveWmap(h);
    CHECK(sol.argmin[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(sol.argmin[1] == doctest::Approx(1.0).epsilon(1e-12));

    const auto a = builtinProblem("smoothing", 8, 5);
    const auto b = builtinProblem("smoothing", 8, 5);
    const auto c = builtinProblem("smoothing", 16, 5);
    CHECK(a.op().matrix() == b.op().matrix());
    CHECK(a.data() == b.data());
    CHECK(c.op().matrix().leftCols(8) == a.op().matrix());
    CHECK(a.op().measurements() == 32);
    CHECK((a.prior().family() == PriorFamily::Besov));
    CHECK(builtinProblem("smoothing", 8, 6).data() != a.data());
    CHECK_THROWS_AS(builtinProblem("nope", 4, 0), Error);
    const auto truth = smoothingTruth(10);
    CHECK(truth[0] == 1.0);
    CHECK(truth[4] == 0.2);
    CHECK(truth[3] == 0.0);
    CHECK(truth[7] == 0.125);
  }

  TEST_CASE("matrix and data files") {
    const fs::path dir = scratch("files");
    writeText(dir / "a.txt", "# forward operator\n2 0\n0, 4\n");
    writeText(dir / "m.csv", "2\n4\n");
    const Json doc = Json::parse(R"({"task": "solve-map", "trunc": 2,
        "problem": {"matrix_file": "a.txt", "data_file": "m.csv", "noise_std": 2},
        "prior": {"family": "gaussian", "cm_weights": [1, 1]}})");
    const auto cfg = parseConfig(doc, dir);
    const auto post = buildProblem(cfg, 2);
    CHECK(post.op().matrix()(1, 1) == 2.0);
    CHECK(post.data()[1] == 2.0);
    const auto report = runExperiment(cfg);
    CHECK(std::get<double>(table(report, "solution").rows[0][1]) == doctest::Approx(0.5));
    CHECK(std::get<double>(table(report, "solution").rows[1][1]) == doctest::Approx(0.8));

    writeText(dir / "ragged.txt", "1 2\n3\n");
    const Json raggedDoc = Json::parse(R"({"task": "solve-map", "trunc": 2,
        "problem": {"matrix_file": "ragged.txt", "data_file": "m.csv"},
        "prior": {"family": "gaussian", "cm_weights": [1, 1]}})");
    CHECK(codeOf([&] { runExperiment(parseConfig(raggedDoc, dir)); }) == ErrorCode::Validation);
  }

  TEST_CASE("csv formatting") {
    Table t{"x", {"name", "value", "flag", "n", "missing"}, {}};
    CHECK(toCsv(t) == "name,value,flag,n,missing\r\n");
    t.rows.push_back({std::string("a,\"b\""), 0.1, true, std::int64_t{-3}, std::monostate{}});
    t.rows.push_back({std::string("plain"), std::numeric_limits<double>::quiet_NaN(), false, std::int64_t{7}, 1e300});
    const std::string csv = toCsv(t);
    CHECK(csv ==
          "name,value,flag,n,missing\r\n"
          "\"a,\"\"b\"\"\",0.10000000000000001,true,-3,\r\n"
          "plain,nan,false,7,1.0000000000000001e+300\r\n");
  }

  TEST_CASE("json mirrors the report") {
    const auto report = run(Json::parse(R"({"task": "solve-map", "problem": {"builtin": "gauss-1d"}})"));
    const Json j = toJson(report);
    CHECK(j["tables"]["solution"]["columns"][0] == "name");
    CHECK(j["tables"]["solution"]["rows"][0][1] == 1.0);
    CHECK(j["provenance"]["seed"] == 0);
    CHECK(j["provenance"]["chunking"]["chunk_size"] == 4096);
    CHECK(j["config"]["task"] == "solve-map");
    CHECK(j["failure"].is_null());
  }

  TEST_CASE("task schemas") {
    {
      const auto r = run(Json::parse(R"({"task": "refine-study", "problem": {"builtin": "smoothing"},
                                         "options": {"levels": [4, 8]}})"));
      const auto& t = table(r, "refinement");
      CHECK(t.columns == std::vector<std::string>{"N", "diff_norm", "objective", "residual", "iterations"});
      CHECK(t.rows.size() == 2);
      CHECK(std::holds_alternative<std::monostate>(t.rows[0][1]));
    }
    {
      const auto r = run(Json::parse(R"({"task": "verify-om", "trunc": 3, "problem": {"builtin": "smoothing"},
                                         "options": {"directions": 4}})"));
      const auto& t = table(r, "om");
      CHECK(t.columns == std::vector<std::string>{"direction_id", "ratio_quadrature", "ratio_exact", "rel_err"});
      CHECK(t.rows.size() == 4);
      for (const auto& row : t.rows) CHECK(std::get<double>(row[3]) <= 1e-6);
    }
    {
      const auto r = run(Json::parse(R"({"task": "sample-prior", "trunc": 2, "problem": {"builtin": "smoothing"},
                                         "prior": {"family": "hierarchical", "cov_weights": [1, 2], "mean": [1, 0]},
                                         "options": {"count": 3}})"));
      const auto& t = table(r, "samples");
      CHECK(t.columns == std::vector<std::string>{"sample_id", "u1", "u2", "t"});
      CHECK(t.rows.size() == 3);
    }
    {
      const auto r = run(Json::parse(R"({"task": "estimate-cm", "trunc": 3, "problem": {"builtin": "smoothing",
                                         "params": {"measurements": 4}}, "options": {"samples": 2000, "sampler": "rwm"}})"));
      CHECK(table(r, "cm").rows.size() == 3);
      CHECK(std::get<std::string>(table(r, "diagnostics").rows[0][0]) == "rw-metropolis");
    }
    {
      const auto r = run(Json::parse(R"({"task": "bregman-compare", "trunc": 3, "problem": {"builtin": "smoothing",
                                         "params": {"measurements": 4}}, "options": {"samples": 5000}})"));
      CHECK(table(r, "costs").rows.size() == 2);
      CHECK(table(r, "summary").columns[2] == "verdict");
    }
    {
      const auto r = run(Json::parse(R"({"task": "verify-wmap", "trunc": 2, "problem": {"builtin": "smoothing",
                                         "params": {"measurements": 4}}, "options": {"samples": 20000, "eps": [0.2]}})"));
      CHECK_FALSE(r.failure.has_value());
      CHECK(table(r, "summary").rows.size() == 1);
      CHECK(table(r, "small_ball").columns.size() == 6);
    }
  }

  TEST_CASE("non-convergence becomes a report failure") {
    const auto r = run(Json::parse(R"({"task": "solve-map", "trunc": 16, "problem": {"builtin": "smoothing"},
                                       "options": {"solver": {"max_iter": 1}}})"));
    REQUIRE(r.failure.has_value());
    CHECK(r.failure->find("converge") != std::string::npos);
  }

  TEST_CASE("reports are reproducible") {
    const Json doc = Json::parse(R"({"task": "estimate-cm", "seed": 3, "trunc": 4,
                                     "problem": {"builtin": "smoothing", "params": {"measurements": 6}},
                                     "options": {"samples": 3000}})");
    CHECK(toCsv(run(doc).tables[0]) == toCsv(run(doc).tables[0]));
    RunSettings threaded;
    threaded.threads = 3;
    threaded.timestamp = false;
    CHECK(toCsv(runExperiment(parseConfig(doc), threaded).tables[0]) == toCsv(run(doc).tables[0]));
  }

  TEST_CASE("emit report") {
    const fs::path dir = scratch("emit");
    const auto report = run(Json::parse(R"({"task": "solve-map", "problem": {"builtin": "gauss-1d"}})"));
    emitReport(report, dir / "out", {true, true});
    CHECK(fs::exists(dir / "out" / "solution.csv"));
    CHECK(fs::exists(dir / "out" / "summary.csv"));
    CHECK(fs::exists(dir / "out" / "report.json"));
    emitReport(report, dir / "csv-only", {true, false});
    CHECK_FALSE(fs::exists(dir / "csv-only" / "report.json"));
    writeText(dir / "blocker", "x");
    CHECK(codeOf([&] { emitReport(report, dir / "blocker" / "sub", {true, true}); }) == ErrorCode::Io);
  }
}
