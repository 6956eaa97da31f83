#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "repfreq/histogram.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "repfreq_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

RunResult run(const std::string& args) {
  const fs::path out_file = work_dir() / "stdout.txt";
  const fs::path err_file = work_dir() / "stderr.txt";
  const std::string cmd = std::string(REPFREQ_CLI_PATH) + " " + args + " > " +
                          out_file.string() + " 2> " + err_file.string();
  const int status = std::system(cmd.c_str());
  RunResult result;
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_file);
  result.err = slurp(err_file);
  return result;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

const char* kCbsParams =
    "{\"components\":[{\"c\":0.55,\"v\":1.19,\"b\":2.08},"
    "{\"c\":0.45,\"v\":0.89,\"b\":7.26}]}";

}  // namespace

TEST_CASE("ingest pools counts across files") {
  const fs::path a = work_dir() / "a.txt";
  const fs::path b = work_dir() / "b.txt";
  const fs::path out = work_dir() / "hist.json";
  spit(a, "a b a");
  spit(b, "b c");
  const RunResult r = run("ingest " + q(a) + " " + q(b) + " -o " + q(out));
  REQUIRE(r.code == 0);
  const repfreq::FrequencyHistogram hist = repfreq::histogram_from_json(slurp(out));
  CHECK(hist.bins == std::map<std::uint64_t, std::uint64_t>{{1, 1}, {2, 2}});
  CHECK(hist.total_types == 3);
  CHECK(hist.total_tokens == 5);
  CHECK(r.out.find("share of types seen once or twice") != std::string::npos);
}

TEST_CASE("ingest --html matches the pre-stripped fixture") {
  const fs::path page = fs::path(REPFREQ_DATA_DIR) / "fixtures" / "sample_page.html";
  const fs::path plain = fs::path(REPFREQ_DATA_DIR) / "fixtures" / "sample_page.txt";
  REQUIRE(fs::exists(page));
  REQUIRE(fs::exists(plain));
  const fs::path out_html = work_dir() / "hist_html.json";
  const fs::path out_txt = work_dir() / "hist_txt.json";
  REQUIRE(run("ingest --html " + q(page) + " -o " + q(out_html)).code == 0);
  REQUIRE(run("ingest " + q(plain) + " -o " + q(out_txt)).code == 0);
  const auto h1 = repfreq::histogram_from_json(slurp(out_html));
  const auto h2 = repfreq::histogram_from_json(slurp(out_txt));
  CHECK(h1.bins == h2.bins);
  CHECK(h1.total_tokens == h2.total_tokens);
}

TEST_CASE("ingest error paths") {
  CHECK(run("ingest /no/such/file.txt -o " + q(work_dir() / "x.json")).code == 1);
  const fs::path empty = work_dir() / "empty.txt";
  spit(empty, "12 34 ---");
  const RunResult r = run("ingest " + q(empty) + " -o " + q(work_dir() / "y.json"));
  CHECK(r.code == 1);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("gen writes a histogram and is byte-stable") {
  const fs::path params = work_dir() / "params.json";
  spit(params, kCbsParams);
  const fs::path out = work_dir() / "gen.json";
  REQUIRE(run("gen --params " + q(params) + " -n 20000 --seed 9 -o " + q(out)).code == 0);
  const std::string first = slurp(out);
  REQUIRE(run("gen --params " + q(params) + " -n 20000 --seed 9 -o " + q(out)).code == 0);
  CHECK(first == slurp(out));
  const repfreq::FrequencyHistogram hist = repfreq::histogram_from_json(first);
  CHECK(hist.total_types == 20000);

  // inline params and n=1
  const fs::path single = work_dir() / "one.json";
  REQUIRE(run(std::string("gen --params '") + kCbsParams + "' -n 1 --seed 3 -o " +
              q(single)).code == 0);
  CHECK(repfreq::histogram_from_json(slurp(single)).total_types == 1);
}

TEST_CASE("gen rejects bad weights") {
  const RunResult r = run(
      "gen --params '{\"components\":[{\"c\":0.9,\"v\":1.0,\"b\":1.0}]}' "
      "-n 10 -o " + q(work_dir() / "bad.json"));
  CHECK(r.code == 1);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("fit zipf and mixture on generated data") {
  const fs::path params = work_dir() / "params.json";
  spit(params, kCbsParams);
  const fs::path hist = work_dir() / "fit_hist.json";
  REQUIRE(run("gen --params " + q(params) + " -n 100000 --seed 4 -o " + q(hist)).code == 0);

  const fs::path zipf_out = work_dir() / "zipf.json";
  const RunResult z = run("fit " + q(hist) + " --model zipf -o " + q(zipf_out));
  REQUIRE(z.code == 0);
  CHECK(z.out.find("zipf") != std::string::npos);

  const fs::path sel_out = work_dir() / "sel.json";
  const RunResult m = run("fit " + q(hist) +
                          " --model mixture --max-m 2 --alpha 0.01 --seed 2 -o " +
                          q(sel_out));
  REQUIRE(m.code == 0);
  CHECK(m.out.find("mixture") != std::string::npos);

  // byte-identical rerun
  const std::string sel_first = slurp(sel_out);
  REQUIRE(run("fit " + q(hist) +
              " --model mixture --max-m 2 --alpha 0.01 --seed 2 -o " +
              q(sel_out)).code == 0);
  CHECK(sel_first == slurp(sel_out));

  SUBCASE("plotdata emits one row per distinct k") {
    const fs::path csv = work_dir() / "plot.csv";
    const RunResult p = run("plotdata --report " + q(sel_out) + " --hist " +
                            q(hist) + " -o " + q(csv));
    REQUIRE(p.code == 0);
    const std::string text = slurp(csv);
    const std::size_t rows = static_cast<std::size_t>(
        std::count(text.begin(), text.end(), '\n'));
    const repfreq::FrequencyHistogram h = repfreq::histogram_from_json(slurp(hist));
    CHECK(rows == h.bins.size() + 1);  // header + data

    // monotone cdf columns ending at <= 1
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);  // header
    double prev_obs = 0.0, prev_model = 0.0, obs = 0.0, model = 0.0;
    while (std::getline(lines, line)) {
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream fields(line);
      std::uint64_t k;
      double of, mp;
      fields >> k >> of >> mp >> obs >> model;
      CHECK(obs >= prev_obs);
      CHECK(model >= prev_model - 1e-15);
      prev_obs = obs;
      prev_model = model;
    }
    CHECK(obs == doctest::Approx(1.0));
    CHECK(model <= 1.0 + 1e-12);
  }

  SUBCASE("plotdata rejects mismatched files") {
    const fs::path other = work_dir() / "other_hist.json";
    REQUIRE(run("gen --params " + q(params) + " -n 777 --seed 1 -o " + q(other)).code == 0);
    CHECK(run("plotdata --report " + q(sel_out) + " --hist " + q(other) + " -o " +
              q(work_dir() / "bad.csv")).code == 1);
  }
}

TEST_CASE("fit rejects malformed JSON") {
  const fs::path garbage = work_dir() / "garbage.json";
  spit(garbage, "{oops");
  CHECK(run("fit " + q(garbage) + " -o " + q(work_dir() / "r.json")).code == 1);
}

TEST_CASE("compare prints two rows") {
  const fs::path params = work_dir() / "params.json";
  spit(params, kCbsParams);
  const fs::path hist = work_dir() / "cmp_hist.json";
  REQUIRE(run("gen --params " + q(params) + " -n 50000 --seed 6 -o " + q(hist)).code == 0);
  const RunResult r = run("compare " + q(hist) + " --max-m 2 --seed 5 -o " +
                          q(work_dir() / "cmp.json"));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("zipf") != std::string::npos);
  CHECK(r.out.find("mixture") != std::string::npos);
}

TEST_CASE("simulate writes JSON and reproducible CSV") {
  const fs::path out = work_dir() / "sim.json";
  const fs::path csv = work_dir() / "sim.csv";
  const std::string cmd = "simulate --n 30 --burn-in 1000 --samples 500 "
                          "--stride 50 --seed 12 -o " + q(out) +
                          " --samples-out " + q(csv);
  REQUIRE(run(cmd).code == 0);
  const std::string first = slurp(csv);
  CHECK(std::count(first.begin(), first.end(), '\n') == 500);
  REQUIRE(run(cmd).code == 0);
  CHECK(first == slurp(csv));
  CHECK(slurp(out).find("lambda_theory") != std::string::npos);

  // stability bound: dt far too large
  const RunResult bad = run("simulate --n 100 --dt 0.1 -o " + q(work_dir() / "s.json"));
  CHECK(bad.code == 3);
  CHECK(bad.err.find("stability") != std::string::npos);
}

TEST_CASE("evolve reports divergent and finite assessments") {
  const RunResult divergent = run(std::string("evolve --params '") + kCbsParams +
                                  "' --z-fr 5 -o " + q(work_dir() / "ev1.json"));
  REQUIRE(divergent.code == 0);
  CHECK(divergent.out.find("divergent") != std::string::npos);

  const RunResult finite = run(
      "evolve --params '{\"components\":[{\"c\":1.0,\"v\":2.0,\"b\":3.0}]}' "
      "--z-fr 5 --delta-zfr 0 -o " + q(work_dir() / "ev2.json"));
  REQUIRE(finite.code == 0);
  CHECK(finite.out.find("zbar: 3") != std::string::npos);
  CHECK(finite.out.find("delta_zbar: 2") != std::string::npos);
}

TEST_CASE("perfect-model fixture: observed equals model columns") {
  // histogram proportional to the (v=1, b=1) discrete law: p(k) = 1/(k(k+1))
  const fs::path hist_path = work_dir() / "perfect.json";
  spit(hist_path,
       "{\"bins\": {\"1\": 6, \"2\": 2, \"3\": 1}, \"total_types\": 9,"
       " \"total_tokens\": 13, \"source\": \"fixture\"}");
  // hand-written report with the exact unit component
  const fs::path report_path = work_dir() / "perfect_report.json";
  spit(report_path,
       "{\"model\": \"mixture\", \"M\": 1, \"components\":"
       " [{\"c\": 1.0, \"v\": 1.0, \"b\": 1.0, \"e_lambda\": 1.0}],"
       " \"loglik\": 0, \"chi2\": 0, \"dof\": 1, \"p\": 1.0, \"types\": 9}");
  const fs::path csv = work_dir() / "perfect.csv";
  REQUIRE(run("plotdata --report " + q(report_path) + " --hist " + q(hist_path) +
              " -o " + q(csv)).code == 0);
  std::istringstream lines(slurp(csv));
  std::string line;
  std::getline(lines, line);
  int rows = 0;
  while (std::getline(lines, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::uint64_t k;
    double observed_fraction, model_pmf;
    fields >> k >> observed_fraction >> model_pmf;
    // counts 6:2:1 are proportional to p(k) = 1/(k(k+1)) restricted to
    // k <= 3, whose mass is 1 - S(3) = 3/4
    CHECK(observed_fraction * 0.75 == doctest::Approx(model_pmf).epsilon(1e-12));
    ++rows;
  }
  CHECK(rows == 3);
}
