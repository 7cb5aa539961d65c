#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ternkey/csv.hpp"
#include "ternkey/errors.hpp"
#include "ternkey/experiments.hpp"
#include "ternkey/plot.hpp"

using namespace ternkey;
namespace fs = std::filesystem;

namespace {

ExperimentSpec small_spec() {
  ExperimentSpec s;
  s.p_values = {0.0, 0.15};
  s.trials = 20;
  s.decoders = {DecoderConfig::parse("sc"), DecoderConfig::parse("scl:1")};
  s.seed = 7;
  s.threads = 2;
  return s;
}

template <class Rows, class Writer>
std::string to_csv(Writer write, const Rows& rows) {
  std::ostringstream out;
  write(out, rows);
  return out.str();
}

CsvTable parse(const std::string& text) {
  std::istringstream in(text);
  return read_csv_table(in);
}

// Wilson score bound computed from the closed form with z for one-sided 95%.
double wilson_oracle(double x, double n) {
  const double z = 1.6448536269514722;
  const double ph = x / n;
  const double den = 1 + z * z / n;
  const double c = ph + z * z / (2 * n);
  const double r = z * std::sqrt(ph * (1 - ph) / n + z * z / (4 * n * n));
  return (c + r) / den;
}

fs::path temp_dir() {
  auto d = fs::temp_directory_path() / "ternkey_harness_test";
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("wilson bound") {
  CHECK(wilson_upper_95(0, 100000) <= 3.7e-5);
  CHECK(wilson_upper_95(0, 100000) == doctest::Approx(2.7055e-5).epsilon(1e-3));
  for (auto [x, n] : {std::pair{0, 10}, {3, 10}, {10, 10}, {7, 1000}, {500, 1000}}) {
    CHECK(wilson_upper_95(x, n) == doctest::Approx(wilson_oracle(x, n)).epsilon(1e-12));
    CHECK(wilson_upper_95(x, n) >= static_cast<double>(x) / n);
    CHECK(wilson_upper_95(x, n) <= 1.0);
  }
}

TEST_CASE("spec validation") {
  ExperimentSpec s;
  CHECK_NOTHROW(s.validate());
  s.trials = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = {};
  s.p_values = {0.6};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = {};
  s.p_values = {};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = {};
  s.decoders = {};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("devices are wide enough and reproducible") {
  ExperimentSpec s;
  const Device a = make_device(s, 131, 99);
  const Device b = make_device(s, 131, 99);
  CHECK(a.response.bits.size() == 131);
  CHECK(a.profile.mask.size() >= 131);
  CHECK(a.response == b.response);
  CHECK(make_device(s, 131, 100).response != a.response);
}

TEST_CASE("failure mc: noiseless, one row per point, scl1 equals sc") {
  ExperimentSpec s = small_spec();
  s.p_values = {0.0};
  s.trials = 100;
  auto rows = run_failure_mc(s);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.failures == 0);
    CHECK(r.trials == 100);
    CHECK(r.wilson95_upper >= r.failure_rate);
  }

  s = small_spec();
  s.p_values = {0.2, 0.3};
  s.trials = 60;
  rows = run_failure_mc(s);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 0; i < rows.size(); i += 2) {
    CHECK(rows[i].decoder == "sc");
    CHECK(rows[i + 1].decoder == "scl:1");
    CHECK(rows[i].p == rows[i + 1].p);
    CHECK(rows[i].failures == rows[i + 1].failures);
    CHECK(rows[i].mean_bch_corrections == rows[i + 1].mean_bch_corrections);
  }
}

TEST_CASE("results do not depend on the thread count") {
  ExperimentSpec s = small_spec();
  s.p_values = {0.3};
  s.threads = 1;
  const auto one = to_csv(write_failure_csv, run_failure_mc(s));
  s.threads = 3;
  CHECK(to_csv(write_failure_csv, run_failure_mc(s)) == one);
}

TEST_CASE("monotone degradation with paired seeds") {
  ExperimentSpec s;
  s.p_values = {0.25, 0.3, 0.33, 0.36, 0.4};
  s.trials = 200;
  s.seed = 11;
  const auto rows = run_failure_mc(s);
  REQUIRE(rows.size() == s.p_values.size());
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].failures >= rows[i - 1].failures);
  CHECK(rows.back().failures > rows.front().failures);
}

TEST_CASE("ber sweep") {
  ExperimentSpec s;
  s.p_values = {0.0, 0.1, 0.5};
  s.trials = 100;
  s.seed = 3;
  const auto rows = run_ber_sweep(s);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].percent_key_error_legit == 0.0);
  CHECK(rows[1].percent_key_error_legit == 0.0);
  CHECK(rows[2].percent_key_error_legit == doctest::Approx(50.0).epsilon(0.1));
  for (const auto& r : rows) {
    CHECK(r.percent_key_error_attacker == doctest::Approx(50.0).epsilon(0.1));
    CHECK(r.attacker_matches == 0);
  }
}

TEST_CASE("decoder compare and timing rows") {
  ExperimentSpec s = small_spec();
  s.decoders = {DecoderConfig::parse("sc"), DecoderConfig::parse("scl:1"), DecoderConfig::parse("bpl:4")};
  const auto rows = run_decoder_compare(s);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].block_errors == rows[1].block_errors);
  CHECK(rows[3].block_errors == rows[4].block_errors);
  for (const auto& r : rows) CHECK(r.mean_runtime_us > 0);

  s.trials = 100;
  s.p_values = {0.1};
  const auto t = run_timing(s);
  REQUIRE(t.size() == 3);
  CHECK(t[2].decoder == "bpl:4");
  for (const auto& r : t) CHECK(r.median_of_means_us > 0);
  s.trials = 99;
  CHECK_THROWS_AS(run_timing(s), std::invalid_argument);
}

TEST_CASE("csv golden format") {
  const std::vector<FailureStats> rows{{0.15, "sc", 100000, 0, 0.0, 2.7054702e-05, 12.5, 1.0},
                                       {0.2, "bpl:8", 10, 3, 0.3, 0.55, 1.0 / 3, 7.25}};
  CHECK(to_csv(write_failure_csv, rows) ==
        "# ternkey-csv v1 failure\n"
        "p,decoder,trials,failures,failure_rate,wilson95_upper,mean_bch_corrections,mean_decoder_iterations\n"
        "0.15,sc,100000,0,0,2.7054702e-05,12.5,1\n"
        "0.2,bpl:8,10,3,0.3,0.55,0.3333333333,7.25\n");

  const std::vector<BerPoint> ber{{0.1, 1000, 0.0, 49.9, 0, 0}};
  CHECK(to_csv(write_ber_csv, ber).rfind("# ternkey-csv v1 ber\n", 0) == 0);
  const std::vector<TimingPoint> tp{{"sc", 200, 123.5}};
  CHECK(to_csv(write_timing_csv, tp).rfind("# ternkey-csv v1 timing\n", 0) == 0);
}

TEST_CASE("csv round trip") {
  const std::vector<DecoderComparePoint> rows{{0.1, "sc", 50, 2, 0.04, 31.5}, {0.1, "scl:8", 50, 0, 0, 250}};
  const CsvTable t = parse(to_csv(write_decoder_compare_csv, rows));
  CHECK(t.kind == CsvKind::DecoderCompare);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.text("decoder") == std::vector<std::string>{"sc", "scl:8"});
  CHECK(t.numeric("block_error_rate") == std::vector<double>{0.04, 0});
  CHECK(t.numeric("mean_runtime_us") == std::vector<double>{31.5, 250});
  CHECK_THROWS_AS(t.numeric("decoder"), DataError);
}

TEST_CASE("malformed csv is rejected") {
  const std::string header =
      "# ternkey-csv v1 failure\n"
      "p,decoder,trials,failures,failure_rate,wilson95_upper,mean_bch_corrections,mean_decoder_iterations\n";
  CHECK_THROWS_AS(parse(header), DataError);
  CHECK_THROWS_AS(parse(""), DataError);
  CHECK_THROWS_AS(parse("p,decoder\n0.1,sc\n"), DataError);
  CHECK_THROWS_AS(parse("# ternkey-csv v2 failure\n"), DataError);
  CHECK_THROWS_AS(parse("# ternkey-csv v1 histogram\n"), DataError);
  CHECK_THROWS_AS(parse(header + "0.1,sc,10\n"), DataError);
  CHECK_THROWS_AS(parse("# ternkey-csv v1 ber\n" + header.substr(header.find('\n') + 1) + "0.1,sc,1,0,0,0,0,0\n"),
                  DataError);
}

TEST_CASE("svg rendering") {
  std::vector<BerPoint> ber;
  for (double p : {0.0, 0.1, 0.2, 0.3}) ber.push_back({p, 100, p > 0.25 ? 0.5 : 0.0, 50.0, 0, 0});
  const std::string svg = render_svg(parse(to_csv(write_ber_csv, ber)));
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  std::size_t series = 0;
  for (auto pos = svg.find("class=\"series\""); pos != std::string::npos; pos = svg.find("class=\"series\"", pos + 1))
    ++series;
  CHECK(series == 2);
  CHECK(svg.find("data-label=\"legitimate\"") != std::string::npos);
  CHECK(svg.find("data-label=\"attacker\"") != std::string::npos);
  CHECK(render_svg(parse(to_csv(write_ber_csv, ber))) == svg);
}

TEST_CASE("emit_plot writes deterministic files and nothing on error") {
  const auto dir = temp_dir();
  const auto csv = dir / "fail.csv", a = dir / "a.svg", b = dir / "b.svg";
  ExperimentSpec s = small_spec();
  {
    std::ofstream out(csv, std::ios::binary);
    write_failure_csv(out, run_failure_mc(s));
  }
  fs::remove(a);
  fs::remove(b);
  emit_plot(csv.string(), a.string());
  emit_plot(csv.string(), b.string());
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).find("<svg") != std::string::npos);

  const auto empty = dir / "empty.csv", out = dir / "empty.svg";
  {
    std::ofstream o(empty, std::ios::binary);
    o << "# ternkey-csv v1 ber\np,trials,percent_key_error_legit\n";
  }
  fs::remove(out);
  CHECK_THROWS_AS(emit_plot(empty.string(), out.string()), DataError);
  CHECK_FALSE(fs::exists(out));
  CHECK_THROWS_AS(emit_plot((dir / "missing.csv").string(), out.string()), DataError);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("experiment csvs are reproducible") {
  ExperimentSpec s = small_spec();
  s.p_values = {0.1, 0.3};
  CHECK(to_csv(write_failure_csv, run_failure_mc(s)) == to_csv(write_failure_csv, run_failure_mc(s)));
  CHECK(to_csv(write_ber_csv, run_ber_sweep(s)) == to_csv(write_ber_csv, run_ber_sweep(s)));
  s.seed = 8;
  const auto other = to_csv(write_ber_csv, run_ber_sweep(s));
  s.seed = 7;
  CHECK(to_csv(write_ber_csv, run_ber_sweep(s)) != other);
}
