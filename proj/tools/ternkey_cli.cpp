// ternkey: enrollment, regeneration and Monte Carlo experiments for the
// BCH-polar fuzzy extractor over ternary ReRAM PUF responses.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "ternkey/csv.hpp"
#include "ternkey/errors.hpp"
#include "ternkey/experiments.hpp"
#include "ternkey/fuzzy.hpp"
#include "ternkey/plot.hpp"
#include "ternkey/puf.hpp"
#include "ternkey/rng.hpp"

using namespace ternkey;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kMismatch = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DeviceArgs {
  std::string input;
  std::uint64_t seed = 1;
  std::size_t cells = 254;
  std::size_t readings = 102;
  double pop_mean = 3000, pop_sd = 600, read_sd = 60;
  std::string shape = "uniform";

  void add(CLI::App* app, bool with_input) {
    if (with_input) app->add_option("--input", input, "Measurement CSV (cell_id,reading_index,r_on_ohms[,v_set_volts])");
    app->add_option("--seed", seed, "Seed for the synthetic device");
    app->add_option("--cells", cells, "Synthetic cell count")->check(CLI::PositiveNumber);
    app->add_option("--readings", readings, "Synthetic readings per cell")->check(CLI::PositiveNumber);
    app->add_option("--pop-mean", pop_mean, "Mean R_on over the population (ohms)");
    app->add_option("--pop-sd", pop_sd, "Spread of cell means (ohms)");
    app->add_option("--read-sd", read_sd, "Read-to-read noise (ohms)");
    app->add_option("--shape", shape, "Cell-mean population: uniform or normal")
        ->check(CLI::IsMember({"uniform", "normal"}));
  }

  SyntheticParams params() const {
    SyntheticParams p;
    p.pop_mean = pop_mean;
    p.pop_sd = pop_sd;
    p.read_sd = read_sd;
    p.shape = shape == "normal" ? PopulationShape::Normal : PopulationShape::Uniform;
    return p;
  }

  CellMeasurementSet load() const {
    if (input.empty()) return simulate_cells(cells, readings, params(), seed);
    std::ifstream in(input);
    if (!in) throw DataError("cannot open " + input);
    return read_measurement_csv(in);
  }
};

struct ExperimentArgs {
  std::vector<double> p{0.15};
  std::size_t trials = 1000;
  std::vector<std::string> decoders{"sc"};
  std::uint64_t seed = 1;
  std::string csv;
  unsigned threads = 0;
  double channel_p = 0.15;
  bool literal = false;
  double parity_llr_scale = 0.0;
  std::size_t readings = 102;

  void add(CLI::App* app) {
    app->add_option("--p", p, "Flip probabilities (repeat or comma-separate)")->delimiter(',');
    app->add_option("--trials", trials, "Trials per point")->check(CLI::PositiveNumber);
    app->add_option("--decoder", decoders, "sc | scl:<L> | hascl:<L> | bp:<iters> | bpl:<P> (repeatable)")
        ->delimiter(',');
    app->add_option("--seed", seed, "Master seed");
    app->add_option("--csv", csv, "Output CSV (stdout if omitted)");
    app->add_option("--threads", threads, "Worker threads (0 = all cores)");
    app->add_option("--channel-p", channel_p, "Flip probability assumed by the decoder");
    app->add_flag("--literal-substitution", literal, "Substitute helper bits into the transformed noisy vector");
    app->add_option("--parity-llr-scale", parity_llr_scale, "Parity LLR weight relative to message bits");
    app->add_option("--readings", readings, "Enrollment readings per synthetic cell")->check(CLI::PositiveNumber);
  }

  ExperimentSpec spec() const {
    ExperimentSpec s;
    s.p_values = p;
    s.trials = trials;
    s.decoders.clear();
    for (const auto& d : decoders) s.decoders.push_back(parse_decoder(d));
    s.seed = seed;
    s.threads = threads;
    s.channel_p = channel_p;
    s.mode = literal ? RegenMode::LiteralSubstitution : RegenMode::Principled;
    s.parity_llr_scale = parity_llr_scale;
    s.num_readings = readings;
    try {
      s.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    return s;
  }

  static DecoderConfig parse_decoder(const std::string& text) {
    try {
      return DecoderConfig::parse(text);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }

  template <class Writer, class Rows>
  void emit(Writer write, const Rows& rows) const {
    if (csv.empty()) {
      write(std::cout, rows);
      return;
    }
    std::ostringstream buf;
    write(buf, rows);
    std::ofstream out(csv, std::ios::binary);
    if (!out || !(out << buf.str())) throw DataError("cannot write " + csv);
  }
};

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("cannot write " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BCH-polar fuzzy extractor for ternary ReRAM PUFs"};
  app.require_subcommand(1);

  DeviceArgs sim_dev;
  std::string sim_out;
  auto* sim = app.add_subcommand("simulate-cells", "Write a synthetic measurement CSV");
  sim_dev.add(sim, false);
  sim->add_option("--out", sim_out, "Output CSV")->required();

  DeviceArgs enroll_dev;
  std::string enroll_record;
  auto* enroll = app.add_subcommand("enroll", "Register a device and write its helper-data record");
  enroll_dev.add(enroll, true);
  enroll->add_option("--record", enroll_record, "Record file to write")->required();

  DeviceArgs regen_dev;
  std::string regen_record, regen_decoder = "sc";
  std::size_t reading_index = 0;
  double regen_p = 0.0, regen_channel_p = 0.15, regen_parity_scale = 0.0;
  std::uint64_t noise_seed = 0;
  bool regen_literal = false;
  auto* regen = app.add_subcommand("regen", "Regenerate the key from a fresh reading and compare hashes");
  regen_dev.add(regen, true);
  regen->add_option("--record", regen_record, "Record file")->required();
  regen->add_option("--reading-index", reading_index, "Which reading of each cell to use");
  regen->add_option("--p", regen_p, "Extra simulated flip probability")->check(CLI::Range(0.0, 1.0));
  regen->add_option("--noise-seed", noise_seed, "Seed for the extra flips");
  regen->add_option("--decoder", regen_decoder, "sc | scl:<L> | hascl:<L> | bp:<iters> | bpl:<P>");
  regen->add_option("--channel-p", regen_channel_p, "Flip probability assumed by the decoder");
  regen->add_flag("--literal-substitution", regen_literal, "Substitute helper bits into the transformed noisy vector");
  regen->add_option("--parity-llr-scale", regen_parity_scale, "Parity LLR weight relative to message bits");

  ExperimentArgs mc_args, ber_args, cmp_args, time_args;
  auto* mc = app.add_subcommand("mc-failure", "Monte Carlo failure probability");
  mc_args.add(mc);
  auto* ber = app.add_subcommand("ber-sweep", "Key bit error for legitimate and attacker responses");
  ber_args.p = {0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  ber_args.add(ber);
  auto* cmp = app.add_subcommand("decoder-compare", "Block error rate and runtime per decoder");
  cmp_args.decoders = {"sc", "scl:8", "bp:60", "bpl:8"};
  cmp_args.add(cmp);
  auto* timing = app.add_subcommand("timing", "Median-of-means regeneration time per decoder");
  time_args.decoders = {"sc", "scl:8", "bp:60", "bpl:8"};
  time_args.trials = 200;
  time_args.add(timing);

  std::string plot_csv, plot_out;
  auto* plot = app.add_subcommand("plot", "Render an experiment CSV as SVG");
  plot->add_option("--csv", plot_csv, "Input CSV")->required();
  plot->add_option("--out", plot_out, "Output SVG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*sim) {
      const CellMeasurementSet set = sim_dev.load();
      std::ostringstream buf;
      write_measurement_csv(buf, set);
      std::ofstream out(sim_out, std::ios::binary);
      if (!out || !(out << buf.str())) throw DataError("cannot write " + sim_out);
    } else if (*enroll) {
      const FuzzyExtractor fx = FuzzyExtractor::default_instance();
      const auto k = static_cast<std::size_t>(fx.bch().k());
      const CellMeasurementSet set = enroll_dev.load();
      const Thresholds th = compute_thresholds(set);
      const TernaryProfile prof = classify_cells(set, th.t1, th.t2);
      const PufResponse resp = reference_response(prof, k);
      Registration reg = fx.register_response(resp.bits);
      reg.record.mask.assign(prof.mask.begin(), prof.mask.begin() + static_cast<std::ptrdiff_t>(k));
      write_file(enroll_record, serialize_record(reg.record));
      std::cerr << "stable cells: " << prof.mask.size() << " of " << set.cells.size() << "\n";
      std::cout << to_hex(reg.record.key_hash) << "\n";
    } else if (*regen) {
      const EnrollmentRecord rec = deserialize_record(read_file(regen_record));
      const FuzzyExtractor fx = FuzzyExtractor::from_record(rec);
      const CellMeasurementSet set = regen_dev.load();
      const Thresholds th = compute_thresholds(set);
      TernaryProfile prof;
      prof.t1 = th.t1;
      prof.t2 = th.t2;
      prof.mask = rec.mask;
      PufResponse resp = extract_response(set, prof, reading_index, rec.mask.size());
      if (regen_p > 0) resp = flip_bits(resp, regen_p, noise_seed);
      RegenOptions o;
      o.decoder = ExperimentArgs::parse_decoder(regen_decoder);
      o.channel_p = regen_channel_p;
      o.mode = regen_literal ? RegenMode::LiteralSubstitution : RegenMode::Principled;
      o.parity_llr_scale = regen_parity_scale;
      const RegenResult r = fx.regenerate(resp.bits, rec, o);
      const auto& d = r.diagnostics;
      std::cerr << "decoder " << o.decoder.name() << ", bch corrections " << d.bch_corrections
                << (d.bch_failure ? ", bch failure" : "") << (d.distance_rejected ? ", distance rejected" : "")
                << ", iterations " << d.decoder_iterations << "\n";
      std::cout << to_hex(r.key_hash) << ' ' << (r.match ? "match" : "mismatch") << "\n";
      return r.match ? kOk : kMismatch;
    } else if (*mc) {
      mc_args.emit(write_failure_csv, run_failure_mc(mc_args.spec()));
    } else if (*ber) {
      ber_args.emit(write_ber_csv, run_ber_sweep(ber_args.spec()));
    } else if (*cmp) {
      cmp_args.emit(write_decoder_compare_csv, run_decoder_compare(cmp_args.spec()));
    } else if (*timing) {
      const ExperimentSpec s = time_args.spec();
      if (s.trials < 100) throw UsageError("timing needs --trials >= 100");
      time_args.emit(write_timing_csv, run_timing(s));
    } else if (*plot) {
      emit_plot(plot_csv, plot_out);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return kOk;
}
