#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ternkey/bch.hpp"
#include "ternkey/csv.hpp"
#include "ternkey/errors.hpp"
#include "ternkey/experiments.hpp"
#include "ternkey/fuzzy.hpp"
#include "ternkey/plot.hpp"
#include "ternkey/polar.hpp"
#include "ternkey/puf.hpp"

namespace py = pybind11;
using namespace ternkey;

namespace {

py::bytes as_bytes(std::span<const std::uint8_t> b) {
  return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

std::vector<std::uint8_t> from_bytes(const py::bytes& b) {
  const std::string s = b;
  return {s.begin(), s.end()};
}

ExperimentSpec make_spec(std::vector<double> p_values, std::size_t trials, const std::vector<std::string>& decoders,
                         std::uint64_t seed, double channel_p, bool literal, double parity_llr_scale,
                         unsigned threads) {
  ExperimentSpec s;
  s.p_values = std::move(p_values);
  s.trials = trials;
  s.decoders.clear();
  for (const auto& d : decoders) s.decoders.push_back(DecoderConfig::parse(d));
  s.seed = seed;
  s.channel_p = channel_p;
  s.mode = literal ? RegenMode::LiteralSubstitution : RegenMode::Principled;
  s.parity_llr_scale = parity_llr_scale;
  s.threads = threads;
  s.validate();
  return s;
}

#define SPEC_ARGS                                                                                       \
  py::arg("p_values") = std::vector<double>{0.15}, py::arg("trials") = 1000,                            \
  py::arg("decoders") = std::vector<std::string>{"sc"}, py::arg("seed") = 1, py::arg("channel_p") = 0.15, \
  py::arg("literal_substitution") = false, py::arg("parity_llr_scale") = 0.0, py::arg("threads") = 0

template <class Rows, class Writer>
std::string csv_text(Writer write, const Rows& rows) {
  std::ostringstream out;
  write(out, rows);
  return out.str();
}

}  // namespace

PYBIND11_MODULE(_ternkey, m) {
  m.doc() = "BCH-polar fuzzy extractor for ternary ReRAM PUFs";

  auto data_error = py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<IntegrityError>(m, "IntegrityError", data_error.ptr());

  py::class_<BchCode>(m, "BchCode")
      .def_static("build", py::overload_cast<int, int>(&BchCode::build), py::arg("m"), py::arg("t"))
      .def_property_readonly("n", &BchCode::n)
      .def_property_readonly("k", &BchCode::k)
      .def_property_readonly("t", &BchCode::t)
      .def_property_readonly("generator", [](const BchCode& c) { return c.spec().generator; })
      .def("encode", [](const BchCode& c, const Bits& msg) { return c.encode(msg); })
      .def("is_codeword", [](const BchCode& c, const Bits& w) { return c.is_codeword(w); })
      .def(
          "decode",
          [](const BchCode& c, const Bits& w) -> py::object {
            const auto d = c.decode(w);
            if (!d) return py::none();
            return py::make_tuple(d->message, d->corrections);
          },
          "Returns (message, corrections), or None when the word is not decodable.");

  py::class_<PolarCodeSpec>(m, "PolarCodeSpec")
      .def_readonly("N", &PolarCodeSpec::N)
      .def_readonly("frozen", &PolarCodeSpec::frozen)
      .def_readonly("unfrozen", &PolarCodeSpec::unfrozen)
      .def_readonly("reliability_order", &PolarCodeSpec::reliability_order)
      .def_readonly("design_param", &PolarCodeSpec::design_param);

  m.def("construct_frozen_set", &construct_frozen_set, py::arg("N"), py::arg("num_frozen"),
        py::arg("design_param") = 0.5);
  m.def("bhattacharyya_parameters", &bhattacharyya_parameters, py::arg("N"), py::arg("z") = 0.5);
  m.def("polar_transform", [](const Bits& u) { return polar_transform(u); });
  m.def(
      "polar_decode",
      [](const std::vector<double>& llr, const Bits& frozen_values, const PolarCodeSpec& spec,
         const std::string& decoder) { return polar_decode(llr, frozen_values, spec, DecoderConfig::parse(decoder)).u; },
      py::arg("llr"), py::arg("frozen_values"), py::arg("spec"), py::arg("decoder") = "sc");

  py::class_<EnrollmentRecord>(m, "EnrollmentRecord")
      .def_readonly("helper_bits", &EnrollmentRecord::helper_bits)
      .def_readwrite("mask", &EnrollmentRecord::mask)
      .def_readonly("num_frozen", &EnrollmentRecord::num_frozen)
      .def_readonly("polar_n", &EnrollmentRecord::polar_n)
      .def_property_readonly("key_hash", [](const EnrollmentRecord& r) { return as_bytes(r.key_hash); })
      .def("serialize", [](const EnrollmentRecord& r) { return as_bytes(serialize_record(r)); })
      .def_static("deserialize", [](const py::bytes& b) { return deserialize_record(from_bytes(b)); })
      .def(py::self == py::self);

  py::class_<RegenResult>(m, "RegenResult")
      .def_readonly("match", &RegenResult::match)
      .def_property_readonly("key_hash", [](const RegenResult& r) { return as_bytes(r.key_hash); })
      .def_property_readonly("bch_corrections", [](const RegenResult& r) { return r.diagnostics.bch_corrections; })
      .def_property_readonly("bch_failure", [](const RegenResult& r) { return r.diagnostics.bch_failure; })
      .def_property_readonly("distance_rejected",
                             [](const RegenResult& r) { return r.diagnostics.distance_rejected; })
      .def_property_readonly("decoder_iterations",
                             [](const RegenResult& r) { return r.diagnostics.decoder_iterations; });

  py::class_<FuzzyExtractor>(m, "FuzzyExtractor")
      .def_static("default_instance", [] { return FuzzyExtractor::default_instance(); })
      .def_static("from_record", &FuzzyExtractor::from_record)
      .def_property_readonly("key_bits", &FuzzyExtractor::key_bits)
      .def_property_readonly("helper_bits", &FuzzyExtractor::helper_bits)
      .def_property_readonly("response_bits", [](const FuzzyExtractor& f) { return f.bch().k(); })
      .def(
          "register",
          [](const FuzzyExtractor& f, const Bits& bits) { return f.register_response(bits).record; },
          py::arg("puf_bits"), "Enrolls a response. Only the record, holding the key hash, is returned.")
      .def(
          "regenerate",
          [](const FuzzyExtractor& f, const Bits& bits, const EnrollmentRecord& rec, const std::string& decoder,
             double channel_p, bool literal, double parity_llr_scale) {
            RegenOptions o;
            o.decoder = DecoderConfig::parse(decoder);
            o.channel_p = channel_p;
            o.mode = literal ? RegenMode::LiteralSubstitution : RegenMode::Principled;
            o.parity_llr_scale = parity_llr_scale;
            py::gil_scoped_release release;
            return f.regenerate(bits, rec, o);
          },
          py::arg("puf_bits"), py::arg("record"), py::arg("decoder") = "sc", py::arg("channel_p") = 0.15,
          py::arg("literal_substitution") = false, py::arg("parity_llr_scale") = 0.0);

  py::class_<CellMeasurementSet>(m, "CellMeasurementSet")
      .def_property_readonly("num_cells", [](const CellMeasurementSet& s) { return s.cells.size(); })
      .def_property_readonly("num_readings", &CellMeasurementSet::num_readings)
      .def_property_readonly("readings", [](const CellMeasurementSet& s) {
        std::vector<std::vector<double>> out;
        for (const auto& c : s.cells) out.push_back(c.readings);
        return out;
      });

  py::class_<TernaryProfile>(m, "TernaryProfile")
      .def_readonly("t1", &TernaryProfile::t1)
      .def_readonly("t2", &TernaryProfile::t2)
      .def_readonly("mask", &TernaryProfile::mask)
      .def_property_readonly("states", [](const TernaryProfile& p) {
        std::string s;
        for (auto st : p.states) s += st == CellState::Zero ? '0' : st == CellState::One ? '1' : 'X';
        return s;
      });

  m.def(
      "simulate_cells",
      [](std::size_t cells, std::size_t readings, std::uint64_t seed, double pop_mean, double pop_sd, double read_sd) {
        SyntheticParams p;
        p.pop_mean = pop_mean;
        p.pop_sd = pop_sd;
        p.read_sd = read_sd;
        return simulate_cells(cells, readings, p, seed);
      },
      py::arg("num_cells") = 254, py::arg("num_readings") = 102, py::arg("seed") = 1, py::arg("pop_mean") = 3000.0,
      py::arg("pop_sd") = 600.0, py::arg("read_sd") = 60.0);
  m.def("read_measurement_csv", [](const std::string& text) {
    std::istringstream in(text);
    return read_measurement_csv(in);
  });
  m.def("write_measurement_csv", [](const CellMeasurementSet& s) {
    std::ostringstream out;
    write_measurement_csv(out, s);
    return out.str();
  });
  m.def("classify_cells", [](const CellMeasurementSet& s) {
    const Thresholds th = compute_thresholds(s);
    return classify_cells(s, th.t1, th.t2);
  });
  m.def("reference_response",
        [](const TernaryProfile& p, std::size_t width) { return reference_response(p, width).bits; });
  m.def(
      "extract_response",
      [](const CellMeasurementSet& s, const std::vector<std::uint16_t>& mask, std::size_t reading_index,
         std::size_t width) {
        const Thresholds th = compute_thresholds(s);
        TernaryProfile p;
        p.t1 = th.t1;
        p.t2 = th.t2;
        p.mask = mask;
        return extract_response(s, p, reading_index, width).bits;
      },
      py::arg("cells"), py::arg("mask"), py::arg("reading_index"), py::arg("width") = 131);
  m.def(
      "flip_bits",
      [](const Bits& bits, double p, std::uint64_t seed) { return flip_bits(PufResponse{bits, 0}, p, seed).bits; },
      py::arg("bits"), py::arg("p"), py::arg("seed"));

  m.def("wilson_upper_95", &wilson_upper_95, py::arg("failures"), py::arg("trials"));
  m.def(
      "failure_mc_csv",
      [](std::vector<double> p, std::size_t trials, const std::vector<std::string>& dec, std::uint64_t seed,
         double cp, bool lit, double scale, unsigned threads) {
        const ExperimentSpec s = make_spec(std::move(p), trials, dec, seed, cp, lit, scale, threads);
        py::gil_scoped_release release;
        return csv_text(write_failure_csv, run_failure_mc(s));
      },
      SPEC_ARGS);
  m.def(
      "ber_sweep_csv",
      [](std::vector<double> p, std::size_t trials, const std::vector<std::string>& dec, std::uint64_t seed,
         double cp, bool lit, double scale, unsigned threads) {
        const ExperimentSpec s = make_spec(std::move(p), trials, dec, seed, cp, lit, scale, threads);
        py::gil_scoped_release release;
        return csv_text(write_ber_csv, run_ber_sweep(s));
      },
      SPEC_ARGS);
  m.def(
      "decoder_compare_csv",
      [](std::vector<double> p, std::size_t trials, const std::vector<std::string>& dec, std::uint64_t seed,
         double cp, bool lit, double scale, unsigned threads) {
        const ExperimentSpec s = make_spec(std::move(p), trials, dec, seed, cp, lit, scale, threads);
        py::gil_scoped_release release;
        return csv_text(write_decoder_compare_csv, run_decoder_compare(s));
      },
      SPEC_ARGS);
  m.def("render_svg", [](const std::string& csv) {
    std::istringstream in(csv);
    return render_svg(read_csv_table(in));
  });
}
