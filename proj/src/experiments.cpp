#include "ternkey/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "ternkey/errors.hpp"
#include "ternkey/rng.hpp"

namespace ternkey {

namespace {

enum Stream : std::uint64_t { kDevice = 1, kNoise = 2, kAttacker = 3 };

std::uint64_t stream_seed(const ExperimentSpec& spec, Stream s, std::size_t trial) {
  return derive_seed(derive_seed(spec.seed, s), trial);
}

// Runs body(trial, worker) over [0, trials) and returns the worker count.
template <class Body>
unsigned parallel_trials(std::size_t trials, unsigned threads, Body&& body) {
  unsigned workers = threads ? threads : std::max(1U, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(trials, 1)));
  std::atomic<std::size_t> next{0};
  auto run = [&](unsigned w) {
    for (std::size_t t; (t = next.fetch_add(1)) < trials;) body(t, w);
  };
  if (workers == 1) {
    run(0);
    return 1;
  }
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex err_mu;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        run(w);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!err) err = std::current_exception();
        next = trials;
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
  return workers;
}

RegenOptions options_for(const ExperimentSpec& spec, const DecoderConfig& dec) {
  RegenOptions o;
  o.decoder = dec;
  o.channel_p = spec.channel_p;
  o.mode = spec.mode;
  o.parity_llr_scale = spec.parity_llr_scale;
  o.max_distance_fraction = spec.attacker_min_hd;
  return o;
}

struct Tally {
  std::uint64_t count = 0;
  std::uint64_t failures = 0;
  std::uint64_t corrections = 0;
  std::uint64_t iterations = 0;
  std::uint64_t key_errors = 0;
  std::uint64_t extra = 0;
  std::uint64_t nanos = 0;

  Tally& operator+=(const Tally& o) {
    count += o.count;
    failures += o.failures;
    corrections += o.corrections;
    iterations += o.iterations;
    key_errors += o.key_errors;
    extra += o.extra;
    nanos += o.nanos;
    return *this;
  }
};

// Tallies indexed [worker][cell], summed over workers at the end so the
// result does not depend on scheduling.
class Tallies {
 public:
  Tallies(std::size_t cells, unsigned max_workers) : cells_(cells), data_(cells * max_workers) {}
  Tally& at(unsigned worker, std::size_t cell) { return data_[worker * cells_ + cell]; }
  std::vector<Tally> merged() const {
    std::vector<Tally> out(cells_);
    for (std::size_t i = 0; i < data_.size(); ++i) out[i % cells_] += data_[i];
    return out;
  }

 private:
  std::size_t cells_;
  std::vector<Tally> data_;
};

unsigned worker_cap(const ExperimentSpec& spec) {
  return spec.threads ? spec.threads : std::max(1U, std::thread::hardware_concurrency());
}

}  // namespace

void ExperimentSpec::validate() const {
  if (trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
  if (p_values.empty()) throw std::invalid_argument("experiment: no p values");
  for (double p : p_values)
    if (!(p >= 0.0 && p <= 0.5)) throw std::invalid_argument("experiment: p values must lie in [0, 0.5]");
  if (decoders.empty()) throw std::invalid_argument("experiment: no decoders");
  for (const auto& d : decoders) d.validate();
  if (!(channel_p > 0.0 && channel_p < 1.0)) throw std::invalid_argument("experiment: channel_p must lie in (0, 1)");
  if (!(attacker_min_hd >= 0.0 && attacker_min_hd <= 1.0))
    throw std::invalid_argument("experiment: attacker distance must lie in [0, 1]");
}

double wilson_upper_95(std::size_t failures, std::size_t trials) {
  if (trials == 0) return 1.0;
  const double z = 1.6448536269514722;
  const double n = static_cast<double>(trials);
  const double ph = static_cast<double>(failures) / n;
  const double z2 = z * z;
  const double centre = ph + z2 / (2 * n);
  const double spread = z * std::sqrt(ph * (1 - ph) / n + z2 / (4 * n * n));
  return std::min(1.0, (centre + spread) / (1 + z2 / n));
}

Device make_device(const ExperimentSpec& spec, std::size_t k, std::uint64_t seed) {
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    Device d;
    d.cells = simulate_cells(spec.num_cells, spec.num_readings, spec.synthetic, derive_seed(seed, attempt));
    const Thresholds th = compute_thresholds(d.cells);
    d.profile = classify_cells(d.cells, th.t1, th.t2);
    if (d.profile.mask.size() < k) continue;
    d.response = reference_response(d.profile, k);
    return d;
  }
  throw DataError("make_device: synthetic model never produced " + std::to_string(k) + " stable cells");
}

std::vector<FailureStats> run_failure_mc(const ExperimentSpec& spec) {
  spec.validate();
  const FuzzyExtractor fx = FuzzyExtractor::default_instance(spec.embedding);
  const std::size_t k = static_cast<std::size_t>(fx.bch().k());
  const std::size_t np = spec.p_values.size(), nd = spec.decoders.size();
  std::vector<RegenOptions> opts;
  for (const auto& d : spec.decoders) opts.push_back(options_for(spec, d));

  Tallies tallies(np * nd, worker_cap(spec));
  parallel_trials(spec.trials, spec.threads, [&](std::size_t t, unsigned w) {
    const Device dev = make_device(spec, k, stream_seed(spec, kDevice, t));
    const Registration reg = fx.register_response(dev.response.bits);
    for (std::size_t ip = 0; ip < np; ++ip) {
      const PufResponse noisy = flip_bits(dev.response, spec.p_values[ip], stream_seed(spec, kNoise, t));
      for (std::size_t id = 0; id < nd; ++id) {
        const RegenResult r = fx.regenerate(noisy.bits, reg.record, opts[id]);
        Tally& c = tallies.at(w, ip * nd + id);
        ++c.count;
        c.failures += !r.match;
        c.corrections += static_cast<std::uint64_t>(r.diagnostics.bch_corrections);
        c.iterations += static_cast<std::uint64_t>(r.diagnostics.decoder_iterations);
      }
    }
  });

  const std::vector<Tally> merged = tallies.merged();
  std::vector<FailureStats> out;
  for (std::size_t ip = 0; ip < np; ++ip)
    for (std::size_t id = 0; id < nd; ++id) {
      const Tally& c = merged[ip * nd + id];
      FailureStats s;
      s.p = spec.p_values[ip];
      s.decoder = spec.decoders[id].name();
      s.trials = c.count;
      s.failures = c.failures;
      s.failure_rate = static_cast<double>(c.failures) / static_cast<double>(c.count);
      s.wilson95_upper = wilson_upper_95(c.failures, c.count);
      s.mean_bch_corrections = static_cast<double>(c.corrections) / static_cast<double>(c.count);
      s.mean_decoder_iterations = static_cast<double>(c.iterations) / static_cast<double>(c.count);
      out.push_back(s);
    }
  return out;
}

std::vector<BerPoint> run_ber_sweep(const ExperimentSpec& spec) {
  spec.validate();
  const FuzzyExtractor fx = FuzzyExtractor::default_instance(spec.embedding);
  const std::size_t k = static_cast<std::size_t>(fx.bch().k());
  const std::size_t np = spec.p_values.size();
  const RegenOptions base = options_for(spec, spec.decoders.front());

  // cell 2*ip: legitimate, 2*ip+1: attacker
  Tallies tallies(2 * np, worker_cap(spec));
  parallel_trials(spec.trials, spec.threads, [&](std::size_t t, unsigned w) {
    const Device dev = make_device(spec, k, stream_seed(spec, kDevice, t));
    const Registration reg = fx.register_response(dev.response.bits);
    RegenOptions o = base;
    o.ground_truth = dev.response.bits;
    for (std::size_t ip = 0; ip < np; ++ip) {
      const PufResponse noisy = flip_bits(dev.response, spec.p_values[ip], stream_seed(spec, kNoise, t));
      const RegenResult legit = fx.regenerate(noisy.bits, reg.record, o);
      Tally& l = tallies.at(w, 2 * ip);
      ++l.count;
      l.failures += !legit.match;
      l.key_errors += static_cast<std::uint64_t>(*legit.diagnostics.prehash_bit_errors);

      const PufResponse att = make_attacker_response(k, dev.response, spec.attacker_min_hd,
                                                     derive_seed(stream_seed(spec, kAttacker, t), ip));
      const RegenResult a = fx.regenerate(att.bits, reg.record, o);
      Tally& at = tallies.at(w, 2 * ip + 1);
      ++at.count;
      at.extra += a.match;
      at.key_errors += static_cast<std::uint64_t>(*a.diagnostics.prehash_bit_errors);
    }
  });

  const std::vector<Tally> merged = tallies.merged();
  const double key_bits = static_cast<double>(fx.key_bits());
  std::vector<BerPoint> out;
  for (std::size_t ip = 0; ip < np; ++ip) {
    const Tally& l = merged[2 * ip];
    const Tally& a = merged[2 * ip + 1];
    BerPoint b;
    b.p = spec.p_values[ip];
    b.trials = l.count;
    b.percent_key_error_legit = 100.0 * static_cast<double>(l.key_errors) / (key_bits * static_cast<double>(l.count));
    b.percent_key_error_attacker =
        100.0 * static_cast<double>(a.key_errors) / (key_bits * static_cast<double>(a.count));
    b.legit_failures = l.failures;
    b.attacker_matches = a.extra;
    out.push_back(b);
  }
  return out;
}

std::vector<DecoderComparePoint> run_decoder_compare(const ExperimentSpec& spec) {
  spec.validate();
  const FuzzyExtractor fx = FuzzyExtractor::default_instance(spec.embedding);
  const std::size_t k = static_cast<std::size_t>(fx.bch().k());
  const std::size_t np = spec.p_values.size(), nd = spec.decoders.size();
  std::vector<RegenOptions> opts;
  for (const auto& d : spec.decoders) opts.push_back(options_for(spec, d));

  Tallies tallies(np * nd, worker_cap(spec));
  parallel_trials(spec.trials, spec.threads, [&](std::size_t t, unsigned w) {
    const Device dev = make_device(spec, k, stream_seed(spec, kDevice, t));
    const Registration reg = fx.register_response(dev.response.bits);
    for (std::size_t ip = 0; ip < np; ++ip) {
      const PufResponse noisy = flip_bits(dev.response, spec.p_values[ip], stream_seed(spec, kNoise, t));
      for (std::size_t id = 0; id < nd; ++id) {
        const auto start = std::chrono::steady_clock::now();
        const RegenResult r = fx.regenerate(noisy.bits, reg.record, opts[id]);
        const auto stop = std::chrono::steady_clock::now();
        Tally& c = tallies.at(w, ip * nd + id);
        ++c.count;
        c.failures += !r.match;
        c.nanos += static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count());
      }
    }
  });

  const std::vector<Tally> merged = tallies.merged();
  std::vector<DecoderComparePoint> out;
  for (std::size_t ip = 0; ip < np; ++ip)
    for (std::size_t id = 0; id < nd; ++id) {
      const Tally& c = merged[ip * nd + id];
      DecoderComparePoint d;
      d.p = spec.p_values[ip];
      d.decoder = spec.decoders[id].name();
      d.trials = c.count;
      d.block_errors = c.failures;
      d.block_error_rate = static_cast<double>(c.failures) / static_cast<double>(c.count);
      d.mean_runtime_us = static_cast<double>(c.nanos) / 1000.0 / static_cast<double>(c.count);
      out.push_back(d);
    }
  return out;
}

std::vector<TimingPoint> run_timing(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.trials < 100) throw std::invalid_argument("timing: needs at least 100 trials");
  const FuzzyExtractor fx = FuzzyExtractor::default_instance(spec.embedding);
  const std::size_t k = static_cast<std::size_t>(fx.bch().k());
  constexpr std::size_t kGroups = 10, kWarm = 10;

  struct Input {
    EnrollmentRecord record;
    Bits noisy;
  };
  std::vector<Input> inputs;
  inputs.reserve(spec.trials);
  for (std::size_t t = 0; t < spec.trials; ++t) {
    const Device dev = make_device(spec, k, stream_seed(spec, kDevice, t));
    Registration reg = fx.register_response(dev.response.bits);
    inputs.push_back({std::move(reg.record),
                      flip_bits(dev.response, spec.p_values.front(), stream_seed(spec, kNoise, t)).bits});
  }

  std::vector<TimingPoint> out;
  for (const DecoderConfig& dec : spec.decoders) {
    const RegenOptions o = options_for(spec, dec);
    for (std::size_t t = 0; t < kWarm; ++t) (void)fx.regenerate(inputs[t].noisy, inputs[t].record, o);
    std::vector<double> group_means;
    const std::size_t per = spec.trials / kGroups;
    for (std::size_t g = 0; g < kGroups; ++g) {
      const auto start = std::chrono::steady_clock::now();
      for (std::size_t t = g * per; t < (g + 1) * per; ++t) (void)fx.regenerate(inputs[t].noisy, inputs[t].record, o);
      const auto stop = std::chrono::steady_clock::now();
      group_means.push_back(std::chrono::duration<double, std::micro>(stop - start).count() / static_cast<double>(per));
    }
    std::sort(group_means.begin(), group_means.end());
    TimingPoint tp;
    tp.decoder = dec.name();
    tp.trials = per * kGroups;
    tp.median_of_means_us = 0.5 * (group_means[kGroups / 2 - 1] + group_means[kGroups / 2]);
    out.push_back(tp);
  }
  return out;
}

}  // namespace ternkey
