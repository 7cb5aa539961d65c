#include "ternkey/polar.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ternkey/rng.hpp"

namespace ternkey {

namespace {

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

void require_power_of_two(std::size_t N, const char* who) {
  if (!is_power_of_two(N))
    throw std::invalid_argument(std::string(who) + ": length " + std::to_string(N) + " is not a power of two");
}

inline double minsum(double a, double b) {
  const double m = std::min(std::fabs(a), std::fabs(b));
  return ((a < 0) != (b < 0)) ? -m : m;
}

inline std::uint8_t hard(double llr) { return llr < 0 ? 1 : 0; }

// Per-index frozen value, or 2 for information positions.
std::vector<std::uint8_t> expand_frozen(BitsView frozen_values, const PolarCodeSpec& spec) {
  if (frozen_values.size() != spec.frozen.size())
    throw std::invalid_argument("polar decode: " + std::to_string(frozen_values.size()) +
                                " frozen values for " + std::to_string(spec.frozen.size()) + " frozen indices");
  std::vector<std::uint8_t> slot(spec.N, 2);
  for (std::size_t j = 0; j < spec.frozen.size(); ++j)
    slot[static_cast<std::size_t>(spec.frozen[j])] = frozen_values[j] & 1U;
  return slot;
}

void check_llr(std::span<const double> llr, const PolarCodeSpec& spec) {
  if (llr.size() != spec.N)
    throw std::invalid_argument("polar decode: " + std::to_string(llr.size()) + " LLRs for N = " +
                                std::to_string(spec.N));
}

// Successive-cancellation state for one path. Layer l holds the LLRs of the
// current node of length 2^l (layer n is the channel, kept outside). part[l]
// has room for both children of a layer l+1 node: the left child's codeword
// in the low half, the right child's in the high half.
class ScState {
 public:
  ScState(int n) : n_(n), llr_(static_cast<std::size_t>(n)), part_(static_cast<std::size_t>(n)), u_(std::size_t{1} << n) {
    for (int l = 0; l < n; ++l) {
      llr_[static_cast<std::size_t>(l)].resize(std::size_t{1} << l);
      part_[static_cast<std::size_t>(l)].resize(std::size_t{2} << l);
    }
  }

  // LLR of leaf i given the channel and all earlier decisions.
  double leaf_llr(std::size_t i, std::span<const double> channel) {
    int top;
    if (i == 0) {
      top = n_;
    } else {
      top = std::countr_zero(i);
      const std::size_t h = std::size_t{1} << top;
      const double* in = layer_in(top + 1, channel);
      const std::uint8_t* v1 = part_[static_cast<std::size_t>(top)].data();
      double* out = llr_[static_cast<std::size_t>(top)].data();
      for (std::size_t j = 0; j < h; ++j) out[j] = in[j + h] + (v1[j] ? -in[j] : in[j]);
    }
    for (int l = top - 1; l >= 0; --l) {
      const std::size_t h = std::size_t{1} << l;
      const double* in = layer_in(l + 1, channel);
      double* out = llr_[static_cast<std::size_t>(l)].data();
      for (std::size_t j = 0; j < h; ++j) out[j] = minsum(in[j], in[j + h]);
    }
    return llr_[0][0];
  }

  void decide(std::size_t i, std::uint8_t bit) {
    u_[i] = bit;
    part_[0][i & 1U] = bit;
    for (int l = 0; l + 1 < n_; ++l) {
      if (((i >> l) & 1U) == 0) return;
      // Right child complete: (v1, v2) -> (v1 ^ v2, v2) is the parent codeword.
      const std::size_t h = std::size_t{1} << l;
      std::uint8_t* p = part_[static_cast<std::size_t>(l)].data();
      for (std::size_t j = 0; j < h; ++j) p[j] ^= p[j + h];
      const std::size_t half = (i >> (l + 1)) & 1U;
      std::copy(p, p + 2 * h, part_[static_cast<std::size_t>(l + 1)].begin() + static_cast<std::ptrdiff_t>(half * 2 * h));
    }
  }

  const Bits& u() const { return u_; }

 private:
  const double* layer_in(int l, std::span<const double> channel) const {
    return l == n_ ? channel.data() : llr_[static_cast<std::size_t>(l)].data();
  }

  int n_;
  std::vector<std::vector<double>> llr_;
  std::vector<Bits> part_;
  Bits u_;
};

}  // namespace

std::vector<double> bhattacharyya_parameters(std::size_t N, double z) {
  require_power_of_two(N, "bhattacharyya_parameters");
  std::vector<double> cur{z};
  while (cur.size() < N) {
    std::vector<double> next(cur.size() * 2);
    for (std::size_t j = 0; j < cur.size(); ++j) {
      next[2 * j] = 2 * cur[j] - cur[j] * cur[j];
      next[2 * j + 1] = cur[j] * cur[j];
    }
    cur = std::move(next);
  }
  return cur;
}

PolarCodeSpec polar_spec_with_frozen(std::size_t N, std::vector<int> frozen, double design_param) {
  require_power_of_two(N, "polar_spec");
  if (!(design_param > 0.0 && design_param < 1.0))
    throw std::invalid_argument("construct_frozen_set: design_param must lie in (0, 1)");
  std::sort(frozen.begin(), frozen.end());
  if (std::adjacent_find(frozen.begin(), frozen.end()) != frozen.end())
    throw std::invalid_argument("polar_spec: duplicate frozen index");
  if (!frozen.empty() && (frozen.front() < 0 || static_cast<std::size_t>(frozen.back()) >= N))
    throw std::invalid_argument("polar_spec: frozen index out of range");

  PolarCodeSpec spec;
  spec.N = N;
  spec.n = std::countr_zero(N);
  spec.design_param = design_param;
  spec.frozen_mask.assign(N, 0);
  for (int f : frozen) spec.frozen_mask[static_cast<std::size_t>(f)] = 1;
  for (std::size_t i = 0; i < N; ++i)
    if (!spec.frozen_mask[i]) spec.unfrozen.push_back(static_cast<int>(i));
  spec.frozen = std::move(frozen);

  const std::vector<double> z = bhattacharyya_parameters(N, design_param);
  spec.reliability_order.resize(N);
  std::iota(spec.reliability_order.begin(), spec.reliability_order.end(), 0);
  std::stable_sort(spec.reliability_order.begin(), spec.reliability_order.end(),
                   [&](int a, int b) { return z[static_cast<std::size_t>(a)] > z[static_cast<std::size_t>(b)]; });
  return spec;
}

PolarCodeSpec construct_frozen_set(std::size_t N, std::size_t num_frozen, double design_param) {
  require_power_of_two(N, "construct_frozen_set");
  if (num_frozen > N) throw std::invalid_argument("construct_frozen_set: num_frozen exceeds N");
  if (!(design_param > 0.0 && design_param < 1.0))
    throw std::invalid_argument("construct_frozen_set: design_param must lie in (0, 1)");
  PolarCodeSpec probe = polar_spec_with_frozen(N, {}, design_param);
  std::vector<int> frozen(probe.reliability_order.begin(),
                          probe.reliability_order.begin() + static_cast<std::ptrdiff_t>(num_frozen));
  return polar_spec_with_frozen(N, std::move(frozen), design_param);
}

void polar_transform_inplace(std::span<std::uint8_t> bits) {
  const std::size_t N = bits.size();
  require_power_of_two(N, "polar_transform");
  for (std::size_t h = 1; h < N; h *= 2)
    for (std::size_t s = 0; s < N; s += 2 * h)
      for (std::size_t j = 0; j < h; ++j) bits[s + j] ^= bits[s + h + j];
}

Bits polar_transform(BitsView u) {
  Bits x(u.begin(), u.end());
  polar_transform_inplace(x);
  return x;
}

DecoderConfig DecoderConfig::parse(std::string_view text) {
  auto number = [&](std::string_view digits) {
    int v = 0;
    const auto* end = digits.data() + digits.size();
    const auto [ptr, ec] = std::from_chars(digits.data(), end, v);
    if (ec != std::errc() || ptr != end || digits.empty())
      throw std::invalid_argument("decoder: bad number in '" + std::string(text) + "'");
    return v;
  };
  DecoderConfig c;
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  if (head == "sc" && colon == std::string_view::npos) {
    c.kind = DecoderKind::SC;
  } else if ((head == "scl" || head == "hascl") && colon != std::string_view::npos) {
    c.kind = DecoderKind::SCL;
    c.list_size = number(arg);
    c.hash_aided = head == "hascl";
  } else if (head == "bp") {
    c.kind = DecoderKind::BP;
    if (colon != std::string_view::npos) c.max_iterations = number(arg);
  } else if (head == "bpl" && colon != std::string_view::npos) {
    c.kind = DecoderKind::BP;
    c.permutations = number(arg);
  } else {
    throw std::invalid_argument("decoder: expected sc, scl:<L>, hascl:<L>, bp:<iters> or bpl:<P>, got '" +
                                std::string(text) + "'");
  }
  c.validate();
  return c;
}

std::string DecoderConfig::name() const {
  switch (kind) {
    case DecoderKind::SC: return "sc";
    case DecoderKind::SCL: return (hash_aided ? "hascl:" : "scl:") + std::to_string(list_size);
    case DecoderKind::BP:
      if (permutations > 1)
        return "bpl:" + std::to_string(permutations) + (max_iterations != 60 ? ":" + std::to_string(max_iterations) : "");
      return "bp:" + std::to_string(max_iterations);
  }
  return "?";
}

void DecoderConfig::validate() const {
  if (kind == DecoderKind::SCL && (list_size < 1 || !is_power_of_two(static_cast<std::size_t>(list_size))))
    throw std::invalid_argument("decoder: list size must be a power of two >= 1");
  if (kind == DecoderKind::BP && max_iterations < 1)
    throw std::invalid_argument("decoder: max_iterations must be >= 1");
  if (kind == DecoderKind::BP && permutations < 1)
    throw std::invalid_argument("decoder: BP needs at least one stage order");
  if (hash_aided && kind != DecoderKind::SCL)
    throw std::invalid_argument("decoder: hash-aided selection needs the SCL decoder");
}

Bits sc_decode(std::span<const double> llr, BitsView frozen_values, const PolarCodeSpec& spec) {
  check_llr(llr, spec);
  const std::vector<std::uint8_t> slot = expand_frozen(frozen_values, spec);
  if (spec.N == 1) return Bits{slot[0] == 2 ? hard(llr[0]) : slot[0]};
  ScState st(spec.n);
  for (std::size_t i = 0; i < spec.N; ++i) {
    const double l = st.leaf_llr(i, llr);
    st.decide(i, slot[i] == 2 ? hard(l) : slot[i]);
  }
  return st.u();
}

DecodeOutput scl_decode(std::span<const double> llr, BitsView frozen_values, const PolarCodeSpec& spec,
                        const DecoderConfig& config, const CandidatePredicate& predicate) {
  config.validate();
  check_llr(llr, spec);
  const std::vector<std::uint8_t> slot = expand_frozen(frozen_values, spec);
  const auto L = static_cast<std::size_t>(config.list_size);
  if (spec.N == 1) {
    DecodeOutput out;
    out.u = sc_decode(llr, frozen_values, spec);
    return out;
  }

  struct Path {
    ScState state;
    double metric = 0.0;
  };
  struct Candidate {
    double metric;
    std::size_t path;
    std::uint8_t bit;
    bool against_hard;
  };

  std::vector<Path> paths;
  paths.push_back(Path{ScState(spec.n), 0.0});
  std::vector<double> leaf(L);
  std::vector<Candidate> cand;
  cand.reserve(2 * L);

  for (std::size_t i = 0; i < spec.N; ++i) {
    for (std::size_t p = 0; p < paths.size(); ++p) leaf[p] = paths[p].state.leaf_llr(i, llr);

    if (slot[i] != 2) {
      for (std::size_t p = 0; p < paths.size(); ++p) {
        if (slot[i] != hard(leaf[p])) paths[p].metric += std::fabs(leaf[p]);
        paths[p].state.decide(i, slot[i]);
      }
      continue;
    }

    cand.clear();
    for (std::size_t p = 0; p < paths.size(); ++p) {
      const std::uint8_t h = hard(leaf[p]);
      cand.push_back({paths[p].metric, p, h, false});
      cand.push_back({paths[p].metric + std::fabs(leaf[p]), p, static_cast<std::uint8_t>(h ^ 1U), true});
    }
    std::sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
      if (a.metric != b.metric) return a.metric < b.metric;
      if (a.path != b.path) return a.path < b.path;
      return !a.against_hard && b.against_hard;
    });
    cand.resize(std::min(L, cand.size()));

    std::vector<int> uses(paths.size(), 0);
    for (const Candidate& c : cand) ++uses[c.path];
    std::vector<Path> next;
    next.reserve(cand.size());
    for (const Candidate& c : cand) {
      if (--uses[c.path] == 0)
        next.push_back(std::move(paths[c.path]));
      else
        next.push_back(paths[c.path]);
      next.back().metric = c.metric;
      next.back().state.decide(i, c.bit);
    }
    paths = std::move(next);
  }

  std::vector<std::size_t> order(paths.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return paths[a].metric < paths[b].metric; });

  DecodeOutput out;
  if (config.hash_aided && predicate) {
    for (std::size_t p : order) {
      if (predicate(paths[p].state.u())) {
        out.u = paths[p].state.u();
        return out;
      }
    }
    out.predicate_fallback = true;
  }
  out.u = paths[order.front()].state.u();
  return out;
}

std::vector<int> bp_stage_order(int n, int attempt) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  if (attempt == 1) {
    std::reverse(order.begin(), order.end());
  } else if (attempt > 1) {
    Rng rng = Rng(0x5eed5eedULL).split(static_cast<std::uint64_t>(attempt));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  }
  return order;
}

namespace {

// One BP run with stage k of the graph spanning 2^order[k]. Column 0 is the
// input side, column n the codeword side.
DecodeOutput bp_attempt(std::span<const double> llr, const std::vector<std::uint8_t>& slot, const PolarCodeSpec& spec,
                        int max_iterations, const std::vector<int>& order, const CandidatePredicate& predicate) {
  const std::size_t N = spec.N;
  const int n = spec.n;
  std::vector<std::vector<double>> Lm(static_cast<std::size_t>(n) + 1, std::vector<double>(N, 0.0));
  std::vector<std::vector<double>> Rm(static_cast<std::size_t>(n) + 1, std::vector<double>(N, 0.0));
  for (std::size_t i = 0; i < N; ++i) {
    Lm[static_cast<std::size_t>(n)][i] = std::clamp(llr[i], -kLlrMax, kLlrMax);
    if (slot[i] != 2) Rm[0][i] = slot[i] ? -kLlrMax : kLlrMax;
  }

  // Butterfly (a, b) -> (c, d) with c = a ^ b, d = b.
  auto stage = [&](int s, auto&& kernel) {
    const std::size_t h = std::size_t{1} << order[static_cast<std::size_t>(s)];
    for (std::size_t blk = 0; blk < N; blk += 2 * h)
      for (std::size_t a = blk; a < blk + h; ++a) kernel(a, a + h);
  };

  DecodeOutput out;
  out.u.assign(N, 0);
  out.converged = false;
  Bits prev(N, 2);
  int it = 0;
  while (it < max_iterations) {
    ++it;
    for (int s = 0; s < n; ++s) {
      const auto& Ra = Rm[static_cast<std::size_t>(s)];
      const auto& Lr = Lm[static_cast<std::size_t>(s) + 1];
      auto& Rr = Rm[static_cast<std::size_t>(s) + 1];
      stage(s, [&](std::size_t a, std::size_t b) {
        Rr[a] = minsum(Ra[a], Lr[b] + Ra[b]);
        Rr[b] = minsum(Ra[a], Lr[a]) + Ra[b];
      });
    }
    for (int s = n - 1; s >= 0; --s) {
      const auto& Ra = Rm[static_cast<std::size_t>(s)];
      const auto& Lr = Lm[static_cast<std::size_t>(s) + 1];
      auto& La = Lm[static_cast<std::size_t>(s)];
      stage(s, [&](std::size_t a, std::size_t b) {
        La[a] = minsum(Lr[a], Lr[b] + Ra[b]);
        La[b] = minsum(Lr[a], Ra[a]) + Lr[b];
      });
    }
    for (std::size_t i = 0; i < N; ++i) out.u[i] = slot[i] != 2 ? slot[i] : hard(Lm[0][i] + Rm[0][i]);
    if (predicate ? predicate(out.u) : out.u == prev) {
      out.converged = true;
      break;
    }
    prev = out.u;
  }
  out.iterations = it;
  return out;
}

}  // namespace

DecodeOutput bp_decode(std::span<const double> llr, BitsView frozen_values, const PolarCodeSpec& spec,
                       const DecoderConfig& config, const CandidatePredicate& predicate) {
  config.validate();
  check_llr(llr, spec);
  const std::vector<std::uint8_t> slot = expand_frozen(frozen_values, spec);
  const int attempts = predicate ? config.permutations : 1;
  DecodeOutput first;
  int total = 0;
  for (int a = 0; a < attempts; ++a) {
    DecodeOutput out = bp_attempt(llr, slot, spec, config.max_iterations, bp_stage_order(spec.n, a), predicate);
    total += out.iterations;
    if (out.converged) {
      out.iterations = total;
      return out;
    }
    if (a == 0) first = std::move(out);
  }
  first.iterations = total;
  return first;
}

DecodeOutput polar_decode(std::span<const double> llr, BitsView frozen_values, const PolarCodeSpec& spec,
                          const DecoderConfig& config, const CandidatePredicate& predicate) {
  switch (config.kind) {
    case DecoderKind::SC: {
      DecodeOutput out;
      out.u = sc_decode(llr, frozen_values, spec);
      return out;
    }
    case DecoderKind::SCL: return scl_decode(llr, frozen_values, spec, config, predicate);
    case DecoderKind::BP: return bp_decode(llr, frozen_values, spec, config, predicate);
  }
  throw std::invalid_argument("polar_decode: unknown decoder");
}

double bsc_llr_magnitude(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bsc_llr_magnitude: p outside [0, 1]");
  if (p <= 0.0) return kLlrMax;
  if (p >= 1.0) return -kLlrMax;
  return std::clamp(std::log((1.0 - p) / p), -kLlrMax, kLlrMax);
}

}  // namespace ternkey
