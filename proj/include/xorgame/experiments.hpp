#pragma once

// Monte Carlo estimates of the probability that a uniformly random game is
// C-perfect, Q-perfect or pseudotelepathic, over grids of (n, m).
//
// Trial t of cell (n, m) samples its game from the stream
// trial_key(seed, n, m, t); workers only add integer counts, and tables are
// ordered by grid coordinates, so output never depends on the thread count.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "xorgame/classifier.hpp"
#include "xorgame/fast_decide.hpp"
#include "xorgame/game.hpp"

namespace xorgame {

// Which exact procedure classifies the sampled games.
enum class Engine {
  Fast,  // decide_perfection
  Hnf,   // classify_hnf
};

struct RunConfig {
  std::uint64_t seed = 1;
  Dedup dedup = Dedup::Triple;
  unsigned threads = 1;  // 0 = hardware concurrency
  Engine engine = Engine::Fast;
};

// 95% Wilson score interval half-width for count successes out of samples.
inline double wilson_half_width(std::uint64_t count, std::uint64_t samples, double z = 1.959963984540054) {
  if (samples == 0) return 0.0;
  const double nn = static_cast<double>(samples);
  const double p = static_cast<double>(count) / nn;
  return z / (1.0 + z * z / nn) * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn));
}

struct ProbabilityEstimate {
  int n = 0;
  std::size_t m = 0;
  std::uint64_t samples = 0;
  std::uint64_t c_count = 0;
  std::uint64_t q_count = 0;
  std::uint64_t pseudo_count = 0;  // Q-perfect and not C-perfect
  std::uint64_t both_count = 0;    // Q-perfect and C-perfect
  std::uint64_t seed = 0;
  Dedup dedup = Dedup::Triple;

  double ratio() const { return static_cast<double>(m) / n; }
  Rational exact_p_c() const { return Rational(c_count, samples); }
  Rational exact_p_q() const { return Rational(q_count, samples); }
  Rational exact_p_pseudo() const { return Rational(pseudo_count, samples); }
  double p_c() const { return static_cast<double>(c_count) / static_cast<double>(samples); }
  double p_q() const { return static_cast<double>(q_count) / static_cast<double>(samples); }
  double p_pseudo() const { return static_cast<double>(pseudo_count) / static_cast<double>(samples); }
  double ci_c() const { return wilson_half_width(c_count, samples); }
  double ci_q() const { return wilson_half_width(q_count, samples); }
  double ci_pseudo() const { return wilson_half_width(pseudo_count, samples); }
};

using SweepTable = std::vector<ProbabilityEstimate>;

namespace detail {

struct Counts {
  std::uint64_t c = 0, q = 0, pseudo = 0, both = 0;
};

inline Counts run_trials(int n, std::size_t m, std::uint64_t first, std::uint64_t last, const RunConfig& cfg) {
  Counts k;
  for (std::uint64_t t = first; t < last; ++t) {
    const XorGame game = sample_random_game(n, m, trial_key(cfg.seed, static_cast<std::uint64_t>(n), m, t), cfg.dedup);
    bool q, c;
    if (cfg.engine == Engine::Fast) {
      const PerfectionFlags f = decide_perfection(game);
      q = f.q_perfect, c = f.c_perfect;
    } else {
      const Classification h = classify_hnf(game);
      q = h.q_perfect, c = h.c_perfect;
    }
    k.q += q;
    k.c += c;
    k.pseudo += q && !c;
    k.both += q && c;
  }
  return k;
}

inline unsigned worker_count(unsigned requested, std::uint64_t samples) {
  unsigned w = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::uint64_t>(w, std::max<std::uint64_t>(samples, 1)));
}

}  // namespace detail

inline ProbabilityEstimate estimate_probabilities(int n, std::size_t m, std::uint64_t samples, const RunConfig& cfg) {
  if (samples < 1) throw InvalidArgument("samples must be at least 1");
  if (m > sampler_capacity(n, cfg.dedup))
    throw ExhaustedSpace("m=" + std::to_string(m) + " exceeds the clause space for n=" + std::to_string(n));

  const unsigned workers = detail::worker_count(cfg.threads, samples);
  std::vector<detail::Counts> partial(workers);
  auto block = [&](unsigned w) {
    const std::uint64_t lo = samples * w / workers, hi = samples * (w + 1) / workers;
    partial[w] = detail::run_trials(n, m, lo, hi, cfg);
  };
  if (workers == 1) {
    block(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          block(w);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    pool.clear();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  ProbabilityEstimate est;
  est.n = n;
  est.m = m;
  est.samples = samples;
  est.seed = cfg.seed;
  est.dedup = cfg.dedup;
  for (const auto& k : partial) {
    est.c_count += k.c;
    est.q_count += k.q;
    est.pseudo_count += k.pseudo;
    est.both_count += k.both;
  }
  return est;
}

// Ratios min, min + step, ... up to max (inclusive, with rounding slack).
inline std::vector<double> ratio_grid(double ratio_min, double ratio_max, double ratio_step) {
  if (!(ratio_min > 0) || !(ratio_max >= ratio_min) || !(ratio_step > 0))
    throw InvalidArgument("ratio grid needs 0 < min <= max and step > 0");
  const auto count = static_cast<std::size_t>(std::floor((ratio_max - ratio_min) / ratio_step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = ratio_min + static_cast<double>(k) * ratio_step;
  return out;
}

// One cell per (n, round(ratio * n)); cells that round to the same m are
// computed once. Ordered by n (as given) then increasing m.
inline SweepTable sweep_grid(const std::vector<int>& n_list, double ratio_min, double ratio_max, double ratio_step,
                             std::uint64_t samples, const RunConfig& cfg) {
  if (n_list.empty()) throw InvalidArgument("sweep needs at least one n");
  const auto ratios = ratio_grid(ratio_min, ratio_max, ratio_step);
  SweepTable table;
  for (int n : n_list) {
    std::vector<std::size_t> ms;
    for (double r : ratios) ms.push_back(std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(r * n))));
    std::sort(ms.begin(), ms.end());
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
    for (std::size_t m : ms) table.push_back(estimate_probabilities(n, m, samples, cfg));
  }
  return table;
}

inline SweepTable cross_section(int n, std::size_t m_min, std::size_t m_max, std::uint64_t samples,
                                const RunConfig& cfg) {
  if (m_min < 1 || m_min > m_max) throw InvalidArgument("cross section needs 1 <= m_min <= m_max");
  SweepTable table;
  for (std::size_t m = m_min; m <= m_max; ++m) table.push_back(estimate_probabilities(n, m, samples, cfg));
  return table;
}

struct TransitionEstimate {
  int n = 0;
  double m_half_q = 0, m_half_c = 0;
  double ratio_q = 0, ratio_c = 0;
};

// Where a decreasing curve p(m) drops below 1/2: linear interpolation between
// the last m with p >= 1/2 and the first m with p < 1/2.
inline double half_crossing(const std::vector<std::pair<double, double>>& curve, const char* name) {
  for (std::size_t i = 1; i < curve.size(); ++i) {
    const auto [m1, p1] = curve[i - 1];
    const auto [m2, p2] = curve[i];
    if (p1 >= 0.5 && p2 < 0.5) return m1 + (p1 - 0.5) * (m2 - m1) / (p1 - p2);
  }
  throw NoCrossing(std::string(name) + " curve never drops below 1/2 inside the window");
}

inline TransitionEstimate find_transition(const SweepTable& table) {
  if (table.empty()) throw NoCrossing("empty table");
  std::vector<std::pair<double, double>> q, c;
  for (const auto& e : table) {
    q.emplace_back(static_cast<double>(e.m), e.p_q());
    c.emplace_back(static_cast<double>(e.m), e.p_c());
  }
  TransitionEstimate t;
  t.n = table.front().n;
  t.m_half_q = half_crossing(q, "Q-perfect");
  t.m_half_c = half_crossing(c, "C-perfect");
  t.ratio_q = t.m_half_q / t.n;
  t.ratio_c = t.m_half_c / t.n;
  return t;
}

struct PseudoMax {
  int n = 0;
  std::size_t m_star = 0;
  double mu = 0;
  std::uint64_t samples = 0;
};

// Argmax of the pseudotelepathy count; ties go to the smaller m.
inline PseudoMax pseudo_max(const SweepTable& table) {
  if (table.empty()) throw InvalidArgument("empty table");
  const ProbabilityEstimate* best = &table.front();
  for (const auto& e : table)
    if (e.pseudo_count > best->pseudo_count || (e.pseudo_count == best->pseudo_count && e.m < best->m)) best = &e;
  return {best->n, best->m, best->p_pseudo(), best->samples};
}

inline PseudoMax max_pseudotelepathy(int n, std::size_t m_min, std::size_t m_max, std::uint64_t samples,
                                     const RunConfig& cfg, SweepTable* table_out = nullptr) {
  SweepTable table = cross_section(n, m_min, m_max, samples, cfg);
  PseudoMax best = pseudo_max(table);
  if (table_out) *table_out = std::move(table);
  return best;
}

struct LinearFit {
  double slope = 0, intercept = 0, residual = 0;  // residual: RMS error
};

inline LinearFit fit_linear(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw DegenerateFit("a line needs at least two points");
  double sx = 0, sy = 0;
  for (auto [x, y] : points) sx += x, sy += y;
  const double k = static_cast<double>(points.size());
  const double mx = sx / k, my = sy / k;
  double sxx = 0, sxy = 0;
  for (auto [x, y] : points) sxx += (x - mx) * (x - mx), sxy += (x - mx) * (y - my);
  if (sxx == 0) throw DegenerateFit("all points share the same n");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0;
  for (auto [x, y] : points) {
    const double e = y - (fit.slope * x + fit.intercept);
    sse += e * e;
  }
  fit.residual = std::sqrt(sse / k);
  return fit;
}

// Shortest decimal form with 9 significant digits, independent of locale.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

inline constexpr const char* csv_header =
    "n,m,ratio,samples,c_count,q_count,pseudo_count,p_c,p_q,p_pseudo,ci_c,ci_q,ci_pseudo,seed,dedup";

inline void write_csv_row(std::ostream& os, const ProbabilityEstimate& e) {
  os << e.n << ',' << e.m << ',' << format_double(e.ratio()) << ',' << e.samples << ',' << e.c_count << ','
     << e.q_count << ',' << e.pseudo_count << ',' << format_double(e.p_c()) << ',' << format_double(e.p_q()) << ','
     << format_double(e.p_pseudo()) << ',' << format_double(e.ci_c()) << ',' << format_double(e.ci_q()) << ','
     << format_double(e.ci_pseudo()) << ',' << e.seed << ',' << to_string(e.dedup) << '\n';
}

inline void write_csv(std::ostream& os, const SweepTable& table) {
  os << csv_header << '\n';
  for (const auto& e : table) write_csv_row(os, e);
}

}  // namespace xorgame
