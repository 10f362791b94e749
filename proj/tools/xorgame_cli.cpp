// xorgame command-line front end.
//
//   xorgame classify GAME
//   xorgame verify GAME STRATEGY
//   xorgame sample --n N --m M --count K [--seed S] [--dedup triple|full] [--out DIR]
//   xorgame sweep --n 8,16,24 --ratio 1:5:0.25 --samples S [...]
//   xorgame crosssection --n N --m A:B --samples S [...]
//   xorgame maxpseudo --n N --m A:B --samples S [--table FILE] [...]
//
// Exit codes: classify returns 0 (both perfect), 1 (Q only), 2 (neither);
// verify returns 0 for a perfect strategy and 1 otherwise. Errors: 10 for a
// classifier disagreement, 64 for usage or parse errors, 65 for a strategy of
// the wrong length, 66 for unreadable input or unwritable output, 70 for anything else.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "xorgame/classifier.hpp"
#include "xorgame/experiments.hpp"
#include "xorgame/io.hpp"
#include "xorgame/strategy.hpp"

namespace {

using namespace xorgame;

constexpr int kExitDisagreement = 10;
constexpr int kExitUsage = 64;
constexpr int kExitLength = 65;
constexpr int kExitNoInput = 66;
constexpr int kExitInternal = 70;

class NoInput : public Error {
  using Error::Error;
};

struct Options {
  std::string game_path, strategy_path;
  std::string n_spec, m_spec, ratio_spec;
  std::uint64_t samples = 0;
  std::uint64_t seed = 1;
  std::uint64_t count = 1;
  unsigned threads = 1;
  std::string dedup = "triple";
  std::string engine = "fast";
  std::string out;
  std::string table;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, sep)) parts.push_back(part);
  return parts;
}

long long to_integer(const std::string& tok, const char* flag) {
  long long v = 0;
  if (!detail::parse_long(tok, v)) throw InvalidArgument(std::string(flag) + ": '" + tok + "' is not an integer");
  return v;
}

double to_real(const std::string& tok, const char* flag) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != tok.size()) throw InvalidArgument(std::string(flag) + ": '" + tok + "' is not a number");
  return v;
}

int single_n(const std::string& spec) {
  const long long n = to_integer(spec, "--n");
  if (n < 1 || n > 100000) throw InvalidArgument("--n must lie in [1, 100000]");
  return static_cast<int>(n);
}

// "8,16,24" or "a:b" (every integer in between).
std::vector<int> n_list(const std::string& spec) {
  std::vector<int> out;
  for (const auto& item : split(spec, ',')) {
    const auto range = split(item, ':');
    if (range.size() == 1) {
      out.push_back(single_n(range[0]));
    } else if (range.size() == 2) {
      const int lo = single_n(range[0]), hi = single_n(range[1]);
      if (lo > hi) throw InvalidArgument("--n range must be increasing");
      for (int n = lo; n <= hi; ++n) out.push_back(n);
    } else {
      throw InvalidArgument("--n: bad item '" + item + "'");
    }
  }
  if (out.empty()) throw InvalidArgument("--n is empty");
  return out;
}

std::pair<std::size_t, std::size_t> m_range(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.empty() || parts.size() > 2) throw InvalidArgument("--m expects M or A:B");
  const long long lo = to_integer(parts[0], "--m");
  const long long hi = parts.size() == 2 ? to_integer(parts[1], "--m") : lo;
  if (lo < 1 || hi < lo) throw InvalidArgument("--m needs 1 <= A <= B");
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

struct RatioSpec {
  double lo, hi, step;
};

RatioSpec ratio_range(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 2 && parts.size() != 3) throw InvalidArgument("--ratio expects A:B or A:B:STEP");
  RatioSpec r{to_real(parts[0], "--ratio"), to_real(parts[1], "--ratio"), 0.1};
  if (parts.size() == 3) r.step = to_real(parts[2], "--ratio");
  ratio_grid(r.lo, r.hi, r.step);  // validates
  return r;
}

RunConfig run_config(const Options& o) {
  RunConfig cfg;
  cfg.seed = o.seed;
  cfg.dedup = parse_dedup(o.dedup);
  cfg.threads = o.threads;
  if (o.engine == "fast")
    cfg.engine = Engine::Fast;
  else if (o.engine == "hnf")
    cfg.engine = Engine::Hnf;
  else
    throw InvalidArgument("--engine must be fast or hnf");
  if (o.samples < 1) throw InvalidArgument("--samples must be at least 1");
  return cfg;
}

// Thread count is left out on purpose: it never changes the output.
std::string manifest(const std::string& command, const Options& o, const std::string& grid) {
  std::ostringstream os;
  os << "# xorgame " << command << ' ' << grid << " samples=" << o.samples << " seed=" << o.seed
     << " dedup=" << o.dedup << " engine=" << o.engine;
  return os.str();
}

XorGame read_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NoInput("cannot open game file '" + path + "'");
  return parse_game(in);
}

// Writes to --out when given, else to standard output.
template <class F>
void emit(const std::string& path, F&& body) {
  if (path.empty() || path == "-") {
    body(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NoInput("cannot write '" + path + "'");
  body(out);
  if (!out) throw Error("write to '" + path + "' failed");
}

std::string join_rationals(const RationalVector& z) {
  std::string s;
  for (std::size_t i = 0; i < z.size(); ++i) s += (i ? " " : "") + format_rational(z[i]);
  return s;
}

std::string join_bits(const BitVector& x) {
  std::string s;
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? " " : "") + std::to_string(int{x[i]});
  return s;
}

int cmd_classify(const Options& o) {
  const XorGame game = read_game(o.game_path);
  const Classification c = cross_check(game);
  std::cout << "game: n=" << game.n() << " m=" << game.m() << '\n'
            << "q_perfect: " << std::boolalpha << c.q_perfect << '\n'
            << "c_perfect: " << c.c_perfect << '\n'
            << "pseudotelepathy: " << c.pseudotelepathy() << '\n'
            << "merp: " << (c.merp ? join_rationals(*c.merp) : "none") << '\n'
            << "classical: " << (c.classical ? join_bits(*c.classical) : "none") << '\n'
            << "agreement: hnf snf dual agree\n";
  if (c.q_perfect && c.c_perfect) return 0;
  return c.q_perfect ? 1 : 2;
}

int cmd_verify(const Options& o) {
  const XorGame game = read_game(o.game_path);
  std::ifstream in(o.strategy_path);
  if (!in) throw NoInput("cannot open strategy file '" + o.strategy_path + "'");
  const RationalVector z = parse_strategy(in);
  if (z.size() != game.variables())
    throw LengthMismatch("strategy has " + std::to_string(z.size()) + " entries, game needs " +
                         std::to_string(game.variables()));

  const MerpStrategy strat{z};
  const bool perfect = is_perfect_merp(game, strat);
  const double formula = merp_score(game, strat);
  double simulated = 0.0;
  for (double w : simulate_merp(game, strat)) simulated += w;
  simulated /= static_cast<double>(game.m());

  std::cout << "perfect: " << std::boolalpha << perfect << '\n'
            << "score: " << format_double(formula) << '\n'
            << "simulated_score: " << format_double(simulated) << '\n'
            << "difference: " << format_double(std::abs(formula - simulated)) << '\n';
  const bool binary = std::all_of(z.begin(), z.end(), [](const Rational& v) { return v == 0 || v == 1; });
  if (binary) {
    BitVector x(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) x[i] = z[i] == 1;
    std::cout << "classical_score: " << format_rational(classical_score(game, ClassicalStrategy{x})) << '\n';
  }
  return perfect ? 0 : 1;
}

int cmd_sample(const Options& o) {
  const int n = single_n(o.n_spec);
  const auto [m, m_hi] = m_range(o.m_spec);
  if (m != m_hi) throw InvalidArgument("sample takes a single --m");
  if (o.count < 1) throw InvalidArgument("--count must be at least 1");
  const Dedup dedup = parse_dedup(o.dedup);
  if (m > sampler_capacity(n, dedup)) throw ExhaustedSpace("--m exceeds the clause space for this n");

  const std::filesystem::path dir = o.out.empty() ? "." : o.out;
  std::filesystem::create_directories(dir);
  for (std::uint64_t i = 0; i < o.count; ++i) {
    // Game i is the same game as trial i of the (n, m) experiment cell.
    const XorGame game = sample_random_game(n, m, trial_key(o.seed, static_cast<std::uint64_t>(n), m, i), dedup);
    const auto name = "game_n" + std::to_string(n) + "_m" + std::to_string(m) + "_s" + std::to_string(o.seed) + "_" +
                      std::to_string(i) + ".txt";
    const auto path = (dir / name).string();
    emit(path, [&](std::ostream& os) {
      os << "# xorgame sample n=" << n << " m=" << m << " seed=" << o.seed << " dedup=" << o.dedup
         << " index=" << i << '\n';
      write_game(os, game);
    });
    std::cout << path << '\n';
  }
  return 0;
}

int cmd_sweep(const Options& o) {
  const RunConfig cfg = run_config(o);
  const auto ns = n_list(o.n_spec);
  const RatioSpec r = ratio_range(o.ratio_spec);
  const SweepTable table = sweep_grid(ns, r.lo, r.hi, r.step, o.samples, cfg);
  const std::string grid =
      "n=" + o.n_spec + " ratio=" + format_double(r.lo) + ":" + format_double(r.hi) + ":" + format_double(r.step);
  emit(o.out, [&](std::ostream& os) {
    os << manifest("sweep", o, grid) << '\n';
    write_csv(os, table);
  });
  return 0;
}

int cmd_crosssection(const Options& o) {
  const RunConfig cfg = run_config(o);
  const int n = single_n(o.n_spec);
  const auto [lo, hi] = m_range(o.m_spec);
  const SweepTable table = cross_section(n, lo, hi, o.samples, cfg);
  emit(o.out, [&](std::ostream& os) {
    os << manifest("crosssection", o, "n=" + std::to_string(n) + " m=" + o.m_spec) << '\n';
    write_csv(os, table);
  });
  try {
    const TransitionEstimate t = find_transition(table);
    std::cerr << "half-crossing: q at m=" << format_double(t.m_half_q) << " (ratio " << format_double(t.ratio_q)
              << "), c at m=" << format_double(t.m_half_c) << " (ratio " << format_double(t.ratio_c) << ")\n";
  } catch (const NoCrossing& e) {
    std::cerr << "half-crossing: " << e.what() << '\n';
  }
  return 0;
}

int cmd_maxpseudo(const Options& o) {
  const RunConfig cfg = run_config(o);
  const int n = single_n(o.n_spec);
  const auto [lo, hi] = m_range(o.m_spec);
  SweepTable table;
  const PseudoMax best = max_pseudotelepathy(n, lo, hi, o.samples, cfg, &table);
  const std::string head = manifest("maxpseudo", o, "n=" + std::to_string(n) + " m=" + o.m_spec);
  const auto& cell = *std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.m == best.m_star; });
  emit(o.out, [&](std::ostream& os) {
    os << head << '\n'
       << "n,m_star,ratio,mu,ci_pseudo,samples,seed,dedup\n"
       << best.n << ',' << best.m_star << ',' << format_double(cell.ratio()) << ',' << format_double(best.mu) << ','
       << format_double(cell.ci_pseudo()) << ',' << best.samples << ',' << o.seed << ',' << o.dedup << '\n';
  });
  if (!o.table.empty())
    emit(o.table, [&](std::ostream& os) {
      os << head << '\n';
      write_csv(os, table);
    });
  return 0;
}

void add_experiment_flags(CLI::App* sub, Options& o) {
  sub->add_option("--samples", o.samples, "Games per (n, m) cell")->required();
  sub->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  sub->add_option("--threads", o.threads, "Worker threads (0 = all cores)")->capture_default_str();
  sub->add_option("--dedup", o.dedup, "Clause distinctness: triple or full")
      ->check(CLI::IsMember({"triple", "full"}))
      ->capture_default_str();
  sub->add_option("--engine", o.engine, "Classifier used for sampling: fast or hnf")
      ->check(CLI::IsMember({"fast", "hnf"}))
      ->capture_default_str();
  sub->add_option("--out", o.out, "Output CSV path (default: standard output)");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Perfect strategies and pseudotelepathy in random 3XOR games"};
  app.require_subcommand(1);

  auto* classify = app.add_subcommand("classify", "Classify a game file");
  classify->add_option("game", o.game_path, "Game file")->required();

  auto* verify = app.add_subcommand("verify", "Score a MERP or classical strategy on a game");
  verify->add_option("game", o.game_path, "Game file")->required();
  verify->add_option("strategy", o.strategy_path, "Strategy file with 3n entries")->required();

  auto* sample = app.add_subcommand("sample", "Write random game files");
  sample->add_option("--n", o.n_spec, "Questions per player")->required();
  sample->add_option("--m", o.m_spec, "Clause count")->required();
  sample->add_option("--count", o.count, "Number of games")->capture_default_str();
  sample->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  sample->add_option("--dedup", o.dedup, "Clause distinctness: triple or full")
      ->check(CLI::IsMember({"triple", "full"}))
      ->capture_default_str();
  sample->add_option("--out", o.out, "Output directory (default: current directory)");

  auto* sweep = app.add_subcommand("sweep", "Probabilities over an (n, m/n) grid");
  sweep->add_option("--n", o.n_spec, "List of n, e.g. 8,16,24 or 4:12")->required();
  sweep->add_option("--ratio", o.ratio_spec, "Ratio grid A:B[:STEP], step defaults to 0.1")->required();
  add_experiment_flags(sweep, o);

  auto* cross = app.add_subcommand("crosssection", "Probabilities for every m in a range at fixed n");
  cross->add_option("--n", o.n_spec, "Questions per player")->required();
  cross->add_option("--m", o.m_spec, "Clause range A:B")->required();
  add_experiment_flags(cross, o);

  auto* maxp = app.add_subcommand("maxpseudo", "Peak pseudotelepathy probability at fixed n");
  maxp->add_option("--n", o.n_spec, "Questions per player")->required();
  maxp->add_option("--m", o.m_spec, "Clause range A:B")->required();
  maxp->add_option("--table", o.table, "Also write the full cross-section CSV here");
  add_experiment_flags(maxp, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  try {
    if (*classify) return cmd_classify(o);
    if (*verify) return cmd_verify(o);
    if (*sample) return cmd_sample(o);
    if (*sweep) return cmd_sweep(o);
    if (*cross) return cmd_crosssection(o);
    if (*maxp) return cmd_maxpseudo(o);
  } catch (const ClassifierDisagreement& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDisagreement;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const LengthMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitLength;
  } catch (const NoInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNoInput;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const ExhaustedSpace& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
