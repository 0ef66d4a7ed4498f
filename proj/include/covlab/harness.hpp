#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "covlab/config.hpp"
#include "covlab/continuum.hpp"
#include "covlab/discretization.hpp"
#include "covlab/distributions.hpp"
#include "covlab/errors.hpp"
#include "covlab/interval.hpp"
#include "covlab/lattice.hpp"
#include "covlab/markov.hpp"
#include "covlab/parallel.hpp"
#include "covlab/stats.hpp"

namespace covlab {

inline constexpr std::string_view kVersion = "0.1.0";

using Json = nlohmann::ordered_json;

enum class OutputFormat { csv, json };

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw ValidationError("format", "must be csv or json, got '" + s + "'");
}

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version{kVersion};
};

struct ExperimentResult {
  std::string kind;
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
  Json summary = Json::object();
  Provenance provenance;
};

/// Runs a prepared experiment with (seed, replicates, threads).
using ExperimentRunner = std::function<ExperimentResult(std::uint64_t, std::uint64_t, unsigned)>;

struct ExperimentKind {
  std::string name;
  std::string description;
  /// Parses and validates the [model] section; throws ValidationError.
  std::function<ExperimentRunner(const ConfigSection&)> prepare;
};

/// JSON has no infinities; they travel as the strings "inf" / "-inf", NaN as null.
inline Json number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline Json number(const Extended& v) { return v.is_infinite() ? Json("inf") : Json(v.value()); }

template <class T>
Json optional_value(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

namespace detail {

inline Json verdict_json(const DivergenceVerdict& v) {
  Json evidence = Json::array();
  for (const auto& p : v.evidence) evidence.push_back({{"index", p.index}, {"partial_sum", number(p.partial_sum)}});
  return {{"status", to_string(v.status)}, {"exponent", number(v.exponent)}, {"note", v.note}, {"evidence", evidence}};
}

inline Json interval_json(const ConfidenceInterval& ci) { return {{"lo", ci.lo}, {"hi", ci.hi}}; }

inline PoissonBooleanSpec continuum_spec(const ConfigSection& m, ShapeKind default_shape, int default_dim) {
  PoissonBooleanSpec spec;
  spec.intensity = m.get_double("intensity");
  spec.dimension = static_cast<int>(m.get_int("dimension", default_dim));
  spec.rho = m.get_distribution("rho");
  const auto shape = m.get_string("shape", default_shape == ShapeKind::cube ? "cube" : "ball");
  if (shape == "cube") spec.shape = ShapeKind::cube;
  else if (shape == "ball") spec.shape = ShapeKind::ball;
  else throw ValidationError("shape", "must be cube or ball");
  spec.margin_quantile = m.get_double("margin_quantile", spec.margin_quantile);
  require(spec.dimension >= 1 && spec.dimension <= static_cast<int>(kMaxDim), "dimension", "must lie in 1..4");
  const double side = m.get_double("side", 1.0);
  require(side > 0.0, "side", "must be positive");
  spec.window = Box::uniform(static_cast<std::size_t>(spec.dimension), 0.0, side);
  spec.validate();
  return spec;
}

inline MarkovCoverageSpec markov_spec(const ConfigSection& m) {
  MarkovCoverageSpec spec;
  spec.p01 = m.get_double("p01");
  spec.p10 = m.get_double("p10");
  spec.p00 = m.get_double("p00", 1.0 - spec.p01);
  spec.p11 = m.get_double("p11", 1.0 - spec.p10);
  spec.rho = m.get_distribution("rho");
  const auto init = m.get_string("initial", "stationary");
  if (init == "stationary") spec.initial = InitialState::stationary;
  else if (init == "start-at-0") spec.initial = InitialState::start_at_0;
  else if (init == "start-at-1") spec.initial = InitialState::start_at_1;
  else throw ValidationError("initial", "must be stationary, start-at-0 or start-at-1");
  spec.validate();
  return spec;
}

inline LatticeSpec lattice_spec(const ConfigSection& m, int default_dim) {
  LatticeSpec spec;
  spec.dimension = static_cast<int>(m.get_int("dimension", default_dim));
  spec.p = m.get_double("p");
  spec.rho = m.get_distribution("rho");
  spec.validate();
  return spec;
}

inline CantorSequence cantor_sequence(const ConfigSection& m) {
  const double intensity = m.get_double("intensity");
  CantorSequence seq;
  if (m.has("terms")) {
    std::vector<double> terms;
    const auto text = m.get_string("terms");
    for (const auto t : split(text, ',')) terms.push_back(parse_double(t, "terms"));
    seq = CantorSequence::list(std::move(terms), intensity);
  } else {
    seq = CantorSequence::power_law(m.get_double("c"), m.get_double("gamma"), intensity);
  }
  seq.validate();
  return seq;
}

inline double parse_extended(std::string_view s, const char* field) {
  s = trim(s);
  if (s == "inf") return std::numeric_limits<double>::infinity();
  return parse_double(s, field);
}

inline LengthMeasure length_measure(const ConfigSection& m) {
  LengthMeasure mu;
  if (const auto atoms = m.get_string("atoms", ""); !trim(atoms).empty()) {
    for (const auto a : split(atoms, ',')) {
      const auto parts = split(a, ':');
      require(parts.size() == 2, "atoms", "each atom is y:mass");
      mu.atoms.push_back({parse_double(parts[0], "atoms"), parse_double(parts[1], "atoms")});
    }
  }
  if (const auto pieces = m.get_string("pieces", ""); !trim(pieces).empty()) {
    for (const auto p : split(pieces, ',')) {
      const auto parts = split(p, ':');
      require(parts.size() == 4, "pieces", "each piece is a:b:beta:gamma");
      mu.pieces.push_back({parse_double(parts[0], "pieces"), parse_extended(parts[1], "pieces"),
                           parse_double(parts[2], "pieces"), parse_double(parts[3], "pieces")});
    }
  }
  mu.validate();
  return mu;
}

inline std::vector<Annulus> annuli_list(const ConfigSection& m) {
  std::vector<Annulus> out;
  const auto text = m.get_string("annuli");
  for (const auto a : split(text, ',')) {
    const auto parts = split(a, ':');
    require(parts.size() == 2, "annuli", "each annulus is r_in:r_out");
    out.push_back({parse_double(parts[0], "annuli"), parse_double(parts[1], "annuli")});
    require(out.back().r_in >= 0.0 && out.back().r_in < out.back().r_out, "annuli", "need 0 <= r_in < r_out");
  }
  return out;
}

inline ExperimentResult estimate_result(const MonteCarloEstimate& est) {
  ExperimentResult res;
  res.columns = {"replicate", "vacancy", "covered", "n_shapes"};
  for (const auto& r : est.rows)
    res.rows.push_back({r.replicate, number(r.vacancy), r.covered, static_cast<std::uint64_t>(r.n_shapes)});
  res.summary["estimate"] = est.estimate;
  res.summary["standard_error"] = est.standard_error;
  if (est.interval) res.summary["wilson95"] = interval_json(*est.interval);
  res.summary["replicates"] = est.replicates;
  res.summary["truncation_note"] = est.truncation_note;
  return res;
}

inline std::vector<ExperimentKind> build_registry() {
  std::vector<ExperimentKind> kinds;

  kinds.push_back({"vacancy", "mean vacant fraction of the window, cube Boolean model", [](const ConfigSection& m) {
    const auto spec = continuum_spec(m, ShapeKind::cube, 1);
    require(spec.shape == ShapeKind::cube, "shape", "vacancy is exact for cube shapes only");
    return ExperimentRunner([spec](std::uint64_t seed, std::uint64_t reps, unsigned threads) {
      auto res = estimate_result(estimate_vacancy_expectation(spec, reps, seed, threads));
      res.summary["expected"] = vacancy_expectation_exact(spec);
      return res;
    });
  }});

  kinds.push_back({"full-coverage", "probability that the union covers the window", [](const ConfigSection& m) {
    const auto spec = continuum_spec(m, ShapeKind::cube, 1);
    return ExperimentRunner([spec](std::uint64_t seed, std::uint64_t reps, unsigned threads) {
      return estimate_result(estimate_full_coverage_probability(spec, reps, seed, threads));
    });
  }});

  kinds.push_back({"coverage-profile", "covered fraction per annulus, scaled-radius ball model", [](const ConfigSection& m) {
    ScaledRadiusSpec spec;
    spec.base = continuum_spec(m, ShapeKind::ball, 2);
    spec.scale_constant = m.get_double("scale_constant");
    spec.inner_radius = m.get_double("inner_radius", spec.inner_radius);
    spec.validate();
    const auto annuli = annuli_list(m);
    return ExperimentRunner([spec, annuli](std::uint64_t seed, std::uint64_t reps, unsigned threads) {
      const auto profile = coverage_profile(spec, annuli, reps, seed, threads);
      ExperimentResult res;
      res.columns = {"replicate", "r_in", "r_out", "covered_fraction"};
      for (std::size_t r = 0; r < profile.per_replicate.size(); ++r)
        for (std::size_t a = 0; a < annuli.size(); ++a)
          res.rows.push_back({r, annuli[a].r_in, annuli[a].r_out, profile.per_replicate[r][a]});
      Json per = Json::array();
      for (const auto& a : profile.annuli)
        per.push_back({{"r_in", a.annulus.r_in}, {"r_out", a.annulus.r_out}, {"covered_fraction", a.covered_fraction},
                       {"standard_error", a.standard_error}});
      res.summary["annuli"] = per;
      res.summary["simulated_radius"] = profile.simulated_radius;
      res.summary["truncation_note"] = profile.truncation_note;
      return res;
    });
  }});

  kinds.push_back({"sandwich", "upper/lower discrete model sandwich on orthant cube configurations", [](const ConfigSection& m) {
    auto spec = continuum_spec(m, ShapeKind::cube, 2);
    const auto n = m.get_int("n", 20);
    require(n >= 1, "n", "must be >= 1");
    require(spec.shape == ShapeKind::cube, "shape", "the sandwich applies to cube shapes");
    spec.domain = Domain::orthant;
    spec.window = Box::uniform(static_cast<std::size_t>(spec.dimension), 0.0, static_cast<double>(n));
    return ExperimentRunner([spec](std::uint64_t seed, std::uint64_t reps, unsigned threads) {
      const auto reports = run_replicates(seed, reps, threads, [&](std::size_t, RandomStream& rng) {
        return sandwich_check(simulate_configuration(spec, rng), spec.window);
      });
      ExperimentResult res;
      res.columns = {"replicate", "holds", "violation", "lower_cells", "touched_cells", "upper_cells"};
      std::uint64_t failures = 0;
      for (std::size_t r = 0; r < reports.size(); ++r) {
        const auto& rep = reports[r];
        failures += rep.holds ? 0 : 1;
        res.rows.push_back({r, rep.holds, rep.violation, rep.lower_cells, rep.poisson_touched_cells, rep.upper_cells});
      }
      res.summary["all_hold"] = failures == 0;
      res.summary["failures"] = failures;
      return res;
    });
  }});

  kinds.push_back({"discretize", "unit-cell grid (green, rho_u, rho_l) of one orthant realization", [](const ConfigSection& m) {
    auto spec = continuum_spec(m, ShapeKind::cube, 2);
    const auto n = m.get_int("n", 20);
    require(n >= 1, "n", "must be >= 1");
    require(spec.shape == ShapeKind::cube, "shape", "discretization applies to cube shapes");
    spec.domain = Domain::orthant;
    spec.window = Box::uniform(static_cast<std::size_t>(spec.dimension), 0.0, static_cast<double>(n));
    return ExperimentRunner([spec](std::uint64_t seed, std::uint64_t, unsigned) {
      auto rng = split_stream(seed, 0);
      const auto lat = discretize(simulate_configuration(spec, rng), spec.window);
      ExperimentResult res;
      res.columns = {"cell", "green", "rho_u", "rho_l"};
      for (std::size_t idx = 0; idx < lat.cell_count(); ++idx) {
        const auto c = lat.cell(idx);
        std::string cell;
        for (int a = 0; a < lat.dimension; ++a) cell += (a ? ";" : "") + std::to_string(c[static_cast<std::size_t>(a)]);
        res.rows.push_back({cell, lat.green[idx] != 0, lat.rho_upper[idx], lat.rho_lower[idx]});
      }
      res.summary["green_fraction"] =
          static_cast<double>(std::count(lat.green.begin(), lat.green.end(), 1)) / static_cast<double>(lat.cell_count());
      res.summary["green_probability"] = green_probability(spec.intensity);
      return res;
    });
  }});

  kinds.push_back({"lattice-simulate", "uncovered sites and eventual-coverage threshold of the lattice model", [](const ConfigSection& m) {
    const auto spec = lattice_spec(m, 2);
    const auto n = m.get_int("n", 200);
    require(n >= 4, "n", "must be >= 4");
    return ExperimentRunner([spec, n](std::uint64_t seed, std::uint64_t reps, unsigned threads) {
      const auto sims = run_replicates(seed, reps, threads, [&](std::size_t, RandomStream& rng) {
        return simulate_lattice(spec, n, rng);
      });
      ExperimentResult res;
      res.columns = {"replicate", "uncovered_count", "t_hat", "eventually_covered"};
      std::uint64_t hits = 0;
      bool truncated = false;
      for (std::size_t r = 0; r < sims.size(); ++r) {
        hits += sims[r].eventually_covered ? 1 : 0;
        truncated = truncated || sims[r].truncation_note;
        res.rows.push_back({r, sims[r].uncovered.size(), optional_value(sims[r].t_hat), sims[r].eventually_covered});
      }
      res.summary["eventually_covered_fraction"] = static_cast<double>(hits) / static_cast<double>(reps);
      res.summary["wilson95"] = interval_json(wilson_interval(hits, reps));
      res.summary["guard"] = sims.front().guard;
      res.summary["truncation_note"] = truncated;
      return res;
    });
  }});

  kinds.push_back({"lattice-series", "closed form vs oracle along a row and the Gauss-test verdict", [](const ConfigSection& m) {
    auto spec = lattice_spec(m, 2);
    require(spec.dimension == 2, "dimension", "the series is defined for d = 2");
    const auto j = m.get_int("j", 1);
    const auto upto = m.get_int("I", 400);
    const auto oracle_limit = m.get_int("oracle_max_i", 100);
    const auto m_lo = m.get_int("m_lo", upto / 4);
    const auto m_hi = m.get_int("m_hi", upto - 1);
    require(j >= 1, "j", "must be >= 1");
    require(upto >= j + 1, "I", "need I >= j + 1");
    require(m_lo >= 1 && m_lo <= m_hi && m_hi < upto, "m_lo", "need 1 <= m_lo <= m_hi < I");
    return ExperimentRunner([=](std::uint64_t, std::uint64_t, unsigned) {
      const auto sums = series_partial_sums(spec, j, upto);
      ExperimentResult res;
      res.columns = {"i", "j", "P_formula", "P_oracle", "partial_sum"};
      for (std::int64_t i = 1; i <= upto; ++i) {
        const double formula = i > j ? uncovered_prob_formula(spec, i, j) : std::exp(log_uncovered_prob(spec, i, j));
        const Json oracle = i <= oracle_limit ? Json(uncovered_prob_oracle(spec, i, j)) : Json(nullptr);
        res.rows.push_back({i, j, formula, oracle, sums[static_cast<std::size_t>(i - 1)]});
      }
      res.summary["verdict"] = verdict_json(divergence_diagnostic(spec, j, m_lo, m_hi));
      return res;
    });
  }});

  kinds.push_back({"markov-table", "recurrence table P0(A_k), P1(A_k), stationary P(A_k)", [](const ConfigSection& m) {
    auto spec = markov_spec(m);
    const auto K = m.get_int("K", 20);
    require(K >= 1, "K", "must be >= 1");
    spec.initial = InitialState::stationary;
    return ExperimentRunner([spec, K](std::uint64_t, std::uint64_t, unsigned) {
      const auto table = recurrence_table(spec, K);
      ExperimentResult res;
      res.columns = {"k", "P0", "P1", "P_stationary"};
      for (const auto& row : table.rows) res.rows.push_back({row.k, row.p0, row.p1, row.p});
      return res;
    });
  }});

  kinds.push_back({"markov-threshold", "classification by the open fraction against 1/l and 1/L", [](const ConfigSection& m) {
    const auto spec = markov_spec(m);
    return ExperimentRunner([spec](std::uint64_t, std::uint64_t, unsigned) {
      const auto v = threshold_classify(spec);
      ExperimentResult res;
      res.columns = {"l", "L", "pi1", "inv_l", "inv_L", "verdict"};
      res.rows.push_back({number(v.liminf), number(v.limsup), v.open_fraction, number(v.inv_liminf),
                          number(v.inv_limsup), to_string(v.status)});
      res.summary = {{"l", number(v.liminf)},         {"L", number(v.limsup)},
                     {"pi1", v.open_fraction},        {"inv_l", number(v.inv_liminf)},
                     {"inv_L", number(v.inv_limsup)}, {"verdict", to_string(v.status)}};
      return res;
    });
  }});

  kinds.push_back({"markov-simulate", "uncovered sites of the Markov coverage model", [](const ConfigSection& m) {
    const auto spec = markov_spec(m);
    const auto n = m.get_int("n", 10000);
    const auto beyond = m.get_int("beyond", 100);
    require(n >= 2, "n", "must be >= 2");
    return ExperimentRunner([spec, n, beyond](std::uint64_t seed, std::uint64_t reps, unsigned threads) {
      const auto sims = run_replicates(seed, reps, threads, [&](std::size_t, RandomStream& rng) {
        return simulate_markov_coverage(spec, n, rng);
      });
      ExperimentResult res;
      res.columns = {"replicate", "uncovered_count", "last_uncovered", "uncovered_beyond"};
      std::uint64_t clear = 0;
      for (std::size_t r = 0; r < sims.size(); ++r) {
        const auto& u = sims[r].uncovered;
        const auto past = static_cast<std::uint64_t>(u.end() - std::upper_bound(u.begin(), u.end(), beyond));
        clear += past == 0 ? 1 : 0;
        res.rows.push_back({r, u.size(), optional_value(sims[r].last_uncovered), past});
      }
      res.summary["beyond"] = beyond;
      res.summary["none_beyond_fraction"] = static_cast<double>(clear) / static_cast<double>(reps);
      res.summary["wilson95"] = interval_json(wilson_interval(clear, reps));
      res.summary["threshold_verdict"] = to_string(threshold_classify(spec).status);
      return res;
    });
  }});

  kinds.push_back({"cantor-simulate", "vacant measure of K superposed interval levels on the unit torus", [](const ConfigSection& m) {
    const auto seq = cantor_sequence(m);
    const auto K = m.get_int("K", seq.form == CantorSequence::Form::explicit_list ? seq.available() : 10);
    require(K >= 1 && K <= seq.available(), "K", "must lie in 1..number of terms");
    return ExperimentRunner([seq, K](std::uint64_t seed, std::uint64_t reps, unsigned threads) {
      const auto samples = run_replicates(seed, reps, threads, [&](std::size_t, RandomStream& rng) {
        return simulate_cantor(seq, K, rng);
      });
      ExperimentResult res;
      res.columns = {"replicate", "vacant_measure", "gap_count", "intervals"};
      std::vector<double> vac;
      for (std::size_t r = 0; r < samples.size(); ++r) {
        vac.push_back(samples[r].vacant_measure);
        res.rows.push_back({r, samples[r].vacant_measure, samples[r].gaps.size(), samples[r].intervals});
      }
      double total = 0.0;
      for (std::int64_t i = 1; i <= K; ++i) total += seq.term(i);
      const auto est = mean_and_se(vac);
      res.summary["estimate"] = est.mean;
      res.summary["standard_error"] = est.standard_error;
      res.summary["expected"] = std::exp(-seq.intensity * total);
      return res;
    });
  }});

  kinds.push_back({"cantor-criteria", "measure-zero and emptiness criteria of the random Cantor set", [](const ConfigSection& m) {
    const auto seq = cantor_sequence(m);
    return ExperimentRunner([seq](std::uint64_t, std::uint64_t, unsigned) {
      const auto measure = cantor_measure_criterion(seq);
      const auto empty = cantor_empty_criterion(seq);
      ExperimentResult res;
      res.columns = {"criterion", "status", "exponent", "note"};
      res.rows.push_back({"measure_zero", to_string(measure.status), number(measure.exponent), measure.note});
      res.rows.push_back({"empty", to_string(empty.status), number(empty.exponent), empty.note});
      res.summary["measure_zero"] = verdict_json(measure);
      res.summary["empty"] = verdict_json(empty);
      return res;
    });
  }});

  kinds.push_back({"shepp-criterion", "line-coverage integral test for an interval process", [](const ConfigSection& m) {
    const auto mu = length_measure(m);
    return ExperimentRunner([mu](std::uint64_t, std::uint64_t, unsigned) {
      ExperimentResult res;
      res.columns = {"x", "inner"};
      for (int k = 1; k <= 20; ++k) {
        const double x = std::ldexp(1.0, -k);
        res.rows.push_back({x, number(shepp_inner(mu, x))});
      }
      res.summary["verdict"] = verdict_json(shepp_criterion(mu));
      return res;
    });
  }});

  return kinds;
}

}  // namespace detail

inline const std::vector<ExperimentKind>& experiment_registry() {
  static const auto registry = detail::build_registry();
  return registry;
}

inline const ExperimentKind& find_experiment(const std::string& name) {
  for (const auto& k : experiment_registry())
    if (k.name == name) return k;
  throw ValidationError("experiment", "unknown experiment kind '" + name + "'");
}

struct ExperimentConfig {
  std::string kind;
  std::uint64_t seed = 0;
  std::uint64_t replicates = 100;
  std::string out;  // empty: standard output
  OutputFormat format = OutputFormat::csv;
  ConfigSection model{"model"};

  /// FNV-1a over kind, seed, replicates and the model block.
  std::string hash() const {
    std::string canon = "experiment = " + kind + "\nseed = " + std::to_string(seed) +
                        "\nreplicates = " + std::to_string(replicates) + "\n[model]\n";
    for (const auto& [k, v] : model.entries()) canon += k + " = " + v + "\n";
    return hex64(fnv1a64(canon));
  }
};

struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> replicates;
  std::optional<std::string> out;
  std::optional<std::string> format;
};

inline ExperimentConfig make_experiment_config(const ConfigFile& file, const ConfigOverrides& ov = {}) {
  ExperimentConfig cfg;
  const auto& top = file.top;
  cfg.kind = top.get_string("experiment");
  auto parse_u64 = [](const std::string& text, const char* field) {
    const auto v = detail::parse_int(text, field);
    require(v >= 0, field, "must be nonnegative");
    return static_cast<std::uint64_t>(v);
  };
  // file values are parsed even when overridden, so a bad key still fails
  cfg.seed = parse_u64(top.get_string("seed", "0"), "seed");
  cfg.replicates = parse_u64(top.get_string("replicates", "100"), "replicates");
  cfg.out = top.get_string("out", "");
  cfg.format = parse_format(top.get_string("format", "csv"));
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.replicates) cfg.replicates = *ov.replicates;
  if (ov.out) cfg.out = *ov.out;
  if (ov.format) cfg.format = parse_format(*ov.format);
  require(cfg.replicates >= 1, "replicates", "must be >= 1");
  top.reject_unused();
  for (const auto& [name, sec] : file.sections)
    if (name != "model") throw ValidationError(name, "unknown section [" + name + "]");
  cfg.model = file.section("model");
  return cfg;
}

/// Parses and validates everything a run would need, without running.
inline ExperimentRunner prepare_experiment(const ExperimentConfig& cfg) {
  const ConfigSection model = cfg.model;
  auto runner = find_experiment(cfg.kind).prepare(model);
  model.reject_unused();
  return runner;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned threads = default_thread_count()) {
  const auto runner = prepare_experiment(cfg);
  auto res = runner(cfg.seed, cfg.replicates, threads);
  res.kind = cfg.kind;
  res.provenance = {cfg.hash(), cfg.seed, std::string(kVersion)};
  return res;
}

namespace detail {

inline std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (const char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return v.dump();
}

}  // namespace detail

/// CSV: header, then one line per row; every row ends with the config hash.
/// JSON: provenance, summary, columns and rows in one document.
inline std::string render(const ExperimentResult& res, OutputFormat format) {
  if (format == OutputFormat::csv) {
    std::string out;
    for (const auto& c : res.columns) out += c + ",";
    out += "config_hash\n";
    for (const auto& row : res.rows) {
      for (const auto& cell : row) out += detail::csv_cell(cell) + ",";
      out += res.provenance.config_hash + "\n";
    }
    return out;
  }
  Json doc;
  doc["experiment"] = res.kind;
  doc["provenance"] = {{"config_hash", res.provenance.config_hash},
                       {"seed", res.provenance.seed},
                       {"version", res.provenance.version}};
  doc["summary"] = res.summary;
  Json cols = res.columns;
  cols.push_back("config_hash");
  doc["columns"] = cols;
  Json rows = Json::array();
  for (const auto& row : res.rows) {
    Json r(row);
    r.push_back(res.provenance.config_hash);
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never see a partial file. The temporary is removed on failure.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot move output into '" + path.string() + "'");
  }
}

}  // namespace covlab
