#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "covlab/errors.hpp"
#include "covlab/random.hpp"

namespace covlab {

/// Nonnegative real or +infinity. Divergent moments are carried as a flag so
/// callers branch on finiteness instead of on an overflowed double.
class Extended {
 public:
  constexpr Extended() = default;
  constexpr explicit Extended(double value) : value_(value), infinite_(false) {}

  static constexpr Extended infinity() {
    Extended e;
    e.infinite_ = true;
    e.value_ = std::numeric_limits<double>::infinity();
    return e;
  }

  constexpr bool is_infinite() const { return infinite_; }
  constexpr bool is_finite() const { return !infinite_; }
  /// The value, or +inf when infinite.
  constexpr double value() const { return value_; }
  /// 1/x with 1/0 = +inf and 1/inf = 0.
  constexpr Extended reciprocal() const {
    if (infinite_) return Extended(0.0);
    if (value_ == 0.0) return infinity();
    return Extended(1.0 / value_);
  }

  friend constexpr bool operator==(const Extended& a, const Extended& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

/// liminf and limsup of x * P(rho > x) as x -> infinity.
struct TailRegime {
  Extended liminf;
  Extended limsup;
};

namespace dist {

struct Degenerate {
  double value;
};
struct BoundedUniform {
  double lo;
  double hi;
};
/// G(x) = min(1, c / x).
struct ParetoTail {
  double scale;
};
struct DiscreteTable {
  std::vector<std::int64_t> values;  // sorted ascending, distinct
  std::vector<double> masses;
  std::vector<double> cumulative;
};
/// G(j) = min(1, c / j) on the positive integers.
struct DiscretePareto {
  double scale;
};
/// G(x) = min(1, x^-alpha), alpha in (0, 1].
struct Heavy {
  double alpha;
};

}  // namespace dist

/// Law of the side length / radius rho. Immutable; tail convention is strict:
/// G(x) = P(rho > x), F = 1 - G.
class RadiusDistribution {
 public:
  using Kind = std::variant<dist::Degenerate, dist::BoundedUniform, dist::ParetoTail,
                            dist::DiscreteTable, dist::DiscretePareto, dist::Heavy>;

  static RadiusDistribution degenerate(double value) {
    require(std::isfinite(value) && value > 0.0, "rho", "degenerate value must be a positive finite number");
    return RadiusDistribution(dist::Degenerate{value});
  }

  static RadiusDistribution bounded_uniform(double lo, double hi) {
    require(std::isfinite(lo) && std::isfinite(hi) && lo >= 0.0 && lo < hi, "rho",
            "uniform requires 0 <= lo < hi");
    return RadiusDistribution(dist::BoundedUniform{lo, hi});
  }

  static RadiusDistribution pareto_tail(double scale) {
    require(std::isfinite(scale) && scale > 0.0, "rho", "pareto scale must be positive");
    return RadiusDistribution(dist::ParetoTail{scale});
  }

  static RadiusDistribution discrete_pareto(double scale) {
    require(std::isfinite(scale) && scale > 0.0, "rho", "discrete pareto scale must be positive");
    return RadiusDistribution(dist::DiscretePareto{scale});
  }

  static RadiusDistribution heavy(double alpha) {
    require(alpha > 0.0 && alpha <= 1.0, "rho", "heavy tail exponent must lie in (0, 1]");
    return RadiusDistribution(dist::Heavy{alpha});
  }

  static RadiusDistribution table(std::vector<std::pair<std::int64_t, double>> entries) {
    require(!entries.empty(), "rho", "table needs at least one entry");
    std::sort(entries.begin(), entries.end());
    dist::DiscreteTable t;
    double total = 0.0;
    for (const auto& [value, mass] : entries) {
      require(value >= 1, "rho", "table values must be integers >= 1");
      require(mass > 0.0 && std::isfinite(mass), "rho", "table masses must be positive");
      if (!t.values.empty() && t.values.back() == value) {
        t.masses.back() += mass;
      } else {
        t.values.push_back(value);
        t.masses.push_back(mass);
      }
      total += mass;
    }
    require(std::fabs(total - 1.0) <= 1e-12, "rho", "table masses must sum to 1");
    t.cumulative.resize(t.masses.size());
    std::partial_sum(t.masses.begin(), t.masses.end(), t.cumulative.begin());
    t.cumulative.back() = 1.0;
    return RadiusDistribution(std::move(t));
  }

  const Kind& kind() const { return kind_; }

  /// True when rho takes only positive integer values.
  bool integer_valued() const {
    return std::visit(
        [](const auto& k) -> bool {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, dist::Degenerate>) {
            return k.value >= 1.0 && std::floor(k.value) == k.value;
          } else {
            return std::is_same_v<T, dist::DiscreteTable> || std::is_same_v<T, dist::DiscretePareto>;
          }
        },
        kind_);
  }

  /// Supremum of the support, +inf for unbounded laws.
  double support_max() const {
    return std::visit(
        [](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, dist::Degenerate>) return k.value;
          else if constexpr (std::is_same_v<T, dist::BoundedUniform>) return k.hi;
          else if constexpr (std::is_same_v<T, dist::DiscreteTable>) return static_cast<double>(k.values.back());
          else return std::numeric_limits<double>::infinity();
        },
        kind_);
  }

  bool bounded() const { return std::isfinite(support_max()); }

  /// G(x) = P(rho > x).
  double tail(double x) const {
    return std::visit(
        [x](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, dist::Degenerate>) {
            return x < k.value ? 1.0 : 0.0;
          } else if constexpr (std::is_same_v<T, dist::BoundedUniform>) {
            if (x < k.lo) return 1.0;
            if (x >= k.hi) return 0.0;
            return (k.hi - x) / (k.hi - k.lo);
          } else if constexpr (std::is_same_v<T, dist::ParetoTail>) {
            return x <= k.scale ? 1.0 : k.scale / x;
          } else if constexpr (std::is_same_v<T, dist::DiscreteTable>) {
            // mass strictly above x
            const auto it = std::upper_bound(k.values.begin(), k.values.end(), x,
                                             [](double v, std::int64_t e) { return v < static_cast<double>(e); });
            if (it == k.values.begin()) return 1.0;
            const auto idx = static_cast<std::size_t>(it - k.values.begin()) - 1;
            return std::max(0.0, 1.0 - k.cumulative[idx]);
          } else if constexpr (std::is_same_v<T, dist::DiscretePareto>) {
            const double j = std::floor(x);
            return j <= k.scale ? 1.0 : k.scale / j;
          } else {
            return x <= 1.0 ? 1.0 : std::pow(x, -k.alpha);
          }
        },
        kind_);
  }

  /// F(x) = P(rho <= x).
  double cdf(double x) const { return 1.0 - tail(x); }

  /// P(rho >= x). Differs from G(x) only at atoms.
  double prob_at_least(double x) const {
    return std::visit(
        [this, x](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, dist::Degenerate>) {
            return x <= k.value ? 1.0 : 0.0;
          } else if constexpr (std::is_same_v<T, dist::DiscreteTable> ||
                               std::is_same_v<T, dist::DiscretePareto>) {
            // integer law: P(rho >= x) = G(ceil(x) - 1)
            return tail(std::ceil(x) - 1.0);
          } else {
            return tail(x);
          }
        },
        kind_);
  }

  /// P(rho < x).
  double prob_below(double x) const { return 1.0 - prob_at_least(x); }

  /// E[rho^d], +inf when the moment diverges.
  Extended d_moment(int d) const {
    require(d >= 1, "d", "moment order must be >= 1");
    return std::visit(
        [d](const auto& k) -> Extended {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, dist::Degenerate>) {
            return Extended(std::pow(k.value, d));
          } else if constexpr (std::is_same_v<T, dist::BoundedUniform>) {
            const double n = d + 1.0;
            return Extended((std::pow(k.hi, n) - std::pow(k.lo, n)) / (n * (k.hi - k.lo)));
          } else if constexpr (std::is_same_v<T, dist::DiscreteTable>) {
            double s = 0.0;
            for (std::size_t i = 0; i < k.values.size(); ++i) {
              s += k.masses[i] * std::pow(static_cast<double>(k.values[i]), d);
            }
            return Extended(s);
          } else {
            // all remaining tails decay no faster than 1/x, so E[rho] = integral of G diverges
            return Extended::infinity();
          }
        },
        kind_);
  }

  TailRegime tail_regime() const {
    return std::visit(
        [](const auto& k) -> TailRegime {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, dist::ParetoTail> || std::is_same_v<T, dist::DiscretePareto>) {
            return {Extended(k.scale), Extended(k.scale)};
          } else if constexpr (std::is_same_v<T, dist::Heavy>) {
            if (k.alpha < 1.0) return {Extended::infinity(), Extended::infinity()};
            return {Extended(1.0), Extended(1.0)};
          } else {
            return {Extended(0.0), Extended(0.0)};
          }
        },
        kind_);
  }

  /// inf { x : F(x) >= q } for q in (0, 1).
  double quantile(double q) const {
    require(q > 0.0 && q < 1.0, "quantile", "level must lie in (0, 1)");
    return std::visit(
        [q](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, dist::Degenerate>) {
            return k.value;
          } else if constexpr (std::is_same_v<T, dist::BoundedUniform>) {
            return k.lo + q * (k.hi - k.lo);
          } else if constexpr (std::is_same_v<T, dist::ParetoTail>) {
            return k.scale / (1.0 - q);
          } else if constexpr (std::is_same_v<T, dist::DiscreteTable>) {
            for (std::size_t i = 0; i < k.values.size(); ++i) {
              if (k.cumulative[i] >= q - 1e-15) return static_cast<double>(k.values[i]);
            }
            return static_cast<double>(k.values.back());
          } else if constexpr (std::is_same_v<T, dist::DiscretePareto>) {
            return std::max(1.0, std::ceil(k.scale / (1.0 - q)));
          } else {
            return std::pow(1.0 - q, -1.0 / k.alpha);
          }
        },
        kind_);
  }

  /// One draw by inverse CDF.
  double sample(RandomStream& rng) const {
    return std::visit(
        [&rng](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, dist::Degenerate>) {
            return k.value;
          } else if constexpr (std::is_same_v<T, dist::BoundedUniform>) {
            return rng.uniform(k.lo, k.hi);
          } else if constexpr (std::is_same_v<T, dist::ParetoTail>) {
            return k.scale / rng.uniform();
          } else if constexpr (std::is_same_v<T, dist::DiscreteTable>) {
            const double u = rng.uniform();
            const auto it = std::lower_bound(k.cumulative.begin(), k.cumulative.end(), u);
            const auto idx = std::min(static_cast<std::size_t>(it - k.cumulative.begin()), k.values.size() - 1);
            return static_cast<double>(k.values[idx]);
          } else if constexpr (std::is_same_v<T, dist::DiscretePareto>) {
            return std::floor(k.scale / rng.uniform()) + 1.0;
          } else {
            return std::pow(rng.uniform(), -1.0 / k.alpha);
          }
        },
        kind_);
  }

  /// Canonical literal, parseable by parse_distribution.
  std::string to_string() const;

 private:
  explicit RadiusDistribution(Kind kind) : kind_(std::move(kind)) {}

  Kind kind_;
};

namespace detail {

inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline double parse_double(std::string_view text, const char* field) {
  text = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw ValidationError(field, "not a number: '" + std::string(text) + "'");
  }
  return v;
}

inline std::int64_t parse_int(std::string_view text, const char* field) {
  text = trim(text);
  std::int64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw ValidationError(field, "not an integer: '" + std::string(text) + "'");
  }
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

inline std::string RadiusDistribution::to_string() const {
  using detail::format_number;
  return std::visit(
      [](const auto& k) -> std::string {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, dist::Degenerate>) {
          return "degenerate(" + format_number(k.value) + ")";
        } else if constexpr (std::is_same_v<T, dist::BoundedUniform>) {
          return "uniform(lo=" + format_number(k.lo) + ", hi=" + format_number(k.hi) + ")";
        } else if constexpr (std::is_same_v<T, dist::ParetoTail>) {
          return "pareto(c=" + format_number(k.scale) + ")";
        } else if constexpr (std::is_same_v<T, dist::DiscreteTable>) {
          std::string s = "table(";
          for (std::size_t i = 0; i < k.values.size(); ++i) {
            if (i) s += ", ";
            s += std::to_string(k.values[i]) + ":" + format_number(k.masses[i]);
          }
          return s + ")";
        } else if constexpr (std::is_same_v<T, dist::DiscretePareto>) {
          return "dpareto(c=" + format_number(k.scale) + ")";
        } else {
          return "heavy(alpha=" + format_number(k.alpha) + ")";
        }
      },
      kind_);
}

/// Parses a distribution literal:
///
///   degenerate(V)              rho = V
///   uniform(lo=A, hi=B)        uniform on [A, B]
///   pareto(c=C)                G(x) = min(1, C/x)
///   dpareto(c=C)               G(j) = min(1, C/j) on integers
///   heavy(alpha=A)             G(x) = min(1, x^-A), 0 < A <= 1
///   table(V1:M1, V2:M2, ...)   integer values with masses summing to 1
///
/// Keyword names may be omitted (`pareto(2)`, `uniform(0, 1)`).
inline RadiusDistribution parse_distribution(std::string_view literal) {
  using namespace detail;
  const auto text = trim(literal);
  const auto open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')') {
    throw ValidationError("rho", "expected NAME(ARGS), got '" + std::string(text) + "'");
  }
  const auto name = trim(text.substr(0, open));
  const auto body = text.substr(open + 1, text.size() - open - 2);
  const auto args = split(body, ',');

  // Strips an optional `key=` prefix after checking the key.
  auto positional = [&](std::size_t i, std::string_view key) -> std::string_view {
    if (i >= args.size()) throw ValidationError("rho", std::string(name) + " is missing '" + std::string(key) + "'");
    auto a = args[i];
    const auto eq = a.find('=');
    if (eq != std::string_view::npos) {
      if (trim(a.substr(0, eq)) != key) {
        throw ValidationError("rho", "unexpected argument '" + std::string(trim(a.substr(0, eq))) + "'");
      }
      a = a.substr(eq + 1);
    }
    return a;
  };
  auto expect_count = [&](std::size_t n) {
    if (args.size() != n) throw ValidationError("rho", std::string(name) + " takes " + std::to_string(n) + " argument(s)");
  };

  if (name == "degenerate" || name == "const") {
    expect_count(1);
    return RadiusDistribution::degenerate(parse_double(positional(0, "value"), "rho"));
  }
  if (name == "uniform") {
    expect_count(2);
    return RadiusDistribution::bounded_uniform(parse_double(positional(0, "lo"), "rho"),
                                               parse_double(positional(1, "hi"), "rho"));
  }
  if (name == "pareto") {
    expect_count(1);
    return RadiusDistribution::pareto_tail(parse_double(positional(0, "c"), "rho"));
  }
  if (name == "dpareto" || name == "discrete_pareto") {
    expect_count(1);
    return RadiusDistribution::discrete_pareto(parse_double(positional(0, "c"), "rho"));
  }
  if (name == "heavy") {
    expect_count(1);
    return RadiusDistribution::heavy(parse_double(positional(0, "alpha"), "rho"));
  }
  if (name == "table") {
    std::vector<std::pair<std::int64_t, double>> entries;
    for (const auto a : args) {
      const auto colon = a.find(':');
      if (colon == std::string_view::npos) throw ValidationError("rho", "table entries are VALUE:MASS");
      entries.emplace_back(parse_int(a.substr(0, colon), "rho"), parse_double(a.substr(colon + 1), "rho"));
    }
    return RadiusDistribution::table(std::move(entries));
  }
  throw ValidationError("rho", "unknown distribution '" + std::string(name) + "'");
}

}  // namespace covlab
