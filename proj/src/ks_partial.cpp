#include "kscluster/ks_partial.hpp"

#include <algorithm>

#include "kscluster/errors.hpp"

namespace kscluster::graphkit {

PointConfig tuple_config(const models::AbstractPolymerSystem& system, const std::vector<int>& tuple) {
  return PointConfig::hard_core(static_cast<int>(tuple.size()), [&](int a, int b) {
    return system.incompatible(tuple[static_cast<std::size_t>(a)], tuple[static_cast<std::size_t>(b)]);
  });
}

void for_each_multiset(const std::vector<int>& pool, int max_size,
                       const std::function<void(const std::vector<int>&, const Rational&)>& visit) {
  std::vector<int> current;
  std::function<void(std::size_t, int, const Rational&)> rec = [&](std::size_t start, int run, const Rational& w) {
    if (!current.empty()) visit(current, w);
    if (static_cast<int>(current.size()) == max_size) return;
    for (std::size_t t = start; t < pool.size(); ++t) {
      bool repeat = !current.empty() && t == start;
      int next_run = repeat ? run + 1 : 1;
      current.push_back(pool[t]);
      rec(t, next_run, w / next_run);
      current.pop_back();
    }
  };
  // Repeating the previous element grows its run; dividing by the run length builds 1/m!.
  rec(0, 0, Rational(1));
}

PartialSums::PartialSums(const models::AbstractPolymerSystem& system, std::uint64_t term_cap)
    : system_(system), term_cap_(term_cap) {}

Rational PartialSums::value(int N, std::vector<int> roots) {
  int n = static_cast<int>(roots.size());
  if (n < 1) throw ContractError("partial sums need at least one root");
  if (N < n) return 0;
  std::sort(roots.begin(), roots.end());
  auto key = std::make_pair(N, roots);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  Rational prefix = 1;
  for (int r : roots) prefix *= system_.activity(r);
  Rational total = abs(psi(n, tuple_config(system_, roots), PsiMethod::partitions));
  std::vector<int> pool(static_cast<std::size_t>(system_.size()));
  for (int i = 0; i < system_.size(); ++i) pool[static_cast<std::size_t>(i)] = i;
  for_each_multiset(pool, N - n, [&](const std::vector<int>& ys, const Rational& w) {
    if (++terms_ > term_cap_) throw CapacityError("partial-sum terms", static_cast<long long>(term_cap_),
                                                  static_cast<long long>(terms_));
    Rational act = w;
    for (int y : ys) act *= system_.activity(y);
    if (act == 0) return;
    std::vector<int> tuple = roots;
    tuple.insert(tuple.end(), ys.begin(), ys.end());
    total += act * abs(psi(n, tuple_config(system_, tuple), PsiMethod::partitions));
  });
  Rational result = prefix * total;
  memo_.emplace(std::move(key), result);
  return result;
}

namespace {

// (K~ S_N)_n at the tuple x, counting measure on the polymer list.
Rational ks_operator(PartialSums& sums, const models::AbstractPolymerSystem& system, int N,
                     const std::vector<int>& x, const SelectionRule& rule) {
  std::size_t s = rule.select(x);
  int xs = x[s];
  std::vector<int> rest;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (i != s) rest.push_back(x[i]);
  for (int r : rest)
    if (system.incompatible(xs, r)) return 0;
  Rational inner = rest.empty() ? Rational(0) : sums.value(N, rest);
  std::vector<int> pool = system.gamma(xs);  // |f(x_s, y)| = 1 exactly on Gamma(x_s)
  int room = N - static_cast<int>(rest.size());
  if (room >= 1) {
    for_each_multiset(pool, room, [&](const std::vector<int>& ys, const Rational& w) {
      std::vector<int> tuple = rest;
      tuple.insert(tuple.end(), ys.begin(), ys.end());
      inner += w * sums.value(N, tuple);
    });
  }
  return system.activity(xs) * inner;
}

}  // namespace

KsPartialResult verify_ks_recursion_partial(const models::AbstractPolymerSystem& system, int n_max, int N_max,
                                            const SelectionRule& rule, std::uint64_t term_cap) {
  if (n_max < 1 || N_max < 1) throw ContractError("n_max and N_max must be positive");
  PartialSums sums(system, term_cap);
  KsPartialResult res{true, 0, ""};
  int p = system.size();
  auto describe = [&](const std::vector<int>& x, int N, const Rational& lhs, const Rational& rhs) {
    std::string s = "N=" + std::to_string(N) + " x=(";
    for (std::size_t i = 0; i < x.size(); ++i) s += (i ? "," : "") + system.id(x[i]);
    return s + ") lhs=" + lhs.get_str() + " rhs=" + rhs.get_str();
  };
  // S~_1 = e_z: only single roots carry weight.
  for (int n = 1; n <= n_max; ++n) {
    std::vector<int> x(static_cast<std::size_t>(n), 0);
    std::function<void(int)> rec = [&](int pos) {
      if (!res.holds) return;
      if (pos == n) {
        Rational e = n == 1 ? system.activity(x[0]) : Rational(0);
        Rational s1 = sums.value(1, x);
        ++res.checks;
        if (s1 != e) {
          res.holds = false;
          res.counterexample = describe(x, 1, s1, e);
          return;
        }
        for (int N = 1; N <= N_max && res.holds; ++N) {
          Rational lhs = sums.value(N + 1, x);
          Rational rhs = e + ks_operator(sums, system, N, x, rule);
          ++res.checks;
          if (lhs != rhs) {
            res.holds = false;
            res.counterexample = describe(x, N + 1, lhs, rhs);
          }
        }
        return;
      }
      for (int v = 0; v < p; ++v) {
        x[static_cast<std::size_t>(pos)] = v;
        rec(pos + 1);
      }
    };
    rec(0);
    if (!res.holds) break;
  }
  return res;
}

}  // namespace kscluster::graphkit
