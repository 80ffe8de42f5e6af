#pragma once

// Lafforgue pseudocharacters for CU-valued representations of finite
// groups: the generator invariant functions, FFS compatibility checks,
// ring-map pushforward, integrality detection, a reconstruction /
// distinction oracle, and a truncated l-adic limit demo.
//
// Invariant functions are words in the alphabet
//   g_k (identity-coset slots),  h_k h_l^{-1},  h_k h_l^{-t}  (c-slots)
// evaluated through s_i / det^{-1}, together with the mu^{+-2} coordinate
// functions.  In theta-coordinates the two-letter symbols become
// a_k a_l^{-1} and a_k Phi a_l^{-t} Phi.  Functions carry a coset profile
// and evaluate to zero off their profile.

#include <functional>
#include <set>

#include "lifting.hpp"

namespace cgu {

struct Letter {
  enum Kind { G, Ginv, HHinv, HHt, HHtInv } kind;
  int k = 0;
  int l = 0;

  std::string to_string() const {
    switch (kind) {
      case G: return "g" + std::to_string(k);
      case Ginv: return "g" + std::to_string(k) + "^-1";
      case HHinv:
        return "h" + std::to_string(k) + "h" + std::to_string(l) + "^-1";
      case HHt:
        return "h" + std::to_string(k) + "h" + std::to_string(l) + "^-t";
      case HHtInv:
        return "(h" + std::to_string(k) + "h" + std::to_string(l) + "^-t)^-1";
    }
    return "?";
  }
  bool operator<(const Letter& o) const {
    return std::tie(kind, k, l) < std::tie(o.kind, o.k, o.l);
  }
  bool operator==(const Letter& o) const {
    return kind == o.kind && k == o.k && l == o.l;
  }
};

// A conjugation-invariant function on tuples of CU elements.  base_profile
// constrains the coset of each evaluated slot; slot_sources maps each
// evaluated slot to the product of tuple positions feeding it (identity
// map for plain generators; folds and pullbacks reuse the same structure).
struct InvariantFn {
  enum Kind { S, DetInv, MuPow };

  int arity = 1;  // tuple arity
  Kind kind = S;
  int s_index = 1;      // for S
  int mu_exponent = 2;  // for MuPow: +2 or -2
  int mu_slot = 0;      // for MuPow: evaluated slot
  std::vector<int> base_profile;            // size eval_arity, entries 0/1
  std::vector<std::vector<int>> slot_sources;  // size eval_arity
  std::vector<Letter> word;                 // for S / DetInv

  static InvariantFn plain(int arity, std::vector<int> profile, Kind kind,
                           int s_index, std::vector<Letter> word) {
    InvariantFn f;
    f.arity = arity;
    f.kind = kind;
    f.s_index = s_index;
    f.base_profile = std::move(profile);
    f.word = std::move(word);
    f.slot_sources.resize(f.base_profile.size());
    for (std::size_t i = 0; i < f.slot_sources.size(); ++i)
      f.slot_sources[i] = {static_cast<int>(i)};
    return f;
  }
  static InvariantFn mu_pow(int arity, std::vector<int> profile, int slot,
                            int exponent) {
    InvariantFn f;
    f.arity = arity;
    f.kind = MuPow;
    f.mu_exponent = exponent;
    f.mu_slot = slot;
    f.base_profile = std::move(profile);
    f.slot_sources.resize(f.base_profile.size());
    for (std::size_t i = 0; i < f.slot_sources.size(); ++i)
      f.slot_sources[i] = {static_cast<int>(i)};
    return f;
  }

  // f^zeta: arity becomes target_arity, evaluated slot j reads position
  // zeta(j) of the tuple
  InvariantFn pullback(const std::vector<int>& zeta, int target_arity) const {
    InvariantFn f = *this;
    f.arity = target_arity;
    for (auto& src : f.slot_sources)
      for (auto& pos : src) pos = zeta[pos];
    return f;
  }

  // \hat f: arity + 1, with the last evaluated source position expanded to
  // the product of the last two tuple positions
  InvariantFn fold() const {
    InvariantFn f = *this;
    int last = arity - 1;
    for (auto& src : f.slot_sources) {
      std::vector<int> out;
      for (int pos : src) {
        if (pos == last) {
          out.push_back(last);
          out.push_back(last + 1);
        } else {
          out.push_back(pos);
        }
      }
      src = std::move(out);
    }
    f.arity = arity + 1;
    return f;
  }

  std::string key() const {
    std::string s;
    switch (kind) {
      case S: s = "S" + std::to_string(s_index); break;
      case DetInv: s = "detinv"; break;
      case MuPow:
        s = "mu^" + std::to_string(mu_exponent) + "@" +
            std::to_string(mu_slot);
        break;
    }
    s += "|r=" + std::to_string(arity) + "|p=";
    for (int p : base_profile) s += (p ? 'c' : '1');
    s += "|src=";
    for (const auto& src : slot_sources) {
      s += "(";
      for (std::size_t i = 0; i < src.size(); ++i) {
        if (i) s += ".";
        s += std::to_string(src[i]);
      }
      s += ")";
    }
    if (kind != MuPow) {
      s += "|w=";
      for (std::size_t i = 0; i < word.size(); ++i) {
        if (i) s += ".";
        s += word[i].to_string();
      }
    }
    return s;
  }
};

// evaluation of an invariant function on a tuple of CU elements
template <class F>
F eval_invariant(const InvariantFn& f, const std::vector<CUElement<F>>& xs) {
  if (static_cast<int>(xs.size()) != f.arity)
    throw FieldError("eval_invariant: tuple length != arity");
  const auto& ctx = xs[0].context();
  std::size_t n = xs[0].n();
  auto zero = FieldTraits<F>::from_int(ctx, 0);

  // evaluated slots: products over slot_sources
  std::vector<CUElement<F>> slot;
  slot.reserve(f.slot_sources.size());
  for (const auto& src : f.slot_sources) {
    CUElement<F> acc = xs[src[0]];
    for (std::size_t i = 1; i < src.size(); ++i) acc = acc * xs[src[i]];
    slot.push_back(std::move(acc));
  }
  // zero rule
  for (std::size_t i = 0; i < slot.size(); ++i)
    if (slot[i].coset() != f.base_profile[i]) return zero;

  if (f.kind == InvariantFn::MuPow) {
    const F& b = slot[f.mu_slot].b();
    return (f.mu_exponent > 0) ? b : b.inverse();
  }

  auto phi = phi_matrix<F>(ctx, n);
  auto letter_value = [&](const Letter& L) -> Matrix<F> {
    switch (L.kind) {
      case Letter::G: return slot[L.k].a();
      case Letter::Ginv: return slot[L.k].a().inverse_or_throw();
      case Letter::HHinv:
        return slot[L.k].a() * slot[L.l].a().inverse_or_throw();
      case Letter::HHt:
        return slot[L.k].a() * phi *
               slot[L.l].a().inverse_or_throw().transpose() * phi;
      case Letter::HHtInv:
        return (slot[L.k].a() * phi *
                slot[L.l].a().inverse_or_throw().transpose() * phi)
            .inverse_or_throw();
    }
    throw FieldError("unreachable letter kind");
  };
  Matrix<F> M = Matrix<F>::identity(ctx, n);
  for (const auto& L : f.word) M = M * letter_value(L);
  if (f.kind == InvariantFn::DetInv) return det(M).inverse();
  auto cp = char_poly_coeffs(M);
  return cp.s.at(f.s_index - 1);
}

// ---------------------------------------------------------------------------
// Pseudocharacter tables
// ---------------------------------------------------------------------------

template <class F>
class Pseudochar {
 public:
  explicit Pseudochar(std::shared_ptr<const CURep<F>> rep)
      : rep_(std::move(rep)), model_(rep_->model_ptr()) {}

  Pseudochar(std::shared_ptr<const Pseudochar> base,
             std::function<F(const F&)> map)
      : base_(std::move(base)),
        map_(std::move(map)),
        model_(base_->model_ptr()) {}

  const GaloisModel& model() const { return *model_; }
  std::shared_ptr<const GaloisModel> model_ptr() const { return model_; }
  std::shared_ptr<const CURep<F>> rep() const {
    return rep_ ? rep_ : base_->rep();
  }

  F value(const InvariantFn& f, const std::vector<int>& tuple) const {
    std::string k = make_key(f, tuple);
    {
      std::lock_guard<std::mutex> lock(mtx_);
      auto it = overlay_.find(k);
      if (it != overlay_.end()) return it->second;
      auto m = memo_.find(k);
      if (m != memo_.end()) return m->second;
    }
    F v = compute(f, tuple);
    std::lock_guard<std::mutex> lock(mtx_);
    memo_.emplace(std::move(k), v);
    return v;
  }

  // test hook: override one table entry
  void corrupt(const InvariantFn& f, const std::vector<int>& tuple,
               const F& v) const {
    std::lock_guard<std::mutex> lock(mtx_);
    overlay_[make_key(f, tuple)] = v;
  }
  void clear_corruption() const {
    std::lock_guard<std::mutex> lock(mtx_);
    overlay_.clear();
  }

 private:
  static std::string make_key(const InvariantFn& f,
                              const std::vector<int>& tuple) {
    std::string k = f.key() + "|t=";
    for (std::size_t i = 0; i < tuple.size(); ++i) {
      if (i) k += ",";
      k += std::to_string(tuple[i]);
    }
    return k;
  }
  F compute(const InvariantFn& f, const std::vector<int>& tuple) const {
    if (rep_) {
      std::vector<CUElement<F>> xs;
      xs.reserve(tuple.size());
      for (int g : tuple) xs.push_back(rep_->at(g));
      return eval_invariant(f, xs);
    }
    return map_(base_->value(f, tuple));
  }

  std::shared_ptr<const CURep<F>> rep_;
  std::shared_ptr<const Pseudochar> base_;
  std::function<F(const F&)> map_;
  std::shared_ptr<const GaloisModel> model_;
  mutable std::mutex mtx_;
  mutable std::map<std::string, F> memo_;
  mutable std::map<std::string, F> overlay_;
};

template <class F>
std::shared_ptr<Pseudochar<F>> pseudochar_of_rep(const CURep<F>& R) {
  return std::make_shared<Pseudochar<F>>(std::make_shared<CURep<F>>(R));
}

// h_* Theta for a coefficient ring map h
template <class F>
std::shared_ptr<Pseudochar<F>> pushforward(
    std::shared_ptr<const Pseudochar<F>> theta,
    std::function<F(const F&)> ring_map) {
  return std::make_shared<Pseudochar<F>>(std::move(theta),
                                         std::move(ring_map));
}

// ---------------------------------------------------------------------------
// Generator catalogs and word enumeration
// ---------------------------------------------------------------------------

struct CatalogParams {
  int arity_cap = 3;
  int word_cap = 4;
  std::size_t max_words_per_profile = 300;
};

namespace detail {

inline std::vector<Letter> profile_letters(const std::vector<int>& profile) {
  std::vector<Letter> letters;
  int r = static_cast<int>(profile.size());
  for (int k = 0; k < r; ++k) {
    if (profile[k] == 0) {
      letters.push_back({Letter::G, k, 0});
      letters.push_back({Letter::Ginv, k, 0});
    }
  }
  for (int k = 0; k < r; ++k)
    for (int l = 0; l < r; ++l) {
      if (profile[k] != 1 || profile[l] != 1) continue;
      if (k != l) letters.push_back({Letter::HHinv, k, l});
      letters.push_back({Letter::HHt, k, l});
      letters.push_back({Letter::HHtInv, k, l});
    }
  return letters;
}

inline bool cancels(const Letter& a, const Letter& b) {
  if (a.kind == Letter::G && b.kind == Letter::Ginv && a.k == b.k) return true;
  if (a.kind == Letter::Ginv && b.kind == Letter::G && a.k == b.k) return true;
  if (a.kind == Letter::HHinv && b.kind == Letter::HHinv && a.k == b.l &&
      a.l == b.k)
    return true;
  if (a.kind == Letter::HHt && b.kind == Letter::HHtInv && a.k == b.k &&
      a.l == b.l)
    return true;
  if (a.kind == Letter::HHtInv && b.kind == Letter::HHt && a.k == b.k &&
      a.l == b.l)
    return true;
  return false;
}

// canonical representative under cyclic rotation (s_i is a class function)
inline std::vector<Letter> cyclic_canonical(const std::vector<Letter>& w) {
  std::vector<Letter> best = w;
  std::vector<Letter> cur = w;
  for (std::size_t i = 1; i < w.size(); ++i) {
    std::rotate(cur.begin(), cur.begin() + 1, cur.end());
    if (std::lexicographical_compare(cur.begin(), cur.end(), best.begin(),
                                     best.end()))
      best = cur;
  }
  return best;
}

inline std::vector<std::vector<Letter>> enumerate_words(
    const std::vector<Letter>& letters, int max_len, std::size_t max_words) {
  std::vector<std::vector<Letter>> out;
  std::set<std::vector<Letter>> seen;
  std::vector<std::vector<Letter>> frontier{{}};
  for (int len = 1; len <= max_len && out.size() < max_words; ++len) {
    std::vector<std::vector<Letter>> next;
    for (const auto& w : frontier) {
      for (const auto& L : letters) {
        if (!w.empty() && cancels(w.back(), L)) continue;
        auto w2 = w;
        w2.push_back(L);
        if (w2.size() > 1 && cancels(w2.back(), w2.front())) {
          // cyclically reduced words only
          next.push_back(std::move(w2));
          continue;
        }
        auto canon = cyclic_canonical(w2);
        if (seen.insert(canon).second) {
          out.push_back(canon);
          if (out.size() >= max_words) return out;
        }
        next.push_back(std::move(w2));
      }
    }
    frontier = std::move(next);
  }
  return out;
}

inline std::vector<std::vector<int>> all_profiles(int arity) {
  std::vector<std::vector<int>> out;
  for (int mask = 0; mask < (1 << arity); ++mask) {
    std::vector<int> p(arity);
    for (int i = 0; i < arity; ++i) p[i] = (mask >> i) & 1;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace detail

// the generator-style invariant functions at one arity for one profile
inline std::vector<InvariantFn> generator_catalog(std::size_t n, int arity,
                                                  const std::vector<int>& profile,
                                                  const CatalogParams& params) {
  std::vector<InvariantFn> out;
  for (int k = 0; k < arity; ++k)
    for (int e : {+2, -2})
      out.push_back(InvariantFn::mu_pow(arity, profile, k, e));
  auto letters = detail::profile_letters(profile);
  auto words = detail::enumerate_words(letters, params.word_cap,
                                       params.max_words_per_profile);
  for (const auto& w : words) {
    for (std::size_t i = 1; i <= n; ++i)
      out.push_back(InvariantFn::plain(arity, profile, InvariantFn::S,
                                       static_cast<int>(i), w));
    out.push_back(
        InvariantFn::plain(arity, profile, InvariantFn::DetInv, 1, w));
  }
  return out;
}

// ---------------------------------------------------------------------------
// FFS compatibility checks
// ---------------------------------------------------------------------------

struct FfsCounterexample {
  std::string kind;  // "permutation" or "fold"
  std::string fn_key;
  std::vector<int> tuple;
  std::string lhs, rhs;
};

struct FfsReport {
  bool ok = true;
  std::optional<FfsCounterexample> counterexample;
  std::size_t instances = 0;
};

// Verifies condition (a) for all maps between index sets of size <= cap and
// condition (b) for folds, on generator seeds, against the table interface.
template <class F>
FfsReport check_ffs(const Pseudochar<F>& theta, int arity_cap = 3,
                    std::size_t budget = 2000000) {
  const auto& m = theta.model();
  std::size_t n = theta.rep()->dim();
  FfsReport rep;

  // seeds: arity-1 generators plus arity-2 two-letter c-profile words
  std::vector<InvariantFn> seeds;
  for (std::size_t i = 1; i <= n; ++i) {
    seeds.push_back(InvariantFn::plain(1, {0}, InvariantFn::S,
                                       static_cast<int>(i),
                                       {{Letter::G, 0, 0}}));
  }
  seeds.push_back(
      InvariantFn::plain(1, {0}, InvariantFn::DetInv, 1, {{Letter::G, 0, 0}}));
  seeds.push_back(InvariantFn::mu_pow(1, {0}, 0, +2));
  seeds.push_back(InvariantFn::mu_pow(1, {0}, 0, -2));
  seeds.push_back(InvariantFn::mu_pow(1, {1}, 0, +2));
  seeds.push_back(InvariantFn::mu_pow(1, {1}, 0, -2));
  seeds.push_back(InvariantFn::plain(2, {1, 1}, InvariantFn::S, 1,
                                     {{Letter::HHinv, 0, 1}}));
  seeds.push_back(InvariantFn::plain(2, {1, 1}, InvariantFn::S, 1,
                                     {{Letter::HHt, 0, 1}}));

  auto tuples_of = [&](int r) {
    std::vector<std::vector<int>> ts;
    std::vector<int> t(r, 0);
    while (true) {
      ts.push_back(t);
      int i = r - 1;
      while (i >= 0 && t[i] == m.order() - 1) t[i--] = 0;
      if (i < 0) break;
      ++t[i];
    }
    return ts;
  };

  auto report_fail = [&](const std::string& kind, const InvariantFn& f,
                         const std::vector<int>& tuple, const F& lhs,
                         const F& rhs) {
    rep.ok = false;
    rep.counterexample = FfsCounterexample{
        kind, f.key(), tuple, lhs.to_string(), rhs.to_string()};
  };

  // condition (a): index maps zeta: [m] -> [k]
  for (const auto& f : seeds) {
    int ar = f.arity;
    if (ar > arity_cap) continue;
    for (int k = 1; k <= arity_cap; ++k) {
      std::vector<int> zeta(ar, 0);
      while (true) {
        auto pf = f.pullback(zeta, k);
        for (const auto& t : tuples_of(k)) {
          if (rep.instances >= budget) return rep;
          ++rep.instances;
          std::vector<int> mapped(ar);
          for (int j = 0; j < ar; ++j) mapped[j] = t[zeta[j]];
          F lhs = theta.value(pf, t);
          F rhs = theta.value(f, mapped);
          if (lhs != rhs) {
            report_fail("permutation", pf, t, lhs, rhs);
            return rep;
          }
        }
        int i = ar - 1;
        while (i >= 0 && zeta[i] == k - 1) zeta[i--] = 0;
        if (i < 0) break;
        ++zeta[i];
      }
    }
  }

  // condition (b): folds
  for (const auto& f : seeds) {
    if (f.arity + 1 > arity_cap) continue;
    auto hf = f.fold();
    for (const auto& t : tuples_of(f.arity + 1)) {
      if (rep.instances >= budget) return rep;
      ++rep.instances;
      std::vector<int> folded(t.begin(), t.end() - 1);
      folded.back() = m.mul(t[f.arity - 1], t[f.arity]);
      F lhs = theta.value(hf, t);
      F rhs = theta.value(f, folded);
      if (lhs != rhs) {
        report_fail("fold", hf, t, lhs, rhs);
        return rep;
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Integrality of table values (over Q or Q(zeta_N))
// ---------------------------------------------------------------------------

template <class F>
bool values_integral(const Pseudochar<F>& theta, int arity_cap = 2,
                     const CatalogParams& params = {}) {
  static_assert(std::is_same_v<F, Rational> || std::is_same_v<F, CycloElem>,
                "integrality detection works over Q or Q(zeta_N)");
  const auto& m = theta.model();
  std::size_t n = theta.rep()->dim();
  auto integral = [](const F& v) {
    if constexpr (std::is_same_v<F, Rational>) {
      return v.den() == 1;
    } else {
      for (const auto& c : v.coeffs())
        if (c.den() != 1) return false;
      return true;
    }
  };
  for (int arity = 1; arity <= arity_cap; ++arity) {
    for (const auto& profile : detail::all_profiles(arity)) {
      auto fns = generator_catalog(n, arity, profile, params);
      std::vector<int> t(arity, 0);
      while (true) {
        for (const auto& f : fns)
          if (!integral(theta.value(f, t))) return false;
        int i = arity - 1;
        while (i >= 0 && t[i] == m.order() - 1) t[i--] = 0;
        if (i < 0) break;
        ++t[i];
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// k-th roots (for the conjugator scale freedom)
// ---------------------------------------------------------------------------

namespace detail {

template <class F>
std::optional<F> kth_root(const F& x, std::int64_t k) {
  if (k == 1) return x;
  if constexpr (std::is_same_v<F, PrimeFieldElem>) {
    for (std::int64_t v = 0; v < x.modulus(); ++v) {
      PrimeFieldElem c(x.context(), v);
      if (CUElement<PrimeFieldElem>::power(c, k) == x) return c;
    }
    return std::nullopt;
  } else if constexpr (std::is_same_v<F, Rational>) {
    if (x.is_zero()) return x;
    // k-th root of num and den when both are perfect powers
    auto iroot = [&](const bigint& v) -> std::optional<bigint> {
      if (v < 0) return std::nullopt;
      bigint lo = 0, hi = v + 1;
      while (lo + 1 < hi) {
        bigint mid = (lo + hi) / 2;
        bigint p = 1;
        for (std::int64_t i = 0; i < k && p <= v; ++i) p *= mid;
        if (p <= v)
          lo = mid;
        else
          hi = mid;
      }
      bigint p = 1;
      for (std::int64_t i = 0; i < k; ++i) p *= lo;
      if (p == v) return lo;
      return std::nullopt;
    };
    bool neg = x.num() < 0;
    if (neg && k % 2 == 0) return std::nullopt;
    auto rn = iroot(neg ? -x.num() : x.num());
    auto rd = iroot(x.den());
    if (!rn || !rd) return std::nullopt;
    return Rational(neg ? -*rn : *rn, *rd);
  } else if constexpr (std::is_same_v<F, CycloElem>) {
    // detect r * zeta^j and take roots of both parts
    CycloCtx ctx = x.context();
    std::int64_t N = ctx.N;
    for (std::int64_t j = 0; j < N; ++j) {
      CycloElem y = x * CycloElem::zeta_pow(ctx, -j);
      if (!y.is_rational()) continue;
      auto rr = kth_root<Rational>(y.rational_value(), k);
      if (!rr) continue;
      // zeta^{j/k}: need j + t*N divisible by k for some t
      for (std::int64_t t = 0; t < k; ++t) {
        if ((j + t * N) % k != 0) continue;
        CycloElem cand = CycloElem::from_rational(ctx, *rr) *
                         CycloElem::zeta_pow(ctx, (j + t * N) / k);
        if (CUElement<CycloElem>::power(cand, k) == x) return cand;
      }
    }
    return std::nullopt;
  } else {
    static_assert(std::is_same_v<F, TruncatedLAdic>);
    bigint modulus = x.context().modulus();
    if (modulus <= (1 << 16)) {
      for (bigint v = 0; v < modulus; ++v) {
        TruncatedLAdic c(x.context(), v);
        if (CUElement<TruncatedLAdic>::power(c, k) == x) return c;
      }
    }
    return std::nullopt;
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Twisted simultaneous conjugacy for CU representations
// ---------------------------------------------------------------------------

template <class F>
struct CuConjugacyResult {
  ConjugacyStatus status = ConjugacyStatus::Undetermined;
  std::optional<CUElement<F>> witness;
  std::string detail;
};

// Searches for h = (H, beta) in the identity component with
// h R1(gamma) h^{-1} = R2(gamma) for all gamma.  Linear constraints come
// from identity-coset images and from the two-letter words over c-coset
// images; the residual congruence on one reference c-slot is settled by
// the scalar freedom beta^{n-1}.
template <class F>
CuConjugacyResult<F> cu_simultaneous_conjugator(const CURep<F>& R1,
                                                const CURep<F>& R2,
                                                std::size_t grid_budget = 4096) {
  CuConjugacyResult<F> res;
  const auto& m = R1.model();
  const auto& ctx = R1.context();
  std::size_t n = R1.dim();
  auto fi = [&](std::int64_t v) { return FieldTraits<F>::from_int(ctx, v); };

  // b-coordinates are conjugation invariants
  for (int g = 0; g < m.order(); ++g)
    if (R1.at(g).b() != R2.at(g).b()) {
      res.status = ConjugacyStatus::NonConjugate;
      res.detail = "d-coordinates differ at element " + std::to_string(g);
      return res;
    }

  auto phi = phi_matrix<F>(ctx, n);
  auto twisted = [&](const CUElement<F>& x) { return x.a() * phi; };

  std::vector<Matrix<F>> X, Y;
  std::vector<int> c_elems;
  for (int g = 0; g < m.order(); ++g) {
    if (m.coset(g) == 0) {
      X.push_back(R1.at(g).a());
      Y.push_back(R2.at(g).a());
    } else {
      c_elems.push_back(g);
    }
  }
  for (int g : c_elems)
    for (int h : c_elems) {
      if (g != h) {
        X.push_back(twisted(R1.at(g)) * twisted(R1.at(h)).inverse_or_throw());
        Y.push_back(twisted(R2.at(g)) * twisted(R2.at(h)).inverse_or_throw());
      }
      X.push_back(twisted(R1.at(g)) *
                  twisted(R1.at(h)).inverse_or_throw().transpose());
      Y.push_back(twisted(R2.at(g)) *
                  twisted(R2.at(h)).inverse_or_throw().transpose());
    }

  auto basis = intertwiner_space(Y, X);  // {H : H X_i = Y_i H}
  if (basis.empty()) {
    res.status = ConjugacyStatus::NonConjugate;
    res.detail = "empty twisted intertwiner space";
    return res;
  }
  int c0 = c_elems.front();
  Matrix<F> t1 = twisted(R1.at(c0));
  Matrix<F> t2 = twisted(R2.at(c0));
  auto t2inv = t2.inverse_or_throw();

  auto try_candidate = [&](const Matrix<F>& H) -> bool {
    auto Hinv = H.inverse();
    if (!Hinv) return false;
    Matrix<F> u = H * t1 * H.transpose() * t2inv;
    // u must be scalar sigma I; then beta^{n-1} = sigma^{-1}
    F sigma = u.at(0, 0);
    if (sigma.is_zero()) return false;
    if (u != Matrix<F>::scalar(ctx, n, sigma)) return false;
    std::optional<F> beta;
    if (n == 1) {
      if (sigma != fi(1)) return false;  // no scale freedom at n = 1
      beta = fi(1);
    } else {
      beta = detail::kth_root(sigma.inverse(),
                              static_cast<std::int64_t>(n) - 1);
      if (!beta) return false;
    }
    CUElement<F> h(H, *beta, 0);
    auto hinv = h.inverse();
    for (int g = 0; g < m.order(); ++g)
      if (h * R1.at(g) * hinv != R2.at(g)) return false;
    res.status = ConjugacyStatus::Conjugate;
    res.witness = h;
    res.detail = "twisted conjugator found";
    return true;
  };

  // the identity first, then the deterministic PIT point, then the grid
  if (try_candidate(Matrix<F>::identity(ctx, n))) return res;
  {
    std::size_t d = basis.size();
    std::vector<std::vector<MultiPoly<F>>> sym(
        n, std::vector<MultiPoly<F>>(n, MultiPoly<F>(ctx, d)));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t b = 0; b < d; ++b)
          if (!basis[b].at(i, j).is_zero())
            sym[i][j] = sym[i][j] +
                        MultiPoly<F>::variable(ctx, d, b) * basis[b].at(i, j);
    auto P = detail::symbolic_det(sym, ctx, d);
    if (P.is_zero()) {
      res.status = ConjugacyStatus::NonConjugate;
      res.detail = "determinant of generic twisted intertwiner combination "
                   "is identically zero";
      return res;
    }
    if (auto point = detail::nonvanishing_point(P)) {
      Matrix<F> H(ctx, n, n);
      for (std::size_t b = 0; b < d; ++b) H = H + basis[b] * (*point)[b];
      if (try_candidate(H)) return res;
    }
    // sparse combinations of basis elements
    for (std::size_t i = 0; i < d; ++i)
      if (try_candidate(basis[i])) return res;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) {
        if (try_candidate(basis[i] + basis[j])) return res;
        if (try_candidate(basis[i] - basis[j])) return res;
      }
  }
  // deterministic odometer walk over grid coordinates
  std::size_t d = basis.size();
  std::int64_t radix = 0;
  while (FieldTraits<F>::grid_value(ctx, radix) && radix < 16) ++radix;
  if (radix >= 2) {
    std::vector<std::int64_t> t(d, 0);
    std::size_t count = 0;
    while (count < grid_budget) {
      ++count;
      Matrix<F> H(ctx, n, n);
      bool nonzero = false;
      for (std::size_t b = 0; b < d; ++b) {
        if (t[b] == 0) continue;
        H = H + basis[b] * *FieldTraits<F>::grid_value(ctx, t[b]);
        nonzero = true;
      }
      if (nonzero && try_candidate(H)) return res;
      std::size_t i = 0;
      while (i < d && t[i] == radix - 1) t[i++] = 0;
      if (i == d) break;
      ++t[i];
    }
  }
  res.status = ConjugacyStatus::Undetermined;
  res.detail = "twisted intertwiner space contains invertible elements but "
               "no conjugator was found within the budget";
  return res;
}

// ---------------------------------------------------------------------------
// The reconstruction oracle: distinguish or match
// ---------------------------------------------------------------------------

enum class DistinguishStatus { Match, Distinguished, AgreeUpToArity };

template <class F>
struct DistinguishResult {
  DistinguishStatus status = DistinguishStatus::AgreeUpToArity;
  std::optional<CUElement<F>> conjugator;
  std::string separator_key;
  std::vector<int> separator_tuple;
  std::string value1, value2;
  int reached_arity = 0;
};

template <class F>
DistinguishResult<F> distinguish_or_match(const CURep<F>& R1,
                                          const CURep<F>& R2,
                                          const CatalogParams& params = {},
                                          std::size_t conj_budget = 4096) {
  DistinguishResult<F> res;
  const auto& m = R1.model();
  if (R1.model_ptr() != R2.model_ptr())
    throw FieldError("distinguish_or_match: different groups");
  std::size_t n = R1.dim();
  if (n != R2.dim()) throw FieldError("distinguish_or_match: dimensions");
  {
    // Maschke gate on the underlying Gamma_0 representations
    std::vector<Matrix<F>> im1(m.order(), Matrix<F>(R1.context(), 0, 0));
    for (int g : m.gamma0_elements()) im1[g] = R1.at(g).a();
    Rep<F> rho1(R1.model_ptr(), n, std::move(im1));
    is_semisimple(rho1);
  }

  auto theta1 = pseudochar_of_rep(R1);
  auto theta2 = pseudochar_of_rep(R2);

  auto sweep_arity = [&](int arity) -> bool {
    for (const auto& profile : detail::all_profiles(arity)) {
      auto fns = generator_catalog(n, arity, profile, params);
      std::vector<int> t(arity, 0);
      while (true) {
        bool profile_matches = true;
        for (int i = 0; i < arity; ++i)
          if (m.coset(t[i]) != profile[i]) profile_matches = false;
        if (profile_matches) {
          for (const auto& f : fns) {
            F v1 = theta1->value(f, t);
            F v2 = theta2->value(f, t);
            if (v1 != v2) {
              res.status = DistinguishStatus::Distinguished;
              res.separator_key = f.key();
              res.separator_tuple = t;
              res.value1 = v1.to_string();
              res.value2 = v2.to_string();
              return true;
            }
          }
        }
        int i = arity - 1;
        while (i >= 0 && t[i] == m.order() - 1) t[i--] = 0;
        if (i < 0) break;
        ++t[i];
      }
    }
    return false;
  };

  // arity 1 first: cheap and usually decisive
  res.reached_arity = 1;
  if (sweep_arity(1)) return res;

  // attempt an exact conjugator
  auto conj = cu_simultaneous_conjugator(R1, R2, conj_budget);
  if (conj.status == ConjugacyStatus::Conjugate) {
    res.status = DistinguishStatus::Match;
    res.conjugator = conj.witness;
    return res;
  }

  for (int arity = 2; arity <= params.arity_cap; ++arity) {
    res.reached_arity = arity;
    if (sweep_arity(arity)) return res;
  }
  if (conj.status == ConjugacyStatus::NonConjugate) {
    // values agree up to the caps yet the representations are certified
    // non-conjugate; report the honest outcome
    res.status = DistinguishStatus::AgreeUpToArity;
    return res;
  }
  res.status = DistinguishStatus::AgreeUpToArity;
  return res;
}

// ---------------------------------------------------------------------------
// Truncated l-adic limit demo
// ---------------------------------------------------------------------------

struct LadicEntryFailure {
  int m_low = 0, m_high = 0;
  std::string fn_key;
  std::vector<int> tuple;
};

struct LadicReport {
  bool compatible = true;
  bool reassembly_exact = true;
  std::optional<LadicEntryFailure> failure;
  std::size_t entries = 0;
};

// Builds the family Theta_m by pushforward to each precision, verifies
// pairwise compatibility mod l^{min}, reassembles the top-precision table
// digit by digit and compares with the direct table.
inline LadicReport ladic_limit_demo(
    const CURep<TruncatedLAdic>& R, const std::vector<int>& precisions,
    int arity_cap = 2, const CatalogParams& params = {},
    const std::function<void(std::vector<std::shared_ptr<Pseudochar<TruncatedLAdic>>>&)>&
        tamper = nullptr) {
  LadicReport rep;
  const auto& m = R.model();
  std::size_t n = R.dim();
  auto theta = pseudochar_of_rep(R);
  int M = R.at(m.identity()).b().precision();

  std::vector<std::shared_ptr<Pseudochar<TruncatedLAdic>>> family;
  for (int mm : precisions) {
    if (mm > M) throw FieldError("ladic demo: precision exceeds the rep's");
    family.push_back(pushforward<TruncatedLAdic>(
        theta, [mm](const TruncatedLAdic& x) { return ring_reduce(x, mm); }));
  }
  if (tamper) tamper(family);

  auto for_each_entry = [&](auto&& fn) {
    for (int arity = 1; arity <= arity_cap; ++arity) {
      for (const auto& profile : detail::all_profiles(arity)) {
        auto fns = generator_catalog(n, arity, profile, params);
        std::vector<int> t(arity, 0);
        while (true) {
          for (const auto& f : fns)
            if (!fn(f, t)) return false;
          int i = arity - 1;
          while (i >= 0 && t[i] == m.order() - 1) t[i--] = 0;
          if (i < 0) break;
          ++t[i];
        }
      }
    }
    return true;
  };

  // pairwise compatibility
  for_each_entry([&](const InvariantFn& f, const std::vector<int>& t) {
    ++rep.entries;
    for (std::size_t i = 0; i < family.size(); ++i)
      for (std::size_t j = i + 1; j < family.size(); ++j) {
        auto vi = family[i]->value(f, t);
        auto vj = family[j]->value(f, t);
        if (ring_reduce(vj, precisions[i]) != vi) {
          rep.compatible = false;
          rep.failure =
              LadicEntryFailure{precisions[i], precisions[j], f.key(), t};
          return false;
        }
      }
    return true;
  });
  if (!rep.compatible) return rep;

  // digit-by-digit reassembly at the top precision of the family
  int top = precisions.back();
  ZlCtx top_ctx{R.at(m.identity()).b().ell(), top};
  for_each_entry([&](const InvariantFn& f, const std::vector<int>& t) {
    bigint w = family.front()->value(f, t).value();
    for (std::size_t i = 1; i < family.size(); ++i) {
      TruncatedLAdic vi = family[i]->value(f, t);
      ZlCtx ci{vi.ell(), precisions[i]};
      // lift: w += (v_i - w) mod l^{m_i}
      TruncatedLAdic diff = vi - TruncatedLAdic(ci, w);
      w += diff.value();
    }
    auto direct = ring_reduce(theta->value(f, t), top);
    if (TruncatedLAdic(top_ctx, w) != direct) {
      rep.reassembly_exact = false;
      rep.failure = LadicEntryFailure{top, top, f.key(), t};
      return false;
    }
    return true;
  });
  return rep;
}

}  // namespace cgu
