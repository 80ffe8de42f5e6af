#pragma once

// Desk-scale stand-in for Gal(Fbar/F+) > Gal(Fbar/F): a finite group with
// an index-2 subgroup Gamma_0 and a chosen lift c_tilde of conjugation,
// together with matrix representations of Gamma_0 and character tables.
// Groups are given by explicit multiplication tables, capped at order 64
// and validated exhaustively on load.

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "matrix.hpp"

namespace cgu {

struct GroupError : std::runtime_error {
  explicit GroupError(const std::string& m) : std::runtime_error(m) {}
};

class GaloisModel {
 public:
  static constexpr int kMaxOrder = 64;

  GaloisModel(int order, std::vector<std::vector<int>> mult,
              std::vector<bool> in_gamma0, int c_tilde)
      : order_(order),
        mult_(std::move(mult)),
        in_gamma0_(std::move(in_gamma0)),
        c_tilde_(c_tilde) {
    validate();
  }

  int order() const { return order_; }
  int identity() const { return identity_; }
  int c_tilde() const { return c_tilde_; }
  bool in_gamma0(int g) const { return in_gamma0_[g]; }
  int coset(int g) const { return in_gamma0_[g] ? 0 : 1; }

  int mul(int a, int b) const { return mult_[a][b]; }
  int inv(int a) const { return inv_[a]; }
  int conj(int h, int g) const { return mul(mul(h, g), inv(h)); }
  // c_tilde * g * c_tilde^{-1}
  int c_conj(int g) const { return conj(c_tilde_, g); }

  const std::vector<int>& gamma0_elements() const { return gamma0_; }
  std::vector<int> all_elements() const {
    std::vector<int> v(order_);
    for (int i = 0; i < order_; ++i) v[i] = i;
    return v;
  }

  int element_order(int g) const {
    int k = 1, x = g;
    while (x != identity_) {
      x = mul(x, g);
      ++k;
    }
    return k;
  }

  // --- bundled fixtures ---

  // dihedral group of order 8, Gamma_0 the rotation subgroup Z/4;
  // indices 0..3 are sigma^a, 4..7 are sigma^a * tau, c_tilde = tau
  static std::shared_ptr<const GaloisModel> dihedral8() {
    auto enc = [](int a, int b) { return (b ? 4 : 0) + a; };
    std::vector<std::vector<int>> mult(8, std::vector<int>(8));
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 2; ++b)
        for (int a2 = 0; a2 < 4; ++a2)
          for (int b2 = 0; b2 < 2; ++b2) {
            // (sigma^a tau^b)(sigma^a2 tau^b2) =
            //   sigma^{a + (-1)^b a2} tau^{b+b2}
            int ar = ((a + (b ? -a2 : a2)) % 4 + 4) % 4;
            mult[enc(a, b)][enc(a2, b2)] = enc(ar, (b + b2) % 2);
          }
    std::vector<bool> g0(8, false);
    for (int a = 0; a < 4; ++a) g0[a] = true;
    return std::make_shared<GaloisModel>(8, std::move(mult), std::move(g0),
                                         4);
  }

  // Q8 x Z/2 with Gamma_0 = Q8 and central c_tilde;
  // Q8 indices: 0:1 1:-1 2:i 3:-i 4:j 5:-j 6:k 7:-k, pair (q, s) -> q + 8s
  static std::shared_ptr<const GaloisModel> quaternion_x_z2() {
    auto qmul = [](int x, int y) {
      // encode units as (sign, axis) with axis 0:1, 1:i, 2:j, 3:k
      int sx = x & 1, ax = x >> 1, sy = y & 1, ay = y >> 1;
      static const int axis[4][4] = {
          {0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
      static const int sgn[4][4] = {{+1, +1, +1, +1},
                                    {+1, -1, +1, -1},
                                    {+1, -1, -1, +1},
                                    {+1, +1, -1, -1}};
      // sgn[a][b]: sign of e_a * e_b relative to e_{axis[a][b]}
      int s = ((sx + sy) % 2 == 0) ? +1 : -1;
      s *= sgn[ax][ay];
      int a = axis[ax][ay];
      return (a << 1) | (s > 0 ? 0 : 1);
    };
    auto enc = [](int q, int s) { return q + 8 * s; };
    std::vector<std::vector<int>> mult(16, std::vector<int>(16));
    for (int q = 0; q < 8; ++q)
      for (int s = 0; s < 2; ++s)
        for (int q2 = 0; q2 < 8; ++q2)
          for (int s2 = 0; s2 < 2; ++s2)
            mult[enc(q, s)][enc(q2, s2)] = enc(qmul(q, q2), (s + s2) % 2);
    std::vector<bool> g0(16, false);
    for (int q = 0; q < 8; ++q) g0[q] = true;
    return std::make_shared<GaloisModel>(16, std::move(mult), std::move(g0),
                                         8);
  }

  // (Z/4)^2 x Z/2 with Gamma_0 = (Z/4)^2 and central c_tilde;
  // ((u,v), s) -> u + 4v + 16s
  static std::shared_ptr<const GaloisModel> z4sq_x_z2() {
    auto enc = [](int u, int v, int s) { return u + 4 * v + 16 * s; };
    std::vector<std::vector<int>> mult(32, std::vector<int>(32));
    for (int u = 0; u < 4; ++u)
      for (int v = 0; v < 4; ++v)
        for (int s = 0; s < 2; ++s)
          for (int u2 = 0; u2 < 4; ++u2)
            for (int v2 = 0; v2 < 4; ++v2)
              for (int s2 = 0; s2 < 2; ++s2)
                mult[enc(u, v, s)][enc(u2, v2, s2)] =
                    enc((u + u2) % 4, (v + v2) % 4, (s + s2) % 2);
    std::vector<bool> g0(32, false);
    for (int u = 0; u < 4; ++u)
      for (int v = 0; v < 4; ++v) g0[enc(u, v, 0)] = true;
    return std::make_shared<GaloisModel>(32, std::move(mult), std::move(g0),
                                         16);
  }

  // --- JSON interface ---
  // { "order": k, "mult": [[...]], "gamma0": [...], "c_tilde": i }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["order"] = order_;
    j["mult"] = mult_;
    std::vector<int> g0;
    for (int i = 0; i < order_; ++i)
      if (in_gamma0_[i]) g0.push_back(i);
    j["gamma0"] = g0;
    j["c_tilde"] = c_tilde_;
    return j;
  }

  static std::shared_ptr<const GaloisModel> from_json(
      const nlohmann::json& j) {
    int order = j.at("order").get<int>();
    auto mult = j.at("mult").get<std::vector<std::vector<int>>>();
    std::vector<bool> g0(order, false);
    for (int i : j.at("gamma0").get<std::vector<int>>()) {
      if (i < 0 || i >= order) throw GroupError("gamma0 index out of range");
      g0[i] = true;
    }
    return std::make_shared<GaloisModel>(order, std::move(mult),
                                         std::move(g0),
                                         j.at("c_tilde").get<int>());
  }

 private:
  void validate() {
    if (order_ < 2 || order_ > kMaxOrder)
      throw GroupError("group order must lie in [2, 64]");
    if (static_cast<int>(mult_.size()) != order_)
      throw GroupError("multiplication table has wrong height");
    for (const auto& row : mult_) {
      if (static_cast<int>(row.size()) != order_)
        throw GroupError("multiplication table has wrong width");
      for (int v : row)
        if (v < 0 || v >= order_)
          throw GroupError("multiplication table entry out of range");
    }
    if (static_cast<int>(in_gamma0_.size()) != order_)
      throw GroupError("gamma0 indicator has wrong length");

    // identity
    identity_ = -1;
    for (int e = 0; e < order_; ++e) {
      bool ok = true;
      for (int g = 0; g < order_ && ok; ++g)
        ok = (mult_[e][g] == g && mult_[g][e] == g);
      if (ok) {
        identity_ = e;
        break;
      }
    }
    if (identity_ < 0) throw GroupError("no identity element");

    // inverses
    inv_.assign(order_, -1);
    for (int g = 0; g < order_; ++g) {
      for (int h = 0; h < order_; ++h)
        if (mult_[g][h] == identity_ && mult_[h][g] == identity_) {
          inv_[g] = h;
          break;
        }
      if (inv_[g] < 0) throw GroupError("element without inverse");
    }

    // associativity, exhaustive
    for (int a = 0; a < order_; ++a)
      for (int b = 0; b < order_; ++b)
        for (int c = 0; c < order_; ++c)
          if (mult_[mult_[a][b]][c] != mult_[a][mult_[b][c]])
            throw GroupError("multiplication table is not associative");

    // Gamma_0 subgroup of index exactly 2
    gamma0_.clear();
    for (int g = 0; g < order_; ++g)
      if (in_gamma0_[g]) gamma0_.push_back(g);
    if (static_cast<int>(gamma0_.size()) * 2 != order_)
      throw GroupError("gamma0 does not have index 2");
    if (!in_gamma0_[identity_]) throw GroupError("gamma0 misses the identity");
    for (int a : gamma0_) {
      if (!in_gamma0_[inv_[a]])
        throw GroupError("gamma0 not closed under inverse");
      for (int b : gamma0_)
        if (!in_gamma0_[mult_[a][b]])
          throw GroupError("gamma0 not closed under multiplication");
    }
    if (c_tilde_ < 0 || c_tilde_ >= order_)
      throw GroupError("c_tilde out of range");
    if (in_gamma0_[c_tilde_]) throw GroupError("c_tilde lies in gamma0");
    // coset map is a homomorphism onto {1, c}
    for (int a = 0; a < order_; ++a)
      for (int b = 0; b < order_; ++b) {
        int expect = (coset(a) + coset(b)) % 2;
        if (coset(mult_[a][b]) != expect)
          throw GroupError("coset map is not a homomorphism");
      }
  }

  int order_;
  std::vector<std::vector<int>> mult_;
  std::vector<bool> in_gamma0_;
  int c_tilde_;
  int identity_ = -1;
  std::vector<int> inv_;
  std::vector<int> gamma0_;
};

// ---------------------------------------------------------------------------
// Representations of Gamma_0
// ---------------------------------------------------------------------------

template <class F>
class Rep {
 public:
  Rep(std::shared_ptr<const GaloisModel> model, std::size_t n,
      std::vector<Matrix<F>> images_by_index)
      : model_(std::move(model)), n_(n), images_(std::move(images_by_index)) {
    validate();
  }

  const GaloisModel& model() const { return *model_; }
  std::shared_ptr<const GaloisModel> model_ptr() const { return model_; }
  std::size_t dim() const { return n_; }
  const FieldCtx<F>& context() const { return images_[model_->identity()].context(); }

  const Matrix<F>& at(int g) const {
    if (!model_->in_gamma0(g))
      throw GroupError("representation evaluated outside gamma0");
    return images_[g];
  }

  bool operator==(const Rep& o) const {
    if (model_ != o.model_ || n_ != o.n_) return false;
    for (int g : model_->gamma0_elements())
      if (images_[g] != o.images_[g]) return false;
    return true;
  }

  Rep conjugated(const Matrix<F>& s) const {
    auto sinv = s.inverse_or_throw();
    std::vector<Matrix<F>> im = images_;
    for (int g : model_->gamma0_elements()) im[g] = s * images_[g] * sinv;
    return Rep(model_, n_, std::move(im));
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    for (int g : model_->gamma0_elements()) {
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      const auto& m = images_[g];
      for (std::size_t r = 0; r < m.rows(); ++r) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (std::size_t c = 0; c < m.cols(); ++c)
          row.push_back(m.at(r, c).to_string());
        rows.push_back(row);
      }
      j[std::to_string(g)] = rows;
    }
    return j;
  }

  static Rep from_json(std::shared_ptr<const GaloisModel> model,
                       const FieldCtx<F>& ctx, const nlohmann::json& j) {
    std::size_t n = 0;
    std::vector<Matrix<F>> images(model->order(), Matrix<F>(ctx, 0, 0));
    std::vector<bool> seen(model->order(), false);
    for (auto it = j.begin(); it != j.end(); ++it) {
      int g = std::stoi(it.key());
      const auto& rows = it.value();
      std::size_t r = rows.size(), c = rows.empty() ? 0 : rows[0].size();
      Matrix<F> m(ctx, r, c);
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t k = 0; k < c; ++k)
          m.at(i, k) =
              FieldTraits<F>::parse(ctx, rows[i][k].template get<std::string>());
      n = r;
      images[g] = std::move(m);
      seen[g] = true;
    }
    for (int g : model->gamma0_elements())
      if (!seen[g]) throw GroupError("rep file misses a gamma0 element");
    return Rep(model, n, std::move(images));
  }

 private:
  void validate() const {
    if (static_cast<int>(images_.size()) != model_->order())
      throw GroupError("rep image table has wrong length");
    for (int g : model_->gamma0_elements()) {
      const auto& m = images_[g];
      if (!m.is_square() || m.rows() != n_)
        throw GroupError("rep image has wrong dimension");
    }
    const auto& ctx = images_[model_->identity()].context();
    if (images_[model_->identity()] != Matrix<F>::identity(ctx, n_))
      throw GroupError("rep does not send the identity to I");
    for (int a : model_->gamma0_elements())
      for (int b : model_->gamma0_elements())
        if (images_[model_->mul(a, b)] != images_[a] * images_[b])
          throw GroupError("rep is not multiplicative");
  }

  std::shared_ptr<const GaloisModel> model_;
  std::size_t n_;
  std::vector<Matrix<F>> images_;
};

// rho^c: gamma -> rho(c_tilde gamma c_tilde^{-1})
template <class F>
Rep<F> conjugate_rep(const Rep<F>& rho) {
  const auto& m = rho.model();
  std::vector<Matrix<F>> im(m.order(), Matrix<F>(rho.context(), 0, 0));
  for (int g : m.gamma0_elements()) im[g] = rho.at(m.c_conj(g));
  return Rep<F>(rho.model_ptr(), rho.dim(), std::move(im));
}

// rho^dual: gamma -> rho(gamma)^{-t}
template <class F>
Rep<F> dual_rep(const Rep<F>& rho) {
  const auto& m = rho.model();
  std::vector<Matrix<F>> im(m.order(), Matrix<F>(rho.context(), 0, 0));
  for (int g : m.gamma0_elements())
    im[g] = rho.at(m.inv(g)).transpose();
  return Rep<F>(rho.model_ptr(), rho.dim(), std::move(im));
}

template <class F>
Rep<F> direct_sum(const Rep<F>& a, const Rep<F>& b) {
  if (a.model_ptr() != b.model_ptr())
    throw GroupError("direct sum across different groups");
  const auto& m = a.model();
  const auto& ctx = a.context();
  std::size_t n = a.dim() + b.dim();
  std::vector<Matrix<F>> im(m.order(), Matrix<F>(ctx, 0, 0));
  for (int g : m.gamma0_elements()) {
    Matrix<F> s(ctx, n, n);
    for (std::size_t i = 0; i < a.dim(); ++i)
      for (std::size_t j = 0; j < a.dim(); ++j)
        s.at(i, j) = a.at(g).at(i, j);
    for (std::size_t i = 0; i < b.dim(); ++i)
      for (std::size_t j = 0; j < b.dim(); ++j)
        s.at(a.dim() + i, a.dim() + j) = b.at(g).at(i, j);
    im[g] = std::move(s);
  }
  return Rep<F>(a.model_ptr(), n, std::move(im));
}

struct MaschkeError : std::runtime_error {
  explicit MaschkeError(const std::string& m) : std::runtime_error(m) {}
};

// Maschke gate: true when the coefficient characteristic is 0 or coprime
// to |Gamma_0|; outside that regime the reconstruction oracle refuses input
template <class F>
bool is_semisimple(const Rep<F>& rho) {
  std::int64_t p = FieldTraits<F>::residue_characteristic(rho.context());
  int half = rho.model().order() / 2;
  if (p != 0 && half % p == 0)
    throw MaschkeError(
        "coefficient characteristic divides the group order; outside the "
        "supported regime");
  return true;
}

// ---------------------------------------------------------------------------
// Character tables on the whole of Gamma
// ---------------------------------------------------------------------------

template <class F>
class CharacterTable {
 public:
  CharacterTable(std::shared_ptr<const GaloisModel> model,
                 std::vector<F> values)
      : model_(std::move(model)), values_(std::move(values)) {
    validate();
  }

  const GaloisModel& model() const { return *model_; }
  std::shared_ptr<const GaloisModel> model_ptr() const { return model_; }
  const F& at(int g) const { return values_[g]; }

  bool operator==(const CharacterTable& o) const {
    return model_ == o.model_ && values_ == o.values_;
  }

  CharacterTable pow(std::int64_t k) const {
    std::vector<F> v;
    v.reserve(values_.size());
    for (const auto& x : values_) {
      F acc = x;  // placeholder, replaced below
      acc = pow_scalar(x, k);
      v.push_back(acc);
    }
    return CharacterTable(model_, std::move(v));
  }

  // chi^c(gamma) = chi(c~ gamma c~^{-1}); equal to chi iff c-invariant
  bool is_c_invariant() const {
    for (int g = 0; g < model_->order(); ++g)
      if (values_[model_->c_conj(g)] != values_[g]) return false;
    return true;
  }

  static CharacterTable trivial(std::shared_ptr<const GaloisModel> model,
                                const FieldCtx<F>& ctx) {
    std::vector<F> v(model->order(), FieldTraits<F>::from_int(ctx, 1));
    return CharacterTable(std::move(model), std::move(v));
  }

  // the epsilon surrogate: 1 on Gamma_0, -1 on the other coset; mirrors the
  // sign convention of the cyclotomic character at conjugation
  static CharacterTable eps_surrogate(std::shared_ptr<const GaloisModel> model,
                                      const FieldCtx<F>& ctx) {
    std::vector<F> v(model->order(), FieldTraits<F>::from_int(ctx, 1));
    for (int g = 0; g < model->order(); ++g)
      if (!model->in_gamma0(g)) v[g] = FieldTraits<F>::from_int(ctx, -1);
    return CharacterTable(std::move(model), std::move(v));
  }

 private:
  static F pow_scalar(const F& x, std::int64_t k) {
    F base = x;
    bool invert = k < 0;
    std::uint64_t e = invert ? -k : k;
    if (invert) base = base.inverse();
    F acc = base;
    if (e == 0) return x * x.inverse();  // one in the right context
    --e;
    while (e) {
      acc = acc * base;
      --e;
    }
    return acc;
  }
  void validate() const {
    if (static_cast<int>(values_.size()) != model_->order())
      throw GroupError("character table has wrong length");
    for (const auto& v : values_)
      if (v.is_zero()) throw GroupError("character value is zero");
    for (int a = 0; a < model_->order(); ++a)
      for (int b = 0; b < model_->order(); ++b)
        if (values_[model_->mul(a, b)] != values_[a] * values_[b])
          throw GroupError("character table is not multiplicative");
  }

  std::shared_ptr<const GaloisModel> model_;
  std::vector<F> values_;
};

// ---------------------------------------------------------------------------
// Fixture representations
// ---------------------------------------------------------------------------

namespace fixtures {

// requires nothing of the field: integer rotation matrices
template <class F>
Rep<F> d4_rotation_rep(std::shared_ptr<const GaloisModel> d4,
                       const FieldCtx<F>& ctx) {
  auto fi = [&](std::int64_t v) { return FieldTraits<F>::from_int(ctx, v); };
  Matrix<F> rot(ctx, 2, 2);
  rot.at(0, 1) = fi(-1);
  rot.at(1, 0) = fi(1);
  std::vector<Matrix<F>> im(d4->order(), Matrix<F>(ctx, 0, 0));
  for (int a = 0; a < 4; ++a) im[a] = rot.pow(a);
  return Rep<F>(std::move(d4), 2, std::move(im));
}

// the 2-dimensional irreducible of Q8; needs sqrt(-1) in the field
template <class F>
Rep<F> q8_rep(std::shared_ptr<const GaloisModel> q8z2,
              const FieldCtx<F>& ctx) {
  auto fi = [&](std::int64_t v) { return FieldTraits<F>::from_int(ctx, v); };
  auto sq = field_sqrt(fi(-1));
  if (!sq.present())
    throw FieldError("q8 fixture representation needs sqrt(-1) in the field");
  F x = *sq.root;
  Matrix<F> mi(ctx, 2, 2), mj(ctx, 2, 2);
  mi.at(0, 0) = x;
  mi.at(1, 1) = -x;
  mj.at(0, 1) = fi(1);
  mj.at(1, 0) = fi(-1);
  auto mk = mi * mj;
  auto id = Matrix<F>::identity(ctx, 2);
  std::vector<Matrix<F>> im(q8z2->order(), Matrix<F>(ctx, 0, 0));
  // indices as in GaloisModel::quaternion_x_z2: (axis << 1) | signbit
  im[0] = id;
  im[1] = -id;
  im[2] = mi;
  im[3] = -mi;
  im[4] = mj;
  im[5] = -mj;
  im[6] = mk;
  im[7] = -mk;
  return Rep<F>(std::move(q8z2), 2, std::move(im));
}

// character of (Z/4)^2 given by (u,v) -> i^(alpha u + beta v), on Gamma_0
template <class F>
Rep<F> z4sq_character_rep(std::shared_ptr<const GaloisModel> z4,
                          const FieldCtx<F>& ctx, int alpha, int beta) {
  auto fi = [&](std::int64_t v) { return FieldTraits<F>::from_int(ctx, v); };
  auto sq = field_sqrt(fi(-1));
  if (!sq.present())
    throw FieldError("z4sq character needs sqrt(-1) in the field");
  F i = *sq.root;
  auto ipow = [&](int e) {
    e = ((e % 4) + 4) % 4;
    F acc = fi(1);
    for (int k = 0; k < e; ++k) acc = acc * i;
    return acc;
  };
  std::vector<Matrix<F>> im(z4->order(), Matrix<F>(ctx, 0, 0));
  for (int u = 0; u < 4; ++u)
    for (int v = 0; v < 4; ++v) {
      Matrix<F> m(ctx, 1, 1);
      m.at(0, 0) = ipow(alpha * u + beta * v);
      im[u + 4 * v] = std::move(m);
    }
  return Rep<F>(std::move(z4), 1, std::move(im));
}

}  // namespace fixtures

}  // namespace cgu
