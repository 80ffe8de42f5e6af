#pragma once

// The constructive bijection between polarised representations and
// CU-valued representations, with sign bookkeeping and the conjugation
// normalization of the image of c~.

#include "cgroup.hpp"
#include "polarisation.hpp"

namespace cgu {

struct LiftError : std::runtime_error {
  explicit LiftError(const std::string& m) : std::runtime_error(m) {}
};

template <class F>
class CURep {
 public:
  CURep(std::shared_ptr<const GaloisModel> model,
        std::vector<CUElement<F>> images)
      : model_(std::move(model)), images_(std::move(images)) {
    validate();
  }

  const GaloisModel& model() const { return *model_; }
  std::shared_ptr<const GaloisModel> model_ptr() const { return model_; }
  std::size_t dim() const { return images_[model_->identity()].n(); }
  const FieldCtx<F>& context() const {
    return images_[model_->identity()].context();
  }
  const CUElement<F>& at(int g) const { return images_[g]; }

  bool operator==(const CURep& o) const {
    return model_ == o.model_ && images_ == o.images_;
  }
  bool operator!=(const CURep& o) const { return !(*this == o); }

  CURep conjugated(const CUElement<F>& h) const {
    if (h.coset() != 0)
      throw LiftError("CURep conjugation needs an identity-component element");
    std::vector<CUElement<F>> im;
    im.reserve(images_.size());
    auto hinv = h.inverse();
    for (const auto& x : images_) im.push_back(h * x * hinv);
    return CURep(model_, std::move(im));
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    for (int g = 0; g < model_->order(); ++g) {
      const auto& x = images_[g];
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (std::size_t r = 0; r < x.a().rows(); ++r) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (std::size_t c = 0; c < x.a().cols(); ++c)
          row.push_back(x.a().at(r, c).to_string());
        rows.push_back(row);
      }
      nlohmann::ordered_json e;
      e["a"] = rows;
      e["b"] = x.b().to_string();
      e["coset"] = x.coset();
      j[std::to_string(g)] = e;
    }
    return j;
  }

  static CURep from_json(std::shared_ptr<const GaloisModel> model,
                         const FieldCtx<F>& ctx, const nlohmann::json& j) {
    std::vector<CUElement<F>> im;
    im.reserve(model->order());
    for (int g = 0; g < model->order(); ++g) {
      const auto& e = j.at(std::to_string(g));
      const auto& rows = e.at("a");
      std::size_t n = rows.size();
      Matrix<F> a(ctx, n, n);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
          a.at(r, c) =
              FieldTraits<F>::parse(ctx, rows[r][c].template get<std::string>());
      F b = FieldTraits<F>::parse(ctx, e.at("b").template get<std::string>());
      im.emplace_back(std::move(a), std::move(b), e.at("coset").get<int>());
    }
    return CURep(std::move(model), std::move(im));
  }

 private:
  void validate() const {
    if (static_cast<int>(images_.size()) != model_->order())
      throw LiftError("CURep image table has wrong length");
    for (int g = 0; g < model_->order(); ++g)
      if (images_[g].coset() != model_->coset(g))
        throw LiftError("CURep image lies in the wrong coset at element " +
                        std::to_string(g));
    for (int a = 0; a < model_->order(); ++a)
      for (int b = 0; b < model_->order(); ++b)
        if (images_[model_->mul(a, b)] != images_[a] * images_[b])
          throw LiftError(
              "CURep is not a homomorphism (inconsistent input polarisation "
              "character?) at pair (" +
              std::to_string(a) + ", " + std::to_string(b) + ")");
  }

  std::shared_ptr<const GaloisModel> model_;
  std::vector<CUElement<F>> images_;
};

// d composed with the representation, as a character table
template <class F>
CharacterTable<F> d_of_rep(const CURep<F>& R) {
  std::vector<F> v;
  v.reserve(R.model().order());
  for (int g = 0; g < R.model().order(); ++g) v.push_back(d_map(R.at(g)));
  return CharacterTable<F>(R.model_ptr(), std::move(v));
}

// The lift R of a polarised representation P against chi_lift:
//   R(delta) = (rho(delta) chi(delta)^{(n-1)/2}, chi(delta)^{1/2}) delta
//   R(c~)    = (A chi(c~)^{(n-1)/2} Phi_n^{-1}, chi(c~)^{1/2}) c
// built from raw coordinates with the canonical square-root branch; the
// result is branch-independent because a branch flip is exactly the
// central quotient relation.  polarisation_exponent selects the asserted
// relation P.chi = chi_lift^{exponent} on Gamma_0 (default 1-n; the other
// reading n-1 is exposed for comparison and fails homomorphism validation
// whenever the two differ).
template <class F>
CURep<F> lift(const PolarisedRep<F>& P, const CharacterTable<F>& chi_lift,
              std::int64_t polarisation_exponent_offset = 0) {
  const auto& m = P.rho.model();
  const auto& ctx = P.rho.context();
  std::size_t n = P.rho.dim();
  std::int64_t e = (polarisation_exponent_offset == 0)
                       ? (1 - static_cast<std::int64_t>(n))
                       : (static_cast<std::int64_t>(n) - 1);

  // asserted compatibility between the polarisation character and chi_lift
  for (int g : m.gamma0_elements())
    if (P.chi.at(g) != CUElement<F>::power(chi_lift.at(g), e))
      throw LiftError(
          "P.chi does not match chi_lift^" + std::to_string(e) +
          " on gamma0");
  if (P.sign() != -chi_lift.at(m.c_tilde()))
    throw LiftError("sign(P) != -chi_lift(c~)");

  // pointwise canonical square roots of chi_lift
  std::vector<F> sqrt_chi;
  sqrt_chi.reserve(m.order());
  for (int g = 0; g < m.order(); ++g) {
    auto sq = field_sqrt(chi_lift.at(g));
    if (!sq.present()) throw SqrtNeeded(sq.conductor_hint);
    sqrt_chi.push_back(*sq.root);
  }

  auto phi_inv = phi_matrix<F>(ctx, n).inverse_or_throw();
  std::vector<std::optional<CUElement<F>>> images(m.order());
  for (int g : m.gamma0_elements()) {
    F s = sqrt_chi[g];
    Matrix<F> raw =
        P.rho.at(g) *
        CUElement<F>::power(s, static_cast<std::int64_t>(n) - 1);
    images[g] = CUElement<F>::from_raw(raw, s, 0);
  }
  {
    int c = m.c_tilde();
    F s = sqrt_chi[c];
    Matrix<F> raw =
        P.A * CUElement<F>::power(s, static_cast<std::int64_t>(n) - 1) *
        phi_inv;
    images[c] = CUElement<F>::from_raw(raw, s, 1);
  }
  for (int g = 0; g < m.order(); ++g) {
    if (images[g]) continue;
    int delta = m.mul(m.inv(m.c_tilde()), g);  // g = c~ * delta
    images[g] = *images[m.c_tilde()] * *images[delta];
  }
  std::vector<CUElement<F>> im;
  im.reserve(m.order());
  for (auto& x : images) im.push_back(std::move(*x));
  CURep<F> R(P.rho.model_ptr(), std::move(im));
  // d compose R equals chi_lift by construction; verified here
  if (!(d_of_rep(R) == chi_lift))
    throw LiftError("internal: d o R != chi_lift");
  return R;
}

template <class F>
struct Descended {
  PolarisedRep<F> P;
  CharacterTable<F> chi_lift;
  F sign;
};

// rho from the first theta-coordinate, chi_lift = d o R, A = a(c~) Phi_n,
// sign = -b(c~)
template <class F>
Descended<F> descend(const CURep<F>& R) {
  const auto& m = R.model();
  const auto& ctx = R.context();
  std::size_t n = R.dim();
  std::vector<Matrix<F>> im(m.order(), Matrix<F>(ctx, 0, 0));
  for (int g : m.gamma0_elements()) im[g] = R.at(g).a();
  Rep<F> rho(R.model_ptr(), n, std::move(im));
  auto chi_lift = d_of_rep(R);
  Matrix<F> A = R.at(m.c_tilde()).a() * phi_matrix<F>(ctx, n);
  F sign = -R.at(m.c_tilde()).b();

  std::int64_t e = 1 - static_cast<std::int64_t>(n);
  std::vector<F> pol(m.order(), FieldTraits<F>::from_int(ctx, 1));
  for (int g = 0; g < m.order(); ++g) {
    if (m.in_gamma0(g)) {
      pol[g] = CUElement<F>::power(chi_lift.at(g), e);
    } else {
      int delta = m.mul(m.inv(m.c_tilde()), g);
      pol[g] = chi_lift.at(m.c_tilde()) *
               CUElement<F>::power(chi_lift.at(delta), e);
    }
  }
  PolarisedRep<F> P{std::move(rho),
                    CharacterTable<F>(R.model_ptr(), std::move(pol)),
                    std::move(A)};
  auto check = validate_polarised(P);
  if (!check.ok)
    throw LiftError("descended data is not polarised: " + check.detail);
  return {std::move(P), std::move(chi_lift), std::move(sign)};
}

// Conjugates a sign +1 representation by (h, 1) with h A h^t = I followed
// by a central scalar so that the image of c~ becomes the canonical
// (Phi_n^{-1}, i) c in raw coordinates, i the canonical branch of sqrt(-1).
template <class F>
CURep<F> normalize_c_image(const CURep<F>& R) {
  const auto& m = R.model();
  const auto& ctx = R.context();
  std::size_t n = R.dim();
  auto fi = [&](std::int64_t v) { return FieldTraits<F>::from_int(ctx, v); };
  F sign = -R.at(m.c_tilde()).b();
  if (sign != fi(1))
    throw LiftError("normalize_c_image needs sign +1 (got sign -1)");
  Matrix<F> A = R.at(m.c_tilde()).a() * phi_matrix<F>(ctx, n);
  if (A != A.transpose())
    throw LiftError("normalize_c_image: pairing matrix is not symmetric");
  Matrix<F> h = symmetric_congruence(A);  // h A h^t = I
  CUElement<F> H(h, fi(1), 0);
  CURep<F> R1 = R.conjugated(H);
  // now R1(c~) = (Phi^{-1}, -1) in theta-coordinates; adjust by a central
  // scalar u with u^2 = i^{1-n} to reach raw (Phi^{-1}, i)
  auto isq = field_sqrt(fi(-1));
  if (!isq.present()) throw SqrtNeeded(isq.conductor_hint);
  F i0 = *isq.root;
  F target_scale = CUElement<F>::power(i0, 1 - static_cast<std::int64_t>(n));
  auto usq = field_sqrt(target_scale);
  if (!usq.present()) throw SqrtNeeded(usq.conductor_hint);
  CUElement<F> U(Matrix<F>::scalar(ctx, n, *usq.root), fi(1), 0);
  CURep<F> R2 = R1.conjugated(U);
  auto target = CUElement<F>::from_raw(
      phi_matrix<F>(ctx, n).inverse_or_throw(), i0, 1);
  if (R2.at(m.c_tilde()) != target)
    throw LiftError("internal: normalization did not reach the canonical "
                    "c-image");
  return R2;
}

}  // namespace cgu
