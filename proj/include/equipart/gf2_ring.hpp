#pragma once

// Truncated multivariate polynomials over GF(2):
//   Z2[u_1..u_k] / (u_1^{d+1}, ..., u_k^{d+1})
// stored as a dense bit array of (d+1)^k coefficients.  The exponent tuple
// (e_1..e_k) lives at index e_1 + (d+1) e_2 + (d+1)^2 e_3 + ...

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace equipart {

using Exponents = std::vector<int>;

class RingShape {
 public:
  RingShape(int k, int d);

  int k() const { return k_; }
  int d() const { return d_; }
  std::size_t size() const { return size_; }
  std::size_t stride(int var) const { return strides_[var]; }

  std::size_t index_of(std::span<const int> exponents) const;
  Exponents exponents_of(std::size_t index) const;

  bool operator==(const RingShape& other) const {
    return k_ == other.k_ && d_ == other.d_;
  }

 private:
  int k_;
  int d_;
  std::size_t size_;
  std::vector<std::size_t> strides_;
};

// A nonzero element of Z2^k.  Bit j (0-based) is the coefficient of u_{j+1}
// when read as the linear form a_1 u_1 + ... + a_k u_k.
class SignVector {
 public:
  static constexpr int kMaxK = 32;

  SignVector(int k, std::uint32_t mask);
  static SignVector from_bits(std::span<const int> bits);
  static SignVector basis(int k, int var);            // e_{var+1}
  static SignVector pair(int k, int r, int s);        // e_{r+1} + e_{s+1}

  int k() const { return k_; }
  std::uint32_t mask() const { return mask_; }
  bool bit(int var) const { return (mask_ >> var) & 1u; }
  int weight() const;
  std::vector<int> bits() const;

  auto operator<=>(const SignVector&) const = default;

 private:
  int k_;
  std::uint32_t mask_;
};

class TruncatedPolynomial {
 public:
  static TruncatedPolynomial zero(const RingShape& shape);
  static TruncatedPolynomial one(const RingShape& shape);
  static TruncatedPolynomial monomial(const RingShape& shape,
                                      std::span<const int> exponents);
  // The linear form itself as a ring element (requires d >= 1 to be nonzero).
  static TruncatedPolynomial linear(const RingShape& shape,
                                    const SignVector& form);

  const RingShape& shape() const { return shape_; }

  bool coefficient(std::span<const int> exponents) const;
  bool is_zero() const;
  // True iff the polynomial is exactly u_1^d ... u_k^d.
  bool is_top() const;
  std::size_t term_count() const;

  // Support sorted lexicographically by exponent tuple.
  std::vector<Exponents> support() const;

  TruncatedPolynomial& operator+=(const TruncatedPolynomial& other);
  friend TruncatedPolynomial operator+(TruncatedPolynomial lhs,
                                       const TruncatedPolynomial& rhs) {
    lhs += rhs;
    return lhs;
  }
  friend TruncatedPolynomial operator*(const TruncatedPolynomial& lhs,
                                       const TruncatedPolynomial& rhs);

  bool operator==(const TruncatedPolynomial& other) const {
    return shape_ == other.shape_ && words_ == other.words_;
  }

  // Canonical text form, e.g. "u1^2*u2 + u1*u2^2"; "0" for the zero element.
  std::string to_string() const;
  // {"k":..,"d":..,"support":[[e1..ek],...]} with sorted support.
  nlohmann::json to_json() const;
  static TruncatedPolynomial from_json(const nlohmann::json& doc);
  // Hex SHA-256 of the compact canonical serialization.
  std::string digest() const;

 private:
  friend class LinearMultiplier;
  explicit TruncatedPolynomial(const RingShape& shape);

  void toggle(std::size_t index);
  bool test(std::size_t index) const;

  RingShape shape_;
  std::vector<std::uint64_t> words_;
};

TruncatedPolynomial add(const TruncatedPolynomial& p,
                        const TruncatedPolynomial& q);
TruncatedPolynomial mul(const TruncatedPolynomial& p,
                        const TruncatedPolynomial& q);
// p * (a_1 u_1 + ... + a_k u_k), truncating as it goes.
TruncatedPolynomial mul_linear(const TruncatedPolynomial& p,
                               const SignVector& form);
// Product of the given linear forms, starting from 1.
TruncatedPolynomial product_of_forms(const RingShape& shape,
                                     std::span<const SignVector> forms);

}  // namespace equipart
