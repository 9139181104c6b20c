#include "equipart/gf2_ring.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <sstream>

#include "equipart/errors.hpp"

namespace equipart {

namespace {

// Dense rings larger than this are refused outright (~32 MiB of bits).
constexpr std::size_t kMaxRingSize = std::size_t{1} << 28;

std::size_t word_count(std::size_t bits) { return (bits + 63) / 64; }

void require_same_shape(const RingShape& a, const RingShape& b) {
  if (!(a == b)) {
    throw Error(ErrorKind::kShape, "ring shape mismatch: (k=" +
                                       std::to_string(a.k()) + ",d=" +
                                       std::to_string(a.d()) + ") vs (k=" +
                                       std::to_string(b.k()) + ",d=" +
                                       std::to_string(b.d()) + ")");
  }
}

// acc ^= src << shift, for bit arrays of equal length.
void xor_shifted(std::vector<std::uint64_t>& acc,
                 const std::vector<std::uint64_t>& src, std::size_t shift) {
  const std::size_t n = acc.size();
  const std::size_t ws = shift / 64;
  const unsigned bs = shift % 64;
  if (ws >= n) return;
  for (std::size_t w = n; w-- > ws;) {
    const std::size_t from = w - ws;
    std::uint64_t v = src[from] << bs;
    if (bs != 0 && from > 0) v |= src[from - 1] >> (64 - bs);
    acc[w] ^= v;
  }
}

}  // namespace

RingShape::RingShape(int k, int d) : k_(k), d_(d), size_(1) {
  if (k < 1 || k > SignVector::kMaxK) {
    throw Error(ErrorKind::kRange, "ring needs 1 <= k <= 32, got k=" +
                                       std::to_string(k));
  }
  if (d < 0) {
    throw Error(ErrorKind::kRange, "ring needs d >= 0, got d=" +
                                       std::to_string(d));
  }
  strides_.reserve(k);
  for (int i = 0; i < k; ++i) {
    strides_.push_back(size_);
    if (size_ > kMaxRingSize / static_cast<std::size_t>(d + 1)) {
      throw Error(ErrorKind::kRange,
                  "ring (d+1)^k too large for dense storage: k=" +
                      std::to_string(k) + ", d=" + std::to_string(d));
    }
    size_ *= static_cast<std::size_t>(d + 1);
  }
}

std::size_t RingShape::index_of(std::span<const int> exponents) const {
  if (static_cast<int>(exponents.size()) != k_) {
    throw Error(ErrorKind::kRange, "exponent tuple has length " +
                                       std::to_string(exponents.size()) +
                                       ", ring has k=" + std::to_string(k_));
  }
  std::size_t index = 0;
  for (int i = 0; i < k_; ++i) {
    const int e = exponents[i];
    if (e < 0 || e > d_) {
      throw Error(ErrorKind::kRange, "exponent " + std::to_string(e) +
                                         " outside 0.." + std::to_string(d_));
    }
    index += strides_[i] * static_cast<std::size_t>(e);
  }
  return index;
}

Exponents RingShape::exponents_of(std::size_t index) const {
  Exponents e(k_);
  const auto radix = static_cast<std::size_t>(d_ + 1);
  for (int i = 0; i < k_; ++i) {
    e[i] = static_cast<int>(index % radix);
    index /= radix;
  }
  return e;
}

SignVector::SignVector(int k, std::uint32_t mask) : k_(k), mask_(mask) {
  if (k < 1 || k > kMaxK) {
    throw Error(ErrorKind::kRange,
                "sign vector length must be 1..32, got " + std::to_string(k));
  }
  if (mask == 0) {
    throw Error(ErrorKind::kDomain, "sign vector must be nonzero");
  }
  if (k < kMaxK && (mask >> k) != 0) {
    throw Error(ErrorKind::kRange, "sign vector has bits beyond length " +
                                       std::to_string(k));
  }
}

SignVector SignVector::from_bits(std::span<const int> bits) {
  std::uint32_t mask = 0;
  for (std::size_t j = 0; j < bits.size(); ++j) {
    if (bits[j] != 0 && bits[j] != 1) {
      throw Error(ErrorKind::kDomain, "sign vector entries must be 0 or 1");
    }
    if (bits[j] == 1) mask |= std::uint32_t{1} << j;
  }
  return SignVector(static_cast<int>(bits.size()), mask);
}

SignVector SignVector::basis(int k, int var) {
  if (var < 0 || var >= k) {
    throw Error(ErrorKind::kRange, "basis index out of range");
  }
  return SignVector(k, std::uint32_t{1} << var);
}

SignVector SignVector::pair(int k, int r, int s) {
  if (r < 0 || s >= k || r >= s) {
    throw Error(ErrorKind::kRange, "pair must satisfy 0 <= r < s < k");
  }
  return SignVector(k, (std::uint32_t{1} << r) | (std::uint32_t{1} << s));
}

int SignVector::weight() const { return std::popcount(mask_); }

std::vector<int> SignVector::bits() const {
  std::vector<int> out(k_);
  for (int j = 0; j < k_; ++j) out[j] = bit(j) ? 1 : 0;
  return out;
}

// Multiplies by linear forms with masked word shifts.  The mask for u_i keeps
// only coefficients with e_i < d, so the shifted copy never leaves the ring.
class LinearMultiplier {
 public:
  explicit LinearMultiplier(const RingShape& shape)
      : shape_(shape), masks_(shape.k()) {}

  TruncatedPolynomial apply(const TruncatedPolynomial& p,
                            const SignVector& form) {
    if (form.k() != shape_.k()) {
      throw Error(ErrorKind::kShape,
                  "linear form length " + std::to_string(form.k()) +
                      " does not match k=" + std::to_string(shape_.k()));
    }
    TruncatedPolynomial out(shape_);
    std::vector<std::uint64_t> masked(p.words_.size());
    for (int i = 0; i < shape_.k(); ++i) {
      if (!form.bit(i)) continue;
      const auto& m = mask(i);
      for (std::size_t w = 0; w < masked.size(); ++w) {
        masked[w] = p.words_[w] & m[w];
      }
      xor_shifted(out.words_, masked, shape_.stride(i));
    }
    return out;
  }

 private:
  const std::vector<std::uint64_t>& mask(int var) {
    auto& m = masks_[var];
    if (m.empty()) {
      m.assign(word_count(shape_.size()), 0);
      const std::size_t stride = shape_.stride(var);
      const auto radix = static_cast<std::size_t>(shape_.d() + 1);
      for (std::size_t idx = 0; idx < shape_.size(); ++idx) {
        if ((idx / stride) % radix < static_cast<std::size_t>(shape_.d())) {
          m[idx / 64] |= std::uint64_t{1} << (idx % 64);
        }
      }
    }
    return m;
  }

  RingShape shape_;
  std::vector<std::vector<std::uint64_t>> masks_;
};

TruncatedPolynomial::TruncatedPolynomial(const RingShape& shape)
    : shape_(shape), words_(word_count(shape.size()), 0) {}

TruncatedPolynomial TruncatedPolynomial::zero(const RingShape& shape) {
  return TruncatedPolynomial(shape);
}

TruncatedPolynomial TruncatedPolynomial::one(const RingShape& shape) {
  TruncatedPolynomial p(shape);
  p.toggle(0);
  return p;
}

TruncatedPolynomial TruncatedPolynomial::monomial(
    const RingShape& shape, std::span<const int> exponents) {
  TruncatedPolynomial p(shape);
  p.toggle(shape.index_of(exponents));
  return p;
}

TruncatedPolynomial TruncatedPolynomial::linear(const RingShape& shape,
                                                const SignVector& form) {
  return mul_linear(one(shape), form);
}

void TruncatedPolynomial::toggle(std::size_t index) {
  words_[index / 64] ^= std::uint64_t{1} << (index % 64);
}

bool TruncatedPolynomial::test(std::size_t index) const {
  return (words_[index / 64] >> (index % 64)) & 1u;
}

bool TruncatedPolynomial::coefficient(std::span<const int> exponents) const {
  return test(shape_.index_of(exponents));
}

bool TruncatedPolynomial::is_zero() const {
  return std::all_of(words_.begin(), words_.end(),
                     [](std::uint64_t w) { return w == 0; });
}

bool TruncatedPolynomial::is_top() const {
  const std::size_t top = shape_.size() - 1;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    const std::uint64_t expected =
        (w == top / 64) ? (std::uint64_t{1} << (top % 64)) : 0;
    if (words_[w] != expected) return false;
  }
  return true;
}

std::size_t TruncatedPolynomial::term_count() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::vector<Exponents> TruncatedPolynomial::support() const {
  std::vector<Exponents> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t bits = words_[w];
    while (bits != 0) {
      const int b = std::countr_zero(bits);
      out.push_back(shape_.exponents_of(w * 64 + static_cast<std::size_t>(b)));
      bits &= bits - 1;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

TruncatedPolynomial& TruncatedPolynomial::operator+=(
    const TruncatedPolynomial& other) {
  require_same_shape(shape_, other.shape_);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
  return *this;
}

TruncatedPolynomial operator*(const TruncatedPolynomial& lhs,
                              const TruncatedPolynomial& rhs) {
  require_same_shape(lhs.shape_, rhs.shape_);
  const RingShape& shape = lhs.shape_;
  TruncatedPolynomial out(shape);
  const auto left = lhs.support();
  const auto right = rhs.support();
  Exponents sum(shape.k());
  for (const auto& a : left) {
    for (const auto& b : right) {
      bool inside = true;
      for (int i = 0; i < shape.k() && inside; ++i) {
        sum[i] = a[i] + b[i];
        inside = sum[i] <= shape.d();
      }
      if (inside) out.toggle(shape.index_of(sum));
    }
  }
  return out;
}

std::string TruncatedPolynomial::to_string() const {
  const auto terms = support();
  if (terms.empty()) return "0";
  std::ostringstream os;
  bool first_term = true;
  for (const auto& e : terms) {
    if (!first_term) os << " + ";
    first_term = false;
    bool any = false;
    for (int i = 0; i < shape_.k(); ++i) {
      if (e[i] == 0) continue;
      if (any) os << '*';
      os << 'u' << (i + 1);
      if (e[i] > 1) os << '^' << e[i];
      any = true;
    }
    if (!any) os << '1';
  }
  return os.str();
}

nlohmann::json TruncatedPolynomial::to_json() const {
  nlohmann::json support_json = nlohmann::json::array();
  for (const auto& e : support()) support_json.push_back(e);
  return {{"k", shape_.k()}, {"d", shape_.d()}, {"support", support_json}};
}

TruncatedPolynomial TruncatedPolynomial::from_json(const nlohmann::json& doc) {
  try {
    const RingShape shape(doc.at("k").get<int>(), doc.at("d").get<int>());
    TruncatedPolynomial p(shape);
    for (const auto& term : doc.at("support")) {
      const auto e = term.get<std::vector<int>>();
      p.toggle(shape.index_of(e));
    }
    return p;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::kConfig,
                std::string("malformed polynomial JSON: ") + ex.what());
  }
}

std::string TruncatedPolynomial::digest() const {
  const std::string text = to_json().dump();
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_Digest(text.data(), text.size(), md.data(), &len, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[md[i] >> 4]);
    hex.push_back(kHex[md[i] & 0xF]);
  }
  return hex;
}

TruncatedPolynomial add(const TruncatedPolynomial& p,
                        const TruncatedPolynomial& q) {
  return p + q;
}

TruncatedPolynomial mul(const TruncatedPolynomial& p,
                        const TruncatedPolynomial& q) {
  return p * q;
}

TruncatedPolynomial mul_linear(const TruncatedPolynomial& p,
                               const SignVector& form) {
  return LinearMultiplier(p.shape()).apply(p, form);
}

TruncatedPolynomial product_of_forms(const RingShape& shape,
                                     std::span<const SignVector> forms) {
  for (const auto& form : forms) {
    if (form.k() != shape.k()) {
      throw Error(ErrorKind::kShape, "linear form length " +
                                         std::to_string(form.k()) +
                                         " does not match k=" +
                                         std::to_string(shape.k()));
    }
  }
  LinearMultiplier multiplier(shape);
  auto h = TruncatedPolynomial::one(shape);
  for (const auto& form : forms) {
    h = multiplier.apply(h, form);
    if (h.is_zero()) break;
  }
  return h;
}

}  // namespace equipart
