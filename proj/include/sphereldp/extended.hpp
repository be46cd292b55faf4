#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace sphereldp {

// Real number or +infinity. Arithmetic never touches a float infinity.
class Extended {
 public:
  Extended() = default;
  Extended(double v) : v_(v) {
    if (!std::isfinite(v)) throw std::invalid_argument("Extended: non-finite value");
  }

  static Extended infinity() {
    Extended e;
    e.inf_ = true;
    return e;
  }

  bool finite() const { return !inf_; }
  bool is_infinite() const { return inf_; }

  double value() const {
    if (inf_) throw std::domain_error("Extended: value() on +inf");
    return v_;
  }

  // Lossy view for output and plotting only.
  double to_double() const { return inf_ ? std::numeric_limits<double>::infinity() : v_; }

  friend Extended operator+(Extended a, Extended b) {
    if (a.inf_ || b.inf_) return infinity();
    return Extended(a.v_ + b.v_);
  }
  friend bool operator==(Extended a, Extended b) {
    return a.inf_ == b.inf_ && (a.inf_ || a.v_ == b.v_);
  }
  friend bool operator<(Extended a, Extended b) {
    if (a.inf_) return false;
    if (b.inf_) return true;
    return a.v_ < b.v_;
  }
  friend bool operator<=(Extended a, Extended b) { return !(b < a); }
  friend bool operator>(Extended a, Extended b) { return b < a; }
  friend bool operator>=(Extended a, Extended b) { return !(a < b); }

  friend std::ostream& operator<<(std::ostream& os, Extended e) {
    if (e.inf_) return os << "inf";
    return os << e.v_;
  }

 private:
  double v_ = 0.0;
  bool inf_ = false;
};

inline Extended min(Extended a, Extended b) { return b < a ? b : a; }
inline Extended max(Extended a, Extended b) { return a < b ? b : a; }

}  // namespace sphereldp
