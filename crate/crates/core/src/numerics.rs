//! Log-domain primitives and exact dyadic arithmetic.
//!
//! Everything probability-like in this crate lives in the log domain:
//! at inverse temperatures up to `beta = 50` cylinder masses reach
//! `exp(-15 * beta)` and below, far outside linear `f64` range. The
//! helpers here are the single place where `exp`/`ln` cancellation is
//! handled.
//!
//! The [`exact`] submodule provides exact sums of `f64` values (every
//! finite `f64` is a dyadic rational) so that cycle-mean computations can
//! be compared across independent routes without rounding ambiguity.

/// `log(exp(a) + exp(b))` without overflow.
#[inline]
pub fn lse2(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a > b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// `log(sum exp(x_i))` over a slice, two-pass, fixed left-to-right order.
pub fn lse_slice(xs: &[f64]) -> f64 {
    let mut m = f64::NEG_INFINITY;
    for &x in xs {
        if x > m {
            m = x;
        }
    }
    if m == f64::NEG_INFINITY || !m.is_finite() {
        return m;
    }
    let mut s = 0.0;
    for &x in xs {
        s += (x - m).exp();
    }
    m + s.ln()
}

/// Streaming log-sum-exp accumulator with a deterministic update rule.
///
/// Results depend on insertion order (as any floating-point reduction
/// does); callers that need reproducibility feed terms in a fixed order.
#[derive(Clone, Copy, Debug)]
pub struct LogAcc {
    max: f64,
    sum: f64,
}

impl LogAcc {
    pub fn new() -> Self {
        LogAcc {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if self.max == f64::NEG_INFINITY {
            self.max = x;
            self.sum = 1.0;
        } else if x <= self.max {
            self.sum += (x - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - x).exp() + 1.0;
            self.max = x;
        }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

impl Default for LogAcc {
    fn default() -> Self {
        Self::new()
    }
}

/// `log(exp(p) - 1)` for `p > 0`, stable down to subnormal `p`.
#[inline]
pub fn ln_expm1(p: f64) -> f64 {
    debug_assert!(p > 0.0);
    if p > 0.693 {
        p + ln_one_minus_exp_neg(p)
    } else {
        p.exp_m1().ln()
    }
}

/// `log(1 - exp(-p))` for `p > 0`. Uses `exp_m1` so there is no
/// cancellation even when `p` is around `1e-300`.
#[inline]
pub fn ln_one_minus_exp_neg(p: f64) -> f64 {
    debug_assert!(p > 0.0);
    (-((-p).exp_m1())).ln()
}

/// `log(1 + exp(x))`.
#[inline]
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

pub mod exact {
    //! Exact arithmetic on dyadic rationals (`mantissa * 2^exp`).
    //!
    //! Finite `f64` values are dyadic, so finite sums of edge weights can
    //! be represented without error as long as the mantissa fits in
    //! `i128`. For the weight ranges used in this crate (sums of at most
    //! a few thousand doubles of comparable scale) that headroom is
    //! ample; the operations use checked arithmetic and panic loudly on
    //! overflow rather than silently rounding.

    /// A dyadic rational `mant * 2^exp`, normalized so `mant` is odd or zero.
    #[derive(Clone, Copy, Debug, PartialEq, Eq)]
    pub struct Dyadic {
        mant: i128,
        exp: i32,
    }

    impl Dyadic {
        pub const ZERO: Dyadic = Dyadic { mant: 0, exp: 0 };

        pub fn from_f64(x: f64) -> Dyadic {
            assert!(x.is_finite(), "dyadic conversion of non-finite value");
            if x == 0.0 {
                return Dyadic::ZERO;
            }
            let bits = x.to_bits();
            let sign = if bits >> 63 == 1 { -1i128 } else { 1 };
            let biased = ((bits >> 52) & 0x7ff) as i32;
            let frac = (bits & 0x000f_ffff_ffff_ffff) as i128;
            let (mant, exp) = if biased == 0 {
                (frac, -1074)
            } else {
                (frac | (1 << 52), biased - 1075)
            };
            Dyadic {
                mant: sign * mant,
                exp,
            }
            .normalized()
        }

        fn normalized(mut self) -> Dyadic {
            if self.mant == 0 {
                return Dyadic::ZERO;
            }
            let tz = self.mant.trailing_zeros() as i32;
            if tz > 0 {
                self.mant >>= tz;
                self.exp += tz;
            }
            self
        }

        pub fn is_zero(&self) -> bool {
            self.mant == 0
        }

        pub fn add(&self, other: &Dyadic) -> Dyadic {
            if self.mant == 0 {
                return *other;
            }
            if other.mant == 0 {
                return *self;
            }
            let (lo, hi) = if self.exp <= other.exp {
                (self, other)
            } else {
                (other, self)
            };
            let shift = (hi.exp - lo.exp) as u32;
            assert!(shift < 127, "dyadic alignment overflow (shift {shift})");
            let shifted = hi
                .mant
                .checked_shl(shift)
                .filter(|m| m >> shift == hi.mant)
                .expect("dyadic mantissa overflow in add");
            Dyadic {
                mant: lo
                    .mant
                    .checked_add(shifted)
                    .expect("dyadic mantissa overflow in add"),
                exp: lo.exp,
            }
            .normalized()
        }

        pub fn cmp_value(&self, other: &Dyadic) -> std::cmp::Ordering {
            self.add(&other.neg()).sign_cmp()
        }

        fn sign_cmp(&self) -> std::cmp::Ordering {
            self.mant.cmp(&0)
        }

        pub fn neg(&self) -> Dyadic {
            Dyadic {
                mant: -self.mant,
                exp: self.exp,
            }
        }
    }

    /// An exact rational `sum / len`, used for cycle means.
    #[derive(Clone, Copy, Debug)]
    pub struct ExactMean {
        pub sum: Dyadic,
        pub len: u32,
    }

    impl ExactMean {
        pub fn cmp_value(&self, other: &ExactMean) -> std::cmp::Ordering {
            // sum1/len1 <=> sum2/len2  via cross multiplication (lens positive).
            let a = Dyadic {
                mant: self
                    .sum
                    .mant
                    .checked_mul(other.len as i128)
                    .expect("mean comparison overflow"),
                exp: self.sum.exp,
            };
            let b = Dyadic {
                mant: other
                    .sum
                    .mant
                    .checked_mul(self.len as i128)
                    .expect("mean comparison overflow"),
                exp: other.sum.exp,
            };
            a.cmp_value(&b)
        }

        /// Round the exact value `sum / len` to the nearest `f64`
        /// (ties to even, sticky-bit aware).
        pub fn to_f64(&self) -> f64 {
            let d = &self.sum;
            if d.mant == 0 {
                return 0.0;
            }
            let neg = d.mant < 0;
            let a = d.mant.unsigned_abs();
            let len = self.len as u128;
            let abits = 128 - a.leading_zeros();
            let lbits = 128 - len.leading_zeros();
            // Scale so that the quotient keeps at least 57 significant bits.
            let t = if abits < 57 + lbits {
                (57 + lbits - abits).min(127 - abits)
            } else {
                0
            };
            let scaled = a << t;
            let q = scaled / len;
            let r = scaled % len;
            let mut sticky = r != 0;
            let qbits = 128 - q.leading_zeros();
            let (kept, extra_exp) = if qbits <= 53 {
                (q, 0i32)
            } else {
                let drop = qbits - 54;
                if drop > 0 {
                    sticky |= (q & ((1u128 << drop) - 1)) != 0;
                }
                let with_guard = q >> drop;
                let guard = with_guard & 1 == 1;
                let mut k = with_guard >> 1;
                if guard && (sticky || k & 1 == 1) {
                    k += 1;
                }
                sticky = false;
                (k, (drop + 1) as i32)
            };
            let mut v = kept as f64;
            if sticky {
                // No bits were dropped; fold the remainder back in and let
                // the addition perform the final rounding.
                v += (r as f64) / (len as f64);
            }
            let e = d.exp - t as i32 + extra_exp;
            let scale = 2f64.powi(e);
            let out = v * scale;
            if neg {
                -out
            } else {
                out
            }
        }
    }

    /// Exact sum of a sequence of `f64` values.
    pub fn sum_f64(values: impl IntoIterator<Item = f64>) -> Dyadic {
        let mut acc = Dyadic::ZERO;
        for v in values {
            acc = acc.add(&Dyadic::from_f64(v));
        }
        acc
    }
}
