use crate::error::{Error, Result};

/// 2^61 - 1, the default modulus.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

/// A prime field `F_p`. Elements are plain `u64` residues in `[0, p)`; the
/// field value carries the modulus and performs the arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Field {
    p: u64,
}

impl Default for Field {
    fn default() -> Self {
        Self { p: MERSENNE_61 }
    }
}

impl Field {
    /// Builds `F_p`. The modulus must be an odd prime below 2^63 so that the
    /// sum of two residues never overflows.
    pub fn new(p: u64) -> Result<Self> {
        if p <= 2 || p >= 1 << 63 || !is_prime(p) {
            return Err(Error::BadModulus(p));
        }
        Ok(Self { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn reduce(&self, v: u64) -> u64 {
        v % self.p
    }

    /// Maps a signed integer to its residue.
    pub fn from_i128(&self, v: i128) -> u64 {
        v.rem_euclid(self.p as i128) as u64
    }

    /// Symmetric representative in `(-p/2, p/2]`, used when printing.
    pub fn to_signed(&self, v: u64) -> i128 {
        if v > self.p / 2 {
            v as i128 - self.p as i128
        } else {
            v as i128
        }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.p - (b - a)
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let wide = a as u128 * b as u128;
        if self.p == MERSENNE_61 {
            // x = hi * 2^61 + lo  =>  x ≡ hi + lo
            let lo = (wide as u64) & MERSENNE_61;
            let hi = (wide >> 61) as u64;
            let s = lo + hi;
            if s >= MERSENNE_61 {
                s - MERSENNE_61
            } else {
                s
            }
        } else {
            (wide % self.p as u128) as u64
        }
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        if a % self.p == 0 {
            None
        } else {
            Some(self.pow(a, self.p - 2))
        }
    }

    pub fn ensure_same(&self, other: &Field) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(Error::FieldMismatch {
                expected: self.p,
                got: other.p,
            })
        }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the first twelve prime bases are exact for
/// every 64-bit input.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `>= n` (and at least 2).
pub fn next_prime(n: u64) -> u64 {
    let mut c = n.max(2);
    while !is_prime(c) {
        c += 1;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_moduli() {
        assert!(Field::new(2).is_err());
        assert!(Field::new(9).is_err());
        assert!(Field::new(1 << 63).is_err());
        assert!(Field::new(5).is_ok());
        assert!(Field::new(MERSENNE_61).is_ok());
    }

    #[test]
    fn primality_small_range_matches_trial_division() {
        let trial = |n: u64| n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
        for n in 0..2000 {
            assert_eq!(is_prime(n), trial(n), "n = {n}");
        }
        assert_eq!(next_prime(8), 11);
        assert_eq!(next_prime(7), 7);
    }

    #[test]
    fn mersenne_fast_path_matches_generic_reduction() {
        let f = Field::default();
        let samples = [
            0,
            1,
            2,
            MERSENNE_61 - 1,
            MERSENNE_61 - 2,
            1 << 60,
            123456789012345,
        ];
        for &a in &samples {
            for &b in &samples {
                assert_eq!(f.mul(a, b), mul_mod(a, b, MERSENNE_61));
            }
        }
    }

    #[test]
    fn inverse_and_signed_view() {
        let f = Field::new(101).unwrap();
        for a in 1..101 {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
        assert_eq!(f.inv(0), None);
        assert_eq!(f.to_signed(100), -1);
        assert_eq!(f.from_i128(-1), 100);
    }
}
