//! Exact 2×2 spinor algebra over dyadic rationals.
//!
//! The fermion Hamiltonian is assembled from the nilpotent pair `â`, `b̂`
//! which satisfy `â² = b̂² = 0` and `âb̂ + b̂â = ê`. Entries are kept as
//! `num / 2^exp` so these identities can be checked with `==`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A dyadic rational `num / 2^exp`, always stored in lowest terms.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: i64,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };
    pub const HALF: Dyadic = Dyadic { num: 1, exp: 1 };

    pub fn new(num: i64, exp: u32) -> Self {
        let mut d = Dyadic { num, exp };
        d.reduce();
        d
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic { num: v, exp: 0 }
    }

    fn reduce(&mut self) {
        if self.num == 0 {
            self.exp = 0;
            return;
        }
        while self.exp > 0 && self.num % 2 == 0 {
            self.num /= 2;
            self.exp -= 1;
        }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / (1u64 << self.exp) as f64
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, 1u64 << self.exp)
        }
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let exp = self.exp.max(rhs.exp);
        let a = self.num << (exp - self.exp);
        let b = rhs.num << (exp - rhs.exp);
        Dyadic::new(a + b, exp)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -self.num, exp: self.exp }
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        self + (-rhs)
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        Dyadic::new(self.num * rhs.num, self.exp + rhs.exp)
    }
}

/// A 2×2 matrix with exact dyadic entries, row-major.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SpinMatrix(pub [[Dyadic; 2]; 2]);

impl SpinMatrix {
    pub const ZERO: SpinMatrix = SpinMatrix([[Dyadic::ZERO; 2]; 2]);
    pub const IDENTITY: SpinMatrix =
        SpinMatrix([[Dyadic::ONE, Dyadic::ZERO], [Dyadic::ZERO, Dyadic::ONE]]);

    /// `scale · [[a, b], [c, d]]` with integer entries.
    pub fn scaled(scale: Dyadic, m: [[i64; 2]; 2]) -> Self {
        let e = |v: i64| scale * Dyadic::from_int(v);
        SpinMatrix([[e(m[0][0]), e(m[0][1])], [e(m[1][0]), e(m[1][1])]])
    }

    pub fn entry(&self, r: usize, c: usize) -> Dyadic {
        self.0[r][c]
    }

    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        let m = &self.0;
        [[m[0][0].to_f64(), m[0][1].to_f64()], [m[1][0].to_f64(), m[1][1].to_f64()]]
    }

    /// Anticommutator `{self, other} = self·other + other·self`.
    pub fn anticommutator(self, other: SpinMatrix) -> SpinMatrix {
        self * other + other * self
    }
}

impl Add for SpinMatrix {
    type Output = SpinMatrix;
    fn add(self, rhs: SpinMatrix) -> SpinMatrix {
        let mut out = SpinMatrix::ZERO;
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] = self.0[r][c] + rhs.0[r][c];
            }
        }
        out
    }
}

impl Sub for SpinMatrix {
    type Output = SpinMatrix;
    fn sub(self, rhs: SpinMatrix) -> SpinMatrix {
        let mut out = SpinMatrix::ZERO;
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] = self.0[r][c] - rhs.0[r][c];
            }
        }
        out
    }
}

impl Mul for SpinMatrix {
    type Output = SpinMatrix;
    fn mul(self, rhs: SpinMatrix) -> SpinMatrix {
        let mut out = SpinMatrix::ZERO;
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] = self.0[r][0] * rhs.0[0][c] + self.0[r][1] * rhs.0[1][c];
            }
        }
        out
    }
}

/// The spinor basis `â`, `b̂`, `ê` and the two projectors `âb̂`, `b̂â`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpinorBasis {
    pub a_hat: SpinMatrix,
    pub b_hat: SpinMatrix,
    pub e_hat: SpinMatrix,
    pub ab: SpinMatrix,
    pub ba: SpinMatrix,
}

impl SpinorBasis {
    pub fn new() -> Self {
        let a_hat = SpinMatrix::scaled(Dyadic::HALF, [[1, 1], [-1, -1]]);
        let b_hat = SpinMatrix::scaled(Dyadic::HALF, [[1, -1], [1, -1]]);
        SpinorBasis {
            a_hat,
            b_hat,
            e_hat: SpinMatrix::IDENTITY,
            ab: a_hat * b_hat,
            ba: b_hat * a_hat,
        }
    }

    /// `diag(+1, -1)`, the spinor factor of the boson equation.
    pub fn sigma_z() -> SpinMatrix {
        SpinMatrix::scaled(Dyadic::ONE, [[1, 0], [0, -1]])
    }

    /// `diag(1, 0)`, selects the `x⁺` slot.
    pub fn upper() -> SpinMatrix {
        SpinMatrix::scaled(Dyadic::ONE, [[1, 0], [0, 0]])
    }

    /// `diag(0, 1)`, selects the `x⁻` slot.
    pub fn lower() -> SpinMatrix {
        SpinMatrix::scaled(Dyadic::ONE, [[0, 0], [0, 1]])
    }

    /// `[[0, 1], [1, 0]]`.
    pub fn swap() -> SpinMatrix {
        SpinMatrix::scaled(Dyadic::ONE, [[0, 1], [1, 0]])
    }
}

impl Default for SpinorBasis {
    fn default() -> Self {
        SpinorBasis::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_arithmetic_is_exact() {
        let h = Dyadic::HALF;
        assert_eq!(h + h, Dyadic::ONE);
        assert_eq!(h * h, Dyadic::new(1, 2));
        assert_eq!(h - h, Dyadic::ZERO);
        assert_eq!(Dyadic::new(4, 3), h);
        assert_eq!((h * h).to_f64(), 0.25);
    }

    #[test]
    fn products_match_closed_forms() {
        let b = SpinorBasis::new();
        assert_eq!(b.ab, SpinMatrix::scaled(Dyadic::HALF, [[1, -1], [-1, 1]]));
        assert_eq!(b.ba, SpinMatrix::scaled(Dyadic::HALF, [[1, 1], [1, 1]]));
        assert_eq!(b.a_hat + b.b_hat, SpinorBasis::sigma_z());
    }

    #[test]
    fn anticommutation_relations() {
        let b = SpinorBasis::new();
        assert_eq!(b.a_hat * b.a_hat, SpinMatrix::ZERO);
        assert_eq!(b.b_hat * b.b_hat, SpinMatrix::ZERO);
        assert_eq!(b.a_hat.anticommutator(b.b_hat), b.e_hat);
        assert_eq!(b.ab + b.ba, b.e_hat);
    }

    #[test]
    fn reduction_rules() {
        let b = SpinorBasis::new();
        assert_eq!(b.a_hat * b.b_hat * b.a_hat, b.a_hat);
        assert_eq!(b.b_hat * b.a_hat * b.b_hat, b.b_hat);
        assert_eq!(b.ab * b.ab, b.ab);
        assert_eq!(b.ba * b.ba, b.ba);
        assert_eq!(b.ab * b.ba, SpinMatrix::ZERO);
    }
}
