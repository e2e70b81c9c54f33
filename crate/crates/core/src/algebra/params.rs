//! The deformation parameter: q = exp(2 pi i s / N) for odd N and s coprime
//! to N. All powers of q are tracked as integer exponents mod N and turned
//! into complex numbers only at the end, so long products accumulate no
//! phase drift.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::AlgebraError;

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Modular inverse of `a` mod `m` for gcd(a, m) = 1.
pub(crate) fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        None
    } else {
        Some(old_s.rem_euclid(m))
    }
}

/// Root-of-unity parameters of the quantum torus. On the wire:
/// `{ "N": int, "s": int }`, validated on the way in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RootOfUnityParams {
    n: i64,
    s: i64,
}

#[derive(Serialize, Deserialize)]
struct ParamsWire {
    #[serde(rename = "N")]
    n: i64,
    s: i64,
}

impl Serialize for RootOfUnityParams {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ParamsWire {
            n: self.n,
            s: self.s,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RootOfUnityParams {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let wire = ParamsWire::deserialize(d)?;
        RootOfUnityParams::new(wire.n, wire.s).map_err(serde::de::Error::custom)
    }
}

impl RootOfUnityParams {
    /// N must be odd and at least 3, s coprime to N.
    pub fn new(n: i64, s: i64) -> Result<Self, AlgebraError> {
        if n < 3 || n % 2 == 0 {
            return Err(AlgebraError::UnsupportedParameters(format!(
                "N must be odd and >= 3, got {n}"
            )));
        }
        let s_red = s.rem_euclid(n);
        if gcd(s_red, n) != 1 {
            return Err(AlgebraError::UnsupportedParameters(format!(
                "s = {s} shares a factor with N = {n}"
            )));
        }
        Ok(RootOfUnityParams { n, s: s_red })
    }

    pub fn order(&self) -> i64 {
        self.n
    }

    pub fn s(&self) -> i64 {
        self.s
    }

    /// q^e, evaluated from the exact residue of s*e mod N.
    pub fn q_pow(&self, e: i64) -> Complex64 {
        let m = (self.s.wrapping_mul(e.rem_euclid(self.n))).rem_euclid(self.n);
        let theta = 2.0 * std::f64::consts::PI * (m as f64) / (self.n as f64);
        Complex64::from_polar(1.0, theta)
    }

    /// (q^2)^e.
    pub fn q2_pow(&self, e: i64) -> Complex64 {
        self.q_pow(2 * e)
    }

    pub fn q(&self) -> Complex64 {
        self.q_pow(1)
    }

    /// Dimension N^(r-3) of the irreducible representations for `r` punctures.
    pub fn dimension(&self, r: usize) -> usize {
        (self.n as usize).pow((r - 3) as u32)
    }

    /// Solves q^(2t) = exp(2 pi i k / N) for t mod N.
    pub(crate) fn exponent_halving(&self, k: i64) -> i64 {
        let inv = mod_inverse((2 * self.s).rem_euclid(self.n), self.n)
            .expect("2s is invertible mod odd N");
        (k.rem_euclid(self.n) * inv).rem_euclid(self.n)
    }

    /// Writes a unit complex number as exp(2 pi i k / N) if it is within
    /// `tol` of an N-th root of unity.
    pub fn nth_root_exponent(&self, z: Complex64, tol: f64) -> Option<i64> {
        if (z.norm() - 1.0).abs() > tol {
            return None;
        }
        let k = (z.arg() * (self.n as f64) / (2.0 * std::f64::consts::PI)).round() as i64;
        let k = k.rem_euclid(self.n);
        let target = Complex64::from_polar(
            1.0,
            2.0 * std::f64::consts::PI * (k as f64) / (self.n as f64),
        );
        if (z - target).norm() <= tol {
            Some(k)
        } else {
            None
        }
    }
}
