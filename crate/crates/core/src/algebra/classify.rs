//! The isomorphism invariants of an irreducible representation: one nonzero
//! complex weight per edge, one N-th root of unity per puncture (stored as
//! the integer exponent of q^2), and a sign choosing the global charge
//! h = sign * q^(sum of exponents).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::AlgebraError;
use crate::geometry::weights::{classical_flip_weights, CrossRatioWeights};
use crate::triangulation::{FlipRoleMap, IdealTriangulation};

use super::params::RootOfUnityParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(&self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_i8(v: i8) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn to_i8(&self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i8(self.to_i8())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = i8::deserialize(d)?;
        Sign::from_i8(v).ok_or_else(|| serde::de::Error::custom("sign must be 1 or -1"))
    }
}

/// Classifying data of an irreducible representation.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyingData {
    /// Edge weights, indexed by edge label.
    pub x: Vec<Complex64>,
    /// Exponents n_j with puncture weight p_j = q^(2 n_j).
    pub puncture_exponents: Vec<i64>,
    /// Sign of the global charge h = sign * q^(sum n_j).
    pub h_sign: Sign,
}

impl ClassifyingData {
    pub fn new(x: Vec<Complex64>, puncture_exponents: Vec<i64>, h_sign: Sign) -> Self {
        ClassifyingData {
            x,
            puncture_exponents,
            h_sign,
        }
    }

    pub fn puncture_weight(&self, j: usize, params: &RootOfUnityParams) -> Complex64 {
        params.q2_pow(self.puncture_exponents[j])
    }

    pub fn puncture_weights(&self, params: &RootOfUnityParams) -> Vec<Complex64> {
        (0..self.puncture_exponents.len())
            .map(|j| self.puncture_weight(j, params))
            .collect()
    }

    pub fn global_charge(&self, params: &RootOfUnityParams) -> Complex64 {
        let total: i64 = self.puncture_exponents.iter().sum();
        params.q_pow(total) * self.h_sign.value()
    }

    /// Checks the structural constraints against a triangulation: nonzero
    /// edge weights, matching lengths, and weight product 1 around every
    /// puncture (so that the puncture weights can be roots of unity).
    pub fn validate(
        &self,
        t: &IdealTriangulation,
        tol: f64,
    ) -> Result<(), AlgebraError> {
        if self.x.len() != t.num_edges() {
            return Err(AlgebraError::Incompatible(format!(
                "{} edge weights for {} edges",
                self.x.len(),
                t.num_edges()
            )));
        }
        if self.puncture_exponents.len() != t.punctures() {
            return Err(AlgebraError::Incompatible(format!(
                "{} puncture exponents for {} punctures",
                self.puncture_exponents.len(),
                t.punctures()
            )));
        }
        if let Some(i) = self.x.iter().position(|x| x.norm() < 1e-13) {
            return Err(AlgebraError::CharacterMismatch(format!(
                "edge weight {i} vanishes"
            )));
        }
        for j in 0..t.punctures() {
            let prod: Complex64 = t.puncture_star(j).iter().map(|&e| self.x[e]).product();
            if (prod - Complex64::new(1.0, 0.0)).norm() > tol {
                return Err(AlgebraError::CharacterMismatch(format!(
                    "weight product around puncture {j} is {prod}, expected 1"
                )));
            }
        }
        Ok(())
    }

    /// The sign of the global charge that the edge weights can realize: the
    /// product of all edge weights equals h^N, which for odd N pins the sign.
    pub fn realizable_h_sign(x: &[Complex64], tol: f64) -> Option<Sign> {
        let prod: Complex64 = x.iter().product();
        if (prod - Complex64::new(1.0, 0.0)).norm() < tol {
            Some(Sign::Plus)
        } else if (prod + Complex64::new(1.0, 0.0)).norm() < tol {
            Some(Sign::Minus)
        } else {
            None
        }
    }

    /// The data after a diagonal exchange: weights transform by the flip
    /// rule, puncture weights and charge are untouched.
    pub fn flipped(&self, roles: &FlipRoleMap) -> Result<ClassifyingData, AlgebraError> {
        let w = CrossRatioWeights::new(self.x.clone());
        let out = classical_flip_weights(&w, roles).map_err(|_| {
            AlgebraError::SingularDiagonal(roles.diagonal)
        })?;
        Ok(ClassifyingData {
            x: out.values().to_vec(),
            puncture_exponents: self.puncture_exponents.clone(),
            h_sign: self.h_sign,
        })
    }
}

/// Wire format: weights keyed by 1-based edge label.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifyingDataJson {
    pub x: std::collections::BTreeMap<String, [f64; 2]>,
    pub n: Vec<i64>,
    pub h_sign: i8,
}

impl From<&ClassifyingData> for ClassifyingDataJson {
    fn from(d: &ClassifyingData) -> Self {
        ClassifyingDataJson {
            x: d
                .x
                .iter()
                .enumerate()
                .map(|(i, z)| ((i + 1).to_string(), [z.re, z.im]))
                .collect(),
            n: d.puncture_exponents.clone(),
            h_sign: d.h_sign.to_i8(),
        }
    }
}

impl TryFrom<&ClassifyingDataJson> for ClassifyingData {
    type Error = AlgebraError;

    fn try_from(j: &ClassifyingDataJson) -> Result<Self, AlgebraError> {
        let mut x = vec![Complex64::new(0.0, 0.0); j.x.len()];
        for (key, val) in &j.x {
            let label: usize = key
                .parse()
                .map_err(|_| AlgebraError::Incompatible(format!("bad edge label {key:?}")))?;
            if label == 0 || label > x.len() {
                return Err(AlgebraError::Incompatible(format!(
                    "edge label {label} out of range 1..={}",
                    x.len()
                )));
            }
            x[label - 1] = Complex64::new(val[0], val[1]);
        }
        let h_sign = Sign::from_i8(j.h_sign)
            .ok_or_else(|| AlgebraError::Incompatible("h_sign must be 1 or -1".into()))?;
        Ok(ClassifyingData::new(x, j.n.clone(), h_sign))
    }
}
