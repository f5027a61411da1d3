//! Machine-readable verdicts.
//!
//! Field elements print as little-endian base-p coefficient lists. Maps use
//! `serde_json`'s default sorted `Map`, so key order never depends on
//! insertion order.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::field::{Elem, FieldCtx};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Permutation,
    NotPermutation,
}

impl Verdict {
    pub fn from_bool(is_perm: bool) -> Self {
        if is_perm {
            Verdict::Permutation
        } else {
            Verdict::NotPermutation
        }
    }

    pub fn is_permutation(self) -> bool {
        self == Verdict::Permutation
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldSummary {
    pub spec: String,
    pub p: u64,
    pub e: u32,
    pub n: u32,
    pub q: u64,
    pub size: u64,
    pub modulus: Vec<u32>,
    pub primitive_element: Vec<u32>,
}

impl FieldSummary {
    pub fn of(ctx: &FieldCtx) -> Self {
        FieldSummary {
            spec: ctx.spec_string(),
            p: ctx.p(),
            e: ctx.e(),
            n: ctx.n(),
            q: ctx.q(),
            size: ctx.size(),
            modulus: ctx.modulus().to_vec(),
            primitive_element: ctx.coeffs(ctx.primitive_element()),
        }
    }
}

/// One named condition of a permutation criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub name: String,
    pub holds: bool,
}

/// Brute-force verdict for one map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub map: String,
    pub bijective: bool,
    pub image_size: usize,
}

/// Pointwise validation of a closed-form inverse.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InverseReport {
    pub map: String,
    /// `f ∘ g = id` and `g ∘ f = id` on the whole field.
    pub validated: bool,
    /// Agreement with the table inverse of the oracle.
    pub matches_oracle_table: bool,
    #[serde(skip_serializing_if = "Map::is_empty")]
    pub notes: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermutationCertificate {
    pub family: String,
    pub field: FieldSummary,
    pub params: Map<String, Value>,
    pub conditions: Vec<Condition>,
    pub verdict: Verdict,
    pub derived: Map<String, Value>,
    pub oracle: Vec<OracleReport>,
    pub inverse: Vec<InverseReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl PermutationCertificate {
    pub fn new(family: &str, ctx: &FieldCtx) -> Self {
        PermutationCertificate {
            family: family.to_string(),
            field: FieldSummary::of(ctx),
            params: Map::new(),
            conditions: Vec::new(),
            verdict: Verdict::NotPermutation,
            derived: Map::new(),
            oracle: Vec::new(),
            inverse: Vec::new(),
            wall_time_ms: None,
        }
    }

    pub fn condition(&mut self, name: &str, holds: bool) {
        self.conditions.push(Condition {
            name: name.to_string(),
            holds,
        });
    }

    /// Criterion verdict agrees with every oracle, and every recorded
    /// inverse validated.
    pub fn oracle_agrees(&self) -> bool {
        !self.oracle.is_empty()
            && self
                .oracle
                .iter()
                .all(|o| o.bijective == self.verdict.is_permutation())
    }

    pub fn inverses_valid(&self) -> bool {
        self.inverse
            .iter()
            .all(|i| i.validated && i.matches_oracle_table)
            && (!self.verdict.is_permutation() || !self.inverse.is_empty())
    }

    pub fn is_consistent(&self) -> bool {
        self.oracle_agrees() && self.inverses_valid()
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }
}

pub fn elem_json(ctx: &FieldCtx, x: Elem) -> Value {
    Value::from(ctx.coeffs(x))
}

pub fn elems_json(ctx: &FieldCtx, xs: &[Elem]) -> Value {
    Value::Array(xs.iter().map(|&x| elem_json(ctx, x)).collect())
}
