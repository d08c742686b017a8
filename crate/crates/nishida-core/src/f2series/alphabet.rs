//! Graded variable alphabets.
//!
//! An alphabet fixes an ordered list of named, graded variables. At most one
//! variable of a base alphabet may be marked invertible (it must have grade
//! 0); its exponents may go negative down to the Laurent floor. Tensor
//! alphabets are built by concatenating factors; every variable remembers
//! which tensor slot it belongs to, so a monomial can later be split back
//! into factor parts.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Index of a variable inside its alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarInfo {
    pub name: String,
    pub grade: u32,
    /// Secondary grading used by free operation rings; 0 elsewhere.
    pub weight: u32,
    pub invertible: bool,
    /// Tensor slot, 0 in a plain alphabet.
    pub factor: u8,
}

#[derive(Debug, PartialEq, Eq)]
pub struct GradedAlphabet {
    vars: Vec<VarInfo>,
    lookup: BTreeMap<(u8, String), VarId>,
    factors: u8,
    laurent_floor: i32,
}

impl GradedAlphabet {
    /// Base alphabet from `(name, grade)` pairs in declared order.
    /// `invertible` names the single grade-0 variable allowed negative
    /// exponents, bounded below by `laurent_floor`.
    pub fn build(
        vars: &[(&str, u32)],
        invertible: Option<&str>,
        laurent_floor: i32,
    ) -> Result<Arc<Self>> {
        let infos = vars
            .iter()
            .map(|(name, grade)| VarInfo {
                name: (*name).to_string(),
                grade: *grade,
                weight: 0,
                invertible: Some(*name) == invertible,
                factor: 0,
            })
            .collect::<Vec<_>>();
        if let Some(inv) = invertible {
            if !infos.iter().any(|v| v.name == inv) {
                return Err(Error::UnknownVariable(inv.to_string()));
            }
        }
        Self::from_infos(infos, laurent_floor)
    }

    /// Like `build` but with explicit weights, for word variables.
    pub fn with_weights(
        vars: Vec<VarInfo>,
        laurent_floor: i32,
    ) -> Result<Arc<Self>> {
        Self::from_infos(vars, laurent_floor)
    }

    fn from_infos(vars: Vec<VarInfo>, laurent_floor: i32) -> Result<Arc<Self>> {
        let mut lookup = BTreeMap::new();
        let mut inv_seen = false;
        for (i, v) in vars.iter().enumerate() {
            if v.invertible {
                if v.grade != 0 {
                    return Err(Error::InvertibleGrade(v.name.clone()));
                }
                if inv_seen && v.factor == 0 {
                    return Err(Error::TooManyInvertible);
                }
                inv_seen = true;
            }
            if lookup
                .insert((v.factor, v.name.clone()), VarId(i as u32))
                .is_some()
            {
                return Err(Error::DuplicateVariable(v.name.clone()));
            }
        }
        let factors = vars.iter().map(|v| v.factor).max().map_or(1, |f| f + 1);
        Ok(Arc::new(GradedAlphabet {
            vars,
            lookup,
            factors,
            laurent_floor,
        }))
    }

    /// Concatenate factors into a tensor alphabet. Slots are renumbered so
    /// nested tensors flatten.
    pub fn tensor(factors: &[&Arc<GradedAlphabet>]) -> Result<Arc<Self>> {
        let mut vars = Vec::new();
        let mut slot: u8 = 0;
        let mut floor = 0;
        for f in factors {
            floor = floor.min(f.laurent_floor);
            for v in &f.vars {
                let mut v = v.clone();
                v.factor += slot;
                vars.push(v);
            }
            slot += f.factors;
        }
        let mut lookup = BTreeMap::new();
        for (i, v) in vars.iter().enumerate() {
            if lookup
                .insert((v.factor, v.name.clone()), VarId(i as u32))
                .is_some()
            {
                return Err(Error::DuplicateVariable(v.name.clone()));
            }
        }
        let factors_n = slot.max(1);
        Ok(Arc::new(GradedAlphabet {
            vars,
            lookup,
            factors: factors_n,
            laurent_floor: floor,
        }))
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn info(&self, id: VarId) -> &VarInfo {
        &self.vars[id.0 as usize]
    }

    pub fn vars(&self) -> impl Iterator<Item = (VarId, &VarInfo)> {
        self.vars
            .iter()
            .enumerate()
            .map(|(i, v)| (VarId(i as u32), v))
    }

    /// Look a variable up by name in slot 0.
    pub fn var(&self, name: &str) -> Option<VarId> {
        self.locate(0, name)
    }

    pub fn locate(&self, factor: u8, name: &str) -> Option<VarId> {
        self.lookup.get(&(factor, name.to_string())).copied()
    }

    pub fn factors(&self) -> u8 {
        self.factors
    }

    pub fn laurent_floor(&self) -> i32 {
        self.laurent_floor
    }

    /// Structural compatibility; `Arc` identity is the fast path.
    pub fn same(a: &Arc<Self>, b: &Arc<Self>) -> bool {
        Arc::ptr_eq(a, b) || a == b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_alphabet_rules() {
        let a = GradedAlphabet::build(&[("g0", 0), ("g1", 1)], Some("g0"), -8).unwrap();
        assert_eq!(a.len(), 2);
        assert!(a.info(a.var("g0").unwrap()).invertible);
        assert_eq!(a.factors(), 1);

        let bad = GradedAlphabet::build(&[("g0", 1)], Some("g0"), -8);
        assert_eq!(bad.unwrap_err(), Error::InvertibleGrade("g0".into()));

        let dup = GradedAlphabet::build(&[("g", 0), ("g", 1)], None, -8);
        assert!(matches!(dup.unwrap_err(), Error::DuplicateVariable(_)));
    }

    #[test]
    fn tensor_slots() {
        let a = GradedAlphabet::build(&[("u", 0), ("v", 3)], Some("u"), -4).unwrap();
        let t = GradedAlphabet::tensor(&[&a, &a]).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t.factors(), 2);
        assert_ne!(t.locate(0, "v"), t.locate(1, "v"));
        // nested tensor flattens
        let t3 = GradedAlphabet::tensor(&[&t, &a]).unwrap();
        assert_eq!(t3.factors(), 3);
        assert!(t3.locate(2, "u").is_some());
    }
}
