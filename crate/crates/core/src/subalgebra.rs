//! Distinguished subalgebras and membership tests.
//!
//! The library works with the subalgebras `g_I`, the Heisenberg ideals
//! `h_I`, the non-negative parts `g^(m)`, `g_I^(0)` and `h_I^+`, and the
//! Virasoro subalgebra. Index sets are always symmetrical: `i` belongs
//! together with `p - i`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{BasisSymbol, GapParameter, LieElement};
use crate::error::{Error, Result};

/// A symmetrical subset of `{1, ..., p-1}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexSet {
    indices: BTreeSet<u32>,
}

impl IndexSet {
    pub fn new(p: GapParameter, indices: impl IntoIterator<Item = u32>) -> Result<Self> {
        let indices: BTreeSet<u32> = indices.into_iter().collect();
        for &i in &indices {
            if i == 0 || i >= p.get() {
                return Err(Error::invalid(format!(
                    "index {i} out of range 1..={} for p={}",
                    p.get() - 1,
                    p.get()
                )));
            }
            if !indices.contains(&(p.get() - i)) {
                return Err(Error::invalid(format!(
                    "index set not symmetrical: contains {i} but not {}",
                    p.get() - i
                )));
            }
        }
        Ok(IndexSet { indices })
    }

    pub fn empty() -> Self {
        IndexSet { indices: BTreeSet::new() }
    }

    /// The full set `{1, ..., p-1}`.
    pub fn full(p: GapParameter) -> Self {
        IndexSet { indices: (1..p.get()).collect() }
    }

    /// The symmetric closure of `{i, p-i}` for a single index.
    pub fn pair(p: GapParameter, i: u32) -> Result<Self> {
        IndexSet::new(p, [i, p.get() - i])
    }

    pub fn complement(&self, p: GapParameter) -> IndexSet {
        IndexSet {
            indices: (1..p.get()).filter(|i| !self.indices.contains(i)).collect(),
        }
    }

    pub fn contains(&self, i: u32) -> bool {
        self.indices.contains(&i)
    }

    /// Whether the (normalized) central index `j` pairs with this set,
    /// i.e. `C_j` lies in the span of `{C_i | i in I}`.
    pub fn contains_central(&self, p: GapParameter, j: u32) -> bool {
        j != 0 && (self.indices.contains(&j) || self.indices.contains(&(p.get() - j)))
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.indices.iter().copied()
    }

    /// `I_0 = I intersect {1, ..., floor(p/2)}`, one representative per
    /// Heisenberg pair.
    pub fn halves(&self, p: GapParameter) -> Vec<u32> {
        self.indices.iter().copied().filter(|&i| i <= p.half()).collect()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.indices.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// A spanning-set description of a distinguished subalgebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubalgebraSpec {
    /// The whole algebra.
    Full,
    /// `g_I = span{L_n, I_n^(i), C_0, C_i | n in Z, i in I}`.
    GI(IndexSet),
    /// `h_I = span{I_n^(i), C_i | n in Z, i in I}`.
    HI(IndexSet),
    /// `g^(m) = span{L_{m+k}, I_k^(i), C_0, C_i | k >= 0, all i}`, m >= 1.
    Gm(i64),
    /// `g_I^(0) = span{L_n, I_n^(i), C_0, C_i | n >= 0, i in I}`.
    GI0(IndexSet),
    /// `h_I^+ = span{I_n^(i), C_i | n >= 0, i in I}`.
    HIplus(IndexSet),
    /// The Virasoro subalgebra `span{L_n, C_0}`.
    Vir,
}

impl SubalgebraSpec {
    pub fn validate(&self, p: GapParameter) -> Result<()> {
        match self {
            SubalgebraSpec::Gm(m) => {
                if *m < 1 {
                    return Err(Error::invalid(format!("g^(m) requires m >= 1, got {m}")));
                }
            }
            SubalgebraSpec::GI(set)
            | SubalgebraSpec::HI(set)
            | SubalgebraSpec::GI0(set)
            | SubalgebraSpec::HIplus(set) => {
                // Re-validate against this p; sets are symmetrical by
                // construction but may come from a different parameter.
                IndexSet::new(p, set.iter())?;
            }
            SubalgebraSpec::Full | SubalgebraSpec::Vir => {}
        }
        Ok(())
    }

    /// Whether `sym` lies in the spanning set.
    pub fn contains_symbol(&self, p: GapParameter, sym: &BasisSymbol) -> bool {
        match self {
            SubalgebraSpec::Full => true,
            SubalgebraSpec::GI(set) => match *sym {
                BasisSymbol::L(_) => true,
                BasisSymbol::I { sup, .. } => set.contains(sup),
                BasisSymbol::C(j) => j == 0 || set.contains_central(p, j),
            },
            SubalgebraSpec::HI(set) => match *sym {
                BasisSymbol::L(_) => false,
                BasisSymbol::I { sup, .. } => set.contains(sup),
                BasisSymbol::C(j) => set.contains_central(p, j),
            },
            SubalgebraSpec::Gm(m) => match *sym {
                BasisSymbol::L(n) => n >= *m,
                BasisSymbol::I { n, .. } => n >= 0,
                BasisSymbol::C(_) => true,
            },
            SubalgebraSpec::GI0(set) => match *sym {
                BasisSymbol::L(n) => n >= 0,
                BasisSymbol::I { sup, n } => n >= 0 && set.contains(sup),
                BasisSymbol::C(j) => j == 0 || set.contains_central(p, j),
            },
            SubalgebraSpec::HIplus(set) => match *sym {
                BasisSymbol::L(_) => false,
                BasisSymbol::I { sup, n } => n >= 0 && set.contains(sup),
                BasisSymbol::C(j) => set.contains_central(p, j),
            },
            SubalgebraSpec::Vir => match *sym {
                BasisSymbol::L(_) => true,
                BasisSymbol::I { .. } => false,
                BasisSymbol::C(j) => j == 0,
            },
        }
    }
}

/// True iff every symbol of `x` belongs to the spanning set of `spec`.
pub fn is_member(x: &LieElement, spec: &SubalgebraSpec) -> Result<bool> {
    spec.validate(x.p())?;
    Ok(x.terms().all(|(sym, _)| spec.contains_symbol(x.p(), sym)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn p(v: u32) -> GapParameter {
        GapParameter::new(v).unwrap()
    }

    fn elem(pp: GapParameter, sym: BasisSymbol) -> LieElement {
        LieElement::from_symbol(pp, sym).unwrap()
    }

    #[test]
    fn gm_membership() {
        let p2 = p(2);
        let i10 = elem(p2, p2.i(1, 0).unwrap());
        assert!(is_member(&i10, &SubalgebraSpec::Gm(1)).unwrap());
        let l0 = elem(p2, p2.l(0));
        assert!(!is_member(&l0, &SubalgebraSpec::Gm(1)).unwrap());
    }

    #[test]
    fn hi_membership_with_negative_index() {
        let p4 = p(4);
        let x = elem(p4, p4.i(1, -5).unwrap());
        let hi = SubalgebraSpec::HI(IndexSet::new(p4, [1, 3]).unwrap());
        assert!(is_member(&x, &hi).unwrap());
        assert!(!is_member(&elem(p4, p4.l(0)), &hi).unwrap());
        // C(1) pairs with {1,3}; C(2) does not.
        assert!(is_member(&elem(p4, p4.c(1).unwrap()), &hi).unwrap());
        assert!(!is_member(&elem(p4, p4.c(2).unwrap()), &hi).unwrap());
    }

    #[test]
    fn non_symmetrical_set_rejected() {
        let p4 = p(4);
        assert!(IndexSet::new(p4, [1]).is_err());
        assert!(IndexSet::new(p4, [1, 3]).is_ok());
        assert!(IndexSet::new(p4, [2]).is_ok());
    }

    #[test]
    fn closure_under_bracket_sampled() {
        // For each spec, brackets of members stay members.
        let p3 = p(3);
        let specs = [
            SubalgebraSpec::Full,
            SubalgebraSpec::GI(IndexSet::new(p3, [1, 2]).unwrap()),
            SubalgebraSpec::HI(IndexSet::new(p3, [1, 2]).unwrap()),
            SubalgebraSpec::Gm(1),
            SubalgebraSpec::Gm(2),
            SubalgebraSpec::GI0(IndexSet::new(p3, [1, 2]).unwrap()),
            SubalgebraSpec::HIplus(IndexSet::new(p3, [1, 2]).unwrap()),
            SubalgebraSpec::Vir,
        ];
        let mut symbols = Vec::new();
        for n in -3..=3 {
            symbols.push(p3.l(n));
            for i in 1..3 {
                symbols.push(p3.i(i, n).unwrap());
            }
        }
        symbols.push(p3.c(0).unwrap());
        symbols.push(p3.c(1).unwrap());
        for spec in &specs {
            let members: Vec<LieElement> = symbols
                .iter()
                .filter(|s| spec.contains_symbol(p3, s))
                .map(|s| elem(p3, *s))
                .collect();
            for a in &members {
                for b in &members {
                    let br = a.bracket(b).unwrap();
                    assert!(
                        is_member(&br, spec).unwrap(),
                        "bracket left {spec:?}: [{a}, {b}] = {br}"
                    );
                }
            }
        }
    }

    #[test]
    fn vir_excludes_heisenberg_center() {
        let p4 = p(4);
        let x = LieElement::from_term(p4, p4.c(1).unwrap(), Scalar::one()).unwrap();
        assert!(!is_member(&x, &SubalgebraSpec::Vir).unwrap());
        assert!(is_member(&elem(p4, p4.c(0).unwrap()), &SubalgebraSpec::Vir).unwrap());
    }
}
