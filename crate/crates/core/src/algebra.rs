//! The gap-p Virasoro algebra: basis symbols and exact bracket computation.
//!
//! For a fixed integer `p > 1` the algebra has basis
//! `{ L_n, I_n^(i), C_j | n in Z, 1 <= i <= p-1, 0 <= j <= floor(p/2) }`
//! with brackets
//!
//! ```text
//! [L_m, L_n]         = (m-n) L_{m+n} + (m^3-m)/12 * delta_{m+n,0} C_0
//! [I_m^(i), I_n^(j)] = (m + i/p) delta_{i+j,p} delta_{m+n+1,0} C_i
//! [L_m, I_n^(i)]     = -(n + i/p) I_{m+n}^(i)
//! [C_j, -]           = 0
//! ```
//!
//! Central symbols with superscript above `floor(p/2)` are normalized at
//! construction via `C_i = C_{p-i}`. Elements are kept in canonical form:
//! zero coefficients are never stored, so equality of term maps is equality
//! of elements.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The gap parameter `p >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GapParameter(u32);

impl GapParameter {
    pub fn new(p: u32) -> Result<Self> {
        if p < 2 {
            return Err(Error::invalid(format!("gap parameter must be at least 2, got {p}")));
        }
        Ok(GapParameter(p))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// `floor(p/2)`, the largest independent central index.
    pub fn half(self) -> u32 {
        self.0 / 2
    }

    /// The Virasoro symbol `L(n)`.
    pub fn l(self, n: i64) -> BasisSymbol {
        BasisSymbol::L(n)
    }

    /// The Heisenberg symbol `I(i, n)`; requires `1 <= i <= p-1`.
    pub fn i(self, sup: u32, n: i64) -> Result<BasisSymbol> {
        if sup == 0 || sup >= self.0 {
            return Err(Error::invalid(format!(
                "superscript {sup} out of range 1..={} for p={}",
                self.0 - 1,
                self.0
            )));
        }
        Ok(BasisSymbol::I { sup, n })
    }

    /// The central symbol `C(j)`; accepts `0 <= j <= p-1` and normalizes
    /// `C_j` to `C_{p-j}` when `j > floor(p/2)`.
    pub fn c(self, j: u32) -> Result<BasisSymbol> {
        if j >= self.0 {
            return Err(Error::invalid(format!(
                "central index {j} out of range 0..={} for p={}",
                self.0 - 1,
                self.0
            )));
        }
        let j = if j > self.half() { self.0 - j } else { j };
        Ok(BasisSymbol::C(j))
    }

    /// `i/p` as an exact scalar.
    pub fn fraction(self, sup: u32) -> Scalar {
        Scalar::from_ratio(sup as i64, self.0 as i64)
    }
}

/// One basis symbol of the algebra. The canonical term order puts L-symbols
/// first (by index), then I-symbols by (superscript, index), then C-symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisSymbol {
    L(i64),
    I { sup: u32, n: i64 },
    C(u32),
}

impl BasisSymbol {
    fn order_key(&self) -> (u8, i64, i64) {
        match *self {
            BasisSymbol::L(n) => (0, n, 0),
            BasisSymbol::I { sup, n } => (1, sup as i64, n),
            BasisSymbol::C(j) => (2, j as i64, 0),
        }
    }

    /// Degree in the Z-grading: `L_n` and `I_n^(i)` sit in degree n, central
    /// symbols in degree 0.
    pub fn degree(&self) -> i64 {
        match *self {
            BasisSymbol::L(n) => n,
            BasisSymbol::I { n, .. } => n,
            BasisSymbol::C(_) => 0,
        }
    }

    pub fn is_central(&self) -> bool {
        matches!(self, BasisSymbol::C(_))
    }

    /// Checks the symbol is well formed for `p` (superscript range and
    /// normalized central index).
    pub fn validate(&self, p: GapParameter) -> Result<()> {
        match *self {
            BasisSymbol::L(_) => Ok(()),
            BasisSymbol::I { sup, .. } => {
                if sup == 0 || sup >= p.get() {
                    Err(Error::invalid(format!("superscript {sup} invalid for p={}", p.get())))
                } else {
                    Ok(())
                }
            }
            BasisSymbol::C(j) => {
                if j > p.half() {
                    Err(Error::invalid(format!(
                        "central index {j} not normalized for p={}",
                        p.get()
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }
}

impl PartialOrd for BasisSymbol {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BasisSymbol {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl fmt::Display for BasisSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BasisSymbol::L(n) => write!(f, "L({n})"),
            BasisSymbol::I { sup, n } => write!(f, "I({sup},{n})"),
            BasisSymbol::C(j) => write!(f, "C({j})"),
        }
    }
}

/// A finite scalar-weighted combination of basis symbols at a fixed `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieElement {
    p: GapParameter,
    terms: BTreeMap<BasisSymbol, Scalar>,
}

impl LieElement {
    pub fn zero(p: GapParameter) -> Self {
        LieElement { p, terms: BTreeMap::new() }
    }

    pub fn from_symbol(p: GapParameter, sym: BasisSymbol) -> Result<Self> {
        Self::from_term(p, sym, Scalar::one())
    }

    pub fn from_term(p: GapParameter, sym: BasisSymbol, coeff: Scalar) -> Result<Self> {
        sym.validate(p)?;
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(sym, coeff);
        }
        Ok(LieElement { p, terms })
    }

    pub fn from_terms(
        p: GapParameter,
        entries: impl IntoIterator<Item = (BasisSymbol, Scalar)>,
    ) -> Result<Self> {
        let mut out = LieElement::zero(p);
        for (sym, coeff) in entries {
            sym.validate(p)?;
            out.add_term(sym, coeff);
        }
        Ok(out)
    }

    pub fn p(&self) -> GapParameter {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisSymbol, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, sym: &BasisSymbol) -> Scalar {
        self.terms.get(sym).cloned().unwrap_or_else(Scalar::zero)
    }

    fn add_term(&mut self, sym: BasisSymbol, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(sym) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = &*e.get() + &coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn check_p(&self, other: &LieElement) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ParameterMismatch(self.p.get(), other.p.get()));
        }
        Ok(())
    }

    pub fn add(&self, other: &LieElement) -> Result<LieElement> {
        self.check_p(other)?;
        let mut out = self.clone();
        for (sym, c) in &other.terms {
            out.add_term(*sym, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &LieElement) -> Result<LieElement> {
        self.add(&other.scale(&-&Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> LieElement {
        if c.is_zero() {
            return LieElement::zero(self.p);
        }
        LieElement {
            p: self.p,
            terms: self.terms.iter().map(|(sym, v)| (*sym, v * c)).collect(),
        }
    }

    /// Exact Lie bracket, extended bilinearly from the defining relations.
    pub fn bracket(&self, other: &LieElement) -> Result<LieElement> {
        self.check_p(other)?;
        let mut out = LieElement::zero(self.p);
        for (x, a) in &self.terms {
            for (y, b) in &other.terms {
                let coeff = a * b;
                for (sym, c) in bracket_symbols(self.p, x, y) {
                    out.add_term(sym, &c * &coeff);
                }
            }
        }
        Ok(out)
    }

    /// Degree in the Z-grading: `Homogeneous(n)` if every symbol sits in
    /// degree n, `Mixed` otherwise. The zero element has no degree.
    pub fn graded_degree(&self) -> Result<GradedDegree> {
        let mut it = self.terms.keys();
        let first = it
            .next()
            .ok_or_else(|| Error::invalid("graded degree of the zero element is undefined"))?
            .degree();
        for sym in it {
            if sym.degree() != first {
                return Ok(GradedDegree::Mixed);
            }
        }
        Ok(GradedDegree::Homogeneous(first))
    }

    /// The automorphism `exp(ad alpha)` applied to `self`, for `alpha`
    /// supported on I-symbols only. Then `ad alpha` is nilpotent of order
    /// at most 3: a bracket with an L-symbol yields I-symbols, a bracket
    /// with an I-symbol yields central symbols, and the center is killed.
    pub fn exp_ad(alpha: &LieElement, x: &LieElement) -> Result<LieElement> {
        alpha.check_p(x)?;
        for (sym, _) in alpha.terms() {
            if !matches!(sym, BasisSymbol::I { .. }) {
                return Err(Error::precondition(format!(
                    "exp_ad requires alpha supported on I-symbols only, found {sym}"
                )));
            }
        }
        let first = alpha.bracket(x)?;
        let second = alpha.bracket(&first)?;
        debug_assert!(alpha.bracket(&second).map(|t| t.is_zero()).unwrap_or(false));
        x.add(&first)?.add(&second.scale(&Scalar::from_ratio(1, 2)))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "p": self.p.get(),
            "terms": self
                .terms
                .iter()
                .map(|(sym, c)| serde_json::json!({"sym": sym.to_string(), "coeff": c.to_string()}))
                .collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradedDegree {
    Homogeneous(i64),
    Mixed,
}

/// Bracket of two basis symbols as a list of (symbol, coefficient) terms.
fn bracket_symbols(p: GapParameter, x: &BasisSymbol, y: &BasisSymbol) -> Vec<(BasisSymbol, Scalar)> {
    use BasisSymbol::*;
    match (*x, *y) {
        (C(_), _) | (_, C(_)) => Vec::new(),
        (L(m), L(n)) => {
            let mut out = Vec::new();
            let factor = Scalar::from_int(m - n);
            if !factor.is_zero() {
                out.push((L(m + n), factor));
            }
            if m + n == 0 {
                // (m^3 - m)/12, computed in big integers to stay exact for
                // any index.
                let big = BigInt::from(m);
                let numer = &big * &big * &big - &big;
                let c = &Scalar::from_bigint(numer) * &Scalar::from_ratio(1, 12);
                if !c.is_zero() {
                    out.push((C(0), c));
                }
            }
            out
        }
        (L(m), I { sup, n }) => {
            // -(n + i/p) I_{m+n}^(i)
            let c = -&(&Scalar::from_int(n) + &p.fraction(sup));
            if c.is_zero() {
                Vec::new()
            } else {
                vec![(I { sup, n: m + n }, c)]
            }
        }
        (I { sup, n }, L(m)) => {
            // antisymmetry: (n + i/p) I_{m+n}^(i)
            let c = &Scalar::from_int(n) + &p.fraction(sup);
            if c.is_zero() {
                Vec::new()
            } else {
                vec![(I { sup, n: m + n }, c)]
            }
        }
        (I { sup: i, n: m }, I { sup: j, n }) => {
            if i + j == p.get() && m + n + 1 == 0 {
                let c = &Scalar::from_int(m) + &p.fraction(i);
                // m + i/p is never zero since 0 < i < p.
                vec![(p.c(i).expect("validated superscript"), c)]
            } else {
                Vec::new()
            }
        }
    }
}

impl fmt::Display for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (sym, c)) in self.terms.iter().enumerate() {
            let (neg, mag) = display_coeff(c);
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match mag {
                None => write!(f, "{sym}")?,
                Some(s) => write!(f, "{s}*{sym}")?,
            }
        }
        Ok(())
    }
}

/// Splits a coefficient into a sign for display and an optional magnitude
/// string (`None` means magnitude one). Complex coefficients with both
/// parts are parenthesized.
pub(crate) fn display_coeff(c: &Scalar) -> (bool, Option<String>) {
    use num_traits::Signed;
    use num_traits::Zero as _;
    if c.is_real() {
        let neg = c.re().is_negative();
        let mag = if neg { -c } else { c.clone() };
        if mag.is_one() {
            (neg, None)
        } else {
            (neg, Some(mag.to_string()))
        }
    } else if c.re().is_zero() {
        let neg = c.im().is_negative();
        let mag = if neg { -c } else { c.clone() };
        if mag == Scalar::i() {
            (neg, Some("i".to_string()))
        } else {
            (neg, Some(mag.to_string()))
        }
    } else {
        (false, Some(format!("({c})")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: u32) -> GapParameter {
        GapParameter::new(v).unwrap()
    }

    fn sym_elem(pp: GapParameter, sym: BasisSymbol) -> LieElement {
        LieElement::from_symbol(pp, sym).unwrap()
    }

    #[test]
    fn bracket_ll_with_central_term() {
        // p=3: [L(2), L(-2)] = 4 L(0) + 1/2 C(0)
        let p3 = p(3);
        let got = sym_elem(p3, p3.l(2)).bracket(&sym_elem(p3, p3.l(-2))).unwrap();
        let want = LieElement::from_terms(
            p3,
            [
                (p3.l(0), Scalar::from_int(4)),
                (p3.c(0).unwrap(), Scalar::from_ratio(1, 2)),
            ],
        )
        .unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn bracket_ii_produces_central() {
        // p=3: [I(1,1), I(2,-2)] = 4/3 C(1)
        let p3 = p(3);
        let x = sym_elem(p3, p3.i(1, 1).unwrap());
        let y = sym_elem(p3, p3.i(2, -2).unwrap());
        let want =
            LieElement::from_term(p3, p3.c(1).unwrap(), Scalar::from_ratio(4, 3)).unwrap();
        assert_eq!(x.bracket(&y).unwrap(), want);
    }

    #[test]
    fn bracket_li() {
        // p=3: [L(1), I(2,-1)] = 1/3 I(2,0)
        let p3 = p(3);
        let x = sym_elem(p3, p3.l(1));
        let y = sym_elem(p3, p3.i(2, -1).unwrap());
        let want =
            LieElement::from_term(p3, p3.i(2, 0).unwrap(), Scalar::from_ratio(1, 3)).unwrap();
        assert_eq!(x.bracket(&y).unwrap(), want);
    }

    #[test]
    fn central_symbols_commute() {
        // p=2: [C(1), L(5)] = 0
        let p2 = p(2);
        let x = sym_elem(p2, p2.c(1).unwrap());
        let y = sym_elem(p2, p2.l(5));
        assert!(x.bracket(&y).unwrap().is_zero());
    }

    #[test]
    fn central_index_normalizes_at_construction() {
        let p5 = p(5);
        assert_eq!(p5.c(4).unwrap(), p5.c(1).unwrap());
        assert_eq!(p5.c(3).unwrap(), p5.c(2).unwrap());
        // [I(2,m), I(3,n)] with m+n+1=0 lands on C(2), not C(3).
        let x = sym_elem(p5, p5.i(3, 2).unwrap());
        let y = sym_elem(p5, p5.i(2, -3).unwrap());
        let got = x.bracket(&y).unwrap();
        assert_eq!(got.num_terms(), 1);
        assert!(!got.coeff(&p5.c(3).unwrap()).is_zero());
        assert_eq!(p5.c(3).unwrap(), BasisSymbol::C(2));
    }

    #[test]
    fn graded_degree_cases() {
        let p3 = p(3);
        let x = LieElement::from_terms(
            p3,
            [
                (p3.l(3), Scalar::one()),
                (p3.i(1, 3).unwrap(), Scalar::from_int(2)),
            ],
        )
        .unwrap();
        assert_eq!(x.graded_degree().unwrap(), GradedDegree::Homogeneous(3));
        assert_eq!(
            sym_elem(p3, p3.c(0).unwrap()).graded_degree().unwrap(),
            GradedDegree::Homogeneous(0)
        );
        let mixed = sym_elem(p3, p3.l(1)).add(&sym_elem(p3, p3.l(2))).unwrap();
        assert_eq!(mixed.graded_degree().unwrap(), GradedDegree::Mixed);
        assert!(LieElement::zero(p3).graded_degree().is_err());
    }

    #[test]
    fn exp_ad_examples() {
        let p2 = p(2);
        // alpha = I(1,0): center is fixed.
        let alpha = sym_elem(p2, p2.i(1, 0).unwrap());
        let c1 = sym_elem(p2, p2.c(1).unwrap());
        assert_eq!(LieElement::exp_ad(&alpha, &c1).unwrap(), c1);
        // alpha = I(1,0), x = L(1): L(1) + 1/2 I(1,1).
        let x = sym_elem(p2, p2.l(1));
        let want = LieElement::from_terms(
            p2,
            [
                (p2.l(1), Scalar::one()),
                (p2.i(1, 1).unwrap(), Scalar::from_ratio(1, 2)),
            ],
        )
        .unwrap();
        assert_eq!(LieElement::exp_ad(&alpha, &x).unwrap(), want);
        // alpha = I(1,-1), x = L(2): L(2) - 1/2 I(1,1).
        let alpha = sym_elem(p2, p2.i(1, -1).unwrap());
        let x = sym_elem(p2, p2.l(2));
        let want = LieElement::from_terms(
            p2,
            [
                (p2.l(2), Scalar::one()),
                (p2.i(1, 1).unwrap(), Scalar::from_ratio(-1, 2)),
            ],
        )
        .unwrap();
        assert_eq!(LieElement::exp_ad(&alpha, &x).unwrap(), want);
    }

    #[test]
    fn exp_ad_rejects_l_support() {
        let p2 = p(2);
        let alpha = sym_elem(p2, p2.l(0));
        let x = sym_elem(p2, p2.l(1));
        assert!(matches!(
            LieElement::exp_ad(&alpha, &x),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn mismatched_p_is_rejected() {
        let a = sym_elem(p(2), BasisSymbol::L(0));
        let b = sym_elem(p(3), BasisSymbol::L(0));
        assert!(matches!(a.bracket(&b), Err(Error::ParameterMismatch(2, 3))));
    }
}
