//! Whittaker functions on `g^(m)` and the PBW engine for universal
//! Whittaker modules.
//!
//! A Whittaker function stores its finite free data: `phi(L_n)` for
//! `m <= n <= 2m`, `phi(I_n^(i))` for `0 <= n <= m-1`, and the central
//! values. Everything else vanishes: `phi(L_n) = 0` for `n > 2m` and
//! `phi(I_n^(i)) = 0` for `n >= m`, which is forced by the homomorphism
//! property.
//!
//! The universal module `M_{g_I, phi}` is realized on its PBW basis: words
//! in the complement generators `{L_n | n <= m-1}` and `{I_n^(i) | n <= -1}`
//! applied to `v_phi`, kept in a fixed order (I-factors left of L-factors,
//! each family by decreasing index). `pbw_act` rewrites an arbitrary
//! product into this normal form by repeated bracket commutation, replacing
//! any right-edge factor lying in `g^(m)` by its `phi`-scalar.
//!
//! On top of the engine sit the decision procedures: the Virasoro
//! criterion, the zero-level criterion with its Whittaker-vector witness,
//! the general criterion on the full algebra, the degree-reduction
//! algorithm on `M_0`, eta-conjugation of Whittaker functions, the
//! `h/g` decomposition, and a bounded reachability search used as an
//! independent falsifier.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::algebra::{display_coeff, BasisSymbol, GapParameter, LieElement};
use crate::error::{Error, Result};
use crate::fock::{phi_extension, HeisenbergWhittakerData};
use crate::scalar::Scalar;
use crate::subalgebra::{is_member, IndexSet, SubalgebraSpec};
use crate::verdict::Verdict;

/// The ambient algebra a Whittaker function lives over: the full algebra,
/// a proper `g_I`, or the Virasoro subalgebra. `g_I` with empty `I` is the
/// Virasoro subalgebra and normalizes to `Vir`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ambient {
    Full,
    GI(IndexSet),
    Vir,
}

impl Ambient {
    pub fn gi(p: GapParameter, set: IndexSet) -> Result<Self> {
        IndexSet::new(p, set.iter())?;
        if set.is_empty() {
            Ok(Ambient::Vir)
        } else if set.len() == (p.get() - 1) as usize {
            Ok(Ambient::Full)
        } else {
            Ok(Ambient::GI(set))
        }
    }

    /// The Heisenberg index set of the ambient algebra.
    pub fn index_set(&self, p: GapParameter) -> IndexSet {
        match self {
            Ambient::Full => IndexSet::full(p),
            Ambient::GI(set) => set.clone(),
            Ambient::Vir => IndexSet::empty(),
        }
    }

    pub fn spec(&self) -> SubalgebraSpec {
        match self {
            Ambient::Full => SubalgebraSpec::Full,
            Ambient::GI(set) => SubalgebraSpec::GI(set.clone()),
            Ambient::Vir => SubalgebraSpec::Vir,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Ambient::Full => "full".into(),
            Ambient::GI(set) => format!("g_{set}"),
            Ambient::Vir => "vir".into(),
        }
    }
}

/// The finite free data of a Whittaker function `phi` on the non-negative
/// part `ambient^(m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WhittakerFunction {
    p: GapParameter,
    m: i64,
    ambient: Ambient,
    lvals: BTreeMap<i64, Scalar>,
    ivals: BTreeMap<(u32, i64), Scalar>,
    cvals: BTreeMap<u32, Scalar>,
}

impl WhittakerFunction {
    /// Strict constructor: enforces the vanishing windows (`L` keys in
    /// `[m, 2m]`, `I` keys in `[0, m-1]`) and ambient membership of every
    /// stored index. Central indices are normalized.
    pub fn new(
        p: GapParameter,
        m: i64,
        ambient: Ambient,
        lvals: BTreeMap<i64, Scalar>,
        ivals: BTreeMap<(u32, i64), Scalar>,
        cvals: BTreeMap<u32, Scalar>,
    ) -> Result<Self> {
        let out = Self::candidate(p, m, ambient, lvals, ivals, cvals)?;
        for n in out.lvals.keys() {
            if *n < m || *n > 2 * m {
                return Err(Error::invalid(format!(
                    "phi(L_{n}) outside the free window [{m}, {}]; such values are forced to 0",
                    2 * m
                )));
            }
        }
        for (i, n) in out.ivals.keys() {
            if *n < 0 || *n >= m {
                return Err(Error::invalid(format!(
                    "phi(I_{n}^({i})) outside the free window [0, {}]; such values are forced to 0",
                    m - 1
                )));
            }
        }
        Ok(out)
    }

    /// Lenient constructor used to exercise `validate` on ill-formed data:
    /// stores values anywhere in the ambient non-negative part without
    /// enforcing the vanishing windows.
    pub fn candidate(
        p: GapParameter,
        m: i64,
        ambient: Ambient,
        lvals: BTreeMap<i64, Scalar>,
        ivals: BTreeMap<(u32, i64), Scalar>,
        cvals: BTreeMap<u32, Scalar>,
    ) -> Result<Self> {
        if m < 1 {
            return Err(Error::invalid(format!("m must be >= 1, got {m}")));
        }
        if let Ambient::GI(set) = &ambient {
            IndexSet::new(p, set.iter())?;
        }
        let iset = ambient.index_set(p);
        for n in lvals.keys() {
            if *n < m {
                return Err(Error::invalid(format!("L({n}) is not in g^({m})")));
            }
        }
        for (i, n) in ivals.keys() {
            if *n < 0 {
                return Err(Error::invalid(format!("I({i},{n}) is not in g^({m})")));
            }
            if !iset.contains(*i) {
                return Err(Error::invalid(format!(
                    "superscript {i} outside the ambient index set"
                )));
            }
        }
        let mut normalized_c = BTreeMap::new();
        for (j, v) in cvals {
            let sym = p.c(j)?;
            let BasisSymbol::C(jn) = sym else { unreachable!() };
            if jn != 0 && !iset.contains_central(p, jn) {
                return Err(Error::invalid(format!(
                    "central index {jn} outside the ambient algebra"
                )));
            }
            match normalized_c.entry(jn) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(v);
                }
                std::collections::btree_map::Entry::Occupied(e) => {
                    if *e.get() != v {
                        return Err(Error::invalid(format!(
                            "conflicting values for C({jn}) = C({})",
                            p.get() - jn
                        )));
                    }
                }
            }
        }
        let lvals = lvals.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        let ivals = ivals.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        let cvals = normalized_c.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Ok(WhittakerFunction { p, m, ambient, lvals, ivals, cvals })
    }

    pub fn p(&self) -> GapParameter {
        self.p
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn index_set(&self) -> IndexSet {
        self.ambient.index_set(self.p)
    }

    pub fn phi_l(&self, n: i64) -> Scalar {
        self.lvals.get(&n).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn phi_i(&self, sup: u32, n: i64) -> Scalar {
        self.ivals.get(&(sup, n)).cloned().unwrap_or_else(Scalar::zero)
    }

    /// `phi(C_j)`; the index is normalized first.
    pub fn phi_c(&self, j: u32) -> Scalar {
        let jn = if j > self.p.half() { self.p.get() - j } else { j };
        self.cvals.get(&jn).cloned().unwrap_or_else(Scalar::zero)
    }

    /// All central values on the Heisenberg part vanish.
    pub fn is_zero_level(&self) -> bool {
        self.cvals.keys().all(|&j| j == 0)
    }

    /// Whether `sym` belongs to `ambient^(m) = ambient intersect g^(m)`.
    pub fn in_domain(&self, sym: &BasisSymbol) -> bool {
        self.ambient.spec().contains_symbol(self.p, sym)
            && SubalgebraSpec::Gm(self.m).contains_symbol(self.p, sym)
    }

    /// `phi` at a basis symbol; errors outside the domain.
    pub fn phi_symbol(&self, sym: &BasisSymbol) -> Result<Scalar> {
        if !self.in_domain(sym) {
            return Err(Error::invalid(format!(
                "{sym} is not in {}^({})",
                self.ambient.label(),
                self.m
            )));
        }
        Ok(match *sym {
            BasisSymbol::L(n) => self.phi_l(n),
            BasisSymbol::I { sup, n } => self.phi_i(sup, n),
            BasisSymbol::C(j) => self.phi_c(j),
        })
    }

    /// Linear extension of `phi` to elements of `ambient^(m)`.
    pub fn phi(&self, x: &LieElement) -> Result<Scalar> {
        if x.p() != self.p {
            return Err(Error::ParameterMismatch(x.p().get(), self.p.get()));
        }
        let mut out = Scalar::zero();
        for (sym, c) in x.terms() {
            out = &out + &(&self.phi_symbol(sym)? * c);
        }
        Ok(out)
    }

    /// The generators of `ambient^(m)` with index at most `max_index`.
    pub fn domain_generators(&self, max_index: i64) -> Vec<BasisSymbol> {
        let mut out = Vec::new();
        for n in self.m..=max_index {
            out.push(self.p.l(n));
        }
        for i in self.index_set().iter() {
            for n in 0..=max_index {
                out.push(BasisSymbol::I { sup: i, n });
            }
        }
        out.push(BasisSymbol::C(0));
        for j in 1..=self.p.half() {
            if self.index_set().contains_central(self.p, j) {
                out.push(BasisSymbol::C(j));
            }
        }
        out
    }

    /// Certifies the homomorphism property: `phi` must vanish on brackets
    /// of domain generators. Samples all pairs with index at most `3m+3`
    /// and returns the offending pairs.
    pub fn validate(&self) -> Vec<ValidationViolation> {
        let gens = self.domain_generators(3 * self.m + 3);
        let mut violations = Vec::new();
        for x in &gens {
            for y in &gens {
                let ex = LieElement::from_symbol(self.p, *x).expect("valid symbol");
                let ey = LieElement::from_symbol(self.p, *y).expect("valid symbol");
                let br = ex.bracket(&ey).expect("same p");
                let value = self.phi(&br).expect("bracket stays in the domain");
                if !value.is_zero() {
                    violations.push(ValidationViolation {
                        x: x.to_string(),
                        y: y.to_string(),
                        value,
                    });
                }
            }
        }
        violations
    }

    pub fn to_json(&self) -> serde_json::Value {
        let ambient = match &self.ambient {
            Ambient::Full => serde_json::json!("full"),
            Ambient::Vir => serde_json::json!("vir"),
            Ambient::GI(set) => serde_json::json!({"gI": set.iter().collect::<Vec<_>>()}),
        };
        let mut ivals: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        for ((i, n), v) in &self.ivals {
            ivals
                .entry(i.to_string())
                .or_default()
                .insert(n.to_string(), v.to_string());
        }
        serde_json::json!({
            "p": self.p.get(),
            "m": self.m,
            "ambient": ambient,
            "L": self.lvals.iter().map(|(n, v)| (n.to_string(), v.to_string())).collect::<BTreeMap<_, _>>(),
            "I": ivals,
            "C": self.cvals.iter().map(|(j, v)| (j.to_string(), v.to_string())).collect::<BTreeMap<_, _>>(),
        })
    }

    /// Loads the JSON form; absent entries mean zero and the vanishing
    /// windows are enforced.
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::invalid("whittaker json must be an object"))?;
        let p = GapParameter::new(
            obj.get("p")
                .and_then(|v| v.as_u64())
                .ok_or_else(|| Error::invalid("missing p"))? as u32,
        )?;
        let m = obj
            .get("m")
            .and_then(|v| v.as_i64())
            .ok_or_else(|| Error::invalid("missing m"))?;
        let ambient = match obj.get("ambient") {
            None => Ambient::Full,
            Some(serde_json::Value::String(s)) if s == "full" => Ambient::Full,
            Some(serde_json::Value::String(s)) if s == "vir" => Ambient::Vir,
            Some(serde_json::Value::Object(o)) => {
                let arr = o
                    .get("gI")
                    .and_then(|v| v.as_array())
                    .ok_or_else(|| Error::invalid("ambient object must have key gI"))?;
                let mut set = Vec::new();
                for v in arr {
                    set.push(
                        v.as_u64().ok_or_else(|| Error::invalid("gI entries must be integers"))?
                            as u32,
                    );
                }
                Ambient::gi(p, IndexSet::new(p, set)?)?
            }
            Some(other) => {
                return Err(Error::invalid(format!("unrecognized ambient {other}")))
            }
        };
        let parse_scalar_map = |key: &str| -> Result<BTreeMap<String, serde_json::Value>> {
            match obj.get(key) {
                None => Ok(BTreeMap::new()),
                Some(serde_json::Value::Object(o)) => {
                    Ok(o.iter().map(|(k, v)| (k.clone(), v.clone())).collect())
                }
                Some(other) => Err(Error::invalid(format!("{key} must be an object, got {other}"))),
            }
        };
        let mut lvals = BTreeMap::new();
        for (k, v) in parse_scalar_map("L")? {
            let n: i64 = k.parse().map_err(|_| Error::invalid(format!("bad L index {k}")))?;
            let s: Scalar = v
                .as_str()
                .ok_or_else(|| Error::invalid("scalar values must be strings"))?
                .parse()?;
            lvals.insert(n, s);
        }
        let mut ivals = BTreeMap::new();
        if let Some(serde_json::Value::Object(outer)) = obj.get("I") {
            for (i, inner) in outer {
                let sup: u32 =
                    i.parse().map_err(|_| Error::invalid(format!("bad superscript {i}")))?;
                let inner = inner
                    .as_object()
                    .ok_or_else(|| Error::invalid("I entries must be objects"))?;
                for (k, v) in inner {
                    let n: i64 =
                        k.parse().map_err(|_| Error::invalid(format!("bad I index {k}")))?;
                    let s: Scalar = v
                        .as_str()
                        .ok_or_else(|| Error::invalid("scalar values must be strings"))?
                        .parse()?;
                    ivals.insert((sup, n), s);
                }
            }
        }
        let mut cvals = BTreeMap::new();
        for (k, v) in parse_scalar_map("C")? {
            let j: u32 = k.parse().map_err(|_| Error::invalid(format!("bad C index {k}")))?;
            let s: Scalar = v
                .as_str()
                .ok_or_else(|| Error::invalid("scalar values must be strings"))?
                .parse()?;
            cvals.insert(j, s);
        }
        WhittakerFunction::new(p, m, ambient, lvals, ivals, cvals)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationViolation {
    pub x: String,
    pub y: String,
    pub value: Scalar,
}

/// PBW ordering key: I-factors before L-factors, each family by
/// decreasing index, I-factors of equal index by superscript.
fn pbw_key(sym: &BasisSymbol) -> (u8, i64, u32) {
    match *sym {
        BasisSymbol::I { sup, n } => (0, -n, sup),
        BasisSymbol::L(n) => (1, -n, 0),
        BasisSymbol::C(_) => (2, 0, 0),
    }
}

/// An ordered product of complement generators applied to `v_phi`. The
/// empty monomial is `v_phi` itself.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct PbwMonomial {
    factors: Vec<BasisSymbol>,
}

impl PbwMonomial {
    pub fn vacuum() -> Self {
        PbwMonomial::default()
    }

    /// Builds a monomial from factors already in canonical order. Each
    /// factor must be a complement generator for the given `m`: `L(n)`
    /// with `n <= m-1` or `I(i,n)` with `n <= -1`.
    pub fn new(m: i64, factors: Vec<BasisSymbol>) -> Result<Self> {
        for sym in &factors {
            if !is_complement_generator(sym, m) {
                return Err(Error::invalid(format!(
                    "{sym} is not a PBW factor for m={m}"
                )));
            }
        }
        for pair in factors.windows(2) {
            if pbw_key(&pair[0]) > pbw_key(&pair[1]) {
                return Err(Error::invalid(format!(
                    "factors not in canonical PBW order: {} after {}",
                    pair[1], pair[0]
                )));
            }
        }
        Ok(PbwMonomial { factors })
    }

    pub fn factors(&self) -> &[BasisSymbol] {
        &self.factors
    }

    pub fn is_vacuum(&self) -> bool {
        self.factors.is_empty()
    }

    /// `weight = sum (m - n)` over L-factors plus `sum (-n)` over I-factors.
    pub fn weight(&self, m: i64) -> i64 {
        self.factors
            .iter()
            .map(|sym| match *sym {
                BasisSymbol::L(n) => m - n,
                BasisSymbol::I { n, .. } => -n,
                BasisSymbol::C(_) => 0,
            })
            .sum()
    }

    /// Total drop below zero among the factor indices; used for the
    /// restriction bound.
    pub fn negative_depth(&self) -> i64 {
        self.factors
            .iter()
            .map(|sym| match *sym {
                BasisSymbol::L(n) if n < 0 => -n,
                BasisSymbol::I { n, .. } if n < 0 => -n,
                _ => 0,
            })
            .sum()
    }
}

impl fmt::Display for PbwMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for sym in &self.factors {
            write!(f, "{sym}*")?;
        }
        write!(f, "v")
    }
}

fn is_complement_generator(sym: &BasisSymbol, m: i64) -> bool {
    match *sym {
        BasisSymbol::L(n) => n <= m - 1,
        BasisSymbol::I { n, .. } => n <= -1,
        BasisSymbol::C(_) => false,
    }
}

/// A finite combination of PBW monomials; canonical (no zero coefficients).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct PbwVector {
    terms: BTreeMap<PbwMonomial, Scalar>,
}

impl PbwVector {
    pub fn zero() -> Self {
        PbwVector::default()
    }

    pub fn vacuum() -> Self {
        PbwVector::term(PbwMonomial::vacuum(), Scalar::one())
    }

    pub fn term(mono: PbwMonomial, coeff: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(mono, coeff);
        }
        PbwVector { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PbwMonomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: &PbwMonomial) -> Scalar {
        self.terms.get(mono).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn insert(&mut self, mono: PbwMonomial, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
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

    pub fn add(&self, other: &PbwVector) -> PbwVector {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &PbwVector) -> PbwVector {
        self.add(&other.scale(&-&Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> PbwVector {
        if c.is_zero() {
            return PbwVector::zero();
        }
        PbwVector {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// `Some(c)` if the vector equals `c * v_phi` with `c != 0`.
    pub fn as_vacuum_multiple(&self) -> Option<Scalar> {
        if self.terms.len() == 1 {
            self.terms.get(&PbwMonomial::vacuum()).cloned()
        } else {
            None
        }
    }

    pub fn max_weight(&self, m: i64) -> i64 {
        self.terms.keys().map(|mono| mono.weight(m)).max().unwrap_or(0)
    }
}

impl fmt::Display for PbwVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (mono, c)) in self.terms.iter().enumerate() {
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
                None => write!(f, "{mono}")?,
                Some(s) => write!(f, "{s}*{mono}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for PbwVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.terms.len()))?;
        for (mono, c) in &self.terms {
            map.serialize_entry(&mono.to_string(), &c.to_string())?;
        }
        map.end()
    }
}

/// The universal Whittaker module `M_{ambient, phi}` with its rewriting
/// engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WhittakerModule {
    phi: WhittakerFunction,
}

impl WhittakerModule {
    pub fn new(phi: WhittakerFunction) -> Self {
        WhittakerModule { phi }
    }

    pub fn phi(&self) -> &WhittakerFunction {
        &self.phi
    }

    pub fn p(&self) -> GapParameter {
        self.phi.p
    }

    pub fn m(&self) -> i64 {
        self.phi.m
    }

    fn in_gm_part(&self, sym: &BasisSymbol) -> bool {
        SubalgebraSpec::Gm(self.phi.m).contains_symbol(self.phi.p, sym)
    }

    fn check_ambient_symbol(&self, sym: &BasisSymbol) -> Result<()> {
        if !self.phi.ambient.spec().contains_symbol(self.phi.p, sym) {
            return Err(Error::invalid(format!(
                "{sym} is not in the ambient algebra {}",
                self.phi.ambient.label()
            )));
        }
        Ok(())
    }

    /// Normal form of `word . v_phi` for an arbitrary word of ambient
    /// generators. Rewrites by (1) stripping central factors, (2) replacing
    /// a right-edge factor in `g^(m)` by its `phi`-value, (3) commuting the
    /// rightmost `g^(m)` factor one step to the right, and (4) sorting
    /// adjacent complement factors. Steps (2)-(4) strictly decrease
    /// (length, inversions), so the rewriting terminates.
    pub fn apply_word(&self, word: &[BasisSymbol]) -> Result<PbwVector> {
        for sym in word {
            self.check_ambient_symbol(sym)?;
        }
        let mut out = PbwVector::zero();
        let mut stack: Vec<(Vec<BasisSymbol>, Scalar)> =
            vec![(word.to_vec(), Scalar::one())];
        while let Some((mut w, c)) = stack.pop() {
            if c.is_zero() {
                continue;
            }
            // Strip central factors anywhere in the word.
            if let Some(k) = w.iter().position(BasisSymbol::is_central) {
                let sym = w.remove(k);
                let value = self.phi.phi_symbol(&sym)?;
                stack.push((w, &c * &value));
                continue;
            }
            // Right edge in g^(m): becomes a phi-scalar.
            match w.last() {
                None => {
                    out.insert(PbwMonomial::vacuum(), c);
                    continue;
                }
                Some(last) if self.in_gm_part(last) => {
                    let value = self.phi.phi_symbol(last)?;
                    w.pop();
                    stack.push((w, &c * &value));
                    continue;
                }
                _ => {}
            }
            // Rightmost g^(m) factor not at the edge, else the leftmost
            // out-of-order complement pair.
            let swap_at = w
                .iter()
                .rposition(|s| self.in_gm_part(s))
                .or_else(|| {
                    (0..w.len() - 1).find(|&k| pbw_key(&w[k]) > pbw_key(&w[k + 1]))
                });
            match swap_at {
                Some(k) => {
                    let x = w[k];
                    let y = w[k + 1];
                    let mut swapped = w.clone();
                    swapped.swap(k, k + 1);
                    stack.push((swapped, c.clone()));
                    let ex = LieElement::from_symbol(self.phi.p, x)?;
                    let ey = LieElement::from_symbol(self.phi.p, y)?;
                    for (sym, bc) in ex.bracket(&ey)?.terms() {
                        let mut shorter: Vec<BasisSymbol> = Vec::with_capacity(w.len() - 1);
                        shorter.extend_from_slice(&w[..k]);
                        shorter.push(*sym);
                        shorter.extend_from_slice(&w[k + 2..]);
                        stack.push((shorter, &c * bc));
                    }
                }
                None => {
                    // Sorted complement word: a PBW monomial.
                    out.insert(
                        PbwMonomial::new(self.phi.m, w).expect("sorted complement word"),
                        c,
                    );
                }
            }
        }
        Ok(out)
    }

    pub fn act_symbol(&self, sym: &BasisSymbol, v: &PbwVector) -> Result<PbwVector> {
        self.check_ambient_symbol(sym)?;
        let mut out = PbwVector::zero();
        for (mono, c) in v.iter() {
            let mut word = Vec::with_capacity(mono.factors().len() + 1);
            word.push(*sym);
            word.extend_from_slice(mono.factors());
            out = out.add(&self.apply_word(&word)?.scale(c));
        }
        Ok(out)
    }

    /// Linear action of an arbitrary ambient element.
    pub fn act(&self, x: &LieElement, v: &PbwVector) -> Result<PbwVector> {
        if x.p() != self.phi.p {
            return Err(Error::ParameterMismatch(x.p().get(), self.phi.p.get()));
        }
        let mut out = PbwVector::zero();
        for (sym, c) in x.terms() {
            out = out.add(&self.act_symbol(sym, v)?.scale(c));
        }
        Ok(out)
    }

    /// Exponent tuple `(i_0, ..., i_{m-1})` of a vector in the span of
    /// `L_{m-1}^{i_{m-1}} ... L_0^{i_0} v_phi`: the maximal element of the
    /// support under the order comparing `i_0` first, then `i_1`, and so
    /// on. Errors when the vector leaves that span.
    pub fn support_degree(&self, v: &PbwVector) -> Result<Vec<u64>> {
        let tuples = self.m0_support(v)?;
        tuples
            .into_iter()
            .map(|(t, _)| t)
            .max()
            .ok_or_else(|| Error::invalid("support degree of the zero vector is undefined"))
    }

    fn m0_support(&self, v: &PbwVector) -> Result<Vec<(Vec<u64>, Scalar)>> {
        let m = self.phi.m;
        let mut out = Vec::new();
        for (mono, c) in v.iter() {
            let mut tuple = vec![0u64; m as usize];
            for sym in mono.factors() {
                match *sym {
                    BasisSymbol::L(n) if (0..m).contains(&n) => {
                        tuple[n as usize] += 1;
                    }
                    _ => {
                        return Err(Error::invalid(format!(
                            "vector leaves the M_0 span: factor {sym}"
                        )))
                    }
                }
            }
            out.push((tuple, c.clone()));
        }
        Ok(out)
    }

    /// Degree reduction on `M_0`: repeatedly applies
    /// `I_{m-q-1}^(i) - phi(I_{m-q-1}^(i))` with `q` the least nonzero
    /// coordinate of the degree, asserting that each step lowers the
    /// degree by exactly `epsilon_q`, until a nonzero multiple of `v_phi`
    /// remains.
    pub fn degree_reduce(&self, v: &PbwVector) -> Result<DegreeReduction> {
        let phi = &self.phi;
        let iset = phi.index_set();
        if iset.is_empty() {
            return Err(Error::precondition(
                "degree reduction needs a nonempty Heisenberg index set",
            ));
        }
        if !phi.is_zero_level() {
            return Err(Error::precondition("degree reduction requires zero level"));
        }
        for i in iset.iter() {
            if phi.phi_i(i, phi.m - 1).is_zero() {
                return Err(Error::precondition(format!(
                    "degree reduction requires phi(I_{}^({i})) != 0",
                    phi.m - 1
                )));
            }
        }
        if !phi.lvals.is_empty() {
            return Err(Error::precondition(
                "degree reduction requires phi(L_k) = 0 for all k >= m",
            ));
        }
        if v.is_zero() {
            return Err(Error::invalid("cannot reduce the zero vector"));
        }
        let sup = iset.iter().next().expect("nonempty");
        let mut current = v.clone();
        let mut steps = Vec::new();
        loop {
            let deg = self.support_degree(&current)?;
            if deg.iter().all(|&e| e == 0) {
                let scalar = current
                    .as_vacuum_multiple()
                    .ok_or_else(|| Error::violation("degree zero but not a vacuum multiple"))?;
                return Ok(DegreeReduction { scalar, steps });
            }
            let q = deg.iter().position(|&e| e != 0).expect("nonzero degree") as i64;
            let op_sym = self.p().i(sup, phi.m - q - 1)?;
            let shift = phi.phi_symbol(&op_sym)?;
            let next = self
                .act_symbol(&op_sym, &current)?
                .sub(&current.scale(&shift));
            let new_deg = self
                .support_degree(&next)
                .map_err(|_| Error::violation("degree reduction produced zero or left M_0"))?;
            let mut expected = deg.clone();
            expected[q as usize] -= 1;
            if new_deg != expected {
                return Err(Error::violation(format!(
                    "degree did not drop by epsilon_{q}: {deg:?} -> {new_deg:?}"
                )));
            }
            steps.push(ReductionStep {
                operator: op_sym.to_string(),
                degree_before: deg,
                degree_after: new_deg,
            });
            current = next;
        }
    }

    /// The Whittaker-vector witness `I_{-1}^(i) v_phi` for a superscript
    /// with `phi(C_i) = 0` and `phi(I_{m-1}^(i)) = 0`. Verifies that every
    /// domain generator with index at most `2m+2` acts on it by its
    /// `phi`-scalar and that it is not a multiple of `v_phi`.
    pub fn reducibility_witness(&self, sup: u32) -> Result<PbwVector> {
        let phi = &self.phi;
        if !phi.index_set().contains(sup) {
            return Err(Error::precondition(format!(
                "superscript {sup} outside the ambient index set"
            )));
        }
        if !phi.phi_c(sup).is_zero() {
            return Err(Error::precondition(format!("phi(C_{sup}) must vanish")));
        }
        if !phi.phi_i(sup, phi.m - 1).is_zero() {
            return Err(Error::precondition(format!(
                "phi(I_{}^({sup})) must vanish",
                phi.m - 1
            )));
        }
        let witness = PbwVector::term(
            PbwMonomial::new(phi.m, vec![self.p().i(sup, -1)?])?,
            Scalar::one(),
        );
        if witness.as_vacuum_multiple().is_some() {
            return Err(Error::violation("witness degenerated to a vacuum multiple"));
        }
        for gen in phi.domain_generators(2 * phi.m + 2) {
            let got = self.act_symbol(&gen, &witness)?;
            let want = witness.scale(&phi.phi_symbol(&gen)?);
            if got != want {
                return Err(Error::violation(format!(
                    "witness fails the Whittaker property at {gen}: {got} vs {want}"
                )));
            }
        }
        Ok(witness)
    }

    /// Bounded breadth-first search applying `x - phi(x)` for domain
    /// generators `x` with index at most `budget.max_index`, reporting
    /// whether a nonzero multiple of `v_phi` is reached within
    /// `budget.depth` steps. A negative result is only a non-witness: the
    /// search is a falsifier, never a proof of irreducibility.
    pub fn reachability(&self, v: &PbwVector, budget: ReachabilityBudget) -> Result<Reachability> {
        if v.is_zero() {
            return Ok(Reachability::NotWithinBudget);
        }
        if v.as_vacuum_multiple().is_some() {
            return Ok(Reachability::Reached { steps: 0 });
        }
        let gens = self.phi.domain_generators(budget.max_index);
        let normalize_key = |w: &PbwVector| -> String {
            let lead = w.iter().next().map(|(_, c)| c.clone()).unwrap_or_else(Scalar::one);
            w.scale(&lead.inv().expect("nonzero leading coefficient")).to_string()
        };
        let mut seen: BTreeSet<String> = BTreeSet::new();
        seen.insert(normalize_key(v));
        let mut frontier: VecDeque<(PbwVector, usize)> = VecDeque::new();
        frontier.push_back((v.clone(), 0));
        while let Some((current, depth)) = frontier.pop_front() {
            if depth >= budget.depth {
                continue;
            }
            for gen in &gens {
                if gen.is_central() {
                    continue; // central operators act as scalars and x - phi(x) kills everything
                }
                let next = self
                    .act_symbol(gen, &current)?
                    .sub(&current.scale(&self.phi.phi_symbol(gen)?));
                if next.is_zero() {
                    continue;
                }
                if next.as_vacuum_multiple().is_some() {
                    return Ok(Reachability::Reached { steps: depth + 1 });
                }
                let key = normalize_key(&next);
                if seen.insert(key) {
                    frontier.push_back((next, depth + 1));
                }
            }
        }
        Ok(Reachability::NotWithinBudget)
    }

    /// `N(v)` such that every generator of degree `>= N(v)` annihilates
    /// `v`: the module is restricted.
    pub fn restriction_bound(&self, v: &PbwVector) -> i64 {
        let depth = v.iter().map(|(m, _)| m.negative_depth()).max().unwrap_or(0);
        2 * self.phi.m + 1 + depth
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReachabilityBudget {
    pub max_index: i64,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reachability {
    Reached { steps: usize },
    NotWithinBudget,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReductionStep {
    pub operator: String,
    pub degree_before: Vec<u64>,
    pub degree_after: Vec<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeReduction {
    pub scalar: Scalar,
    pub steps: Vec<ReductionStep>,
}

/// Virasoro criterion: `M_{V, phi}` is irreducible iff
/// `(phi(L_{2m-1}), phi(L_{2m})) != (0, 0)`.
pub fn virasoro_verdict(phi: &WhittakerFunction) -> Result<Verdict> {
    if phi.ambient != Ambient::Vir {
        return Err(Error::precondition("virasoro verdict requires the Vir ambient"));
    }
    let m = phi.m;
    if phi.phi_l(2 * m - 1).is_zero() && phi.phi_l(2 * m).is_zero() {
        Ok(Verdict::reducible(format!(
            "phi(L_{}) = phi(L_{}) = 0",
            2 * m - 1,
            2 * m
        )))
    } else {
        Ok(Verdict::Irreducible)
    }
}

/// Zero-level criterion on `g_I`: with `phi(C_i) = 0` for all `i in I`,
/// the universal module is irreducible iff `phi(I_{m-1}^(i)) != 0` for
/// every `i in I`. Reducible verdicts carry the Whittaker-vector witness.
pub fn zero_level_verdict(phi: &WhittakerFunction) -> Result<Verdict> {
    let iset = phi.index_set();
    if iset.is_empty() {
        return Err(Error::precondition(
            "zero-level verdict needs a nonempty Heisenberg index set; use the Virasoro verdict",
        ));
    }
    if !phi.is_zero_level() {
        return Err(Error::precondition("zero-level verdict requires phi(C_i) = 0 on I"));
    }
    let module = WhittakerModule::new(phi.clone());
    for i in iset.iter() {
        if phi.phi_i(i, phi.m - 1).is_zero() {
            let witness = module.reducibility_witness(i)?;
            return Ok(Verdict::reducible_with_vector(
                format!("I({i},-1)*v generates a proper submodule"),
                witness,
            ));
        }
    }
    Ok(Verdict::Irreducible)
}

/// Criterion on the full algebra. With `J = {i | phi(C_i) != 0}`:
/// when `J` is everything, irreducibility fails exactly on the pair
/// `(phi(L_{2m}), phi(L_{2m-1})) = (0, sum_i phi(I_{m-1}^(i)) phi(I_{m-1}^(p-i)) / (2 phi(C_i)))`;
/// otherwise the module is irreducible iff `phi(I_{m-1}^(i)) != 0` for
/// every `i` with `phi(C_i) = 0`.
pub fn main_verdict(phi: &WhittakerFunction) -> Result<Verdict> {
    if phi.ambient != Ambient::Full {
        return Err(Error::precondition("main verdict requires the full ambient"));
    }
    let p = phi.p();
    let m = phi.m();
    let all_nonzero = (1..p.get()).all(|i| !phi.phi_c(i).is_zero());
    if all_nonzero {
        let mut threshold = Scalar::zero();
        for i in 1..p.get() {
            let denom = (&Scalar::from_int(2) * &phi.phi_c(i)).inv()?;
            let prod = &phi.phi_i(i, m - 1) * &phi.phi_i(p.get() - i, m - 1);
            threshold = &threshold + &(&denom * &prod);
        }
        if phi.phi_l(2 * m).is_zero() && phi.phi_l(2 * m - 1) == threshold {
            Ok(Verdict::reducible(format!(
                "phi(L_{}) = 0 and phi(L_{}) hits the threshold {}",
                2 * m,
                2 * m - 1,
                threshold
            )))
        } else {
            Ok(Verdict::Irreducible)
        }
    } else {
        let module = WhittakerModule::new(phi.clone());
        for i in 1..p.get() {
            if phi.phi_c(i).is_zero() && phi.phi_i(i, m - 1).is_zero() {
                let witness = module.reducibility_witness(i)?;
                return Ok(Verdict::reducible_with_vector(
                    format!("I({i},-1)*v generates a proper submodule"),
                    witness,
                ));
            }
        }
        Ok(Verdict::Irreducible)
    }
}

/// Result of conjugating a Whittaker function by `eta_alpha = exp(ad alpha)`.
#[derive(Debug, Clone)]
pub struct EtaConjugation {
    pub phi_prime: WhittakerFunction,
    /// For each `n` in `[m, 2m]`, whether `phi'(L_n)` vanishes.
    pub l_vanishing: BTreeMap<i64, bool>,
}

/// Conjugates a zero-level Whittaker function: `phi'(x) = phi(eta_alpha(x))`.
/// `alpha` must be supported on `I(i, k)` with `-m <= k <= 0` and `i` in
/// the ambient index set, so that `eta_alpha` preserves `g^(m)` (checked
/// explicitly on the window).
pub fn eta_conjugate(phi: &WhittakerFunction, alpha: &LieElement) -> Result<EtaConjugation> {
    let p = phi.p();
    let m = phi.m();
    if alpha.p() != p {
        return Err(Error::ParameterMismatch(alpha.p().get(), p.get()));
    }
    if !phi.is_zero_level() {
        return Err(Error::precondition("eta conjugation requires zero level"));
    }
    let iset = phi.index_set();
    for (sym, _) in alpha.terms() {
        match *sym {
            BasisSymbol::I { sup, n } => {
                if !iset.contains(sup) {
                    return Err(Error::precondition(format!(
                        "alpha support {sym} outside the ambient index set"
                    )));
                }
                if n > 0 || n < -m {
                    return Err(Error::precondition(format!(
                        "alpha support {sym} outside [-m, 0]: eta would not preserve g^({m})"
                    )));
                }
            }
            _ => {
                return Err(Error::precondition(format!(
                    "alpha must be supported on I-symbols, found {sym}"
                )))
            }
        }
    }
    // Explicit preservation check on the window where it could fail.
    for n in m..=2 * m {
        let image = LieElement::exp_ad(alpha, &LieElement::from_symbol(p, p.l(n))?)?;
        if !is_member(&image, &SubalgebraSpec::Gm(m))? {
            return Err(Error::precondition(format!(
                "eta_alpha does not preserve g^({m}): image of L({n}) is {image}"
            )));
        }
    }
    let mut lvals = BTreeMap::new();
    for n in m..=2 * m {
        let image = LieElement::exp_ad(alpha, &LieElement::from_symbol(p, p.l(n))?)?;
        let value = phi.phi(&image)?;
        if !value.is_zero() {
            lvals.insert(n, value);
        }
    }
    // Values above the window provably vanish; certify on one extra band.
    for n in (2 * m + 1)..=(3 * m + 1) {
        let image = LieElement::exp_ad(alpha, &LieElement::from_symbol(p, p.l(n))?)?;
        let value = phi.phi(&image)?;
        if !value.is_zero() {
            return Err(Error::violation(format!(
                "conjugated phi'(L_{n}) = {value} escapes the vanishing window"
            )));
        }
    }
    let mut ivals = BTreeMap::new();
    for i in iset.iter() {
        for n in 0..m {
            let image =
                LieElement::exp_ad(alpha, &LieElement::from_symbol(p, p.i(i, n)?)?)?;
            let value = phi.phi(&image)?;
            if !value.is_zero() {
                ivals.insert((i, n), value);
            }
        }
    }
    let mut cvals = BTreeMap::new();
    let c0 = phi.phi_c(0);
    if !c0.is_zero() {
        cvals.insert(0, c0);
    }
    let phi_prime = WhittakerFunction::new(p, m, phi.ambient.clone(), lvals, ivals, cvals)?;
    let l_vanishing = (m..=2 * m)
        .map(|n| (n, phi_prime.phi_l(n).is_zero()))
        .collect();
    Ok(EtaConjugation { phi_prime, l_vanishing })
}

/// Solves for `alpha` such that the conjugated function vanishes on
/// `phi'(L_n)` for `n` in `[window.0, window.1]`, a subwindow of
/// `[m, 2m-1]`. For each superscript the system is triangular with
/// diagonal `phi(I_{m-1}^(i))`, hence solvable whenever those values are
/// nonzero. At zero level no choice of `alpha` preserving `g^(m)` can
/// change `phi(L_{2m})`, so `n = 2m` is never a valid target; the verdict
/// procedures consult `phi(L_{2m})` directly instead.
pub fn eta_solver(
    phi: &WhittakerFunction,
    window: Option<(i64, i64)>,
) -> Result<(LieElement, EtaConjugation)> {
    let p = phi.p();
    let m = phi.m();
    let (lo, hi) = window.unwrap_or((m, 2 * m - 1));
    if lo < m || hi > 2 * m - 1 || lo > hi {
        return Err(Error::precondition(format!(
            "target window [{lo}, {hi}] must sit inside [{m}, {}]",
            2 * m - 1
        )));
    }
    if !phi.is_zero_level() {
        return Err(Error::precondition("eta solver requires zero level"));
    }
    let iset = phi.index_set();
    if iset.is_empty() {
        return Err(Error::precondition("eta solver needs a nonempty index set"));
    }
    for i in iset.iter() {
        if phi.phi_i(i, m - 1).is_zero() {
            return Err(Error::precondition(format!(
                "singular system: diagonal phi(I_{}^({i})) = 0",
                m - 1
            )));
        }
    }
    let mut alpha = LieElement::zero(p);
    let size_inv = Scalar::from_int(iset.len() as i64).inv()?;
    for i in iset.iter() {
        // Back-substitute from n = hi down to n = lo; the unknown at step n
        // is a_{m-1-n}, with coefficient phi(I_{m-1}^(i)).
        let diag_inv = phi.phi_i(i, m - 1).inv()?;
        let mut solved: BTreeMap<i64, Scalar> = BTreeMap::new();
        for n in (lo..=hi).rev() {
            let mut acc = phi.phi_l(n);
            for (k, a) in &solved {
                acc = &acc - &(a * &phi.phi_i(i, n + k));
            }
            let a = &acc * &diag_inv;
            solved.insert(m - 1 - n, a);
        }
        // alpha = -(1/|I|) sum_k p a_{i,k} / (p k + i) I(i, k).
        for (k, a) in solved {
            let denom = Scalar::from_int(p.get() as i64 * k + i as i64);
            let coeff = -&(&(&(&Scalar::from_int(p.get() as i64) * &a) / &denom) * &size_inv);
            alpha = alpha.add(&LieElement::from_term(p, p.i(i, k)?, coeff)?)?;
        }
    }
    let conj = eta_conjugate(phi, &alpha)?;
    for n in lo..=hi {
        if !conj.phi_prime.phi_l(n).is_zero() {
            return Err(Error::violation(format!(
                "eta solver failed to zero phi'(L_{n})"
            )));
        }
    }
    Ok((alpha, conj))
}

/// The decomposition of a Whittaker function on the full algebra along
/// `J = {i | phi(C_i) != 0}`: the Heisenberg part `phi_h` on `h_J^+`, its
/// extension `phi^e` to `g^(m)`, and `psi = (phi - phi^e)` restricted to
/// `g_{J^C}^(m)`. The reassembly `phi = phi^e + psi` is checked on every
/// stored value.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub j_set: IndexSet,
    pub phi_h: HeisenbergWhittakerData,
    pub phi_e: WhittakerFunction,
    pub psi: WhittakerFunction,
}

pub fn decompose(phi: &WhittakerFunction) -> Result<Decomposition> {
    if phi.ambient != Ambient::Full {
        return Err(Error::precondition("decompose requires the full ambient"));
    }
    let p = phi.p();
    let m = phi.m();
    let j_set = IndexSet::new(p, (1..p.get()).filter(|&i| !phi.phi_c(i).is_zero()))?;
    let level: BTreeMap<u32, Scalar> = j_set.iter().map(|i| (i, phi.phi_c(i))).collect();
    let h_ivals: BTreeMap<(u32, i64), Scalar> = j_set
        .iter()
        .flat_map(|i| (0..m).map(move |n| ((i, n), phi.phi_i(i, n))))
        .filter(|(_, v)| !v.is_zero())
        .collect();
    let phi_h = HeisenbergWhittakerData::new(p, j_set.clone(), m, level, h_ivals.clone())?;
    let ext = phi_extension(&phi_h)?;

    let mut e_cvals: BTreeMap<u32, Scalar> = BTreeMap::new();
    e_cvals.insert(0, ext.c0.clone());
    for i in j_set.halves(p) {
        e_cvals.insert(i, phi.phi_c(i));
    }
    let phi_e = WhittakerFunction::new(
        p,
        m,
        Ambient::Full,
        ext.lvals.clone(),
        h_ivals,
        e_cvals,
    )?;

    let jc = j_set.complement(p);
    let psi_ambient = Ambient::gi(p, jc.clone())?;
    let psi_lvals: BTreeMap<i64, Scalar> = (m..=2 * m)
        .map(|n| (n, &phi.phi_l(n) - &phi_e.phi_l(n)))
        .filter(|(_, v)| !v.is_zero())
        .collect();
    let psi_ivals: BTreeMap<(u32, i64), Scalar> = jc
        .iter()
        .flat_map(|i| (0..m).map(move |n| ((i, n), phi.phi_i(i, n))))
        .filter(|(_, v)| !v.is_zero())
        .collect();
    let mut psi_cvals = BTreeMap::new();
    let psi_c0 = &phi.phi_c(0) - &ext.c0;
    if !psi_c0.is_zero() {
        psi_cvals.insert(0, psi_c0);
    }
    let psi = WhittakerFunction::new(p, m, psi_ambient, psi_lvals, psi_ivals, psi_cvals)?;

    // Reassembly check: phi = phi^e + psi-extension on all stored values.
    for n in m..=2 * m {
        let total = &phi_e.phi_l(n) + &psi.phi_l(n);
        if total != phi.phi_l(n) {
            return Err(Error::violation(format!("decomposition mismatch at L({n})")));
        }
    }
    for i in 1..p.get() {
        for n in 0..m {
            let e_part = phi_e.phi_i(i, n);
            let psi_part = if jc.contains(i) { psi.phi_i(i, n) } else { Scalar::zero() };
            if &e_part + &psi_part != phi.phi_i(i, n) {
                return Err(Error::violation(format!("decomposition mismatch at I({i},{n})")));
            }
        }
    }
    for j in 0..=p.half() {
        let e_part = phi_e.phi_c(j);
        let psi_part = psi.phi_c(j);
        if &e_part + &psi_part != phi.phi_c(j) {
            return Err(Error::violation(format!("decomposition mismatch at C({j})")));
        }
    }
    Ok(Decomposition { j_set, phi_h, phi_e, psi })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: u32) -> GapParameter {
        GapParameter::new(v).unwrap()
    }

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    /// p=2, m=1 Whittaker function on the full algebra.
    fn phi_p2(l1: i64, l2: i64, i0: i64, c1: i64) -> WhittakerFunction {
        let p2 = p(2);
        WhittakerFunction::new(
            p2,
            1,
            Ambient::Full,
            BTreeMap::from([(1, s(l1)), (2, s(l2))]),
            BTreeMap::from([((1, 0), s(i0))]),
            BTreeMap::from([(1, s(c1))]),
        )
        .unwrap()
    }

    #[test]
    fn strict_constructor_enforces_windows() {
        let p2 = p(2);
        assert!(WhittakerFunction::new(
            p2,
            1,
            Ambient::Full,
            BTreeMap::from([(3, s(1))]),
            BTreeMap::new(),
            BTreeMap::new(),
        )
        .is_err());
        assert!(WhittakerFunction::new(
            p2,
            1,
            Ambient::Full,
            BTreeMap::new(),
            BTreeMap::from([((1, 1), s(1))]),
            BTreeMap::new(),
        )
        .is_err());
    }

    #[test]
    fn validate_passes_on_good_data_and_cites_pairs_on_bad() {
        let phi = phi_p2(3, 5, 1, 0);
        assert!(phi.validate().is_empty());
        // phi(L_3) != 0 stored leniently: violation at [L_1, L_2].
        let bad = WhittakerFunction::candidate(
            p(2),
            1,
            Ambient::Full,
            BTreeMap::from([(3, s(1))]),
            BTreeMap::new(),
            BTreeMap::new(),
        )
        .unwrap();
        let violations = bad.validate();
        assert!(violations
            .iter()
            .any(|v| (v.x == "L(1)" && v.y == "L(2)") || (v.x == "L(2)" && v.y == "L(1)")));
        // phi(I_1^(1)) != 0 with m=1: violation at [L_1, I(1,0)].
        let bad = WhittakerFunction::candidate(
            p(2),
            1,
            Ambient::Full,
            BTreeMap::new(),
            BTreeMap::from([((1, 1), s(1))]),
            BTreeMap::new(),
        )
        .unwrap();
        let violations = bad.validate();
        assert!(violations
            .iter()
            .any(|v| (v.x == "L(1)" && v.y == "I(1,0)") || (v.x == "I(1,0)" && v.y == "L(1)")));
    }

    #[test]
    fn pbw_act_examples() {
        // p=2, m=1, phi(I_0) = 1: I(1,0) . (L_0 v) = L_0 v + 1/2 v.
        let phi = phi_p2(0, 0, 1, 0);
        let module = WhittakerModule::new(phi);
        let l0v = module.apply_word(&[p(2).l(0)]).unwrap();
        let got = module.act_symbol(&p(2).i(1, 0).unwrap(), &l0v).unwrap();
        let want = l0v.add(&PbwVector::vacuum().scale(&Scalar::from_ratio(1, 2)));
        assert_eq!(got, want);
        // L(m) . v = phi(L_m) v.
        let phi = phi_p2(7, 0, 1, 0);
        let module = WhittakerModule::new(phi);
        let got = module.act_symbol(&p(2).l(1), &PbwVector::vacuum()).unwrap();
        assert_eq!(got, PbwVector::vacuum().scale(&s(7)));
        // C(1) . (I(1,-1) v) = phi(C_1) I(1,-1) v.
        let phi = phi_p2(0, 0, 1, 4);
        let module = WhittakerModule::new(phi);
        let w = module.apply_word(&[p(2).i(1, -1).unwrap()]).unwrap();
        let got = module.act_symbol(&p(2).c(1).unwrap(), &w).unwrap();
        assert_eq!(got, w.scale(&s(4)));
    }

    #[test]
    fn pbw_representation_property_small() {
        let phi = phi_p2(3, 5, 2, 1);
        let module = WhittakerModule::new(phi);
        let p2 = p(2);
        let mut gens = Vec::new();
        for n in -2..=2 {
            gens.push(p2.l(n));
            gens.push(p2.i(1, n).unwrap());
        }
        let vectors = [
            PbwVector::vacuum(),
            module.apply_word(&[p2.l(0)]).unwrap(),
            module.apply_word(&[p2.i(1, -1).unwrap(), p2.l(-1)]).unwrap(),
        ];
        for x in &gens {
            for y in &gens {
                let ex = LieElement::from_symbol(p2, *x).unwrap();
                let ey = LieElement::from_symbol(p2, *y).unwrap();
                let br = ex.bracket(&ey).unwrap();
                for v in &vectors {
                    let lhs = module.act(&br, v).unwrap();
                    let rhs = module
                        .act(&ex, &module.act(&ey, v).unwrap())
                        .unwrap()
                        .sub(&module.act(&ey, &module.act(&ex, v).unwrap()).unwrap());
                    assert_eq!(lhs, rhs, "representation law failed at [{x}, {y}] on {v}");
                }
            }
        }
    }

    #[test]
    fn whittaker_property_of_vacuum() {
        let phi = phi_p2(3, 5, 2, 1);
        let module = WhittakerModule::new(phi.clone());
        for gen in phi.domain_generators(6) {
            let got = module.act_symbol(&gen, &PbwVector::vacuum()).unwrap();
            let want = PbwVector::vacuum().scale(&phi.phi_symbol(&gen).unwrap());
            assert_eq!(got, want, "vacuum not phi-eigen at {gen}");
        }
    }

    #[test]
    fn support_degree_examples() {
        // m = 2 examples.
        let p2 = p(2);
        let phi = WhittakerFunction::new(
            p2,
            2,
            Ambient::Full,
            BTreeMap::new(),
            BTreeMap::from([((1, 1), s(1))]),
            BTreeMap::new(),
        )
        .unwrap();
        let module = WhittakerModule::new(phi);
        let l0 = module.apply_word(&[p2.l(0)]).unwrap();
        assert_eq!(module.support_degree(&l0).unwrap(), vec![1, 0]);
        assert_eq!(
            module.support_degree(&PbwVector::vacuum()).unwrap(),
            vec![0, 0]
        );
        let v = module
            .apply_word(&[p2.l(1), p2.l(0)])
            .unwrap()
            .scale(&s(2))
            .add(&module.apply_word(&[p2.l(0)]).unwrap());
        assert_eq!(module.support_degree(&v).unwrap(), vec![1, 1]);
        // Outside the M_0 span.
        let bad = module.apply_word(&[p2.i(1, -1).unwrap()]).unwrap();
        assert!(module.support_degree(&bad).is_err());
    }

    #[test]
    fn degree_reduce_examples() {
        // p=2, m=1, phi(I_0)=1, zero level, phi(L)=0.
        let phi = phi_p2(0, 0, 1, 0);
        let module = WhittakerModule::new(phi);
        let p2 = p(2);
        // v = L_0 v: one step, scalar 1/2.
        let v = module.apply_word(&[p2.l(0)]).unwrap();
        let red = module.degree_reduce(&v).unwrap();
        assert_eq!(red.steps.len(), 1);
        assert_eq!(red.scalar, Scalar::from_ratio(1, 2));
        // v = v_phi: zero steps, scalar 1.
        let red = module.degree_reduce(&PbwVector::vacuum()).unwrap();
        assert!(red.steps.is_empty());
        assert_eq!(red.scalar, Scalar::one());
        // v = L_0^2 v: two steps; the hand-expanded scalar is 1/2.
        // (I_0 - 1) L_0^2 v = L_0 v + 1/4 v, then (I_0 - 1)(L_0 + 1/4) v = 1/2 v.
        let v = module.apply_word(&[p2.l(0), p2.l(0)]).unwrap();
        let red = module.degree_reduce(&v).unwrap();
        assert_eq!(red.steps.len(), 2);
        assert_eq!(red.scalar, Scalar::from_ratio(1, 2));
    }

    #[test]
    fn degree_reduce_preconditions() {
        // Nonzero phi(L) violates the hypothesis.
        let phi = phi_p2(3, 0, 1, 0);
        let module = WhittakerModule::new(phi);
        assert!(module.degree_reduce(&PbwVector::vacuum()).is_err());
        // Nonzero level violates it too.
        let phi = phi_p2(0, 0, 1, 2);
        let module = WhittakerModule::new(phi);
        assert!(module.degree_reduce(&PbwVector::vacuum()).is_err());
    }

    #[test]
    fn reducibility_witness_examples() {
        // p=2, m=1, phi(C_1) = 0, phi(I_0) = 0.
        let phi = phi_p2(2, 3, 0, 0);
        let module = WhittakerModule::new(phi);
        let w = module.reducibility_witness(1).unwrap();
        assert_eq!(w, module.apply_word(&[p(2).i(1, -1).unwrap()]).unwrap());
        // p=3, m=2, phi(C_1)=0, phi(I_1^(1))=0.
        let p3 = p(3);
        let phi = WhittakerFunction::new(
            p3,
            2,
            Ambient::Full,
            BTreeMap::from([(2, s(1))]),
            BTreeMap::from([((2, 1), s(1))]),
            BTreeMap::new(),
        )
        .unwrap();
        let module = WhittakerModule::new(phi);
        module.reducibility_witness(1).unwrap();
        // Violated precondition.
        let phi = phi_p2(0, 0, 1, 0);
        let module = WhittakerModule::new(phi);
        assert!(matches!(
            module.reducibility_witness(1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn virasoro_verdict_examples() {
        let p2 = p(2);
        let make = |m: i64, vals: &[(i64, i64)]| {
            WhittakerFunction::new(
                p2,
                m,
                Ambient::Vir,
                vals.iter().map(|&(n, v)| (n, s(v))).collect(),
                BTreeMap::new(),
                BTreeMap::new(),
            )
            .unwrap()
        };
        assert!(virasoro_verdict(&make(1, &[])).unwrap().is_reducible());
        assert!(virasoro_verdict(&make(1, &[(2, 1)])).unwrap().is_irreducible());
        assert!(virasoro_verdict(&make(3, &[(5, 2)])).unwrap().is_irreducible());
    }

    #[test]
    fn zero_level_verdict_examples() {
        let phi = phi_p2(0, 0, 1, 0);
        assert!(zero_level_verdict(&phi).unwrap().is_irreducible());
        let phi = phi_p2(0, 0, 0, 0);
        let verdict = zero_level_verdict(&phi).unwrap();
        assert!(verdict.is_reducible());
        assert!(verdict.witness_vector().is_some());
        // p=4, I={1,3}, m=2: phi(I_1^(1)) = 1 but phi(I_1^(3)) = 0.
        let p4 = p(4);
        let phi = WhittakerFunction::new(
            p4,
            2,
            Ambient::gi(p4, IndexSet::new(p4, [1, 3]).unwrap()).unwrap(),
            BTreeMap::new(),
            BTreeMap::from([((1, 1), s(1))]),
            BTreeMap::new(),
        )
        .unwrap();
        assert!(zero_level_verdict(&phi).unwrap().is_reducible());
    }

    #[test]
    fn main_verdict_examples() {
        // Threshold case: phi(C_1)=1, phi(I_0)=1, phi(L_2)=0, phi(L_1)=1/2.
        let p2 = p(2);
        let phi = WhittakerFunction::new(
            p2,
            1,
            Ambient::Full,
            BTreeMap::from([(1, Scalar::from_ratio(1, 2))]),
            BTreeMap::from([((1, 0), s(1))]),
            BTreeMap::from([(1, s(1))]),
        )
        .unwrap();
        assert!(main_verdict(&phi).unwrap().is_reducible());
        let phi = phi_p2(0, 1, 1, 1);
        assert!(main_verdict(&phi).unwrap().is_irreducible());
        let phi = phi_p2(0, 0, 7, 0);
        assert!(main_verdict(&phi).unwrap().is_irreducible());
    }

    #[test]
    fn eta_conjugate_examples() {
        // alpha = 0 is the identity.
        let phi = phi_p2(3, 0, 1, 0);
        let conj = eta_conjugate(&phi, &LieElement::zero(p(2))).unwrap();
        assert_eq!(conj.phi_prime, phi);
        // alpha = -6 I(1,0) leaves phi(L_1) alone: the I-shift lands on the
        // forced-zero window.
        let alpha = LieElement::from_term(p(2), p(2).i(1, 0).unwrap(), s(-6)).unwrap();
        let conj = eta_conjugate(&phi, &alpha).unwrap();
        assert_eq!(conj.phi_prime.phi_l(1), s(3));
        // alpha = (2x/beta) I(1,-1) zeroes phi'(L_1).
        let phi = phi_p2(3, 0, 2, 0); // x = 3, beta = 2
        let alpha =
            LieElement::from_term(p(2), p(2).i(1, -1).unwrap(), s(3)).unwrap(); // 2*3/2
        let conj = eta_conjugate(&phi, &alpha).unwrap();
        assert!(conj.phi_prime.phi_l(1).is_zero());
        assert_eq!(conj.phi_prime.phi_i(1, 0), s(2));
        assert_eq!(conj.l_vanishing.get(&1), Some(&true));
    }

    #[test]
    fn eta_solver_examples() {
        // One equation: alpha coefficient 2x/beta on I(1,-1).
        let phi = phi_p2(3, 0, 2, 0);
        let (alpha, conj) = eta_solver(&phi, None).unwrap();
        assert_eq!(alpha.coeff(&p(2).i(1, -1).unwrap()), s(3));
        assert!(conj.phi_prime.phi_l(1).is_zero());
        // Already zero on the window: alpha = 0 is admissible.
        let phi = phi_p2(0, 5, 2, 0);
        let (alpha, conj) = eta_solver(&phi, None).unwrap();
        assert!(alpha.is_zero());
        assert_eq!(conj.phi_prime.phi_l(2), s(5));
        // m=2 two-step back-substitution, verified by replay.
        let p2 = p(2);
        let phi = WhittakerFunction::new(
            p2,
            2,
            Ambient::Full,
            BTreeMap::from([(2, s(4)), (3, s(9))]),
            BTreeMap::from([((1, 1), s(1)), ((1, 0), s(5))]),
            BTreeMap::new(),
        )
        .unwrap();
        let (_, conj) = eta_solver(&phi, None).unwrap();
        assert!(conj.phi_prime.phi_l(2).is_zero());
        assert!(conj.phi_prime.phi_l(3).is_zero());
        assert_eq!(conj.phi_prime.phi_i(1, 1), s(1));
        assert_eq!(conj.phi_prime.phi_i(1, 0), s(5));
        // Singular diagonal.
        let phi = phi_p2(3, 0, 0, 0);
        assert!(matches!(eta_solver(&phi, None), Err(Error::Precondition(_))));
    }

    #[test]
    fn decompose_examples() {
        // p=2, m=1, phi(C_1)=2, phi(I_0)=4, phi(L_1)=9: phi^e(L_1)=4, psi(L_1)=5.
        let phi = phi_p2(9, 0, 4, 2);
        let d = decompose(&phi).unwrap();
        assert!(d.j_set.contains(1));
        assert_eq!(d.phi_e.phi_l(1), s(4));
        assert_eq!(d.psi.phi_l(1), s(5));
        assert_eq!(d.psi.ambient, Ambient::Vir);
        // All central values zero: J empty, psi = phi.
        let phi = phi_p2(9, 3, 4, 0);
        let d = decompose(&phi).unwrap();
        assert!(d.j_set.is_empty());
        assert_eq!(d.psi.phi_l(1), s(9));
        assert_eq!(d.psi.phi_l(2), s(3));
        assert!(d.phi_e.phi_l(1).is_zero());
        // Zero I-values: phi^e vanishes on L, psi keeps phi(L).
        let phi = phi_p2(9, 3, 0, 2);
        let d = decompose(&phi).unwrap();
        assert!(d.phi_e.phi_l(1).is_zero());
        assert_eq!(d.psi.phi_l(1), s(9));
    }

    #[test]
    fn reachability_examples() {
        // Witness vector is unreachable: every shifted operator kills it.
        let phi = phi_p2(0, 0, 0, 0);
        let module = WhittakerModule::new(phi);
        let w = module.apply_word(&[p(2).i(1, -1).unwrap()]).unwrap();
        let out = module
            .reachability(&w, ReachabilityBudget { max_index: 4, depth: 3 })
            .unwrap();
        assert_eq!(out, Reachability::NotWithinBudget);
        // L_0 v reaches the vacuum in one step at zero level.
        let phi = phi_p2(0, 0, 1, 0);
        let module = WhittakerModule::new(phi);
        let v = module.apply_word(&[p(2).l(0)]).unwrap();
        let out = module
            .reachability(&v, ReachabilityBudget { max_index: 3, depth: 2 })
            .unwrap();
        assert_eq!(out, Reachability::Reached { steps: 1 });
        // The vacuum itself: zero steps.
        let out = module
            .reachability(&PbwVector::vacuum(), ReachabilityBudget { max_index: 2, depth: 1 })
            .unwrap();
        assert_eq!(out, Reachability::Reached { steps: 0 });
    }

    #[test]
    fn restriction_bound_annihilates() {
        let phi = phi_p2(3, 5, 2, 1);
        let module = WhittakerModule::new(phi);
        let p2 = p(2);
        let vectors = [
            PbwVector::vacuum(),
            module.apply_word(&[p2.l(0)]).unwrap(),
            module.apply_word(&[p2.i(1, -2).unwrap(), p2.l(-1)]).unwrap(),
        ];
        for v in &vectors {
            let bound = module.restriction_bound(v);
            for n in bound..bound + 3 {
                assert!(module.act_symbol(&p2.l(n), v).unwrap().is_zero());
                assert!(module
                    .act_symbol(&p2.i(1, n).unwrap(), v)
                    .unwrap()
                    .is_zero());
            }
        }
    }

    #[test]
    fn json_roundtrip_matches_interface() {
        let raw = serde_json::json!({
            "p": 2, "m": 1, "ambient": "full",
            "L": {"1": "1/2", "2": "0"},
            "I": {"1": {"0": "1"}},
            "C": {"0": "0", "1": "1"}
        });
        let phi = WhittakerFunction::from_json(&raw).unwrap();
        assert_eq!(phi.phi_l(1), Scalar::from_ratio(1, 2));
        assert!(phi.phi_l(2).is_zero());
        assert_eq!(phi.phi_i(1, 0), s(1));
        assert_eq!(phi.phi_c(1), s(1));
        let back = WhittakerFunction::from_json(&phi.to_json()).unwrap();
        assert_eq!(back, phi);
        // Loader enforces the windows.
        let bad = serde_json::json!({
            "p": 2, "m": 1, "ambient": "full",
            "L": {"3": "1"}, "I": {}, "C": {}
        });
        assert!(WhittakerFunction::from_json(&bad).is_err());
    }
}
