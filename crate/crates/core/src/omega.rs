//! Rank-one `U(CL_0)`-free modules on the polynomial ring `C[t]`.
//!
//! For `lambda != 0` and `alpha = (alpha_0, ..., alpha_{p-1})` the module
//! `Omega(lambda, alpha)` acts by
//!
//! ```text
//! L_n . f(t)      = lambda^n (t + alpha_0 n) f(t + n)
//! I_n^(i) . f(t)  = alpha_i lambda^n f(t + n + i/p)
//! C_j . f(t)      = 0
//! ```
//!
//! `Omega` is irreducible iff `alpha != 0`; for `alpha = 0` the ideal `(t)`
//! is the unique irreducible submodule. `recover_params` reads `(lambda,
//! alpha)` back from any action oracle presenting such a module, and
//! `t_submodule_check` certifies the `(t)`-invariance on a finite window.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{display_coeff, BasisSymbol, GapParameter, LieElement};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::verdict::Verdict;

/// Element of `C[t]`, kept canonical: no zero coefficients stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct UniPoly {
    coeffs: BTreeMap<u64, Scalar>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly::default()
    }

    pub fn one() -> Self {
        UniPoly::term(0, Scalar::one())
    }

    pub fn var() -> Self {
        UniPoly::term(1, Scalar::one())
    }

    pub fn term(exp: u64, coeff: Scalar) -> Self {
        let mut coeffs = BTreeMap::new();
        if !coeff.is_zero() {
            coeffs.insert(exp, coeff);
        }
        UniPoly { coeffs }
    }

    pub fn monomial(exp: u64) -> Self {
        UniPoly::term(exp, Scalar::one())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<u64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn coeff(&self, exp: u64) -> Scalar {
        self.coeffs.get(&exp).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&u64, &Scalar)> {
        self.coeffs.iter()
    }

    fn insert(&mut self, exp: u64, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(exp).or_insert_with(Scalar::zero);
        *entry = &*entry + &coeff;
        if entry.is_zero() {
            self.coeffs.remove(&exp);
        }
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let mut out = self.clone();
        for (e, c) in &other.coeffs {
            out.insert(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        self.add(&other.scale(&-&Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> UniPoly {
        if c.is_zero() {
            return UniPoly::zero();
        }
        UniPoly {
            coeffs: self.coeffs.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        let mut out = UniPoly::zero();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &other.coeffs {
                out.insert(e1 + e2, c1 * c2);
            }
        }
        out
    }

    /// Exact substitution `t -> t + s` by binomial expansion.
    pub fn shift(&self, s: &Scalar) -> UniPoly {
        if s.is_zero() {
            return self.clone();
        }
        let mut out = UniPoly::zero();
        for (&e, c) in &self.coeffs {
            // (t + s)^e
            let mut binom = Scalar::one();
            let mut power = Scalar::one();
            // k runs over the exponent of t.
            let mut row = Vec::with_capacity(e as usize + 1);
            for k in (0..=e).rev() {
                row.push((k, &binom * &power));
                if k > 0 {
                    binom = &(&binom * &Scalar::from_int((k) as i64))
                        * &Scalar::from_int((e - k + 1) as i64).inv().expect("nonzero");
                    power = &power * s;
                }
            }
            for (k, b) in row {
                out.insert(k, c * &b);
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Object(
            self.coeffs
                .iter()
                .map(|(e, c)| (e.to_string(), serde_json::Value::String(c.to_string())))
                .collect(),
        )
    }

    pub fn from_json(value: &serde_json::Value) -> Result<UniPoly> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::invalid("unipoly json must be an object"))?;
        let mut out = UniPoly::zero();
        for (k, v) in obj {
            let exp: u64 = k.parse().map_err(|_| Error::invalid(format!("bad exponent {k}")))?;
            let c: Scalar = v
                .as_str()
                .ok_or_else(|| Error::invalid("coefficient must be a string"))?
                .parse()?;
            out.insert(exp, c);
        }
        Ok(out)
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Descending exponents, constant last.
        for (idx, (exp, c)) in self.coeffs.iter().rev().enumerate() {
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
            let mono = match exp {
                0 => String::new(),
                1 => "t".to_string(),
                e => format!("t^{e}"),
            };
            match (mag, mono.is_empty()) {
                (None, true) => write!(f, "1")?,
                (None, false) => write!(f, "{mono}")?,
                (Some(s), true) => write!(f, "{s}")?,
                (Some(s), false) => write!(f, "{s}*{mono}")?,
            }
        }
        Ok(())
    }
}

/// `Omega(lambda, alpha)` with `lambda != 0` and `alpha` of length `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaModule {
    p: GapParameter,
    lambda: Scalar,
    alpha: Vec<Scalar>,
}

impl OmegaModule {
    pub fn new(p: GapParameter, lambda: Scalar, alpha: Vec<Scalar>) -> Result<Self> {
        if lambda.is_zero() {
            return Err(Error::invalid("Omega requires lambda != 0"));
        }
        if alpha.len() != p.get() as usize {
            return Err(Error::invalid(format!(
                "alpha must have length p={}, got {}",
                p.get(),
                alpha.len()
            )));
        }
        Ok(OmegaModule { p, lambda, alpha })
    }

    pub fn p(&self) -> GapParameter {
        self.p
    }

    pub fn lambda(&self) -> &Scalar {
        &self.lambda
    }

    pub fn alpha(&self) -> &[Scalar] {
        &self.alpha
    }

    pub fn alpha_is_zero(&self) -> bool {
        self.alpha.iter().all(Scalar::is_zero)
    }

    /// The action of a basis symbol on `f`.
    pub fn act_symbol(&self, sym: &BasisSymbol, f: &UniPoly) -> Result<UniPoly> {
        sym.validate(self.p)?;
        Ok(match *sym {
            BasisSymbol::L(n) => {
                let shifted = f.shift(&Scalar::from_int(n));
                let prefactor =
                    UniPoly::var().add(&UniPoly::term(0, &self.alpha[0] * &Scalar::from_int(n)));
                prefactor.mul(&shifted).scale(&self.lambda.powi(n)?)
            }
            BasisSymbol::I { sup, n } => {
                let a = &self.alpha[sup as usize];
                if a.is_zero() {
                    return Ok(UniPoly::zero());
                }
                let offset = &Scalar::from_int(n) + &self.p.fraction(sup);
                f.shift(&offset).scale(&(a * &self.lambda.powi(n)?))
            }
            BasisSymbol::C(_) => UniPoly::zero(),
        })
    }

    pub fn act(&self, x: &LieElement, f: &UniPoly) -> Result<UniPoly> {
        if x.p() != self.p {
            return Err(Error::ParameterMismatch(x.p().get(), self.p.get()));
        }
        let mut out = UniPoly::zero();
        for (sym, c) in x.terms() {
            out = out.add(&self.act_symbol(sym, f)?.scale(c));
        }
        Ok(out)
    }

    /// Irreducible iff `alpha != 0`; otherwise `t Omega(lambda, 0)` is the
    /// unique irreducible submodule.
    pub fn verdict(&self) -> Verdict {
        if self.alpha_is_zero() {
            Verdict::reducible(format!(
                "t*Omega({}, 0) is the unique irreducible submodule",
                self.lambda
            ))
        } else {
            Verdict::Irreducible
        }
    }
}

/// Verification window for `recover_params`: the recovered parameters are
/// replayed against the oracle for generator indices `|n| <= n_check` and
/// monomials of degree `<= d_check`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoveryWindow {
    pub n_check: i64,
    pub d_check: u64,
}

impl Default for RecoveryWindow {
    fn default() -> Self {
        RecoveryWindow { n_check: 3, d_check: 4 }
    }
}

/// Reads `(lambda, alpha)` off an action oracle on `C[t]` that presents a
/// module free of rank 1 over `U(CL_0)` with `L_0` acting as
/// multiplication by `t`: `lambda` and `alpha_0` are the two coefficients
/// of `L_1 . 1`, and `alpha_i = I(i,0) . 1`. The recovered parameters are
/// then replayed against the oracle over the window; any mismatch is a
/// classification failure naming the violating pair.
pub fn recover_params<F>(p: GapParameter, oracle: F, window: RecoveryWindow) -> Result<OmegaModule>
where
    F: Fn(&BasisSymbol, &UniPoly) -> Result<UniPoly>,
{
    let one = UniPoly::one();
    let l1 = oracle(&p.l(1), &one)?;
    if l1.degree() != Some(1) {
        return Err(Error::Classification(format!(
            "L(1).1 must be linear in t, oracle returned {l1}"
        )));
    }
    let lambda = l1.coeff(1);
    if lambda.is_zero() {
        return Err(Error::Classification("L(1).1 has zero leading coefficient".into()));
    }
    let alpha0 = &l1.coeff(0) / &lambda;
    let mut alpha = vec![alpha0];
    for i in 1..p.get() {
        let v = oracle(&p.i(i, 0)?, &one)?;
        if v.degree().map_or(false, |d| d > 0) {
            return Err(Error::Classification(format!(
                "I({i},0).1 must be constant, oracle returned {v}"
            )));
        }
        alpha.push(v.coeff(0));
    }
    let candidate = OmegaModule::new(p, lambda, alpha)?;
    // Replay the full action over the verification window.
    let mut gens: Vec<BasisSymbol> = Vec::new();
    for n in -window.n_check..=window.n_check {
        gens.push(p.l(n));
        for i in 1..p.get() {
            gens.push(p.i(i, n)?);
        }
    }
    for j in 0..=p.half() {
        gens.push(p.c(j)?);
    }
    for d in 0..=window.d_check {
        let f = UniPoly::monomial(d);
        for sym in &gens {
            let got = oracle(sym, &f)?;
            let want = candidate.act_symbol(sym, &f)?;
            if got != want {
                return Err(Error::Classification(format!(
                    "oracle disagrees with Omega({}, ...) at {sym} on t^{d}: {got} vs {want}",
                    candidate.lambda
                )));
            }
        }
    }
    Ok(candidate)
}

/// Report of a `t Omega(lambda, 0)` invariance check.
#[derive(Debug, Clone, Serialize)]
pub struct TSubmoduleReport {
    pub generators_checked: usize,
    pub max_degree: u64,
    /// `L_0 . 1 = t`, so the constant polynomial generates vectors outside
    /// the ideal `(t)`: the vacuum is cyclic while `(t)` is proper.
    pub vacuum_escapes: bool,
}

/// Verifies that for `alpha = 0` the ideal `(t)` is invariant: `x.(t*f)`
/// has zero constant term for every generator with `|n| <= n_window` and
/// monomial `f` of degree `<= d_window`.
pub fn t_submodule_check(
    module: &OmegaModule,
    n_window: i64,
    d_window: u64,
) -> Result<TSubmoduleReport> {
    if !module.alpha_is_zero() {
        return Err(Error::precondition("t-submodule check requires alpha = 0"));
    }
    let p = module.p();
    let mut gens: Vec<BasisSymbol> = Vec::new();
    for n in -n_window..=n_window {
        gens.push(p.l(n));
        for i in 1..p.get() {
            gens.push(p.i(i, n)?);
        }
    }
    for j in 0..=p.half() {
        gens.push(p.c(j)?);
    }
    for d in 0..=d_window {
        // t * t^d
        let f = UniPoly::monomial(d + 1);
        for sym in &gens {
            let image = module.act_symbol(sym, &f)?;
            if !image.coeff(0).is_zero() {
                return Err(Error::violation(format!(
                    "t-submodule invariance failed: {sym} . t^{} = {image} has a constant term",
                    d + 1
                )));
            }
        }
    }
    // L_0 . 1 = t, and 1 itself is not in (t): the vacuum generates outside
    // the ideal.
    let l0_one = module.act_symbol(&p.l(0), &UniPoly::one())?;
    let vacuum_escapes = l0_one == UniPoly::var();
    Ok(TSubmoduleReport {
        generators_checked: gens.len(),
        max_degree: d_window + 1,
        vacuum_escapes,
    })
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

    fn omega_2_13() -> OmegaModule {
        OmegaModule::new(p(2), s(2), vec![s(1), s(3)]).unwrap()
    }

    #[test]
    fn action_examples() {
        // p=2, lambda=2, alpha=(1,3): L(1).1 = 2t + 2
        let m = omega_2_13();
        let got = m.act_symbol(&p(2).l(1), &UniPoly::one()).unwrap();
        assert_eq!(got, UniPoly::term(1, s(2)).add(&UniPoly::term(0, s(2))));
        // I(1,0).t = 3t + 3/2
        let got = m.act_symbol(&p(2).i(1, 0).unwrap(), &UniPoly::var()).unwrap();
        assert_eq!(
            got,
            UniPoly::term(1, s(3)).add(&UniPoly::term(0, Scalar::from_ratio(3, 2)))
        );
        // C(1).f = 0
        let f = UniPoly::monomial(4);
        assert!(m.act_symbol(&p(2).c(1).unwrap(), &f).unwrap().is_zero());
    }

    #[test]
    fn negative_indices_use_exact_inverse_powers() {
        let m = omega_2_13();
        // L(-1).1 = 2^{-1} (t - 1)
        let got = m.act_symbol(&p(2).l(-1), &UniPoly::one()).unwrap();
        assert_eq!(
            got,
            UniPoly::term(1, Scalar::from_ratio(1, 2))
                .add(&UniPoly::term(0, Scalar::from_ratio(-1, 2)))
        );
    }

    #[test]
    fn verdict_examples() {
        let p2 = p(2);
        let reducible = OmegaModule::new(p2, s(2), vec![s(0), s(0)]).unwrap();
        assert!(reducible.verdict().is_reducible());
        let irr = OmegaModule::new(p2, s(1), vec![s(0), s(1)]).unwrap();
        assert_eq!(irr.verdict(), Verdict::Irreducible);
        let irr = OmegaModule::new(p2, s(5), vec![s(3), s(0)]).unwrap();
        assert_eq!(irr.verdict(), Verdict::Irreducible);
        assert!(OmegaModule::new(p2, s(0), vec![s(1), s(1)]).is_err());
    }

    #[test]
    fn recover_roundtrip() {
        let m = omega_2_13();
        let got = recover_params(
            p(2),
            |sym, f| m.act_symbol(sym, f),
            RecoveryWindow::default(),
        )
        .unwrap();
        assert_eq!(got, m);
        let trivial = OmegaModule::new(p(2), s(1), vec![s(0), s(0)]).unwrap();
        let got = recover_params(
            p(2),
            |sym, f| trivial.act_symbol(sym, f),
            RecoveryWindow::default(),
        )
        .unwrap();
        assert_eq!(got, trivial);
    }

    #[test]
    fn recover_from_stated_values() {
        // L(1).1 = 3t + 6 and I(1,0).1 = 4 pin (lambda, alpha) = (3, (2, 4)).
        let expected = OmegaModule::new(p(2), s(3), vec![s(2), s(4)]).unwrap();
        let l1 = expected.act_symbol(&p(2).l(1), &UniPoly::one()).unwrap();
        assert_eq!(l1, UniPoly::term(1, s(3)).add(&UniPoly::term(0, s(6))));
        let i0 = expected
            .act_symbol(&p(2).i(1, 0).unwrap(), &UniPoly::one())
            .unwrap();
        assert_eq!(i0, UniPoly::term(0, s(4)));
        let got = recover_params(
            p(2),
            |sym, f| expected.act_symbol(sym, f),
            RecoveryWindow::default(),
        )
        .unwrap();
        assert_eq!(got, expected);
    }

    #[test]
    fn recover_rejects_inconsistent_oracle() {
        // An oracle that garbles I(1,1) while matching on the recovery reads.
        let m = omega_2_13();
        let err = recover_params(
            p(2),
            |sym, f| {
                if *sym == p(2).i(1, 1).unwrap() {
                    Ok(UniPoly::one())
                } else {
                    m.act_symbol(sym, f)
                }
            },
            RecoveryWindow::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Classification(_)));
    }

    #[test]
    fn t_submodule_invariance() {
        let m = OmegaModule::new(p(2), s(1), vec![s(0), s(0)]).unwrap();
        let report = t_submodule_check(&m, 5, 6).unwrap();
        assert!(report.vacuum_escapes);
        let m = OmegaModule::new(p(3), s(2), vec![s(0), s(0), s(0)]).unwrap();
        t_submodule_check(&m, 4, 4).unwrap();
        // L(-1).t = t^2 - t stays in (t) with zero constant term.
        let m = OmegaModule::new(p(2), s(1), vec![s(0), s(0)]).unwrap();
        let got = m.act_symbol(&p(2).l(-1), &UniPoly::var()).unwrap();
        assert_eq!(got, UniPoly::monomial(2).add(&UniPoly::term(1, s(-1))));
        assert!(got.coeff(0).is_zero());
        // Precondition: alpha must vanish.
        assert!(t_submodule_check(&omega_2_13(), 2, 2).is_err());
    }

    #[test]
    fn representation_property_smoke() {
        // action([x,y], f) = action(x, action(y,f)) - action(y, action(x,f))
        let m = omega_2_13();
        let p2 = p(2);
        let mut gens = vec![];
        for n in -2..=2 {
            gens.push(LieElement::from_symbol(p2, p2.l(n)).unwrap());
            gens.push(LieElement::from_symbol(p2, p2.i(1, n).unwrap()).unwrap());
        }
        let f = UniPoly::monomial(2);
        for x in &gens {
            for y in &gens {
                let lhs = m.act(&x.bracket(y).unwrap(), &f).unwrap();
                let rhs = m
                    .act(x, &m.act(y, &f).unwrap())
                    .unwrap()
                    .sub(&m.act(y, &m.act(x, &f).unwrap()).unwrap());
                assert_eq!(lhs, rhs, "bracket action mismatch at [{x}, {y}]");
            }
        }
    }
}
