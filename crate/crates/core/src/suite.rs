//! The property and acceptance suite.
//!
//! Each check is a standalone function taking explicit window parameters,
//! so the CLI profiles and the acceptance tests share one implementation.
//! The `quick` profile shrinks windows for CI; `full` runs the windows the
//! checks are specified at. All sampling is seeded and deterministic.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{BasisSymbol, GapParameter, GradedDegree, LieElement};
use crate::error::{Error, Result};
use crate::fock::{FockModule, FockMonomial, FockPoly, FockVar, HeisenbergWhittakerData};
use crate::omega::{recover_params, t_submodule_check, OmegaModule, RecoveryWindow, UniPoly};
use crate::scalar::Scalar;
use crate::subalgebra::IndexSet;
use crate::tensor::{fingerprints_match, FockTensor, OmegaTensor, TrivialModule};
use crate::twisted::{theta, theta_element, twisted_bracket, TwistedGenerator};
use crate::verdict::Verdict;
use crate::whittaker::{
    decompose, eta_solver, main_verdict, virasoro_verdict, zero_level_verdict, Ambient,
    PbwMonomial, PbwVector, WhittakerFunction, WhittakerModule,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Quick,
    Full,
}

impl Profile {
    pub fn parse(s: &str) -> Result<Profile> {
        match s {
            "quick" => Ok(Profile::Quick),
            "full" => Ok(Profile::Full),
            other => Err(Error::invalid(format!("unknown profile {other}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Profile::Quick => "quick",
            Profile::Full => "full",
        }
    }
}

/// Window parameters for one suite run.
#[derive(Debug, Clone)]
pub struct SuiteParams {
    pub lie_ps: Vec<u32>,
    pub lie_window: i64,
    pub fock_ps: Vec<u32>,
    pub fock_window: i64,
    pub fock_degree: u32,
    pub vacuum_samples: usize,
    pub verdict_grid: usize,
    pub reduce_weight: i64,
    pub eta_samples: usize,
    pub decomposition_samples: usize,
    pub omega_samples: usize,
    pub omega_window: i64,
    pub omega_degree: u64,
    pub omega_grid: usize,
    pub t_submodule_window: i64,
    pub t_submodule_degree: u64,
    pub extract_instances: usize,
    pub fingerprint_tuples: usize,
    pub theta_ps: Vec<u32>,
    pub theta_window: i64,
}

impl SuiteParams {
    pub fn quick() -> Self {
        SuiteParams {
            lie_ps: vec![2, 3],
            lie_window: 3,
            fock_ps: vec![2, 3],
            fock_window: 2,
            fock_degree: 2,
            vacuum_samples: 4,
            verdict_grid: 20,
            reduce_weight: 3,
            eta_samples: 10,
            decomposition_samples: 10,
            omega_samples: 2,
            omega_window: 3,
            omega_degree: 3,
            omega_grid: 12,
            t_submodule_window: 3,
            t_submodule_degree: 3,
            extract_instances: 8,
            fingerprint_tuples: 8,
            theta_ps: vec![2, 3],
            theta_window: 3,
        }
    }

    pub fn full() -> Self {
        SuiteParams {
            lie_ps: vec![2, 3, 5],
            lie_window: 6,
            fock_ps: vec![2, 3, 4],
            fock_window: 3,
            fock_degree: 3,
            vacuum_samples: 4,
            verdict_grid: 20,
            reduce_weight: 4,
            eta_samples: 10,
            decomposition_samples: 10,
            omega_samples: 3,
            omega_window: 5,
            omega_degree: 5,
            omega_grid: 12,
            t_submodule_window: 5,
            t_submodule_degree: 6,
            extract_instances: 8,
            fingerprint_tuples: 8,
            theta_ps: vec![2, 3],
            theta_window: 4,
        }
    }

    pub fn for_profile(profile: Profile) -> Self {
        match profile {
            Profile::Quick => SuiteParams::quick(),
            Profile::Full => SuiteParams::full(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteItem {
    pub id: String,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub profile: String,
    pub seed: u64,
    pub all_passed: bool,
    pub items: Vec<SuiteItem>,
}

/// Deterministic sampler for scalar parameters.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// A small rational, occasionally with an imaginary part.
    pub fn scalar(&mut self) -> Scalar {
        let numer = self.rng.gen_range(-4i64..=4);
        let denom = [1i64, 1, 1, 2, 3][self.rng.gen_range(0..5)];
        let re = Scalar::from_ratio(numer, denom);
        if self.rng.gen_range(0..6) == 0 {
            let im = Scalar::from_ratio(self.rng.gen_range(-2i64..=2), 1);
            &re + &(&im * &Scalar::i())
        } else {
            re
        }
    }

    pub fn nonzero_scalar(&mut self) -> Scalar {
        loop {
            let s = self.scalar();
            if !s.is_zero() {
                return s;
            }
        }
    }

    pub fn bool(&mut self) -> bool {
        self.rng.gen_bool(0.5)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }
}

fn symbols_in_window(p: GapParameter, window: i64) -> Vec<BasisSymbol> {
    let mut out = Vec::new();
    for n in -window..=window {
        out.push(p.l(n));
        for i in 1..p.get() {
            out.push(p.i(i, n).expect("valid superscript"));
        }
    }
    for j in 0..=p.half() {
        out.push(p.c(j).expect("valid central index"));
    }
    out
}

/// Criterion 1: antisymmetry and the Jacobi identity over all basis
/// triples in the window, plus grading and centrality along the way.
pub fn check_lie_soundness(ps: &[u32], window: i64) -> Result<String> {
    let mut total = 0usize;
    for &pv in ps {
        let p = GapParameter::new(pv)?;
        let symbols = symbols_in_window(p, window);
        let elements: Vec<LieElement> = symbols
            .iter()
            .map(|s| LieElement::from_symbol(p, *s).expect("valid symbol"))
            .collect();
        let n = elements.len();
        // Pairwise brackets, checked for antisymmetry, grading and
        // centrality.
        let mut pair = vec![vec![LieElement::zero(p); n]; n];
        for a in 0..n {
            for b in 0..n {
                pair[a][b] = elements[a].bracket(&elements[b])?;
            }
        }
        for a in 0..n {
            for b in 0..n {
                if !pair[a][b].add(&pair[b][a])?.is_zero() {
                    return Err(Error::violation(format!(
                        "antisymmetry fails at [{}, {}] for p={pv}",
                        symbols[a], symbols[b]
                    )));
                }
                if !pair[a][b].is_zero() {
                    let expected = symbols[a].degree() + symbols[b].degree();
                    match pair[a][b].graded_degree()? {
                        GradedDegree::Homogeneous(d) if d == expected => {}
                        other => {
                            return Err(Error::violation(format!(
                                "grading fails at [{}, {}]: {other:?} for p={pv}",
                                symbols[a], symbols[b]
                            )))
                        }
                    }
                }
                if symbols[a].is_central() && !pair[a][b].is_zero() {
                    return Err(Error::violation(format!(
                        "centrality fails at [{}, {}] for p={pv}",
                        symbols[a], symbols[b]
                    )));
                }
            }
        }
        // Jacobi over all triples, parallel over the first index.
        let counts: Result<Vec<usize>> = (0..n)
            .into_par_iter()
            .map(|a| {
                let mut count = 0usize;
                for b in 0..n {
                    for c in 0..n {
                        let t1 = pair[a][b].bracket(&elements[c])?;
                        let t2 = pair[b][c].bracket(&elements[a])?;
                        let t3 = pair[c][a].bracket(&elements[b])?;
                        if !t1.add(&t2)?.add(&t3)?.is_zero() {
                            return Err(Error::violation(format!(
                                "Jacobi fails at ({}, {}, {}) for p={pv}",
                                symbols[a], symbols[b], symbols[c]
                            )));
                        }
                        count += 3;
                    }
                }
                Ok(count)
            })
            .collect();
        total += counts?.iter().sum::<usize>() + n * n;
    }
    Ok(format!("{total} bracket evaluations across p in {ps:?}"))
}

fn index_set_choices(p: GapParameter) -> Vec<IndexSet> {
    let mut out = vec![IndexSet::full(p)];
    if p.get() == 4 {
        out.push(IndexSet::new(p, [1, 3]).expect("symmetric"));
        out.push(IndexSet::new(p, [2]).expect("symmetric"));
    }
    out
}

fn sample_heisenberg_data(
    p: GapParameter,
    iset: &IndexSet,
    m: i64,
    sampler: &mut Sampler,
) -> Result<HeisenbergWhittakerData> {
    let mut level = BTreeMap::new();
    for i in iset.halves(p) {
        let l = sampler.nonzero_scalar();
        level.insert(i, l.clone());
        level.insert(p.get() - i, l);
    }
    let mut ivals = BTreeMap::new();
    for i in iset.iter() {
        for k in 0..m {
            let v = sampler.scalar();
            if !v.is_zero() {
                ivals.insert((i, k), v);
            }
        }
    }
    HeisenbergWhittakerData::new(p, iset.clone(), m, level, ivals)
}

fn fock_monomials(iset: &IndexSet, max_first_index: u32, max_degree: u32) -> Vec<FockMonomial> {
    let vars: Vec<FockVar> = iset
        .iter()
        .flat_map(|i| (1..=max_first_index).map(move |n| FockVar { n, sup: i }))
        .collect();
    let mut out = vec![FockMonomial::one()];
    for _ in 0..max_degree {
        let mut next = Vec::new();
        for mono in out.iter() {
            for v in &vars {
                let candidate = mono.mul_var(*v, 1);
                if !out.contains(&candidate) && !next.contains(&candidate) {
                    next.push(candidate);
                }
            }
        }
        out.extend(next);
    }
    out
}

/// Criterion 2a: the defining relations hold exactly as operator
/// identities on the free-field module, and `C_0` acts as `|I|`.
pub fn check_free_field_relations(
    ps: &[u32],
    window: i64,
    degree: u32,
    seed: u64,
) -> Result<String> {
    let mut checked = 0usize;
    for &pv in ps {
        let p = GapParameter::new(pv)?;
        for iset in index_set_choices(p) {
            let mut sampler = Sampler::new(seed ^ ((pv as u64) << 8) ^ iset.len() as u64);
            let data = sample_heisenberg_data(p, &iset, 1, &mut sampler)?;
            let module = FockModule::new(data)?;
            let monomials = fock_monomials(&iset, 2, degree);
            let gens = symbols_in_window(p, window);
            // C_0 acts as |I|.
            for mono in monomials.iter().take(3) {
                let f = FockPoly::term(mono.clone(), Scalar::one());
                let got = module.act_symbol(&p.c(0)?, &f)?;
                if got != f.scale(&Scalar::from_int(iset.len() as i64)) {
                    return Err(Error::violation(format!(
                        "C_0 does not act as |I| on {mono} (p={pv}, I={iset})"
                    )));
                }
            }
            let pairs: Vec<(usize, usize)> = (0..gens.len())
                .flat_map(|a| (a..gens.len()).map(move |b| (a, b)))
                .collect();
            let counts: Result<Vec<usize>> = pairs
                .par_iter()
                .map(|&(a, b)| {
                    let x = LieElement::from_symbol(p, gens[a]).expect("valid");
                    let y = LieElement::from_symbol(p, gens[b]).expect("valid");
                    let br = x.bracket(&y)?;
                    let mut count = 0usize;
                    for mono in &monomials {
                        let f = FockPoly::term(mono.clone(), Scalar::one());
                        let lhs = module.act(&br, &f)?;
                        let rhs = module
                            .act(&x, &module.act(&y, &f)?)?
                            .sub(&module.act(&y, &module.act(&x, &f)?)?);
                        if lhs != rhs {
                            return Err(Error::violation(format!(
                                "free-field relation fails at [{}, {}] on {mono} (p={pv}, I={iset})",
                                gens[a], gens[b]
                            )));
                        }
                        count += 1;
                    }
                    Ok(count)
                })
                .collect();
            checked += counts?.iter().sum::<usize>();
        }
    }
    Ok(format!("{checked} operator identities verified"))
}

/// Criterion 2b: the Fock vacuum is a Whittaker vector of type `phi^e`.
pub fn check_fock_vacuum(ps: &[u32], samples: usize, seed: u64) -> Result<String> {
    let mut sampler = Sampler::new(seed);
    let mut checked = 0usize;
    let mut sampled = 0usize;
    while sampled < samples {
        for &pv in ps {
            for m in [1i64, 2] {
                let p = GapParameter::new(pv)?;
                let choices = index_set_choices(p);
                let iset = choices[sampler.index(choices.len())].clone();
                let data = sample_heisenberg_data(p, &iset, m, &mut sampler)?;
                let module = FockModule::new(data)?;
                let one = FockPoly::one();
                for n in m..=(2 * m + 3) {
                    let got = module.act_symbol(&p.l(n), &one)?;
                    let want = one.scale(&module.phi_e_symbol(&p.l(n))?.expect("in domain"));
                    if got != want {
                        return Err(Error::violation(format!(
                            "vacuum not phi^e-eigen at L({n}) (p={pv}, m={m})"
                        )));
                    }
                    checked += 1;
                }
                for i in 1..p.get() {
                    for n in 0..=(2 * m + 3) {
                        let sym = p.i(i, n)?;
                        let got = module.act_symbol(&sym, &one)?;
                        let want = one.scale(&module.phi_e_symbol(&sym)?.expect("in domain"));
                        if got != want {
                            return Err(Error::violation(format!(
                                "vacuum not phi^e-eigen at {sym} (p={pv}, m={m})"
                            )));
                        }
                        checked += 1;
                    }
                }
                sampled += 1;
            }
        }
    }
    Ok(format!(
        "{checked} generator checks over {sampled} sampled Whittaker functions"
    ))
}

fn m0_vectors(m: i64, max_weight: i64, sampler: &mut Sampler) -> Vec<PbwVector> {
    // All exponent tuples (e_0, ..., e_{m-1}) with sum e_k (m - k) <= W.
    let mut tuples: Vec<Vec<u64>> = vec![vec![]];
    for _ in 0..m {
        let mut next = Vec::new();
        for t in &tuples {
            for e in 0..=(max_weight as u64) {
                let mut t2 = t.clone();
                t2.push(e);
                next.push(t2);
            }
        }
        tuples = next;
    }
    let weight = |t: &[u64]| -> i64 {
        t.iter()
            .enumerate()
            .map(|(k, &e)| e as i64 * (m - k as i64))
            .sum()
    };
    tuples.retain(|t| weight(t) <= max_weight);
    let mut out = Vec::new();
    for t in &tuples {
        let mut factors = Vec::new();
        // Sorted: higher indices first.
        for k in (0..m).rev() {
            for _ in 0..t[k as usize] {
                factors.push(BasisSymbol::L(k));
            }
        }
        out.push(PbwVector::term(
            PbwMonomial::new(m, factors).expect("sorted"),
            Scalar::one(),
        ));
    }
    // A few random combinations of the basis vectors.
    let basis = out.clone();
    for _ in 0..3 {
        let a = &basis[sampler.index(basis.len())];
        let b = &basis[sampler.index(basis.len())];
        let combo = a
            .scale(&sampler.nonzero_scalar())
            .add(&b.scale(&sampler.scalar()));
        if !combo.is_zero() {
            out.push(combo);
        }
    }
    out
}

fn recheck_witness(phi: &WhittakerFunction, verdict: &Verdict) -> Result<()> {
    let Some(witness) = verdict.witness_vector() else {
        return Ok(());
    };
    let module = WhittakerModule::new(phi.clone());
    if witness.as_vacuum_multiple().is_some() {
        return Err(Error::violation("witness is a vacuum multiple"));
    }
    for gen in phi.domain_generators(2 * phi.m() + 2) {
        let got = module.act_symbol(&gen, witness)?;
        let want = witness.scale(&phi.phi_symbol(&gen)?);
        if got != want {
            return Err(Error::violation(format!(
                "witness fails the Whittaker property at {gen}"
            )));
        }
    }
    Ok(())
}

/// Criterion 3: verdict/witness coherence over sampled grids for the
/// Virasoro, Heisenberg, zero-level and full-algebra criteria.
pub fn check_verdict_coherence(grid: usize, reduce_weight: i64, seed: u64) -> Result<String> {
    let mut sampler = Sampler::new(seed);
    let mut reducible_seen = 0usize;
    let mut irreducible_seen = 0usize;
    let mut reductions = 0usize;

    // Case 1: Virasoro criterion.
    for k in 0..grid {
        let p = GapParameter::new(if k % 2 == 0 { 2 } else { 3 })?;
        let m = if k % 4 < 2 { 1 } else { 2 };
        let mut lvals = BTreeMap::new();
        for n in m..=2 * m {
            if sampler.bool() {
                lvals.insert(n, sampler.scalar());
            }
        }
        let phi =
            WhittakerFunction::new(p, m, Ambient::Vir, lvals, BTreeMap::new(), BTreeMap::new())?;
        let verdict = virasoro_verdict(&phi)?;
        let expected = !(phi.phi_l(2 * m - 1).is_zero() && phi.phi_l(2 * m).is_zero());
        if verdict.is_irreducible() != expected {
            return Err(Error::violation("Virasoro verdict disagrees with the pair test"));
        }
    }

    // Case 2: Heisenberg criterion.
    for k in 0..grid {
        let p = GapParameter::new(if k % 2 == 0 { 2 } else { 3 })?;
        let m = if k % 4 < 2 { 1 } else { 2 };
        let iset = IndexSet::full(p);
        let mut level = BTreeMap::new();
        let degenerate = k % 3 == 0;
        for i in iset.halves(p) {
            let l = if degenerate { Scalar::zero() } else { sampler.nonzero_scalar() };
            level.insert(i, l.clone());
            level.insert(p.get() - i, l);
        }
        let data = HeisenbergWhittakerData::new(p, iset.clone(), m, level, BTreeMap::new())?;
        let verdict = data.heisenberg_verdict();
        let expected = iset.iter().all(|i| !data.level(i).is_zero());
        if verdict.is_irreducible() != expected {
            return Err(Error::violation("Heisenberg verdict disagrees with the level test"));
        }
    }

    // Case 3: zero-level criterion with witness and degree-reduction
    // corroboration. The grid keeps phi(L_{2m}) = 0 so the eta-conjugated
    // function satisfies the reduction hypothesis.
    for k in 0..grid {
        let p = GapParameter::new(if k % 2 == 0 { 2 } else { 3 })?;
        let m = if k % 4 < 2 { 1 } else { 2 };
        let iset = IndexSet::full(p);
        let make_reducible = k % 3 == 0;
        let mut ivals = BTreeMap::new();
        for (pos, i) in iset.iter().enumerate() {
            for n in 0..m {
                let top = n == m - 1;
                let v = if top && make_reducible && pos == 0 {
                    Scalar::zero()
                } else if top {
                    sampler.nonzero_scalar()
                } else {
                    sampler.scalar()
                };
                if !v.is_zero() {
                    ivals.insert((i, n), v);
                }
            }
        }
        let mut lvals = BTreeMap::new();
        for n in m..2 * m {
            if sampler.bool() {
                lvals.insert(n, sampler.scalar());
            }
        }
        let phi = WhittakerFunction::new(p, m, Ambient::Full, lvals, ivals, BTreeMap::new())?;
        let verdict = zero_level_verdict(&phi)?;
        let expected = iset.iter().all(|i| !phi.phi_i(i, m - 1).is_zero());
        if verdict.is_irreducible() != expected {
            return Err(Error::violation("zero-level verdict disagrees with the criterion"));
        }
        match &verdict {
            Verdict::Reducible { .. } => {
                reducible_seen += 1;
                recheck_witness(&phi, &verdict)?;
            }
            Verdict::Irreducible => {
                irreducible_seen += 1;
                // Normalize phi(L) away, then reduce every M_0 vector.
                let (_, conj) = eta_solver(&phi, None)?;
                let module = WhittakerModule::new(conj.phi_prime.clone());
                for v in m0_vectors(m, reduce_weight, &mut sampler) {
                    let reduction = module.degree_reduce(&v)?;
                    if reduction.scalar.is_zero() {
                        return Err(Error::violation("degree reduction reached zero"));
                    }
                    for step in &reduction.steps {
                        if step.degree_after >= step.degree_before {
                            return Err(Error::violation("degree failed to strictly decrease"));
                        }
                    }
                    reductions += 1;
                }
            }
        }
    }

    // Case 4: the full-algebra criterion, mixing levels.
    for k in 0..grid {
        let p = GapParameter::new(if k % 2 == 0 { 2 } else { 3 })?;
        let m = if k % 4 < 2 { 1 } else { 2 };
        let mut cvals = BTreeMap::new();
        for j in 1..=p.half() {
            if sampler.bool() {
                cvals.insert(j, sampler.nonzero_scalar());
            }
        }
        let mut ivals = BTreeMap::new();
        for i in 1..p.get() {
            for n in 0..m {
                let v = if sampler.bool() { sampler.scalar() } else { Scalar::zero() };
                if !v.is_zero() {
                    ivals.insert((i, n), v);
                }
            }
        }
        let mut lvals = BTreeMap::new();
        for n in m..=2 * m {
            if sampler.bool() {
                lvals.insert(n, sampler.scalar());
            }
        }
        let phi = WhittakerFunction::new(p, m, Ambient::Full, lvals, ivals, cvals)?;
        let verdict = main_verdict(&phi)?;
        // Independent restatement of the criterion.
        let all_nonzero = (1..p.get()).all(|i| !phi.phi_c(i).is_zero());
        let expected = if all_nonzero {
            let mut threshold = Scalar::zero();
            for i in 1..p.get() {
                let denom = (&Scalar::from_int(2) * &phi.phi_c(i)).inv()?;
                threshold = &threshold
                    + &(&denom * &(&phi.phi_i(i, m - 1) * &phi.phi_i(p.get() - i, m - 1)));
            }
            !(phi.phi_l(2 * m).is_zero() && phi.phi_l(2 * m - 1) == threshold)
        } else {
            (1..p.get()).all(|i| !phi.phi_c(i).is_zero() || !phi.phi_i(i, m - 1).is_zero())
        };
        if verdict.is_irreducible() != expected {
            return Err(Error::violation("main verdict disagrees with the criterion"));
        }
        recheck_witness(&phi, &verdict)?;
        if verdict.is_reducible() {
            reducible_seen += 1;
        } else {
            irreducible_seen += 1;
        }
    }
    Ok(format!(
        "4 x {grid} verdicts ({irreducible_seen} irreducible, {reducible_seen} reducible), {reductions} degree reductions"
    ))
}

/// Criterion 4: eta-conjugation. The solver zeroes `phi'(L_n)` on
/// `[m, 2m-1]` exactly, I- and central values are unchanged, and
/// `exp(ad alpha)` preserves brackets on sampled pairs.
pub fn check_eta_conjugation(samples: usize, seed: u64) -> Result<String> {
    let mut sampler = Sampler::new(seed);
    let mut done = 0usize;
    let mut k = 0usize;
    while done < samples {
        let p = GapParameter::new(if k % 2 == 0 { 2 } else { 3 })?;
        let m = if k % 4 < 2 { 1 } else { 2 };
        k += 1;
        let iset = IndexSet::full(p);
        let mut ivals = BTreeMap::new();
        for i in iset.iter() {
            for n in 0..m {
                let v = if n == m - 1 { sampler.nonzero_scalar() } else { sampler.scalar() };
                if !v.is_zero() {
                    ivals.insert((i, n), v);
                }
            }
        }
        let mut lvals = BTreeMap::new();
        for n in m..=2 * m {
            lvals.insert(n, sampler.scalar());
        }
        let phi = WhittakerFunction::new(p, m, Ambient::Full, lvals, ivals, BTreeMap::new())?;
        let (alpha, conj) = eta_solver(&phi, None)?;
        for n in m..2 * m {
            if !conj.phi_prime.phi_l(n).is_zero() {
                return Err(Error::violation(format!("phi'(L_{n}) not zeroed")));
            }
        }
        if conj.phi_prime.phi_l(2 * m) != phi.phi_l(2 * m) {
            return Err(Error::violation(
                "phi'(L_{2m}) changed under conjugation at zero level",
            ));
        }
        for i in iset.iter() {
            for n in 0..m {
                if conj.phi_prime.phi_i(i, n) != phi.phi_i(i, n) {
                    return Err(Error::violation("I-values changed under conjugation"));
                }
            }
        }
        for j in 0..=p.half() {
            if conj.phi_prime.phi_c(j) != phi.phi_c(j) {
                return Err(Error::violation("central values changed under conjugation"));
            }
        }
        // Automorphism law for exp(ad alpha) on sampled pairs.
        let gens = symbols_in_window(p, 2 * m + 1);
        for _ in 0..12 {
            let x = LieElement::from_symbol(p, gens[sampler.index(gens.len())])?;
            let y = LieElement::from_symbol(p, gens[sampler.index(gens.len())])?;
            let lhs = LieElement::exp_ad(&alpha, &x.bracket(&y)?)?;
            let rhs =
                LieElement::exp_ad(&alpha, &x)?.bracket(&LieElement::exp_ad(&alpha, &y)?)?;
            if lhs != rhs {
                return Err(Error::violation(format!(
                    "exp(ad alpha) is not an automorphism at [{x}, {y}]"
                )));
            }
        }
        done += 1;
    }
    Ok(format!("{done} eta systems solved and replayed"))
}

/// Criterion 5: the decomposition along `J`. The tensor vector
/// `v_phi_h (x) v_psi` reproduces `phi` on every `g^(m)` generator in the
/// window.
pub fn check_decomposition(samples: usize, seed: u64) -> Result<String> {
    let mut sampler = Sampler::new(seed);
    let mut done = 0usize;
    let mut k = 0usize;
    let mut mixed = 0usize;
    while done < samples {
        let pv = [2u32, 3, 4][k % 3];
        let m = if k % 2 == 0 { 1 } else { 2 };
        k += 1;
        let p = GapParameter::new(pv)?;
        // Choose J directly, then build phi with nonzero C exactly on J.
        let j_choices: Vec<IndexSet> = match pv {
            4 => vec![
                IndexSet::new(p, [1, 3])?,
                IndexSet::new(p, [2])?,
                IndexSet::full(p),
            ],
            _ => vec![IndexSet::full(p)],
        };
        let j_set = j_choices[sampler.index(j_choices.len())].clone();
        if !j_set.is_empty() && j_set.len() < (pv - 1) as usize {
            mixed += 1;
        }
        let mut cvals = BTreeMap::new();
        for j in j_set.halves(p) {
            cvals.insert(j, sampler.nonzero_scalar());
        }
        if sampler.bool() {
            cvals.insert(0, sampler.scalar());
        }
        let mut ivals = BTreeMap::new();
        for i in 1..pv {
            for n in 0..m {
                let v = sampler.scalar();
                if !v.is_zero() {
                    ivals.insert((i, n), v);
                }
            }
        }
        let mut lvals = BTreeMap::new();
        for n in m..=2 * m {
            let v = sampler.scalar();
            if !v.is_zero() {
                lvals.insert(n, v);
            }
        }
        let phi = WhittakerFunction::new(p, m, Ambient::Full, lvals, ivals, cvals)?;
        let d = decompose(&phi)?;
        let left = FockModule::new(d.phi_h.clone())?;
        let right = WhittakerModule::new(d.psi.clone());
        let tensor = FockTensor::new(left, right)?;
        let vac = tensor.vacuum(&PbwVector::vacuum());
        for gen in phi.domain_generators(2 * m + 3) {
            let got = tensor.act(&LieElement::from_symbol(p, gen)?, &vac)?;
            let want = tensor.scale(&phi.phi_symbol(&gen)?, &vac);
            if got != want {
                return Err(Error::violation(format!(
                    "decomposition tensor vector fails at {gen} (p={pv}, m={m}, J={})",
                    d.j_set
                )));
            }
        }
        done += 1;
    }
    Ok(format!("{done} decompositions verified ({mixed} with proper mixed J)"))
}

/// Criterion 6: the Omega modules. Representation property on the stated
/// windows, parameter recovery roundtrips, the irreducibility verdict, and
/// the `t Omega` invariance.
pub fn check_omega(
    samples: usize,
    window: i64,
    degree: u64,
    grid: usize,
    t_window: i64,
    t_degree: u64,
    seed: u64,
) -> Result<String> {
    let mut sampler = Sampler::new(seed);
    let mut identities = 0usize;
    for k in 0..samples {
        let pv = if k % 2 == 0 { 2 } else { 3 };
        let p = GapParameter::new(pv)?;
        let lambda = sampler.nonzero_scalar();
        let alpha: Vec<Scalar> = (0..pv).map(|_| sampler.scalar()).collect();
        let module = OmegaModule::new(p, lambda, alpha)?;
        let gens = symbols_in_window(p, window);
        let pairs: Vec<(usize, usize)> = (0..gens.len())
            .flat_map(|a| (a..gens.len()).map(move |b| (a, b)))
            .collect();
        let counts: Result<Vec<usize>> = pairs
            .par_iter()
            .map(|&(a, b)| {
                let x = LieElement::from_symbol(p, gens[a]).expect("valid");
                let y = LieElement::from_symbol(p, gens[b]).expect("valid");
                let br = x.bracket(&y)?;
                let mut count = 0;
                for d in 0..=degree {
                    let f = UniPoly::monomial(d);
                    let lhs = module.act(&br, &f)?;
                    let rhs = module
                        .act(&x, &module.act(&y, &f)?)?
                        .sub(&module.act(&y, &module.act(&x, &f)?)?);
                    if lhs != rhs {
                        return Err(Error::violation(format!(
                            "Omega representation fails at [{}, {}] on t^{d}",
                            gens[a], gens[b]
                        )));
                    }
                    count += 1;
                }
                Ok(count)
            })
            .collect();
        identities += counts?.iter().sum::<usize>();
    }
    // Recovery and verdict grid.
    let mut recovered = 0usize;
    for k in 0..grid {
        let pv = if k % 2 == 0 { 2 } else { 3 };
        let p = GapParameter::new(pv)?;
        let lambda = sampler.nonzero_scalar();
        let alpha: Vec<Scalar> = (0..pv)
            .map(|i| {
                if k % 3 == 0 && i as usize != k % pv as usize {
                    Scalar::zero()
                } else {
                    sampler.scalar()
                }
            })
            .collect();
        let module = OmegaModule::new(p, lambda, alpha)?;
        let got =
            recover_params(p, |sym, f| module.act_symbol(sym, f), RecoveryWindow::default())?;
        if got != module {
            return Err(Error::violation("parameter recovery did not roundtrip"));
        }
        let verdict = module.verdict();
        if verdict.is_irreducible() == module.alpha_is_zero() {
            return Err(Error::violation("Omega verdict disagrees with alpha != 0"));
        }
        recovered += 1;
    }
    // t-submodule invariance for alpha = 0.
    for pv in [2u32, 3] {
        let p = GapParameter::new(pv)?;
        let lambda = sampler.nonzero_scalar();
        let module = OmegaModule::new(p, lambda, vec![Scalar::zero(); pv as usize])?;
        t_submodule_check(&module, t_window, t_degree)?;
    }
    Ok(format!("{identities} bracket identities, {recovered} recovery roundtrips"))
}

/// Criterion 7: tensor constructions. Extraction of the exact top
/// component with an explicit replay, fingerprint roundtrip and
/// separation, and central-charge additivity.
pub fn check_tensor_constructions(
    extract_instances: usize,
    fingerprint_tuples: usize,
    seed: u64,
) -> Result<String> {
    let mut sampler = Sampler::new(seed);
    let mut extracted = 0usize;
    for k in 0..extract_instances {
        let pv = if k % 2 == 0 { 2 } else { 3 };
        let p = GapParameter::new(pv)?;
        let lambda = sampler.nonzero_scalar();
        // Alternate between I-driven and L-driven extraction.
        let mut alpha: Vec<Scalar> = vec![Scalar::zero(); pv as usize];
        if k % 3 == 2 {
            alpha[0] = sampler.nonzero_scalar();
        } else {
            let sup = 1 + (k % (pv as usize - 1).max(1));
            alpha[sup] = sampler.nonzero_scalar();
            if sampler.bool() {
                alpha[0] = sampler.scalar();
            }
        }
        let omega = OmegaModule::new(p, lambda, alpha)?;
        let phi = WhittakerFunction::new(
            p,
            1,
            Ambient::Full,
            BTreeMap::from([(1, sampler.scalar())]),
            BTreeMap::from([((1, 0), sampler.nonzero_scalar())]),
            BTreeMap::from([(1, sampler.nonzero_scalar())]),
        )?;
        let right = WhittakerModule::new(phi);
        let tensor = OmegaTensor::new(omega, right.clone())?;
        let s = k % 4; // top exponent, s <= 3
        let mut w = tensor.pure(&UniPoly::monomial(s as u64), &PbwVector::vacuum());
        for e in 0..s {
            let filler = right.apply_word(&[p.l(0)])?.scale(&sampler.scalar());
            w = tensor.add(&w, &tensor.pure(&UniPoly::monomial(e as u64), &filler));
        }
        let (top, trace) = tensor.extract_top(&w)?;
        if top != tensor.pure(&UniPoly::one(), &PbwVector::vacuum()) {
            return Err(Error::violation("extracted top is not the literal top component"));
        }
        // Replay the trace as raw generator applications.
        let mut replayed = BTreeMap::new();
        for (idx, coeff) in trace.coefficients.iter().enumerate() {
            let gen = trace.generator(p, idx)?;
            let image = tensor.act(&LieElement::from_symbol(p, gen)?, &w)?;
            replayed = tensor.add(&replayed, &tensor.scale(coeff, &image));
        }
        if replayed != top {
            return Err(Error::violation("extraction trace replay disagrees"));
        }
        extracted += 1;
    }

    // Fingerprint grid: roundtrip and separation.
    let p = GapParameter::new(2)?;
    let phi = WhittakerFunction::new(
        p,
        1,
        Ambient::Full,
        BTreeMap::new(),
        BTreeMap::from([((1, 0), Scalar::from_int(1))]),
        BTreeMap::from([(1, Scalar::from_int(1))]),
    )?;
    let right = WhittakerModule::new(phi);
    let mut tuples = Vec::new();
    for k in 0..fingerprint_tuples {
        let lambda = Scalar::from_int(k as i64 % 3 + 1);
        let alpha = vec![
            Scalar::from_int((k as i64 % 4) - 1),
            Scalar::from_int(k as i64 / 2),
        ];
        tuples.push((lambda, alpha));
    }
    let mut prints = Vec::new();
    for (lambda, alpha) in &tuples {
        let tensor = OmegaTensor::new(
            OmegaModule::new(p, lambda.clone(), alpha.clone())?,
            right.clone(),
        )?;
        let fp = tensor.fingerprint(&PbwVector::vacuum())?;
        if fp != (lambda.clone(), alpha.clone()) {
            return Err(Error::violation("fingerprint did not roundtrip"));
        }
        prints.push(fp);
    }
    for a in 0..tuples.len() {
        for b in 0..tuples.len() {
            if (tuples[a] == tuples[b]) != fingerprints_match(&prints[a], &prints[b]) {
                return Err(Error::violation("fingerprint separation failed"));
            }
        }
    }

    // Central-charge additivity on Fock tensors.
    let mut charges = 0usize;
    for pv in [2u32, 4] {
        let p = GapParameter::new(pv)?;
        for iset in index_set_choices(p) {
            let data = sample_heisenberg_data(p, &iset, 1, &mut sampler)?;
            let left = FockModule::new(data)?;
            let c = sampler.scalar();
            let right_charge = &c - &Scalar::from_int(iset.len() as i64);
            let tensor = FockTensor::new(left, TrivialModule::new(p, right_charge))?;
            let v = tensor.vacuum(&Scalar::one());
            let got = tensor.act(&LieElement::from_symbol(p, p.c(0)?)?, &v)?;
            if got != tensor.scale(&c, &v) {
                return Err(Error::violation("central charge is not additive"));
            }
            charges += 1;
        }
    }
    Ok(format!(
        "{extracted} extractions replayed, {} fingerprints, {charges} charge checks",
        tuples.len()
    ))
}

/// Criterion 8: the theta correspondence preserves brackets on the stated
/// window, and the `L*_0` constant acts on Fock vacua.
pub fn check_theta(ps: &[u32], window: i64, seed: u64) -> Result<String> {
    let mut checked = 0usize;
    for &pv in ps {
        let p = GapParameter::new(pv)?;
        let mut gens = Vec::new();
        for m in -window..=window {
            gens.push(TwistedGenerator::N0(m));
            for i in 1..pv {
                gens.push(TwistedGenerator::Ni { sup: i, m });
            }
        }
        for j in 0..=p.half() {
            gens.push(TwistedGenerator::K(j));
        }
        for a in &gens {
            for b in &gens {
                let lhs = theta_element(p, &twisted_bracket(p, a, b)?)?;
                let xa = LieElement::from_symbol(p, theta(p, a)?)?;
                let xb = LieElement::from_symbol(p, theta(p, b)?)?;
                if lhs != xa.bracket(&xb)? {
                    return Err(Error::violation(format!(
                        "theta does not preserve the bracket at ({a}, {b}) for p={pv}"
                    )));
                }
                checked += 1;
            }
        }
    }
    // L*_0 constant on Fock vacua: with all phi(I) = 0 the vacuum is an
    // exact eigenvector of eigenvalue sum j(p-j)/(4p^2).
    let mut sampler = Sampler::new(seed);
    for pv in [2u32, 3, 4] {
        let p = GapParameter::new(pv)?;
        for iset in index_set_choices(p) {
            let mut level = BTreeMap::new();
            for i in iset.halves(p) {
                let l = sampler.nonzero_scalar();
                level.insert(i, l.clone());
                level.insert(pv - i, l);
            }
            let data = HeisenbergWhittakerData::new(p, iset.clone(), 1, level, BTreeMap::new())?;
            let module = FockModule::new(data)?;
            let mut want = Scalar::zero();
            for j in iset.iter() {
                want = &want
                    + &(&Scalar::from_int((j as i64) * ((pv - j) as i64))
                        / &Scalar::from_int(4 * pv as i64 * pv as i64));
            }
            let got = module.l_act(0, &FockPoly::one())?;
            if got != FockPoly::one().scale(&want) {
                return Err(Error::violation(format!(
                    "L*_0 constant mismatch for p={pv}, I={iset}"
                )));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} twisted pairs and vacuum constants verified"))
}

/// Runs the whole suite with the given profile and seed. Items run in
/// parallel and the report is sorted by item id.
pub fn run_suite(profile: Profile, seed: u64) -> SuiteReport {
    let params = SuiteParams::for_profile(profile);
    type Check = Box<dyn Fn() -> Result<String> + Send + Sync>;
    let items: Vec<(String, Check)> = vec![
        (
            "01-lie-soundness".into(),
            Box::new({
                let p = params.clone();
                move || check_lie_soundness(&p.lie_ps, p.lie_window)
            }),
        ),
        (
            "02-free-field-relations".into(),
            Box::new({
                let p = params.clone();
                move || check_free_field_relations(&p.fock_ps, p.fock_window, p.fock_degree, seed)
            }),
        ),
        (
            "03-fock-whittaker-vacuum".into(),
            Box::new({
                let p = params.clone();
                move || check_fock_vacuum(&p.fock_ps, p.vacuum_samples, seed ^ 0x11)
            }),
        ),
        (
            "04-verdict-witness-coherence".into(),
            Box::new({
                let p = params.clone();
                move || check_verdict_coherence(p.verdict_grid, p.reduce_weight, seed ^ 0x22)
            }),
        ),
        (
            "05-eta-conjugation".into(),
            Box::new({
                let p = params.clone();
                move || check_eta_conjugation(p.eta_samples, seed ^ 0x33)
            }),
        ),
        (
            "06-decomposition".into(),
            Box::new({
                let p = params.clone();
                move || check_decomposition(p.decomposition_samples, seed ^ 0x44)
            }),
        ),
        (
            "07-omega-modules".into(),
            Box::new({
                let p = params.clone();
                move || {
                    check_omega(
                        p.omega_samples,
                        p.omega_window,
                        p.omega_degree,
                        p.omega_grid,
                        p.t_submodule_window,
                        p.t_submodule_degree,
                        seed ^ 0x55,
                    )
                }
            }),
        ),
        (
            "08-tensor-constructions".into(),
            Box::new({
                let p = params.clone();
                move || {
                    check_tensor_constructions(
                        p.extract_instances,
                        p.fingerprint_tuples,
                        seed ^ 0x66,
                    )
                }
            }),
        ),
        (
            "09-theta-correspondence".into(),
            Box::new({
                let p = params.clone();
                move || check_theta(&p.theta_ps, p.theta_window, seed ^ 0x77)
            }),
        ),
    ];
    let mut results: Vec<SuiteItem> = items
        .par_iter()
        .map(|(id, check)| {
            let start = Instant::now();
            let outcome = check();
            let millis = start.elapsed().as_millis();
            match outcome {
                Ok(detail) => SuiteItem { id: id.clone(), passed: true, detail, millis },
                Err(e) => {
                    SuiteItem { id: id.clone(), passed: false, detail: e.to_string(), millis }
                }
            }
        })
        .collect();
    results.sort_by(|a, b| a.id.cmp(&b.id));
    SuiteReport {
        profile: profile.name().to_string(),
        seed,
        all_passed: results.iter().all(|i| i.passed),
        items: results,
    }
}

/// Reads the sampling seed from `GAPVIR_SEED`, defaulting to a fixed
/// constant.
pub fn seed_from_env() -> u64 {
    std::env::var("GAPVIR_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0x6761_7076)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let report = run_suite(Profile::Quick, 7);
        for item in &report.items {
            assert!(item.passed, "{}: {}", item.id, item.detail);
        }
        assert!(report.all_passed);
    }
}
