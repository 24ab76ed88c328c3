//! Ext and Tor, cocycle representatives, Yoneda powers, pushout extensions
//! and the vanishing/test procedures built on top of them.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exactla::{EchelonBasis, Mat};
use crate::gmod::{direct_sum, quotient, shift, unit, Module, ModuleError};
use crate::resol::{
    module_complexity, resolve, ComplexityEstimate, EstimateError, Resolution, DEFAULT_MAX_DEGREE,
    DEFAULT_STABILIZATION,
};

pub const DEFAULT_SEARCH_DEGREE: usize = 8;
pub const DEFAULT_SEARCH_BUDGET: usize = 200;
pub const DEFAULT_TAIL: usize = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum YonedaError {
    #[error("modules live over different algebras")]
    MixedAlgebras,
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("module has complexity estimate 0; nothing to reduce")]
    FiniteProjectiveDimension,
    #[error("complexity estimate of the module did not stabilize")]
    Unstabilized,
    #[error("the algebra is not Gorenstein")]
    NotGorenstein,
    #[error("no test modules supplied")]
    NoTests,
    #[error("test modules declare different complexities")]
    MixedDeclarations,
    #[error("{0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error(transparent)]
    Module(#[from] ModuleError),
}

fn same_algebra(m: &Module, n: &Module) -> Result<(), YonedaError> {
    if Arc::ptr_eq(m.algebra(), n.algebra()) {
        Ok(())
    } else {
        Err(YonedaError::MixedAlgebras)
    }
}

/// `dim Ext^i(M, N)` for `i = 0..=max_degree`.
pub fn ext_table(m: &Arc<Module>, n: &Arc<Module>, max_degree: usize) -> Result<Vec<usize>, YonedaError> {
    same_algebra(m, n)?;
    let res = resolve(m, max_degree + 1);
    let ranks: Vec<usize> = (1..=max_degree + 1).map(|i| res.hom_differential(i, n).rank()).collect();
    Ok((0..=max_degree)
        .map(|i| {
            let incoming = if i == 0 { 0 } else { ranks[i - 1] };
            res.betti()[i] * n.dim() - ranks[i] - incoming
        })
        .collect())
}

/// `dim Tor_i(M, N)` for `i = 0..=max_degree`.
pub fn tor_table(m: &Arc<Module>, n: &Arc<Module>, max_degree: usize) -> Result<Vec<usize>, YonedaError> {
    same_algebra(m, n)?;
    let res = resolve(m, max_degree + 1);
    let ranks: Vec<usize> = (1..=max_degree + 1).map(|i| res.tensor_differential(i, n).rank()).collect();
    Ok((0..=max_degree)
        .map(|i| {
            let outgoing = if i == 0 { 0 } else { ranks[i - 1] };
            res.betti()[i] * n.dim() - outgoing - ranks[i]
        })
        .collect())
}

/// A cocycle `F_t -> N` representing a homogeneous class of `Ext^t(M, N)`.
#[derive(Clone, Debug)]
pub struct ExtElement {
    resolution: Resolution,
    target: Arc<Module>,
    degree: usize,
    shift: i32,
    /// Image of each generator of `F_t` in `N`.
    images: Vec<Vec<u32>>,
}

impl ExtElement {
    pub fn new(resolution: Resolution, target: Arc<Module>, degree: usize, shift: i32, images: Vec<Vec<u32>>) -> Self {
        assert!(degree >= 1 && degree < resolution.max_degree());
        assert_eq!(images.len(), resolution.betti()[degree]);
        let e = Self {
            resolution,
            target,
            degree,
            shift,
            images,
        };
        assert!(e.is_cocycle(), "not a cocycle");
        e
    }

    pub fn zero(resolution: Resolution, target: Arc<Module>, degree: usize, shift: i32) -> Self {
        let images = vec![vec![0; target.dim()]; resolution.betti()[degree]];
        Self::new(resolution, target, degree, shift, images)
    }

    pub fn source(&self) -> &Arc<Module> {
        self.resolution.module()
    }
    pub fn target(&self) -> &Arc<Module> {
        &self.target
    }
    pub fn resolution(&self) -> &Resolution {
        &self.resolution
    }
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn shift(&self) -> i32 {
        self.shift
    }
    pub fn images(&self) -> &[Vec<u32>] {
        &self.images
    }

    /// Coordinates in `Hom(F_t, N) = N^{beta_t}`.
    pub fn vector(&self) -> Vec<u32> {
        self.images.concat()
    }

    /// Realized matrix `F_t -> N`.
    pub fn map_matrix(&self) -> Mat {
        self.target.free_map_matrix(&self.images)
    }

    pub fn is_cocycle(&self) -> bool {
        let delta = self.resolution.hom_differential(self.degree + 1, &self.target);
        delta.mul_vec(&self.vector()).iter().all(|&x| x == 0)
    }

    pub fn is_coboundary(&self) -> bool {
        let delta = self.resolution.hom_differential(self.degree, &self.target);
        matches!(delta.solve(&self.vector()), Ok(Some(_)))
    }

    /// `sum c_i e_i` over elements of the same degree and shift.
    pub fn combine(elements: &[&ExtElement], coeffs: &[u32]) -> ExtElement {
        let first = elements[0];
        let f = first.target.field();
        let mut images = vec![vec![0u32; first.target.dim()]; first.images.len()];
        for (e, &c) in elements.iter().zip(coeffs) {
            assert_eq!((e.degree, e.shift), (first.degree, first.shift));
            for (acc, img) in images.iter_mut().zip(&e.images) {
                for (a, &b) in acc.iter_mut().zip(img) {
                    *a = f.add(*a, f.mul(c, b));
                }
            }
        }
        ExtElement {
            resolution: first.resolution.clone(),
            target: Arc::clone(&first.target),
            degree: first.degree,
            shift: first.shift,
            images,
        }
    }
}

/// Representatives of a basis of `Ext^t(M, N)`, grouped by ascending internal shift.
pub fn cocycle_basis(m: &Arc<Module>, n: &Arc<Module>, t: usize) -> Result<Vec<ExtElement>, YonedaError> {
    same_algebra(m, n)?;
    if t == 0 {
        return Err(YonedaError::ZeroDegree);
    }
    let res = resolve(m, t + 1);
    let f = m.field();
    let out_delta = res.hom_differential(t + 1, n);
    let in_delta = res.hom_differential(t, n);
    let here = res.hom_degrees(t, n);
    let below = res.hom_degrees(t - 1, n);
    let mut shifts: BTreeMap<i32, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (i, &d) in here.iter().enumerate() {
        shifts.entry(d).or_default().0.push(i);
    }
    for (i, &d) in below.iter().enumerate() {
        shifts.entry(d).or_default().1.push(i);
    }
    let dim = here.len();
    let dn = n.dim();
    let mut out = Vec::new();
    for (&s, (cols, lower)) in &shifts {
        if cols.is_empty() {
            continue;
        }
        let mut span = EchelonBasis::new(f, dim);
        let boundaries = in_delta.select_columns(lower);
        for j in 0..boundaries.cols() {
            span.insert(&boundaries.column(j));
        }
        let z = out_delta.select_columns(cols).kernel_basis();
        for j in 0..z.cols() {
            let mut v = vec![0u32; dim];
            for (r, &c) in cols.iter().enumerate() {
                v[c] = z.get(r, j);
            }
            if span.insert(&v) {
                let images = v.chunks(dn.max(1)).take(res.betti()[t]).map(<[u32]>::to_vec).collect();
                out.push(ExtElement {
                    resolution: res.clone(),
                    target: Arc::clone(n),
                    degree: t,
                    shift: s,
                    images,
                });
            }
        }
    }
    Ok(out)
}

/// Rank of the span of the given classes in `Ext^t` (modulo coboundaries).
pub fn class_rank(elements: &[&ExtElement]) -> usize {
    let Some(first) = elements.first() else {
        return 0;
    };
    let delta = first.resolution.hom_differential(first.degree, &first.target);
    let mut span = EchelonBasis::new(first.target.field(), delta.rows());
    for j in 0..delta.cols() {
        span.insert(&delta.column(j));
    }
    elements.iter().filter(|e| span.insert(&e.vector())).count()
}

fn solve_in_degree(mat: &Mat, col_degrees: &[i32], degree: i32, rhs: &[u32]) -> Option<Vec<u32>> {
    let cols: Vec<usize> = (0..col_degrees.len()).filter(|&i| col_degrees[i] == degree).collect();
    if rhs.iter().all(|&x| x == 0) {
        return Some(vec![0; mat.cols()]);
    }
    let sol = mat.select_columns(&cols).solve(rhs).expect("shapes agree")?;
    let mut v = vec![0u32; mat.cols()];
    for (k, &c) in cols.iter().enumerate() {
        v[c] = sol[k];
    }
    Some(v)
}

/// Lifts a self-extension cocycle `F_t -> M` to chain maps `L_k : F_{t+k} -> F_k`
/// for `k = 0..=upto`, returned as realized matrices.
pub fn lift_chain_map(eta: &ExtElement, upto: usize) -> Vec<Mat> {
    assert!(eta.source().same_as(eta.target()), "lifting needs a self-extension");
    let t = eta.degree;
    let res = resolve(eta.source(), t + upto + 1);
    let mut lifts: Vec<Mat> = Vec::with_capacity(upto + 1);
    for k in 0..=upto {
        let gens = res.generator_degrees(t + k);
        let target_free = res.free_module(k);
        let step = res.realized(k);
        let images: Vec<Vec<u32>> = (0..gens.len())
            .map(|h| {
                let rhs = if k == 0 {
                    eta.images[h].clone()
                } else {
                    lifts[k - 1].mul_vec(&res.step(t + k).images[h])
                };
                solve_in_degree(step, target_free.degrees(), gens[h] + eta.shift, &rhs)
                    .expect("lift exists over a free module")
            })
            .collect();
        let realized = target_free.free_map_matrix(&images);
        if k > 0 {
            assert_eq!(
                step.mul(&realized),
                lifts[k - 1].mul(res.realized(t + k)),
                "lift does not commute"
            );
        }
        lifts.push(realized);
    }
    lifts
}

/// `eta^s`, computed as `f o L_t o L_{2t} o ... o L_{(s-1)t}`.
pub fn yoneda_power(eta: &ExtElement, s: usize) -> Result<ExtElement, YonedaError> {
    if s == 0 {
        return Err(YonedaError::InvalidParameter("power must be at least 1".into()));
    }
    if !eta.source().same_as(eta.target()) {
        return Err(YonedaError::InvalidParameter("Yoneda powers need a self-extension".into()));
    }
    if s == 1 {
        return Ok(eta.clone());
    }
    let t = eta.degree;
    let total = s * t;
    let res = resolve(eta.source(), total + 1);
    let lifts = lift_chain_map(eta, (s - 1) * t);
    let a = eta.source().algebra().dim();
    let f = eta.map_matrix();
    let images = (0..res.betti()[total])
        .map(|h| {
            let mut v = unit(res.free_module(total).dim(), h * a);
            for i in (1..s).rev() {
                v = lifts[i * t].mul_vec(&v);
            }
            f.mul_vec(&v)
        })
        .collect();
    Ok(ExtElement::new(
        res,
        Arc::clone(eta.target()),
        total,
        eta.shift * s as i32,
        images,
    ))
}

/// `0 -> N -> K -> Omega^{t-1}(M) -> 0` obtained by pushing out along `eta`.
#[derive(Clone, Debug)]
pub struct PushoutExtension {
    pub eta: ExtElement,
    pub module: Arc<Module>,
    /// `N -> K`.
    pub injection: Mat,
    /// `K -> F_{t-2}` (or `K -> M` when `t = 1`), with image `Omega^{t-1}(M)`.
    pub surjection: Mat,
    pub syzygy_dim: usize,
}

pub fn pushout(eta: &ExtElement) -> Result<PushoutExtension, YonedaError> {
    let t = eta.degree;
    let res = eta.resolution.clone();
    let n = eta.target();
    let f_prev = res.free_module(t - 1);
    let f_prev_shifted = shift(f_prev, eta.shift);
    let sum = direct_sum(n, &f_prev_shifted)?;
    let field = n.field();
    let relations: Vec<Vec<u32>> = (0..res.betti()[t])
        .map(|h| {
            let mut v = eta.images[h].clone();
            v.extend(res.step(t).images[h].iter().map(|&x| field.neg(x)));
            v
        })
        .collect();
    let (k, projection) = quotient(&sum, &relations, Some(format!("pushout along a class of degree {t}")))?;
    let dn = n.dim();
    let injection = projection.select_columns(&(0..dn).collect::<Vec<_>>());
    assert_eq!(injection.rank(), dn, "N -> K is not injective");
    // (n, y) |-> d_{t-1}(y) factors through K
    let down = res.realized(t - 1);
    let mut composite = Mat::zeros(field, down.rows(), sum.dim());
    for r in 0..down.rows() {
        for c in 0..down.cols() {
            composite.set(r, dn + c, down.get(r, c));
        }
    }
    let section = projection
        .solve_many(&Mat::identity(field, k.dim()))
        .expect("projection is surjective");
    let surjection = composite.mul(&section);
    let syzygy_dim = down.rank();
    assert_eq!(surjection.rank(), syzygy_dim, "K -> Omega^(t-1) is not surjective");
    assert!(surjection.mul(&injection).is_zero());
    assert_eq!(k.dim(), dn + syzygy_dim, "pushout sequence is not exact");
    assert_eq!(k.dim(), dn + f_prev.dim() - res.step(t - 1).kernel.len());
    Ok(PushoutExtension {
        eta: eta.clone(),
        module: k,
        injection,
        surjection,
        syzygy_dim,
    })
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SearchAttempt {
    pub degree: usize,
    pub shift: i32,
    pub kind: String,
    pub estimate: usize,
    pub stabilized: bool,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub found: Option<(ExtElement, PushoutExtension, ComplexityEstimate)>,
    pub start_estimate: ComplexityEstimate,
    pub transcript: Vec<SearchAttempt>,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub max_search_degree: usize,
    pub budget: usize,
    pub seed: u64,
    pub max_degree: usize,
    pub stabilization: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            max_search_degree: DEFAULT_SEARCH_DEGREE,
            budget: DEFAULT_SEARCH_BUDGET,
            seed: 0,
            max_degree: DEFAULT_MAX_DEGREE,
            stabilization: DEFAULT_STABILIZATION,
        }
    }
}

/// Searches self-extensions of increasing degree for one whose pushout drops
/// the complexity estimate by exactly one. Absence means "not found within
/// budget", nothing more.
pub fn find_reducing_element(m: &Arc<Module>, opts: &SearchOptions) -> Result<SearchOutcome, YonedaError> {
    let start = module_complexity(m, opts.max_degree, opts.stabilization)?;
    if !start.stabilized {
        return Err(YonedaError::Unstabilized);
    }
    if start.value == 0 {
        return Err(YonedaError::FiniteProjectiveDimension);
    }
    let goal = start.value - 1;
    let mut transcript = Vec::new();
    let try_candidate = |eta: &ExtElement, kind: String, transcript: &mut Vec<SearchAttempt>| -> Result<Option<(PushoutExtension, ComplexityEstimate)>, YonedaError> {
        let p = pushout(eta)?;
        let est = module_complexity(&p.module, opts.max_degree, opts.stabilization)?;
        transcript.push(SearchAttempt {
            degree: eta.degree,
            shift: eta.shift,
            kind,
            estimate: est.value,
            stabilized: est.stabilized,
        });
        Ok((est.stabilized && est.value == goal).then_some((p, est)))
    };
    for t in 1..=opts.max_search_degree {
        let basis = cocycle_basis(m, m, t)?;
        for (i, eta) in basis.iter().enumerate() {
            if let Some((p, est)) = try_candidate(eta, format!("basis {i}"), &mut transcript)? {
                return Ok(SearchOutcome {
                    found: Some((eta.clone(), p, est)),
                    start_estimate: start,
                    transcript,
                });
            }
        }
        let mut groups: BTreeMap<i32, Vec<&ExtElement>> = BTreeMap::new();
        for eta in &basis {
            groups.entry(eta.shift).or_default().push(eta);
        }
        let groups: Vec<Vec<&ExtElement>> = groups.into_values().filter(|g| g.len() > 1).collect();
        if groups.is_empty() {
            continue;
        }
        let p = m.field().p();
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (t as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        for attempt in 0..opts.budget {
            let g = &groups[rng.gen_range(0..groups.len())];
            let mut coeffs: Vec<u32> = (0..g.len()).map(|_| rng.gen_range(0..p)).collect();
            if coeffs.iter().all(|&c| c == 0) {
                coeffs[0] = 1;
            }
            let eta = ExtElement::combine(g, &coeffs);
            if let Some((p, est)) = try_candidate(&eta, format!("random {attempt} {coeffs:?}"), &mut transcript)? {
                return Ok(SearchOutcome {
                    found: Some((eta, p, est)),
                    start_estimate: start,
                    transcript,
                });
            }
        }
    }
    Ok(SearchOutcome {
        found: None,
        start_estimate: start,
        transcript,
    })
}

#[derive(Clone, Debug)]
pub struct ReductionLink {
    pub module: Arc<Module>,
    /// Degree of the class that produced this module (`None` for `K_0 = M`).
    pub eta_degree: Option<usize>,
    pub eta_shift: Option<i32>,
    pub estimate: ComplexityEstimate,
}

impl ReductionLink {
    /// `n_i = |eta_i| - 1`.
    pub fn syzygy_index(&self) -> Option<usize> {
        self.eta_degree.map(|d| d - 1)
    }
}

#[derive(Clone, Debug)]
pub struct ReductionSequence {
    pub links: Vec<ReductionLink>,
}

impl ReductionSequence {
    /// `n_1 + ... + n_c`.
    pub fn total_shift(&self) -> usize {
        self.links.iter().filter_map(ReductionLink::syzygy_index).sum()
    }

    pub fn estimates(&self) -> Vec<usize> {
        self.links.iter().map(|l| l.estimate.value).collect()
    }
}

/// Either a complete reduction sequence or the transcript of the failed search.
#[derive(Clone, Debug)]
pub enum ReductionResult {
    Complete(ReductionSequence),
    NotFound {
        partial: ReductionSequence,
        transcript: Vec<SearchAttempt>,
    },
}

/// Iterates [`find_reducing_element`] until the estimate reaches zero.
pub fn reduction_sequence(m: &Arc<Module>, opts: &SearchOptions) -> Result<ReductionResult, YonedaError> {
    let start = module_complexity(m, opts.max_degree, opts.stabilization)?;
    if !start.stabilized {
        return Err(YonedaError::Unstabilized);
    }
    let mut links = vec![ReductionLink {
        module: Arc::clone(m),
        eta_degree: None,
        eta_shift: None,
        estimate: start,
    }];
    loop {
        let last = links.last().expect("nonempty");
        if last.estimate.value == 0 {
            return Ok(ReductionResult::Complete(ReductionSequence { links }));
        }
        let outcome = find_reducing_element(&last.module, opts)?;
        match outcome.found {
            Some((eta, p, est)) => links.push(ReductionLink {
                module: p.module,
                eta_degree: Some(eta.degree),
                eta_shift: Some(eta.shift),
                estimate: est,
            }),
            None => {
                return Ok(ReductionResult::NotFound {
                    partial: ReductionSequence { links },
                    transcript: outcome.transcript,
                })
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Functor {
    Ext,
    Tor,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum WindowVerdict {
    /// Nothing to check: the module has finite projective dimension.
    Vacuous,
    /// The window vanished and so did every checked degree `>= 1`.
    Confirmed,
    /// The window did not vanish; no conclusion.
    PremiseNotMet { degree: usize, dim: usize },
    /// The window vanished but a later group did not: an implementation error.
    Violation { degree: usize, dim: usize },
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct WindowCheck {
    pub functor: Functor,
    pub window_start: usize,
    pub window_end: usize,
    pub max_degree: usize,
    pub table: Vec<usize>,
    pub verdict: WindowVerdict,
}

/// If the groups in degrees `t..=t + n_1 + ... + n_c` vanish, all groups in
/// degrees `1..=max_degree` must vanish.
pub fn window_vanishing_check(
    m: &Arc<Module>,
    reduction: &ReductionSequence,
    n: &Arc<Module>,
    t: usize,
    max_degree: usize,
    functor: Functor,
) -> Result<WindowCheck, YonedaError> {
    if t == 0 {
        return Err(YonedaError::ZeroDegree);
    }
    let window_end = t + reduction.total_shift();
    if window_end > max_degree {
        return Err(YonedaError::InvalidParameter(format!(
            "window ends at {window_end}, beyond max degree {max_degree}"
        )));
    }
    let table = match functor {
        Functor::Ext => ext_table(m, n, max_degree)?,
        Functor::Tor => tor_table(m, n, max_degree)?,
    };
    let start_estimate = reduction.links.first().map_or(0, |l| l.estimate.value);
    let verdict = if start_estimate == 0 {
        WindowVerdict::Vacuous
    } else if let Some(i) = (t..=window_end).find(|&i| table[i] != 0) {
        WindowVerdict::PremiseNotMet { degree: i, dim: table[i] }
    } else if let Some(i) = (1..=max_degree).find(|&i| table[i] != 0) {
        WindowVerdict::Violation { degree: i, dim: table[i] }
    } else {
        WindowVerdict::Confirmed
    };
    Ok(WindowCheck {
        functor,
        window_start: t,
        window_end,
        max_degree,
        table,
        verdict,
    })
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ProjDimCheck {
    pub max_degree: usize,
    pub self_ext: Vec<usize>,
    pub first_syzygy_rank: usize,
    /// `Ext^i(M,M) = 0` for `1 <= i <= max_degree`.
    pub self_ext_vanishes: bool,
    pub free: bool,
    pub consistent: bool,
}

/// For modules of free reducible complexity over an Artinian ring (every
/// module over a complete intersection), vanishing self-extensions on the
/// window must coincide with freeness. Outside that class `consistent` can be
/// false legitimately: the canonical module of a non-Gorenstein ring is
/// injective, so it has no higher self-extensions without being free.
pub fn self_ext_pd_check(m: &Arc<Module>, max_degree: usize) -> Result<ProjDimCheck, YonedaError> {
    let self_ext = ext_table(m, m, max_degree)?;
    let first_syzygy_rank = resolve(m, 1).betti()[1];
    let self_ext_vanishes = self_ext[1..].iter().all(|&x| x == 0);
    let free = first_syzygy_rank == 0;
    Ok(ProjDimCheck {
        max_degree,
        self_ext,
        first_syzygy_rank,
        self_ext_vanishes,
        free,
        consistent: self_ext_vanishes == free,
    })
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Witness {
    pub test: usize,
    pub degree: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum BoundOutcome {
    /// `cx M < bound` (or `<=`, see the owning verdict).
    BoundEstablished { bound: usize },
    Inconclusive { witness: Witness },
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct BoundVerdict {
    pub outcome: BoundOutcome,
    /// Degrees whose Ext groups were required to vanish.
    pub degrees: Vec<usize>,
    pub max_degree: usize,
    pub tables: Vec<Vec<usize>>,
    pub caveat: String,
}

impl BoundVerdict {
    pub fn established(&self) -> bool {
        matches!(self.outcome, BoundOutcome::BoundEstablished { .. })
    }
}

/// Checks tail vanishing of `Ext(M, N)` for every test module `N` of declared
/// complexity `t`; vanishing against all of them yields `cx M < t`.
pub fn test_against(
    m: &Arc<Module>,
    tests: &[(Arc<Module>, usize)],
    max_degree: usize,
    tail: usize,
) -> Result<BoundVerdict, YonedaError> {
    let (_, t) = tests.first().ok_or(YonedaError::NoTests)?;
    if tests.iter().any(|(_, u)| u != t) {
        return Err(YonedaError::MixedDeclarations);
    }
    if tail > max_degree {
        return Err(YonedaError::InvalidParameter("tail longer than the table".into()));
    }
    let degrees: Vec<usize> = (max_degree - tail..=max_degree).collect();
    let mods: Vec<Arc<Module>> = tests.iter().map(|(n, _)| Arc::clone(n)).collect();
    let caveat = format!(
        "vanishing is checked on degrees {}..={} against {} supplied module(s) of declared complexity {t}; \
         the implication needs every module of that complexity, and nonvanishing never certifies cx M >= {t}",
        max_degree - tail,
        max_degree,
        tests.len()
    );
    tail_verdict(m, &mods, &degrees, max_degree, *t, caveat)
}

pub(crate) fn tail_verdict(
    m: &Arc<Module>,
    tests: &[Arc<Module>],
    degrees: &[usize],
    max_degree: usize,
    bound: usize,
    caveat: String,
) -> Result<BoundVerdict, YonedaError> {
    let mut tables = Vec::with_capacity(tests.len());
    let mut witness = None;
    for (i, n) in tests.iter().enumerate() {
        let table = ext_table(m, n, max_degree)?;
        if witness.is_none() {
            if let Some(&d) = degrees.iter().find(|&&d| table[d] != 0) {
                witness = Some(Witness {
                    test: i,
                    degree: d,
                    dim: table[d],
                });
            }
        }
        tables.push(table);
    }
    let outcome = match witness {
        Some(witness) => BoundOutcome::Inconclusive { witness },
        None => BoundOutcome::BoundEstablished { bound },
    };
    Ok(BoundVerdict {
        outcome,
        degrees: degrees.to_vec(),
        max_degree,
        tables,
        caveat,
    })
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SymmetryVerdict {
    CoOccurrence { both_vanish: bool },
    WindowTooShort { forward_vanishes: bool, backward_vanishes: bool },
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SymmetryCheck {
    pub max_degree: usize,
    pub tail: usize,
    pub forward: Vec<usize>,
    pub backward: Vec<usize>,
    pub verdict: SymmetryVerdict,
}

/// Compares tail vanishing of `Ext(M,N)` and `Ext(N,M)` over a Gorenstein algebra.
pub fn symmetry_check(m: &Arc<Module>, n: &Arc<Module>, max_degree: usize, tail: usize) -> Result<SymmetryCheck, YonedaError> {
    same_algebra(m, n)?;
    if !m.algebra().is_gorenstein() {
        return Err(YonedaError::NotGorenstein);
    }
    if tail > max_degree {
        return Err(YonedaError::InvalidParameter("tail longer than the table".into()));
    }
    let forward = ext_table(m, n, max_degree)?;
    let backward = ext_table(n, m, max_degree)?;
    let vanishes = |t: &[usize]| t[max_degree - tail..].iter().all(|&x| x == 0);
    let (fv, bv) = (vanishes(&forward), vanishes(&backward));
    let verdict = if fv == bv {
        SymmetryVerdict::CoOccurrence { both_vanish: fv }
    } else {
        SymmetryVerdict::WindowTooShort {
            forward_vanishes: fv,
            backward_vanishes: bv,
        }
    };
    Ok(SymmetryCheck {
        max_degree,
        tail,
        forward,
        backward,
        verdict,
    })
}
