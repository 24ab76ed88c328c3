//! Monomial complete intersections `k[x_1..x_c]/(x_1^{n_1}, ..., x_c^{n_c})`:
//! Eisenbud operators, their action on `Ext(M, k)`, coordinate cuts and the
//! test modules `K_chi_j`.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::exactla::{Field, Mat};
use crate::gmod::{quotient, AMatrix, Module};
use crate::gralg::{Algebra, AlgebraError, Polynomial};
use crate::resol::{module_complexity, resolve, ComplexityEstimate, Resolution};
use crate::yoneda::{ext_table, pushout, BoundOutcome, BoundVerdict, ExtElement, PushoutExtension, Witness, YonedaError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CiError {
    #[error("exponent {0} is smaller than 2")]
    SmallExponent(u32),
    #[error("the algebra is not presented as a monomial complete intersection")]
    NotMonomialCi,
    #[error("operator index {j} out of range 1..={c}")]
    IndexOutOfRange { j: usize, c: usize },
    #[error("{0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Yoneda(#[from] YonedaError),
}

#[derive(Clone, Debug)]
pub struct MonomialCi {
    exponents: Vec<u32>,
    algebra: Arc<Algebra>,
}

impl MonomialCi {
    pub fn new(field: Field, exponents: &[u32]) -> Result<Self, CiError> {
        if let Some(&n) = exponents.iter().find(|&&n| n < 2) {
            return Err(CiError::SmallExponent(n));
        }
        Ok(Self {
            exponents: exponents.to_vec(),
            algebra: Algebra::monomial_ci(field, exponents)?,
        })
    }

    /// Recognizes an algebra whose relations are exactly one pure power per variable.
    pub fn detect(algebra: &Arc<Algebra>) -> Result<Self, CiError> {
        let c = algebra.nvars();
        let mut exponents = vec![0u32; c];
        for r in algebra.relations() {
            let [(_, m)] = r.terms() else {
                return Err(CiError::NotMonomialCi);
            };
            let support: Vec<usize> = (0..c).filter(|&i| m[i] > 0).collect();
            let [i] = support[..] else {
                return Err(CiError::NotMonomialCi);
            };
            if exponents[i] != 0 || m[i] < 2 {
                return Err(CiError::NotMonomialCi);
            }
            exponents[i] = m[i];
        }
        if exponents.contains(&0) {
            return Err(CiError::NotMonomialCi);
        }
        Ok(Self {
            exponents,
            algebra: Arc::clone(algebra),
        })
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn codimension(&self) -> usize {
        self.exponents.len()
    }

    fn check_index(&self, j: usize) -> Result<(), CiError> {
        if j == 0 || j > self.codimension() {
            Err(CiError::IndexOutOfRange {
                j,
                c: self.codimension(),
            })
        } else {
            Ok(())
        }
    }
}

/// The operators `chi_j : F_{i+2} -> F_i`, stored as `chi[j][i]` (zero-based `j`).
#[derive(Clone, Debug)]
pub struct EisenbudOperators {
    ci: MonomialCi,
    resolution: Resolution,
    chi: Vec<Vec<AMatrix>>,
}

fn lift(algebra: &Algebra, coeffs: &[u32]) -> Polynomial {
    let terms = coeffs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(s, &c)| (c, algebra.basis()[s].clone()));
    Polynomial::from_terms(algebra.field(), algebra.nvars(), terms)
}

/// Entries of `d_{i+1} d_{i+2}` lifted to the polynomial ring, split as
/// `sum_j f_j t_j` by the greedy rule; returns the `t_j` reduced into the algebra.
fn greedy_operators(ci: &MonomialCi, left: &AMatrix, right: &AMatrix) -> Vec<AMatrix> {
    let a = ci.algebra();
    let c = ci.codimension();
    let field = a.field();
    let (rows, mid, cols) = (left.rows(), left.cols(), right.cols());
    let mut t: Vec<Vec<Vec<u32>>> = vec![vec![vec![0; a.dim()]; rows * cols]; c];
    for r in 0..rows {
        for col in 0..cols {
            let mut entry = Polynomial::zero(field, a.nvars());
            for k in 0..mid {
                entry = entry.add(&lift(a, left.entry(r, k)).mul(&lift(a, right.entry(k, col))));
            }
            for (coef, m) in entry.terms() {
                let Some(j) = (0..c).find(|&j| m[j] >= ci.exponents[j]) else {
                    panic!("lifted square has a standard monomial; the complex is not exact");
                };
                let mut q = m.clone();
                q[j] -= ci.exponents[j];
                // t_j modulo the pure powers: nonstandard monomials vanish
                if let Some(s) = a.basis_index(&q) {
                    let slot = &mut t[j][r * cols + col][s];
                    *slot = field.add(*slot, *coef);
                }
            }
        }
    }
    t.into_iter().map(|entries| AMatrix::new(a, rows, cols, entries)).collect()
}

/// Computes the Eisenbud operators on the minimal resolution of `m` through `F_{max_degree}`.
pub fn eisenbud_operators(ci: &MonomialCi, m: &Arc<Module>, max_degree: usize) -> Result<EisenbudOperators, CiError> {
    if !Arc::ptr_eq(ci.algebra(), m.algebra()) {
        return Err(YonedaError::MixedAlgebras.into());
    }
    if max_degree < 3 {
        return Err(CiError::InvalidParameter("operators need the resolution through degree 3".into()));
    }
    let res = resolve(m, max_degree);
    let d: Vec<AMatrix> = (1..=max_degree).map(|n| res.differential(n)).collect();
    let mut chi: Vec<Vec<AMatrix>> = vec![Vec::new(); ci.codimension()];
    for i in 0..=max_degree - 2 {
        for (j, op) in greedy_operators(ci, &d[i], &d[i + 1]).into_iter().enumerate() {
            chi[j].push(op);
        }
    }
    let ops = EisenbudOperators {
        ci: ci.clone(),
        resolution: res,
        chi,
    };
    assert!(ops.chain_map_defects().is_empty(), "operators are not chain maps");
    Ok(ops)
}

impl EisenbudOperators {
    pub fn resolution(&self) -> &Resolution {
        &self.resolution
    }

    pub fn ci(&self) -> &MonomialCi {
        &self.ci
    }

    /// `chi_j : F_{i+2} -> F_i` with one-based `j`.
    pub fn operator(&self, j: usize, i: usize) -> &AMatrix {
        &self.chi[j - 1][i]
    }

    /// Pairs `(j, i)` where `d_{i+1} chi^{(i+1)} != chi^{(i)} d_{i+3}`.
    pub fn chain_map_defects(&self) -> Vec<(usize, usize)> {
        let top = self.resolution.max_degree();
        let mut out = Vec::new();
        for (j, ops) in self.chi.iter().enumerate() {
            for i in 0..top.saturating_sub(2) {
                let lhs = self.resolution.differential(i + 1).mul(&ops[i + 1]);
                let rhs = ops[i].mul(&self.resolution.differential(i + 3));
                let diff_zero = lhs
                    .column_vectors()
                    .iter()
                    .zip(rhs.column_vectors())
                    .all(|(x, y)| *x == y);
                if !diff_zero {
                    out.push((j + 1, i));
                }
            }
        }
        out
    }

    /// Action of each operator on `Ext(M, k)`.
    pub fn ext_action(&self) -> ExtHModule {
        let betti = self.resolution.betti();
        let field = self.resolution.module().field();
        let actions = self
            .chi
            .iter()
            .map(|ops| {
                ops.iter()
                    .map(|op| {
                        // (phi o chi)(e_h) = sum_g phi(e_g) * const(chi[g][h])
                        let mut m = Mat::zeros(field, op.cols(), op.rows());
                        for h in 0..op.cols() {
                            for g in 0..op.rows() {
                                m.set(h, g, op.entry(g, h)[0]);
                            }
                        }
                        m
                    })
                    .collect()
            })
            .collect();
        ExtHModule { dims: betti, actions }
    }
}

/// `Ext(M, k)` with the operator actions `Ext^n -> Ext^{n+2}`, stored as `actions[j][n]`.
#[derive(Clone, Debug)]
pub struct ExtHModule {
    pub dims: Vec<usize>,
    pub actions: Vec<Vec<Mat>>,
}

impl ExtHModule {
    /// Whether every pair of actions commutes wherever both composites are defined.
    pub fn actions_commute(&self) -> bool {
        for a in &self.actions {
            for b in &self.actions {
                for n in 0..a.len().saturating_sub(2) {
                    if a[n + 2].mul(&b[n]) != b[n + 2].mul(&a[n]) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Whether the operators map `Ext^n` jointly onto `Ext^{n+2}` for every `n >= from`.
    pub fn surjective_from(&self, from: usize) -> bool {
        let count = self.actions.first().map_or(0, Vec::len);
        (from..count).all(|n| {
            let stacked = self.actions.iter().skip(1).fold(self.actions[0][n].clone(), |acc, a| acc.hstack(&a[n]));
            stacked.rank() == self.dims[n + 2]
        })
    }
}

/// `epsilon o chi_j^{(0)}`, a class in `Ext^2(M, M)` of internal shift `-n_j`.
pub fn chi_self_extension(ops: &EisenbudOperators, j: usize) -> Result<ExtElement, CiError> {
    ops.ci.check_index(j)?;
    let res = &ops.resolution;
    let op = ops.operator(j, 0);
    let eps = res.realized(0);
    let images = (0..op.cols()).map(|h| eps.mul_vec(&op.column_vector(h))).collect();
    let shift = -(ops.ci.exponents[j - 1] as i32);
    Ok(ExtElement::new(res.clone(), Arc::clone(res.module()), 2, shift, images))
}

#[derive(Clone, Debug)]
pub struct Cut {
    pub j: usize,
    pub extension: PushoutExtension,
    pub before: ComplexityEstimate,
    pub after: ComplexityEstimate,
    /// Whether `chi_j` maps `Ext^n(M,k)` injectively into `Ext^{n+2}(M,k)` on
    /// the last `s` degrees the operators reach. Observed, not required.
    pub injective_on_tail: bool,
}

impl Cut {
    pub fn dropped(&self) -> bool {
        self.after.value + 1 == self.before.value
    }
}

/// Pushout along the `j`-th operator class, with estimates before and after.
pub fn cut_by_chi(ops: &EisenbudOperators, j: usize, max_degree: usize, s: usize) -> Result<Cut, CiError> {
    let before = module_complexity(ops.resolution.module(), max_degree, s).map_err(YonedaError::from)?;
    if before.value == 0 {
        return Err(YonedaError::FiniteProjectiveDimension.into());
    }
    let eta = chi_self_extension(ops, j)?;
    let extension = pushout(&eta)?;
    let after = module_complexity(&extension.module, max_degree, s).map_err(YonedaError::from)?;
    let action = ops.ext_action();
    let maps = &action.actions[j - 1];
    let injective_on_tail = (maps.len().saturating_sub(s)..maps.len()).all(|n| maps[n].rank() == action.dims[n]);
    Ok(Cut {
        j,
        extension,
        before,
        after,
        injective_on_tail,
    })
}

/// Tries `j = 1..=c` in order and returns the first cut that drops the
/// estimate by one, or `None` when no coordinate operator does.
pub fn first_dropping_cut(ci: &MonomialCi, m: &Arc<Module>, max_degree: usize, s: usize) -> Result<Option<Cut>, CiError> {
    let ops = eisenbud_operators(ci, m, max_degree.max(3))?;
    for j in 1..=ci.codimension() {
        let cut = cut_by_chi(&ops, j, max_degree, s)?;
        if cut.dropped() {
            return Ok(Some(cut));
        }
    }
    Ok(None)
}

/// Convenience wrapper: operators through `max_degree`, then [`cut_by_chi`].
pub fn cut_module(ci: &MonomialCi, m: &Arc<Module>, j: usize, max_degree: usize, s: usize) -> Result<Cut, CiError> {
    let ops = eisenbud_operators(ci, m, max_degree.max(3))?;
    cut_by_chi(&ops, j, max_degree, s)
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FourTermSequence {
    /// Dimensions of `k, K, A, k`.
    pub dims: [usize; 4],
    pub injection_rank: usize,
    pub middle_rank: usize,
}

impl FourTermSequence {
    pub fn exact(&self) -> bool {
        let [a, b, c, d] = self.dims;
        self.injection_rank == a && self.middle_rank == b - a && c - self.middle_rank == d && a + c == b + d
    }
}

#[derive(Clone, Debug)]
pub struct KchiModule {
    pub j: usize,
    pub module: Arc<Module>,
    pub sequence: FourTermSequence,
}

/// `(k (+) m_Q / a m_Q) / {(alpha_j, -sum alpha_i x_i^{n_i})}`.
pub fn build_kchi(ci: &MonomialCi, j: usize) -> Result<KchiModule, CiError> {
    ci.check_index(j)?;
    let a = ci.algebra();
    let field = a.field();
    let c = ci.codimension();
    let nonconstant: Vec<usize> = (1..a.dim()).collect();
    // basis: [k] ++ nonconstant standard monomials ++ [e_1..e_c]
    let dim = 1 + nonconstant.len() + c;
    let e_index = |i: usize| 1 + nonconstant.len() + i;
    let mut degrees = vec![ci.exponents[j - 1] as i32];
    degrees.extend(nonconstant.iter().map(|&s| a.basis_degree(s) as i32));
    degrees.extend(ci.exponents.iter().map(|&n| n as i32));
    let actions: Vec<Mat> = (0..c)
        .map(|l| {
            let mut x = Mat::zeros(field, dim, dim);
            for (pos, &s) in nonconstant.iter().enumerate() {
                let mut m = a.basis()[s].clone();
                m[l] += 1;
                if let Some(t) = a.basis_index(&m) {
                    x.set(t, 1 + pos, 1);
                } else if m.iter().enumerate().all(|(i, &e)| if i == l { e == ci.exponents[l] } else { e == 0 }) {
                    x.set(e_index(l), 1 + pos, 1);
                }
            }
            x
        })
        .collect();
    let ambient = Module::new(Arc::clone(a), degrees, actions, Some("k (+) m_Q / a m_Q".into())).map_err(YonedaError::from)?;
    let relations: Vec<Vec<u32>> = (0..c)
        .map(|i| {
            let mut v = vec![0u32; dim];
            if i == j - 1 {
                v[0] = 1;
            }
            v[e_index(i)] = field.neg(1);
            v
        })
        .collect();
    let (module, projection) =
        quotient(&ambient, &relations, Some(format!("K_chi{j}"))).map_err(YonedaError::from)?;
    // k -> K is the image of the k summand; K -> A sends monomials to themselves and e_i to 0
    let injection_rank = Mat::from_columns(field, module.dim(), &[projection.column(0)]).rank();
    let mut to_algebra = Mat::zeros(field, a.dim(), dim);
    for (pos, &s) in nonconstant.iter().enumerate() {
        to_algebra.set(s, 1 + pos, 1);
    }
    let section = projection
        .solve_many(&Mat::identity(field, module.dim()))
        .expect("projection is surjective");
    let middle = to_algebra.mul(&section);
    assert!(middle.mul(&projection.select_columns(&[0])).is_zero());
    let sequence = FourTermSequence {
        dims: [1, module.dim(), a.dim(), 1],
        injection_rank,
        middle_rank: middle.rank(),
    };
    assert!(sequence.exact(), "four-term sequence is not exact: {sequence:?}");
    Ok(KchiModule { j, module, sequence })
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct VarietyDimEstimate {
    pub dimension: usize,
    pub method: &'static str,
    pub estimate: ComplexityEstimate,
}

/// Support-variety dimension, read off the complexity estimate.
pub fn support_dimension(m: &Arc<Module>, max_degree: usize, s: usize) -> Result<VarietyDimEstimate, CiError> {
    let estimate = module_complexity(m, max_degree, s).map_err(YonedaError::from)?;
    Ok(VarietyDimEstimate {
        dimension: estimate.value,
        method: "betti-growth",
        estimate,
    })
}

/// Tail vanishing of `Ext(M, T)` for a test module `T` with a `t`-dimensional
/// coordinate variety gives `cx M <= t`; the smallest such `t` is reported.
pub fn vartest_check(
    m: &Arc<Module>,
    tests: &[(Arc<Module>, usize)],
    max_degree: usize,
    tail: usize,
) -> Result<BoundVerdict, CiError> {
    if tests.is_empty() {
        return Err(YonedaError::NoTests.into());
    }
    if tail > max_degree {
        return Err(CiError::InvalidParameter("tail longer than the table".into()));
    }
    let degrees: Vec<usize> = (max_degree - tail..=max_degree).collect();
    let mut tables = Vec::with_capacity(tests.len());
    let mut best: Option<usize> = None;
    let mut witness = None;
    for (i, (n, t)) in tests.iter().enumerate() {
        let table = ext_table(m, n, max_degree)?;
        match degrees.iter().find(|&&d| table[d] != 0) {
            None => best = Some(best.map_or(*t, |b: usize| b.min(*t))),
            Some(&d) if witness.is_none() => {
                witness = Some(Witness {
                    test: i,
                    degree: d,
                    dim: table[d],
                })
            }
            Some(_) => {}
        }
        tables.push(table);
    }
    let outcome = match (best, witness) {
        (Some(bound), _) => BoundOutcome::BoundEstablished { bound },
        (None, Some(witness)) => BoundOutcome::Inconclusive { witness },
        (None, None) => unreachable!(),
    };
    Ok(BoundVerdict {
        outcome,
        degrees: degrees.clone(),
        max_degree,
        tables,
        caveat: format!(
            "the bound reads cx M <= t; vanishing is checked on degrees {}..={} against coordinate-cut test modules only",
            degrees[0], max_degree
        ),
    })
}

/// Checks `Ext^{n + iq}(M, N) = 0` for `0 <= i <= c - t` and every supplied `N`.
pub fn testci_run(
    ci: &MonomialCi,
    m: &Arc<Module>,
    t: usize,
    q: usize,
    n: usize,
    tests: &[Arc<Module>],
    shift_count: Option<usize>,
) -> Result<BoundVerdict, CiError> {
    let c = ci.codimension();
    if t == 0 || t > c {
        return Err(CiError::InvalidParameter(format!("t = {t} outside 1..={c}")));
    }
    if q % 2 == 0 {
        return Err(CiError::InvalidParameter(format!("q = {q} must be odd and positive")));
    }
    if n == 0 || n % 2 != 0 {
        return Err(CiError::InvalidParameter(format!("n = {n} must be even and positive")));
    }
    if tests.is_empty() {
        return Err(YonedaError::NoTests.into());
    }
    if !Arc::ptr_eq(m.algebra(), ci.algebra()) {
        return Err(YonedaError::MixedAlgebras.into());
    }
    let count = shift_count.unwrap_or(c - t);
    let degrees: Vec<usize> = (0..=count).map(|i| n + i * q).collect();
    let max_degree = *degrees.last().expect("nonempty");
    let caveat = format!(
        "degrees {degrees:?} checked against {} supplied module(s) of complexity {t}; the implication quantifies over all such modules",
        tests.len()
    );
    Ok(crate::yoneda::tail_verdict(m, tests, &degrees, max_degree, t, caveat)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmod::{free_module, residue_field};
    use crate::resol::betti_numbers;

    fn f5() -> Field {
        Field::new(5).unwrap()
    }

    #[test]
    fn detection() {
        let ci = MonomialCi::new(f5(), &[2, 3]).unwrap();
        assert_eq!(MonomialCi::detect(ci.algebra()).unwrap().exponents(), &[2, 3]);
        let other = Algebra::from_text(f5(), &["x", "y"], &["x^2", "x*y", "y^2"]).unwrap();
        assert_eq!(MonomialCi::detect(&other).unwrap_err(), CiError::NotMonomialCi);
        assert_eq!(MonomialCi::new(f5(), &[1]).unwrap_err(), CiError::SmallExponent(1));
    }

    #[test]
    fn hypersurface_operator_is_periodicity() {
        let ci = MonomialCi::new(f5(), &[2]).unwrap();
        let k = residue_field(ci.algebra());
        let ops = eisenbud_operators(&ci, &k, 8).unwrap();
        let h = ops.ext_action();
        assert_eq!(h.dims, vec![1; 9]);
        assert!(h.actions[0].iter().all(|m| m.rank() == 1));
        let eta = chi_self_extension(&ops, 1).unwrap();
        assert!(!eta.is_coboundary());
        let free = free_module(ci.algebra(), &[0]);
        let ops_free = eisenbud_operators(&ci, &free, 4).unwrap();
        assert!(chi_self_extension(&ops_free, 1).unwrap().is_coboundary());
    }

    #[test]
    fn quadric_operators_on_residue_field() {
        let ci = MonomialCi::new(f5(), &[2, 2]).unwrap();
        let k = residue_field(ci.algebra());
        let ops = eisenbud_operators(&ci, &k, 10).unwrap();
        let h = ops.ext_action();
        assert!(h.actions_commute());
        // Ext(k,k) is free over k[chi] on generators of degrees 0, 1, 1, 2
        assert!(h.surjective_from(1));
        assert!(!h.surjective_from(0));
        let e1 = chi_self_extension(&ops, 1).unwrap();
        let e2 = chi_self_extension(&ops, 2).unwrap();
        assert_eq!(crate::yoneda::class_rank(&[&e1, &e2]), 2);
    }

    #[test]
    fn cuts_of_residue_field() {
        let ci = MonomialCi::new(f5(), &[2, 2]).unwrap();
        let k = residue_field(ci.algebra());
        let first = cut_module(&ci, &k, 1, 12, 4).unwrap();
        assert_eq!((first.before.value, first.after.value), (2, 1));
        let m1 = Arc::clone(&first.extension.module);
        assert!(first.injective_on_tail);
        let again = cut_module(&ci, &m1, 1, 12, 4).unwrap();
        assert!(!again.dropped() && !again.injective_on_tail);
        let second = cut_module(&ci, &m1, 2, 12, 4).unwrap();
        assert_eq!(second.after.value, 0);
        assert!(second.injective_on_tail);
        let found = first_dropping_cut(&ci, &m1, 12, 4).unwrap().expect("j = 2 drops");
        assert_eq!(found.j, 2);
        assert_eq!(betti_numbers(&second.extension.module, 2)[1], 0);
    }

    #[test]
    fn kchi_over_quadric() {
        let ci = MonomialCi::new(f5(), &[2, 2]).unwrap();
        for j in 1..=2 {
            let kchi = build_kchi(&ci, j).unwrap();
            assert_eq!(kchi.module.dim(), 4);
            assert_eq!(kchi.sequence.dims, [1, 4, 4, 1]);
            assert_eq!(support_dimension(&kchi.module, 12, 4).unwrap().dimension, 1);
        }
        assert!(matches!(build_kchi(&ci, 3), Err(CiError::IndexOutOfRange { .. })));
    }

    #[test]
    fn kchi_over_unequal_exponents() {
        let ci = MonomialCi::new(f5(), &[2, 3]).unwrap();
        let kchi = build_kchi(&ci, 2).unwrap();
        assert_eq!(kchi.module.dim(), 6);
        assert_eq!(support_dimension(&kchi.module, 14, 4).unwrap().dimension, 1);
    }

    #[test]
    fn testci_parameter_validation() {
        let ci = MonomialCi::new(f5(), &[2, 2]).unwrap();
        let k = residue_field(ci.algebra());
        let tests = vec![Arc::clone(&k)];
        assert!(testci_run(&ci, &k, 0, 1, 2, &tests, None).is_err());
        assert!(testci_run(&ci, &k, 3, 1, 2, &tests, None).is_err());
        assert!(testci_run(&ci, &k, 1, 2, 2, &tests, None).is_err());
        assert!(testci_run(&ci, &k, 1, 1, 3, &tests, None).is_err());
        let v = testci_run(&ci, &k, 1, 1, 2, &tests, None).unwrap();
        assert_eq!(v.degrees, vec![2, 3]);
        assert!(!v.established());
    }
}
