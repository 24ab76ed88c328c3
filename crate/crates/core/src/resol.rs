//! Minimal free resolutions, Betti numbers and complexity estimates.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::exactla::Mat;
use crate::gmod::{free_module, submodule, AMatrix, Module};
use crate::gralg::Algebra;

pub const DEFAULT_MAX_DEGREE: usize = 20;
pub const DEFAULT_STABILIZATION: usize = 4;

/// One step `F_n -> F_{n-1}` (or `F_0 -> M` for `n = 0`).
#[derive(Debug)]
pub struct ResolutionStep {
    pub gen_degrees: Vec<i32>,
    /// Image of each generator of `F_n`, as a vector of the target.
    pub images: Vec<Vec<u32>>,
    /// The `k`-linear matrix of the step.
    pub realized: Mat,
    /// Homogeneous basis of the kernel of `realized`.
    pub kernel: Vec<Vec<u32>>,
    /// `F_n` itself.
    pub free: Arc<Module>,
}

/// Homogeneous kernel basis of a degree-preserving map, scanned by ascending degree.
pub(crate) fn homogeneous_kernel(m: &Mat, col_degrees: &[i32]) -> Vec<Vec<u32>> {
    let mut by_degree: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (i, &d) in col_degrees.iter().enumerate() {
        by_degree.entry(d).or_default().push(i);
    }
    let mut out = Vec::new();
    for cols in by_degree.values() {
        let k = m.select_columns(cols).kernel_basis();
        for j in 0..k.cols() {
            let mut v = vec![0u32; m.cols()];
            for (r, &c) in cols.iter().enumerate() {
                v[c] = k.get(r, j);
            }
            out.push(v);
        }
    }
    out
}

fn build_step(target: &Module, candidates: &[Vec<u32>], is_first: bool) -> ResolutionStep {
    let a = target.algebra();
    let chosen = if is_first {
        target.min_generators().into_iter().map(|(v, _)| v).collect::<Vec<_>>()
    } else {
        target
            .minimal_generators_in(candidates)
            .into_iter()
            .map(|i| candidates[i].clone())
            .collect()
    };
    let gen_degrees: Vec<i32> = chosen
        .iter()
        .map(|v| target.vector_degree(v).expect("homogeneous").expect("nonzero"))
        .collect();
    let realized = target.free_map_matrix(&chosen);
    let free = free_module(a, &gen_degrees);
    let kernel = homogeneous_kernel(&realized, free.degrees());
    ResolutionStep {
        gen_degrees,
        images: chosen,
        realized,
        kernel,
        free,
    }
}

/// Extends the module's cached resolution through homological degree `max_degree`.
pub fn resolve(m: &Arc<Module>, max_degree: usize) -> Resolution {
    let mut cache = m.resolution_cache.lock().expect("resolution cache poisoned");
    while cache.len() <= max_degree {
        let step = match cache.last() {
            None => build_step(m, &[], true),
            Some(prev) => {
                let step = build_step(&prev.free, &prev.kernel, false);
                assert!(prev.realized.mul(&step.realized).is_zero(), "d^2 != 0");
                assert_eq!(step.realized.rank(), prev.kernel.len(), "resolution not exact");
                let a = m.algebra().dim();
                let minimal = step.images.iter().all(|v| v.iter().step_by(a).all(|&c| c == 0));
                assert!(minimal, "resolution not minimal");
                step
            }
        };
        cache.push(Arc::new(step));
    }
    Resolution {
        module: Arc::clone(m),
        steps: cache[..=max_degree].to_vec(),
    }
}

/// A minimal free resolution `F_N -> ... -> F_0 -> M`.
#[derive(Clone, Debug)]
pub struct Resolution {
    module: Arc<Module>,
    steps: Vec<Arc<ResolutionStep>>,
}

impl Resolution {
    pub fn module(&self) -> &Arc<Module> {
        &self.module
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        self.module.algebra()
    }

    pub fn max_degree(&self) -> usize {
        self.steps.len() - 1
    }

    pub fn step(&self, n: usize) -> &ResolutionStep {
        &self.steps[n]
    }

    pub fn betti(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.gen_degrees.len()).collect()
    }

    /// Graded Betti numbers: for each `n`, internal degree -> count.
    pub fn graded_betti(&self) -> Vec<BTreeMap<i32, usize>> {
        self.steps
            .iter()
            .map(|s| {
                let mut m = BTreeMap::new();
                for &d in &s.gen_degrees {
                    *m.entry(d).or_insert(0) += 1;
                }
                m
            })
            .collect()
    }

    pub fn generator_degrees(&self, n: usize) -> &[i32] {
        &self.steps[n].gen_degrees
    }

    pub fn free_module(&self, n: usize) -> &Arc<Module> {
        &self.steps[n].free
    }

    /// `d_n : F_n -> F_{n-1}` as a matrix over the algebra, `n >= 1`.
    pub fn differential(&self, n: usize) -> AMatrix {
        assert!(n >= 1);
        let rows = self.steps[n - 1].gen_degrees.len();
        AMatrix::from_free_columns(self.algebra(), rows, &self.steps[n].images)
    }

    /// Realized matrix of step `n` (`n = 0` is the augmentation onto `M`).
    pub fn realized(&self, n: usize) -> &Mat {
        &self.steps[n].realized
    }

    /// A `k`-linear section `M -> F_0` of the augmentation.
    pub fn augmentation_section(&self) -> Mat {
        let eps = &self.steps[0].realized;
        let id = Mat::identity(self.module.field(), self.module.dim());
        eps.solve_many(&id).expect("augmentation is surjective")
    }

    /// `Omega^i(M)`; `Omega^0(M) = M`. Requires `i <= max_degree + 1`.
    pub fn syzygy(&self, i: usize) -> Arc<Module> {
        if i == 0 {
            return Arc::clone(&self.module);
        }
        let step = &self.steps[i - 1];
        let (sub, _) = submodule(&step.free, &step.kernel, Some(format!("syzygy {i}"))).expect("kernel is a submodule");
        sub
    }

    /// Inclusion `Omega^i(M) -> F_{i-1}` for `i >= 1`, matching [`Resolution::syzygy`].
    pub fn syzygy_inclusion(&self, i: usize) -> Mat {
        let step = &self.steps[i - 1];
        Mat::from_columns(self.module.field(), step.free.dim(), &step.kernel)
    }

    /// `Hom(F_{n-1}, N) -> Hom(F_n, N)` with `Hom(F_n, N) = N^{beta_n}`.
    pub fn hom_differential(&self, n: usize, target: &Module) -> Mat {
        let d = self.differential(n);
        let dn = target.dim();
        let mut out = Mat::zeros(target.field(), d.cols() * dn, d.rows() * dn);
        for h in 0..d.cols() {
            for g in 0..d.rows() {
                write_block(&mut out, h * dn, g * dn, &target.element_action(d.entry(g, h)));
            }
        }
        out
    }

    /// `F_n (x) N -> F_{n-1} (x) N` with `F_n (x) N = N^{beta_n}`.
    pub fn tensor_differential(&self, n: usize, other: &Module) -> Mat {
        let d = self.differential(n);
        let dn = other.dim();
        let mut out = Mat::zeros(other.field(), d.rows() * dn, d.cols() * dn);
        for g in 0..d.rows() {
            for h in 0..d.cols() {
                write_block(&mut out, g * dn, h * dn, &other.element_action(d.entry(g, h)));
            }
        }
        out
    }

    /// Internal degree of each coordinate of `Hom(F_n, N)`.
    pub fn hom_degrees(&self, n: usize, target: &Module) -> Vec<i32> {
        self.generator_degrees(n)
            .iter()
            .flat_map(|&g| target.degrees().iter().map(move |&d| d - g))
            .collect()
    }

    /// Internal degree of each coordinate of `F_n (x) N`.
    pub fn tensor_degrees(&self, n: usize, other: &Module) -> Vec<i32> {
        self.generator_degrees(n)
            .iter()
            .flat_map(|&g| other.degrees().iter().map(move |&d| d + g))
            .collect()
    }
}

fn write_block(out: &mut Mat, r0: usize, c0: usize, block: &Mat) {
    for r in 0..block.rows() {
        for c in 0..block.cols() {
            let v = block.get(r, c);
            if v != 0 {
                out.set(r0 + r, c0 + c, v);
            }
        }
    }
}

pub fn betti_numbers(m: &Arc<Module>, max_degree: usize) -> Vec<usize> {
    resolve(m, max_degree).betti()
}

pub fn syzygy(m: &Arc<Module>, i: usize) -> Arc<Module> {
    if i == 0 {
        return Arc::clone(m);
    }
    resolve(m, i - 1).syzygy(i)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("matrix {index} has {cols} columns but matrix {next} has {rows} rows")]
    ShapeMismatch { index: i64, next: i64, cols: usize, rows: usize },
    #[error("expected at least one matrix")]
    Empty,
    #[error("matrices live over different algebras")]
    MixedAlgebras,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ComplexReport {
    /// Homological index of the first matrix.
    pub start: i64,
    pub end: i64,
    /// Indices `n` with `d_n d_{n+1} = 0`.
    pub square_zero_at: Vec<i64>,
    /// Indices `n` where `ker d_n = im d_{n+1}`.
    pub exact_at: Vec<i64>,
    pub minimal: bool,
    pub failures: Vec<String>,
}

impl ComplexReport {
    /// Every consecutive pair composes to zero and is exact, and all entries lie in the maximal ideal.
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.minimal
    }
}

/// Checks a complex `d_start, d_{start+1}, ...` with `d_n : F_n -> F_{n-1}`.
///
/// `row_degrees`, when given, are the generator degrees of the target of the
/// first matrix; homogeneity is then checked along the chain.
pub fn verify_complex(matrices: &[AMatrix], start: i64, row_degrees: Option<&[i32]>) -> Result<ComplexReport, ComplexError> {
    let first = matrices.first().ok_or(ComplexError::Empty)?;
    for (i, w) in matrices.windows(2).enumerate() {
        if !Arc::ptr_eq(w[0].algebra(), w[1].algebra()) || !Arc::ptr_eq(first.algebra(), w[0].algebra()) {
            return Err(ComplexError::MixedAlgebras);
        }
        if w[0].cols() != w[1].rows() {
            return Err(ComplexError::ShapeMismatch {
                index: start + i as i64,
                next: start + i as i64 + 1,
                cols: w[0].cols(),
                rows: w[1].rows(),
            });
        }
    }
    let mut failures = Vec::new();
    if let Some(rd) = row_degrees {
        let mut degrees = rd.to_vec();
        for (i, m) in matrices.iter().enumerate() {
            match m.column_degrees(&degrees) {
                Ok(cd) => {
                    // zero columns keep the target's lowest degree; they do not affect exactness
                    let fallback = degrees.iter().copied().min().unwrap_or(0);
                    degrees = cd.into_iter().map(|d| d.unwrap_or(fallback)).collect();
                }
                Err(e) => {
                    failures.push(format!("d_{}: {e}", start + i as i64));
                    break;
                }
            }
        }
    }
    let minimal = matrices.iter().all(AMatrix::is_minimal);
    let realized: Vec<Mat> = matrices.iter().map(AMatrix::realize).collect();
    let mut square_zero_at = Vec::new();
    let mut exact_at = Vec::new();
    for i in 0..realized.len().saturating_sub(1) {
        let n = start + i as i64;
        let (d, e) = (&realized[i], &realized[i + 1]);
        if !d.mul(e).is_zero() {
            failures.push(format!("d_{n} d_{} != 0", n + 1));
            continue;
        }
        square_zero_at.push(n);
        let homology = d.cols() - d.rank() - e.rank();
        if homology == 0 {
            exact_at.push(n);
        } else {
            failures.push(format!("homology of dimension {homology} at F_{n}"));
        }
    }
    Ok(ComplexReport {
        start,
        end: start + matrices.len() as i64 - 1,
        square_zero_at,
        exact_at,
        minimal,
        failures,
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EstimateError {
    #[error("window of {len} Betti numbers is too short for stabilization length {s}; resolve to at least degree {need}")]
    WindowTooShort { len: usize, s: usize, need: usize },
    #[error("stabilization length must be positive")]
    ZeroStabilization,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ComplexityEstimate {
    pub betti: Vec<usize>,
    pub stabilization: usize,
    /// Order of the first finite difference of the even-index subsequence that is constant on its last `s` entries.
    pub even_order: Option<usize>,
    pub odd_order: Option<usize>,
    pub value: usize,
    pub stabilized: bool,
}

fn differences(seq: &[i64]) -> Vec<i64> {
    seq.windows(2).map(|w| w[1] - w[0]).collect()
}

fn stabilization_order(seq: &[i64], s: usize) -> Option<usize> {
    let mut cur = seq.to_vec();
    let mut r = 0;
    while cur.len() >= s {
        let tail = &cur[cur.len() - s..];
        if tail.iter().all(|&x| x == tail[0]) {
            return Some(r);
        }
        cur = differences(&cur);
        r += 1;
    }
    None
}

/// Estimates complexity from a Betti window by parity-split finite differences.
pub fn estimate_complexity(betti: &[usize], s: usize) -> Result<ComplexityEstimate, EstimateError> {
    if s == 0 {
        return Err(EstimateError::ZeroStabilization);
    }
    if betti.len() < 2 * s + 2 {
        return Err(EstimateError::WindowTooShort {
            len: betti.len(),
            s,
            need: 2 * s + 1,
        });
    }
    if betti[betti.len() - s..].iter().all(|&b| b == 0) {
        return Ok(ComplexityEstimate {
            betti: betti.to_vec(),
            stabilization: s,
            even_order: None,
            odd_order: None,
            value: 0,
            stabilized: true,
        });
    }
    let even: Vec<i64> = betti.iter().step_by(2).map(|&b| b as i64).collect();
    let odd: Vec<i64> = betti.iter().skip(1).step_by(2).map(|&b| b as i64).collect();
    let even_order = stabilization_order(&even, s);
    let odd_order = stabilization_order(&odd, s);
    let stabilized = even_order.is_some() && odd_order.is_some();
    let value = match (even_order, odd_order) {
        (Some(a), Some(b)) => 1 + a.max(b),
        // lower bound: every order that could be tested failed
        _ => 1 + even.len().max(odd.len()) + 1 - s,
    };
    Ok(ComplexityEstimate {
        betti: betti.to_vec(),
        stabilization: s,
        even_order,
        odd_order,
        value,
        stabilized,
    })
}

/// Resolves `m` to `max_degree` and estimates its complexity.
pub fn module_complexity(m: &Arc<Module>, max_degree: usize, s: usize) -> Result<ComplexityEstimate, EstimateError> {
    estimate_complexity(&betti_numbers(m, max_degree), s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::Field;
    use crate::gmod::{coker_presentation, residue_field};
    use crate::gralg::Polynomial;

    fn f5() -> Field {
        Field::new(5).unwrap()
    }

    fn quadric() -> Arc<Algebra> {
        Algebra::from_text(f5(), &["x", "y"], &["x^2", "y^2"]).unwrap()
    }

    fn pm(a: &Arc<Algebra>, rows: &[&[&str]]) -> AMatrix {
        let polys: Vec<Vec<Polynomial>> = rows
            .iter()
            .map(|r| r.iter().map(|t| Polynomial::parse(t, a.var_names(), a.field()).unwrap()).collect())
            .collect();
        AMatrix::from_polynomials(a, &polys)
    }

    #[test]
    fn free_resolution_is_trivial() {
        let a = quadric();
        let f = free_module(&a, &[0, 1]);
        assert_eq!(betti_numbers(&f, 4), vec![2, 0, 0, 0, 0]);
        assert!(syzygy(&f, 1).is_zero());
    }

    #[test]
    fn residue_field_of_quadric_ci() {
        let a = quadric();
        let k = residue_field(&a);
        let b = betti_numbers(&k, 8);
        assert_eq!(b, (1..=9).collect::<Vec<_>>());
        let omega = syzygy(&k, 1);
        assert_eq!(omega.dim(), 3);
        assert_eq!(betti_numbers(&omega, 4), b[1..6].to_vec());
        let graded = resolve(&k, 3).graded_betti();
        // linear resolution: F_n generated in degree n
        for (n, g) in graded.iter().enumerate() {
            assert_eq!(g.keys().copied().collect::<Vec<_>>(), vec![n as i32]);
        }
    }

    #[test]
    fn resolution_is_deterministic_and_cached() {
        let a = quadric();
        let m = coker_presentation(&pm(&a, &[&["x", "y"]]), &[0]).unwrap();
        let r1 = resolve(&m, 3);
        let r2 = resolve(&m, 6);
        for n in 1..=3 {
            assert_eq!(r1.realized(n), r2.realized(n));
        }
        let fresh = coker_presentation(&pm(&a, &[&["x", "y"]]), &[0]).unwrap();
        let r3 = resolve(&fresh, 6);
        for n in 1..=6 {
            assert_eq!(r2.realized(n), r3.realized(n));
        }
    }

    #[test]
    fn verify_complex_cases() {
        let a = quadric();
        let x = pm(&a, &[&["x"]]);
        let rep = verify_complex(&[x.clone(), x.clone(), x.clone()], 0, Some(&[0])).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.exact_at, vec![0, 1]);
        let y = pm(&a, &[&["y"]]);
        let rep = verify_complex(&[x.clone(), y.clone()], 0, None).unwrap();
        assert_eq!(rep.failures.len(), 1);
        assert!(rep.failures[0].contains("d_0 d_1"));
        let unit = pm(&a, &[&["1"]]);
        assert!(!verify_complex(&[unit, x.clone()], 0, None).unwrap().minimal);
        let wide = pm(&a, &[&["x", "y"]]);
        assert!(matches!(
            verify_complex(&[wide, x.clone(), x.clone()], 0, None),
            Err(ComplexError::ShapeMismatch { .. })
        ));
        // x alone is exact against x but not against xy
        let xy = pm(&a, &[&["x*y"]]);
        let rep = verify_complex(&[x.clone(), xy], 0, None).unwrap();
        assert!(rep.exact_at.is_empty());
    }

    #[test]
    fn estimate_examples() {
        let mut zero = vec![1];
        zero.extend(std::iter::repeat(0).take(20));
        assert_eq!(estimate_complexity(&zero, 4).unwrap().value, 0);
        let constant = vec![2; 21];
        let e = estimate_complexity(&constant, 4).unwrap();
        assert_eq!((e.value, e.stabilized), (1, true));
        let linear: Vec<usize> = (1..=13).collect();
        let e = estimate_complexity(&linear, 4).unwrap();
        assert_eq!((e.value, e.stabilized), (2, true));
        assert!(matches!(
            estimate_complexity(&[1, 2, 3], 4),
            Err(EstimateError::WindowTooShort { .. })
        ));
        let exponential: Vec<usize> = (0..21).map(|i| 1usize << i).collect();
        assert!(!estimate_complexity(&exponential, 4).unwrap().stabilized);
        // periodic of period two with distinct parities
        let alternating: Vec<usize> = (0..21).map(|i| 1 + i % 2).collect();
        assert_eq!(estimate_complexity(&alternating, 4).unwrap().value, 1);
    }
}
