//! Finitely generated graded modules over an [`Algebra`].
//!
//! A module is a graded `k`-vector space with one action matrix per algebra
//! variable (acting on column vectors). Construction always verifies that the
//! actions commute, kill every relation of the algebra and raise degree by
//! exactly one; nilpotence of the maximal ideal follows from the grading.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exactla::{EchelonBasis, Field, Mat};
use crate::gralg::{Algebra, AlgebraElement, Polynomial};
use crate::resol::{self, ResolutionStep};

pub const DEFAULT_ISO_ATTEMPTS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModuleError {
    #[error("modules or elements live over different algebras")]
    MixedAlgebras,
    #[error("action matrix {index} has shape {rows}x{cols}, expected {dim}x{dim}")]
    BadShape { index: usize, rows: usize, cols: usize, dim: usize },
    #[error("expected {expected} action matrices, got {got}")]
    WrongActionCount { expected: usize, got: usize },
    #[error("actions of x{0} and x{1} do not commute")]
    NotCommuting(usize, usize),
    #[error("relation `{0}` does not act as zero")]
    RelationFails(String),
    #[error("action of x{0} does not raise degree by one")]
    NotGraded(usize),
    #[error("vector is not homogeneous")]
    NotHomogeneous,
    #[error("presentation entry ({row}, {col}) is not homogeneous")]
    InhomogeneousEntry { row: usize, col: usize },
    #[error("presentation column {col} has inconsistent degrees ({first} vs {second})")]
    InconsistentDegrees { col: usize, first: i32, second: i32 },
    #[error("expected {expected} row degrees, got {got}")]
    RowDegreeCount { expected: usize, got: usize },
    #[error("spanning vectors do not form a submodule")]
    NotClosed,
    #[error("depth is undefined for the zero module")]
    ZeroModule,
    #[error("map does not commute with the action of x{0}")]
    NotEquivariant(usize),
    #[error("map is not homogeneous of degree {0}")]
    WrongMapDegree(i32),
}

/// A finitely generated graded module.
pub struct Module {
    algebra: Arc<Algebra>,
    degrees: Vec<i32>,
    actions: Vec<Mat>,
    provenance: Option<String>,
    monomial_actions: OnceLock<Vec<Mat>>,
    pub(crate) resolution_cache: Mutex<Vec<Arc<ResolutionStep>>>,
}

impl fmt::Debug for Module {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Module")
            .field("dim", &self.dim())
            .field("degrees", &self.degrees)
            .field("provenance", &self.provenance)
            .finish()
    }
}

impl Module {
    /// Builds a module after checking every structural invariant.
    pub fn new(
        algebra: Arc<Algebra>,
        degrees: Vec<i32>,
        actions: Vec<Mat>,
        provenance: Option<String>,
    ) -> Result<Arc<Module>, ModuleError> {
        let dim = degrees.len();
        if actions.len() != algebra.nvars() {
            return Err(ModuleError::WrongActionCount {
                expected: algebra.nvars(),
                got: actions.len(),
            });
        }
        for (index, x) in actions.iter().enumerate() {
            if x.rows() != dim || x.cols() != dim {
                return Err(ModuleError::BadShape {
                    index,
                    rows: x.rows(),
                    cols: x.cols(),
                    dim,
                });
            }
            for r in 0..dim {
                for c in 0..dim {
                    if x.get(r, c) != 0 && degrees[r] != degrees[c] + 1 {
                        return Err(ModuleError::NotGraded(index + 1));
                    }
                }
            }
        }
        for i in 0..actions.len() {
            for j in i + 1..actions.len() {
                if actions[i].mul(&actions[j]) != actions[j].mul(&actions[i]) {
                    return Err(ModuleError::NotCommuting(i + 1, j + 1));
                }
            }
        }
        let module = Module::assemble(algebra, degrees, actions, provenance);
        for r in module.algebra.relations() {
            if !module.eval_polynomial(r).is_zero() {
                let shown = r.display_with(module.algebra.var_names()).to_string();
                return Err(ModuleError::RelationFails(shown));
            }
        }
        Ok(Arc::new(module))
    }

    /// Assembly without validation, for modules derived from valid ones.
    fn assemble(algebra: Arc<Algebra>, degrees: Vec<i32>, actions: Vec<Mat>, provenance: Option<String>) -> Module {
        Module {
            algebra,
            degrees,
            actions,
            provenance,
            monomial_actions: OnceLock::new(),
            resolution_cache: Mutex::new(Vec::new()),
        }
    }

    fn eval_polynomial(&self, p: &Polynomial) -> Mat {
        let f = self.field();
        let mut acc = Mat::zeros(f, self.dim(), self.dim());
        for (c, m) in p.terms() {
            let mut term = Mat::identity(f, self.dim());
            for (i, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    term = self.actions[i].mul(&term);
                }
            }
            acc.add_scaled(*c, &term);
        }
        acc
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn field(&self) -> Field {
        self.algebra.field()
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_zero(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    pub fn action(&self, i: usize) -> &Mat {
        &self.actions[i]
    }

    pub fn actions(&self) -> &[Mat] {
        &self.actions
    }

    pub fn provenance(&self) -> Option<&str> {
        self.provenance.as_deref()
    }

    /// Hilbert function as `degree -> dimension`.
    pub fn hilbert_function(&self) -> BTreeMap<i32, usize> {
        let mut h = BTreeMap::new();
        for &d in &self.degrees {
            *h.entry(d).or_insert(0) += 1;
        }
        h
    }

    /// Basis indices of the given degree.
    pub fn degree_slice(&self, d: i32) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degrees[i] == d).collect()
    }

    /// Action matrices of every standard monomial of the algebra, in basis order.
    pub fn monomial_actions(&self) -> &[Mat] {
        self.monomial_actions.get_or_init(|| {
            let a = &self.algebra;
            let mut out: Vec<Mat> = Vec::with_capacity(a.dim());
            for s in 0..a.dim() {
                let m = match a.parent(s) {
                    None => Mat::identity(self.field(), self.dim()),
                    Some((i, t)) => self.actions[i].mul(&out[t]),
                };
                out.push(m);
            }
            out
        })
    }

    /// Action of an algebra element given by standard-basis coefficients.
    pub fn element_action(&self, coeffs: &[u32]) -> Mat {
        let mut acc = Mat::zeros(self.field(), self.dim(), self.dim());
        let mons = self.monomial_actions();
        for (s, &c) in coeffs.iter().enumerate() {
            acc.add_scaled(c, &mons[s]);
        }
        acc
    }

    /// Degree of a homogeneous vector, `None` for zero.
    pub fn vector_degree(&self, v: &[u32]) -> Result<Option<i32>, ModuleError> {
        let mut deg = None;
        for (i, &x) in v.iter().enumerate() {
            if x == 0 {
                continue;
            }
            match deg {
                None => deg = Some(self.degrees[i]),
                Some(d) if d != self.degrees[i] => return Err(ModuleError::NotHomogeneous),
                _ => {}
            }
        }
        Ok(deg)
    }

    /// Matrix of the `A`-linear map from a free module sending generator `g`
    /// to `images[g]`; columns are indexed by (generator, standard monomial).
    pub fn free_map_matrix(&self, images: &[Vec<u32>]) -> Mat {
        let a = self.algebra.dim();
        let mons = self.monomial_actions();
        let mut cols = Vec::with_capacity(images.len() * a);
        for img in images {
            for m in mons {
                cols.push(m.mul_vec(img));
            }
        }
        Mat::from_columns(self.field(), self.dim(), &cols)
    }

    /// Indices (into `subspace`) of a minimal generating set of the submodule
    /// spanned by the homogeneous vectors `subspace`, which must be closed
    /// under the action. Candidates are scanned by degree, then by index.
    pub fn minimal_generators_in(&self, subspace: &[Vec<u32>]) -> Vec<usize> {
        let mut span = EchelonBasis::new(self.field(), self.dim());
        for v in subspace {
            for x in &self.actions {
                span.insert(&x.mul_vec(v));
            }
        }
        let mut order: Vec<(i32, usize)> = subspace
            .iter()
            .enumerate()
            .filter_map(|(i, v)| self.vector_degree(v).ok().flatten().map(|d| (d, i)))
            .collect();
        order.sort();
        order.into_iter().filter(|&(_, i)| span.insert(&subspace[i])).map(|(_, i)| i).collect()
    }

    /// A basis of `M / mM`, as unit vectors of `M` with their degrees.
    pub fn min_generators(&self) -> Vec<(Vec<u32>, i32)> {
        let units: Vec<Vec<u32>> = (0..self.dim()).map(|i| unit(self.dim(), i)).collect();
        self.minimal_generators_in(&units)
            .into_iter()
            .map(|i| (units[i].clone(), self.degrees[i]))
            .collect()
    }

    /// Over an Artinian local ring every nonzero module has depth zero.
    pub fn depth(&self) -> Result<usize, ModuleError> {
        if self.is_zero() {
            Err(ModuleError::ZeroModule)
        } else {
            Ok(0)
        }
    }

    /// Structural equality: same algebra, grading and actions.
    pub fn same_as(&self, other: &Module) -> bool {
        Arc::ptr_eq(&self.algebra, &other.algebra) && self.degrees == other.degrees && self.actions == other.actions
    }
}

pub(crate) fn unit(n: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Degrees of the standard basis of the free module with the given generator degrees.
pub fn free_degrees(algebra: &Algebra, gen_degrees: &[i32]) -> Vec<i32> {
    gen_degrees
        .iter()
        .flat_map(|&g| (0..algebra.dim()).map(move |s| g + algebra.basis_degree(s) as i32))
        .collect()
}

pub fn free_module(algebra: &Arc<Algebra>, gen_degrees: &[i32]) -> Arc<Module> {
    let f = algebra.field();
    let a = algebra.dim();
    let n = gen_degrees.len() * a;
    let actions = (0..algebra.nvars())
        .map(|i| {
            let x = algebra.var_action(i);
            let mut m = Mat::zeros(f, n, n);
            for g in 0..gen_degrees.len() {
                for r in 0..a {
                    for c in 0..a {
                        let v = x.get(r, c);
                        if v != 0 {
                            m.set(g * a + r, g * a + c, v);
                        }
                    }
                }
            }
            m
        })
        .collect();
    Arc::new(Module::assemble(
        Arc::clone(algebra),
        free_degrees(algebra, gen_degrees),
        actions,
        Some(format!("free on degrees {gen_degrees:?}")),
    ))
}

pub fn zero_module(algebra: &Arc<Algebra>) -> Arc<Module> {
    free_module(algebra, &[])
}

pub fn residue_field(algebra: &Arc<Algebra>) -> Arc<Module> {
    let f = algebra.field();
    let actions = (0..algebra.nvars()).map(|_| Mat::zeros(f, 1, 1)).collect();
    Module::new(Arc::clone(algebra), vec![0], actions, Some("k".into())).expect("residue field invariants")
}

pub fn direct_sum(m: &Module, n: &Module) -> Result<Arc<Module>, ModuleError> {
    if !Arc::ptr_eq(m.algebra(), n.algebra()) {
        return Err(ModuleError::MixedAlgebras);
    }
    let f = m.field();
    let dim = m.dim() + n.dim();
    let actions = m
        .actions
        .iter()
        .zip(&n.actions)
        .map(|(x, y)| block_diag(f, x, y, dim))
        .collect();
    let degrees = m.degrees.iter().chain(&n.degrees).copied().collect();
    Ok(Arc::new(Module::assemble(Arc::clone(m.algebra()), degrees, actions, Some("direct sum".into()))))
}

fn block_diag(f: Field, x: &Mat, y: &Mat, dim: usize) -> Mat {
    let mut out = Mat::zeros(f, dim, dim);
    let o = x.rows();
    for r in 0..x.rows() {
        for c in 0..x.cols() {
            out.set(r, c, x.get(r, c));
        }
    }
    for r in 0..y.rows() {
        for c in 0..y.cols() {
            out.set(o + r, o + c, y.get(r, c));
        }
    }
    out
}

/// Relabels every degree by `+s`.
pub fn shift(m: &Module, s: i32) -> Arc<Module> {
    let degrees = m.degrees.iter().map(|d| d + s).collect();
    Arc::new(Module::assemble(
        Arc::clone(m.algebra()),
        degrees,
        m.actions.clone(),
        Some(format!("{} shifted by {s}", m.provenance().unwrap_or("module"))),
    ))
}

/// Quotient of `m` by the submodule generated by the homogeneous vectors `gens`.
/// Returns the quotient and the projection matrix.
pub fn quotient(
    m: &Arc<Module>,
    gens: &[Vec<u32>],
    provenance: Option<String>,
) -> Result<(Arc<Module>, Mat), ModuleError> {
    let f = m.field();
    let mut span = EchelonBasis::new(f, m.dim());
    let mut queue: Vec<Vec<u32>> = Vec::new();
    for g in gens {
        m.vector_degree(g)?;
        queue.push(g.clone());
    }
    while let Some(v) = queue.pop() {
        if span.insert(&v) {
            for x in &m.actions {
                let w = x.mul_vec(&v);
                if w.iter().any(|&c| c != 0) {
                    queue.push(w);
                }
            }
        }
    }
    let keep = span.nonpivots();
    let project = |v: &[u32]| -> Vec<u32> {
        let r = span.reduce(v);
        keep.iter().map(|&i| r[i]).collect()
    };
    let actions = m
        .actions
        .iter()
        .map(|x| {
            let cols: Vec<Vec<u32>> = keep.iter().map(|&j| project(&x.column(j))).collect();
            Mat::from_columns(f, keep.len(), &cols)
        })
        .collect();
    let proj_cols: Vec<Vec<u32>> = (0..m.dim()).map(|j| project(&unit(m.dim(), j))).collect();
    let projection = Mat::from_columns(f, keep.len(), &proj_cols);
    let degrees = keep.iter().map(|&i| m.degrees[i]).collect();
    let q = Arc::new(Module::assemble(Arc::clone(m.algebra()), degrees, actions, provenance));
    Ok((q, projection))
}

/// Submodule of `m` with the given basis: independent, homogeneous vectors
/// spanning an action-closed subspace. Returns it with its inclusion matrix.
pub fn submodule(
    m: &Arc<Module>,
    basis: &[Vec<u32>],
    provenance: Option<String>,
) -> Result<(Arc<Module>, Mat), ModuleError> {
    let f = m.field();
    let w = Mat::from_columns(f, m.dim(), basis);
    let mut degrees = Vec::with_capacity(basis.len());
    for v in basis {
        degrees.push(m.vector_degree(v)?.ok_or(ModuleError::NotHomogeneous)?);
    }
    let mut actions = Vec::with_capacity(m.actions.len());
    for x in &m.actions {
        let c = w.solve_many(&x.mul(&w)).ok_or(ModuleError::NotClosed)?;
        actions.push(c);
    }
    let sub = Arc::new(Module::assemble(Arc::clone(m.algebra()), degrees, actions, provenance));
    Ok((sub, w))
}

/// A matrix with entries in the algebra, used for presentations and differentials.
#[derive(Clone, Debug)]
pub struct AMatrix {
    algebra: Arc<Algebra>,
    rows: usize,
    cols: usize,
    entries: Vec<Vec<u32>>,
}

impl AMatrix {
    pub fn new(algebra: &Arc<Algebra>, rows: usize, cols: usize, entries: Vec<Vec<u32>>) -> Self {
        assert_eq!(entries.len(), rows * cols);
        assert!(entries.iter().all(|e| e.len() == algebra.dim()));
        Self {
            algebra: Arc::clone(algebra),
            rows,
            cols,
            entries,
        }
    }

    pub fn from_elements(algebra: &Arc<Algebra>, rows: Vec<Vec<AlgebraElement>>) -> Result<Self, ModuleError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            for e in row {
                if !Arc::ptr_eq(e.algebra(), algebra) {
                    return Err(ModuleError::MixedAlgebras);
                }
                entries.push(e.coeffs().to_vec());
            }
        }
        Ok(Self::new(algebra, r, c, entries))
    }

    pub fn from_polynomials(algebra: &Arc<Algebra>, rows: &[Vec<Polynomial>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let entries = rows
            .iter()
            .flat_map(|row| {
                assert_eq!(row.len(), c, "ragged matrix");
                row.iter().map(|p| algebra.reduce(p).coeffs().to_vec())
            })
            .collect();
        Self::new(algebra, r, c, entries)
    }

    /// The matrix whose column `h` is the vector `columns[h]` of a free module of rank `rows`.
    pub fn from_free_columns(algebra: &Arc<Algebra>, rows: usize, columns: &[Vec<u32>]) -> Self {
        let a = algebra.dim();
        let cols = columns.len();
        let mut entries = vec![Vec::new(); rows * cols];
        for (h, v) in columns.iter().enumerate() {
            for g in 0..rows {
                entries[g * cols + h] = v[g * a..(g + 1) * a].to_vec();
            }
        }
        Self::new(algebra, rows, cols, entries)
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, r: usize, c: usize) -> &[u32] {
        &self.entries[r * self.cols + c]
    }

    /// Column `c` as a vector of the free module of rank `rows`.
    pub fn column_vector(&self, c: usize) -> Vec<u32> {
        (0..self.rows).flat_map(|r| self.entry(r, c).iter().copied()).collect()
    }

    pub fn column_vectors(&self) -> Vec<Vec<u32>> {
        (0..self.cols).map(|c| self.column_vector(c)).collect()
    }

    /// `k`-linear matrix of the map `A^cols -> A^rows`.
    pub fn realize(&self) -> Mat {
        let a = self.algebra.dim();
        let f = self.algebra.field();
        let mut out = Mat::zeros(f, self.rows * a, self.cols * a);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let e = self.entry(r, c);
                if e.iter().all(|&x| x == 0) {
                    continue;
                }
                let block = self.algebra.left_mult_matrix(e);
                for i in 0..a {
                    for j in 0..a {
                        let v = block.get(i, j);
                        if v != 0 {
                            out.set(r * a + i, c * a + j, v);
                        }
                    }
                }
            }
        }
        out
    }

    /// Product over the algebra.
    pub fn mul(&self, other: &AMatrix) -> AMatrix {
        assert!(Arc::ptr_eq(&self.algebra, &other.algebra));
        assert_eq!(self.cols, other.rows);
        let a = self.algebra.dim();
        let f = self.algebra.field();
        let mut entries = vec![vec![0u32; a]; self.rows * other.cols];
        for r in 0..self.rows {
            for k in 0..self.cols {
                let left = self.entry(r, k);
                if left.iter().all(|&x| x == 0) {
                    continue;
                }
                let mult = self.algebra.left_mult_matrix(left);
                for c in 0..other.cols {
                    let prod = mult.mul_vec(other.entry(k, c));
                    let acc = &mut entries[r * other.cols + c];
                    for (x, y) in acc.iter_mut().zip(prod) {
                        *x = f.add(*x, y);
                    }
                }
            }
        }
        AMatrix::new(&self.algebra, self.rows, other.cols, entries)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.iter().all(|&x| x == 0))
    }

    /// True iff no entry has a nonzero constant term (all entries lie in `m`).
    pub fn is_minimal(&self) -> bool {
        self.entries.iter().all(|e| e[0] == 0)
    }

    /// Infers source generator degrees from target degrees; `None` for zero columns.
    pub fn column_degrees(&self, row_degrees: &[i32]) -> Result<Vec<Option<i32>>, ModuleError> {
        if row_degrees.len() != self.rows {
            return Err(ModuleError::RowDegreeCount {
                expected: self.rows,
                got: row_degrees.len(),
            });
        }
        let mut out = Vec::with_capacity(self.cols);
        for c in 0..self.cols {
            let mut deg: Option<i32> = None;
            for (r, &rd) in row_degrees.iter().enumerate() {
                let e = self.algebra.element(self.entry(r, c).to_vec());
                if e.is_zero() {
                    continue;
                }
                let d = e
                    .homogeneous_degree()
                    .ok_or(ModuleError::InhomogeneousEntry { row: r, col: c })? as i32
                    + rd;
                match deg {
                    None => deg = Some(d),
                    Some(first) if first != d => {
                        return Err(ModuleError::InconsistentDegrees {
                            col: c,
                            first,
                            second: d,
                        })
                    }
                    _ => {}
                }
            }
            out.push(deg);
        }
        Ok(out)
    }

    pub fn format(&self) -> String {
        let rows: Vec<String> = (0..self.rows)
            .map(|r| {
                let cells: Vec<String> = (0..self.cols).map(|c| self.algebra.format_coeffs(self.entry(r, c))).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        format!("[{}]", rows.join(", "))
    }
}

/// `A^{rows} / (column span)` with the given generator degrees.
pub fn coker_presentation(matrix: &AMatrix, row_degrees: &[i32]) -> Result<Arc<Module>, ModuleError> {
    matrix.column_degrees(row_degrees)?;
    let free = free_module(matrix.algebra(), row_degrees);
    let cols: Vec<Vec<u32>> = (0..matrix.cols()).map(|c| matrix.column_vector(c)).collect();
    let (q, _) = quotient(&free, &cols, Some(format!("coker {}", matrix.format())))?;
    Ok(q)
}

/// An `A`-linear map, homogeneous of degree `shift`.
#[derive(Clone, Debug)]
pub struct ModuleMap {
    pub source: Arc<Module>,
    pub target: Arc<Module>,
    pub matrix: Mat,
    pub shift: i32,
}

impl ModuleMap {
    pub fn new(source: Arc<Module>, target: Arc<Module>, matrix: Mat, shift: i32) -> Result<Self, ModuleError> {
        if !Arc::ptr_eq(source.algebra(), target.algebra()) {
            return Err(ModuleError::MixedAlgebras);
        }
        assert_eq!((matrix.rows(), matrix.cols()), (target.dim(), source.dim()));
        for i in 0..source.actions.len() {
            if target.actions[i].mul(&matrix) != matrix.mul(&source.actions[i]) {
                return Err(ModuleError::NotEquivariant(i + 1));
            }
        }
        for r in 0..matrix.rows() {
            for c in 0..matrix.cols() {
                if matrix.get(r, c) != 0 && target.degrees[r] != source.degrees[c] + shift {
                    return Err(ModuleError::WrongMapDegree(shift));
                }
            }
        }
        Ok(Self {
            source,
            target,
            matrix,
            shift,
        })
    }

    pub fn is_isomorphism(&self) -> bool {
        self.source.dim() == self.target.dim() && self.matrix.rank() == self.source.dim()
    }
}

/// Homogeneous maps `M -> N` of degree `shift`, via `Hom(M,N) = ker(Hom(F_0,N) -> Hom(F_1,N))`.
pub fn graded_hom_space(m: &Arc<Module>, n: &Arc<Module>, shift: i32) -> Result<Vec<ModuleMap>, ModuleError> {
    if !Arc::ptr_eq(m.algebra(), n.algebra()) {
        return Err(ModuleError::MixedAlgebras);
    }
    let res = resol::resolve(m, 1);
    let gens = res.generator_degrees(0);
    let dn = n.dim();
    // columns of Hom(F_0, N)_shift
    let coords: Vec<usize> = gens
        .iter()
        .enumerate()
        .flat_map(|(g, &d)| n.degree_slice(d + shift).into_iter().map(move |x| g * dn + x))
        .collect();
    let delta = res.hom_differential(1, n).select_columns(&coords);
    let kernel = delta.kernel_basis();
    let section = res.augmentation_section();
    let mut out = Vec::with_capacity(kernel.cols());
    for j in 0..kernel.cols() {
        let mut images = vec![vec![0u32; dn]; gens.len()];
        for (k, &c) in coords.iter().enumerate() {
            images[c / dn][c % dn] = kernel.get(k, j);
        }
        let on_free = n.free_map_matrix(&images);
        let matrix = on_free.mul(&section);
        out.push(ModuleMap::new(Arc::clone(m), Arc::clone(n), matrix, shift)?);
    }
    Ok(out)
}

/// A basis of `Hom_A(M, N)` made of homogeneous maps, ordered by degree.
pub fn hom_space(m: &Arc<Module>, n: &Arc<Module>) -> Result<Vec<ModuleMap>, ModuleError> {
    if m.is_zero() || n.is_zero() {
        return Ok(Vec::new());
    }
    let lo = n.degrees.iter().min().unwrap() - m.degrees.iter().max().unwrap();
    let hi = n.degrees.iter().max().unwrap() - m.degrees.iter().min().unwrap();
    let mut out = Vec::new();
    for s in lo..=hi {
        out.extend(graded_hom_space(m, n, s)?);
    }
    Ok(out)
}

/// Outcome of a graded isomorphism search.
#[derive(Clone, Debug)]
pub enum IsoVerdict {
    Yes(ModuleMap),
    StructurallyDistinct(String),
    NoWitnessFound { attempts: usize },
}

impl IsoVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, IsoVerdict::Yes(_))
    }
}

/// Searches for a degree-preserving isomorphism `M -> N`.
///
/// `StructurallyDistinct` is a proof of non-isomorphism; `NoWitnessFound` is
/// inconclusive.
pub fn is_isomorphic(m: &Arc<Module>, n: &Arc<Module>, seed: u64, attempts: usize) -> Result<IsoVerdict, ModuleError> {
    if !Arc::ptr_eq(m.algebra(), n.algebra()) {
        return Err(ModuleError::MixedAlgebras);
    }
    if m.dim() != n.dim() {
        return Ok(IsoVerdict::StructurallyDistinct(format!(
            "dimensions differ ({} vs {})",
            m.dim(),
            n.dim()
        )));
    }
    if m.hilbert_function() != n.hilbert_function() {
        return Ok(IsoVerdict::StructurallyDistinct("Hilbert functions differ".into()));
    }
    let (bm, bn) = (m.min_generators().len(), n.min_generators().len());
    if bm != bn {
        return Ok(IsoVerdict::StructurallyDistinct(format!(
            "minimal generator counts differ ({bm} vs {bn})"
        )));
    }
    if m.same_as(n) {
        let id = Mat::identity(m.field(), m.dim());
        return Ok(IsoVerdict::Yes(ModuleMap::new(Arc::clone(m), Arc::clone(n), id, 0)?));
    }
    let basis = graded_hom_space(m, n, 0)?;
    if basis.is_empty() {
        return Ok(IsoVerdict::StructurallyDistinct("no degree-0 homomorphisms".into()));
    }
    let f = m.field();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..attempts {
        let mut acc = Mat::zeros(f, n.dim(), m.dim());
        for (i, b) in basis.iter().enumerate() {
            // the first attempt tries the first basis map alone
            let c = if attempt == 0 {
                u32::from(i == 0)
            } else {
                rng.gen_range(0..f.p())
            };
            acc.add_scaled(c, &b.matrix);
        }
        if acc.rank() == m.dim() {
            let map = ModuleMap::new(Arc::clone(m), Arc::clone(n), acc, 0)?;
            return Ok(IsoVerdict::Yes(map));
        }
    }
    Ok(IsoVerdict::NoWitnessFound { attempts })
}
