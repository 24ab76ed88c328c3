//! Graded Artinian algebras `k[x_1, ..., x_v] / I` with `I` homogeneous.
//!
//! Each degree slice of the ideal is kept as a reduced echelon basis over the
//! degree-`d` monomials, with monomials ordered by degrevlex (largest first).
//! Pivot monomials are the leading terms of `I_d`; the remaining monomials are
//! the standard monomials and form the canonical basis of `A_d`. Since the
//! leading terms form a monomial ideal, every divisor of a standard monomial is
//! again standard.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::exactla::{Field, Mat};

pub const DEFAULT_DEGREE_CAP: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("polynomial syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("relation `{0}` is not homogeneous")]
    NotHomogeneous(String),
    #[error("relation `{0}` has degree 0; relations must have positive degree")]
    ConstantRelation(String),
    #[error("quotient is still nonzero in degree {cap}; the algebra is possibly non-Artinian")]
    PossiblyNonArtinian { cap: usize },
    #[error("elements belong to different algebras")]
    MixedAlgebras,
}

/// Exponent vector of a monomial.
pub type Monomial = Vec<u32>;

pub fn monomial_degree(m: &[u32]) -> usize {
    m.iter().map(|&e| e as usize).sum()
}

/// Degrevlex comparison: higher total degree wins, ties broken by the
/// smaller exponent in the last variable where the two differ.
pub fn degrevlex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    match monomial_degree(a).cmp(&monomial_degree(b)) {
        Ordering::Equal => {}
        o => return o,
    }
    for (x, y) in a.iter().zip(b).rev() {
        if x != y {
            return y.cmp(x);
        }
    }
    Ordering::Equal
}

/// All monomials of degree `d` in `v` variables, degrevlex-descending.
pub fn monomials_of_degree(v: usize, d: usize) -> Vec<Monomial> {
    fn rec(v: usize, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if cur.len() + 1 == v {
            cur.push(left as u32);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e as u32);
            rec(v, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if v == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(v, d, &mut Vec::with_capacity(v), &mut out);
    out.sort_by(|a, b| degrevlex_cmp(b, a));
    out
}

fn mul_monomials(a: &[u32], b: &[u32]) -> Monomial {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// A polynomial with coefficients in `F_p`, terms sorted degrevlex-descending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    field: Field,
    nvars: usize,
    terms: Vec<(u32, Monomial)>,
}

impl Polynomial {
    pub fn zero(field: Field, nvars: usize) -> Self {
        Self {
            field,
            nvars,
            terms: Vec::new(),
        }
    }

    /// Collects like terms, drops zeros and sorts.
    pub fn from_terms(field: Field, nvars: usize, terms: impl IntoIterator<Item = (u32, Monomial)>) -> Self {
        let mut acc: BTreeMap<Monomial, u32> = BTreeMap::new();
        for (c, m) in terms {
            assert_eq!(m.len(), nvars, "exponent vector length mismatch");
            let e = acc.entry(m).or_insert(0);
            *e = field.add(*e, c % field.p());
        }
        let mut terms: Vec<(u32, Monomial)> = acc.into_iter().filter(|(_, c)| *c != 0).map(|(m, c)| (c, m)).collect();
        terms.sort_by(|a, b| degrevlex_cmp(&b.1, &a.1));
        Self { field, nvars, terms }
    }

    pub fn monomial(field: Field, coeff: u32, exps: Monomial) -> Self {
        let n = exps.len();
        Self::from_terms(field, n, [(coeff, exps)])
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(u32, Monomial)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.terms.windows(2).all(|w| monomial_degree(&w[0].1) == monomial_degree(&w[1].1))
    }

    /// Total degree of a nonzero homogeneous polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.is_homogeneous() {
            self.terms.first().map(|t| monomial_degree(&t.1))
        } else {
            None
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        Self::from_terms(self.field, self.nvars, self.terms.iter().chain(&other.terms).cloned())
    }

    pub fn scale(&self, s: u32) -> Polynomial {
        Self::from_terms(self.field, self.nvars, self.terms.iter().map(|(c, m)| (self.field.mul(*c, s), m.clone())))
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let f = self.field;
        Self::from_terms(
            f,
            self.nvars,
            self.terms
                .iter()
                .flat_map(|(a, m)| other.terms.iter().map(move |(b, n)| (f.mul(*a, *b), mul_monomials(m, n)))),
        )
    }

    /// Parses `c*x1^2*x3 - x2 + 4` style text over the given variable names.
    pub fn parse(text: &str, vars: &[String], field: Field) -> Result<Self, AlgebraError> {
        PolyParser::new(text, vars, field).parse()
    }

    /// Renders using the given variable names; round-trips through [`Polynomial::parse`].
    pub fn display_with<'a>(&'a self, vars: &'a [String]) -> impl fmt::Display + 'a {
        PolyDisplay { poly: self, vars }
    }
}

struct PolyDisplay<'a> {
    poly: &'a Polynomial,
    vars: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, m)) in self.poly.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if *c != 1 || m.iter().all(|&e| e == 0) {
                factors.push(c.to_string());
            }
            for (v, &e) in m.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.vars[v].clone()),
                    _ => factors.push(format!("{}^{}", self.vars[v], e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

struct PolyParser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a [String],
    field: Field,
}

impl<'a> PolyParser<'a> {
    fn new(text: &'a str, vars: &'a [String], field: Field) -> Self {
        Self {
            src: text.as_bytes(),
            pos: 0,
            vars,
            field,
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, AlgebraError> {
        Err(AlgebraError::Syntax {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn integer(&mut self) -> Result<u64, AlgebraError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match s.parse::<u64>() {
            Ok(n) => Ok(n),
            Err(_) => {
                self.pos = start;
                self.err("integer literal too large")
            }
        }
    }

    fn ident(&mut self) -> Result<String, AlgebraError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected variable or integer");
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn factor(&mut self, coeff: &mut u32, exps: &mut [u32]) -> Result<(), AlgebraError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                *coeff = self.field.mul(*coeff, (n % self.field.p() as u64) as u32);
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                let name = self.ident()?;
                let Some(v) = self.vars.iter().position(|x| *x == name) else {
                    self.pos = start;
                    return Err(AlgebraError::UnknownVariable(name));
                };
                let mut e = 1u64;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    e = self.integer()?;
                }
                exps[v] = exps[v].saturating_add(e.min(u32::MAX as u64) as u32);
            }
            _ => return self.err("expected variable or integer"),
        }
        Ok(())
    }

    fn parse(mut self) -> Result<Polynomial, AlgebraError> {
        let nv = self.vars.len();
        let mut terms = Vec::new();
        let mut sign_neg = false;
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                sign_neg = true;
            }
            Some(b'+') => self.pos += 1,
            None => return self.err("empty polynomial"),
            _ => {}
        }
        loop {
            let mut coeff = 1u32 % self.field.p();
            let mut exps = vec![0u32; nv];
            self.factor(&mut coeff, &mut exps)?;
            while self.peek() == Some(b'*') {
                self.pos += 1;
                self.factor(&mut coeff, &mut exps)?;
            }
            if sign_neg {
                coeff = self.field.neg(coeff);
            }
            terms.push((coeff, exps));
            match self.peek() {
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    sign_neg = false;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign_neg = true;
                }
                Some(_) => return self.err("expected `+`, `-` or `*`"),
            }
        }
        Ok(Polynomial::from_terms(self.field, nv, terms))
    }
}

/// Normal form of one monomial: sparse coefficients over the global basis.
type NormalForm = Vec<(usize, u32)>;

/// A graded Artinian local algebra with fully materialized degree tables.
#[derive(Debug)]
pub struct Algebra {
    field: Field,
    var_names: Vec<String>,
    relations: Vec<Polynomial>,
    basis: Vec<Monomial>,
    basis_degree: Vec<usize>,
    basis_index: HashMap<Monomial, usize>,
    /// `parent[s] = Some((i, t))` means `basis[s] = x_i * basis[t]`.
    parent: Vec<Option<(usize, usize)>>,
    hilbert: Vec<usize>,
    normal_forms: HashMap<Monomial, NormalForm>,
    var_actions: Vec<Mat>,
}

impl Algebra {
    /// Builds `k[vars] / (relations)`.
    pub fn build(
        field: Field,
        var_names: Vec<String>,
        relations: Vec<Polynomial>,
        degree_cap: usize,
    ) -> Result<Arc<Algebra>, AlgebraError> {
        let v = var_names.len();
        for r in &relations {
            assert_eq!(r.nvars(), v, "relation over the wrong number of variables");
            if r.is_zero() {
                continue;
            }
            let shown = r.display_with(&var_names).to_string();
            match r.degree() {
                None => return Err(AlgebraError::NotHomogeneous(shown)),
                Some(0) => return Err(AlgebraError::ConstantRelation(shown)),
                Some(_) => {}
            }
        }

        let mut basis = vec![vec![0u32; v]];
        let mut basis_degree = vec![0usize];
        let mut hilbert = vec![1usize];
        let mut normal_forms: HashMap<Monomial, NormalForm> = HashMap::new();
        normal_forms.insert(vec![0u32; v], vec![(0, 1)]);

        // reduced rows of the previous ideal slice, as sparse (monomial, coeff) lists
        let mut prev_ideal: Vec<Vec<(Monomial, u32)>> = Vec::new();
        let mut d = 1;
        loop {
            let monos = monomials_of_degree(v, d);
            let index: HashMap<&Monomial, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
            let mut gens: Vec<Vec<u32>> = Vec::new();
            for r in relations.iter().filter(|r| r.degree() == Some(d)) {
                let mut row = vec![0u32; monos.len()];
                for (c, m) in r.terms() {
                    row[index[m]] = *c;
                }
                gens.push(row);
            }
            for row in &prev_ideal {
                for i in 0..v {
                    let mut out = vec![0u32; monos.len()];
                    for (m, c) in row {
                        let mut mm = m.clone();
                        mm[i] += 1;
                        out[index[&mm]] = *c;
                    }
                    gens.push(out);
                }
            }
            let rref = Mat::from_columns(field, monos.len(), &gens).transpose().rref();
            let mut is_pivot = vec![false; monos.len()];
            for &c in &rref.pivots {
                is_pivot[c] = true;
            }
            let standard: Vec<usize> = (0..monos.len()).filter(|&c| !is_pivot[c]).collect();
            if standard.is_empty() {
                break;
            }
            if d >= degree_cap {
                return Err(AlgebraError::PossiblyNonArtinian { cap: degree_cap });
            }
            let offset = basis.len();
            let mut local = HashMap::new();
            for (k, &c) in standard.iter().enumerate() {
                local.insert(c, offset + k);
                basis.push(monos[c].clone());
                basis_degree.push(d);
                normal_forms.insert(monos[c].clone(), vec![(offset + k, 1)]);
            }
            for (i, &pc) in rref.pivots.iter().enumerate() {
                let nf: NormalForm = standard
                    .iter()
                    .filter_map(|&c| {
                        let x = rref.reduced.get(i, c);
                        (x != 0).then(|| (local[&c], field.neg(x)))
                    })
                    .collect();
                normal_forms.insert(monos[pc].clone(), nf);
            }
            hilbert.push(standard.len());
            prev_ideal = (0..rref.rank)
                .map(|i| {
                    (0..monos.len())
                        .filter_map(|c| {
                            let x = rref.reduced.get(i, c);
                            (x != 0).then(|| (monos[c].clone(), x))
                        })
                        .collect()
                })
                .collect();
            d += 1;
        }

        let basis_index: HashMap<Monomial, usize> = basis.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let parent = basis
            .iter()
            .map(|m| {
                let i = m.iter().position(|&e| e > 0)?;
                let mut q = m.clone();
                q[i] -= 1;
                Some((i, basis_index[&q]))
            })
            .collect();

        let mut alg = Algebra {
            field,
            var_names,
            relations,
            basis,
            basis_degree,
            basis_index,
            parent,
            hilbert,
            normal_forms,
            var_actions: Vec::new(),
        };
        let n = alg.dim();
        alg.var_actions = (0..v)
            .map(|i| {
                let mut m = Mat::zeros(field, n, n);
                for s in 0..n {
                    let mut mono = alg.basis[s].clone();
                    mono[i] += 1;
                    for (t, c) in alg.normal_form(&mono) {
                        m.set(t, s, c);
                    }
                }
                m
            })
            .collect();
        Ok(Arc::new(alg))
    }

    /// Convenience: parse relations from text and build with the default cap.
    pub fn from_text(field: Field, var_names: &[&str], relations: &[&str]) -> Result<Arc<Algebra>, AlgebraError> {
        let vars: Vec<String> = var_names.iter().map(|s| s.to_string()).collect();
        let rels = relations
            .iter()
            .map(|r| Polynomial::parse(r, &vars, field))
            .collect::<Result<Vec<_>, _>>()?;
        Self::build(field, vars, rels, DEFAULT_DEGREE_CAP)
    }

    /// `k[x_1..x_c] / (x_1^{n_1}, ..., x_c^{n_c})`.
    pub fn monomial_ci(field: Field, exponents: &[u32]) -> Result<Arc<Algebra>, AlgebraError> {
        let c = exponents.len();
        let vars: Vec<String> = (1..=c).map(|i| format!("x{i}")).collect();
        let rels = exponents
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                let mut m = vec![0; c];
                m[i] = n;
                Polynomial::monomial(field, 1, m)
            })
            .collect();
        let cap = exponents.iter().map(|&n| n as usize).sum::<usize>().max(1) + 1;
        Self::build(field, vars, rels, cap.max(DEFAULT_DEGREE_CAP))
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.var_names.len()
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn relations(&self) -> &[Polynomial] {
        &self.relations
    }

    /// `dim_k A`.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn hilbert_function(&self) -> &[usize] {
        &self.hilbert
    }

    pub fn top_degree(&self) -> usize {
        self.hilbert.len() - 1
    }

    /// Standard monomials, ordered by degree and then degrevlex-descending.
    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn basis_degree(&self, s: usize) -> usize {
        self.basis_degree[s]
    }

    pub fn basis_index(&self, m: &[u32]) -> Option<usize> {
        self.basis_index.get(m).copied()
    }

    /// `Some((i, t))` with `basis[s] = x_i * basis[t]`, `None` for the unit.
    pub fn parent(&self, s: usize) -> Option<(usize, usize)> {
        self.parent[s]
    }

    /// Regular representation of multiplication by `x_i`.
    pub fn var_action(&self, i: usize) -> &Mat {
        &self.var_actions[i]
    }

    /// Normal form of a monomial over the standard basis.
    pub fn normal_form(&self, m: &[u32]) -> NormalForm {
        if monomial_degree(m) > self.top_degree() {
            return Vec::new();
        }
        self.normal_forms.get(m).cloned().unwrap_or_default()
    }

    /// Reduces a polynomial into the algebra.
    pub fn reduce(self: &Arc<Self>, p: &Polynomial) -> AlgebraElement {
        let f = self.field;
        let mut coeffs = vec![0u32; self.dim()];
        for (c, m) in p.terms() {
            for (s, x) in self.normal_form(m) {
                coeffs[s] = f.add(coeffs[s], f.mul(*c, x));
            }
        }
        AlgebraElement {
            algebra: Arc::clone(self),
            coeffs,
        }
    }

    /// Matrix of left multiplication by `sum_s coeffs[s] * basis[s]` on `A`.
    pub fn left_mult_matrix(&self, coeffs: &[u32]) -> Mat {
        let f = self.field;
        let n = self.dim();
        let mut m = Mat::zeros(f, n, n);
        for (s, &c) in coeffs.iter().enumerate().filter(|(_, c)| **c != 0) {
            for t in 0..n {
                let prod = mul_monomials(&self.basis[s], &self.basis[t]);
                for (u, x) in self.normal_form(&prod) {
                    m.set(u, t, f.add(m.get(u, t), f.mul(c, x)));
                }
            }
        }
        m
    }

    /// `dim_k(m / m^2)`, which for an Artinian algebra is the codimension.
    pub fn codimension(&self) -> usize {
        self.hilbert.get(1).copied().unwrap_or(0)
    }

    /// Socle dimension: the common kernel of all variable actions.
    pub fn socle_dim(&self) -> usize {
        let n = self.dim();
        let mut stacked = Mat::zeros(self.field, 0, n);
        for x in &self.var_actions {
            stacked = stacked.vstack(x);
        }
        n - stacked.rank()
    }

    pub fn is_gorenstein(&self) -> bool {
        self.socle_dim() == 1
    }

    pub fn one(self: &Arc<Self>) -> AlgebraElement {
        let mut coeffs = vec![0; self.dim()];
        coeffs[0] = 1;
        AlgebraElement {
            algebra: Arc::clone(self),
            coeffs,
        }
    }

    pub fn element(self: &Arc<Self>, coeffs: Vec<u32>) -> AlgebraElement {
        assert_eq!(coeffs.len(), self.dim());
        AlgebraElement {
            algebra: Arc::clone(self),
            coeffs,
        }
    }

    /// Pretty-prints an element of the standard basis span.
    pub fn format_coeffs(&self, coeffs: &[u32]) -> String {
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(s, c)| (*c, self.basis[s].clone()));
        Polynomial::from_terms(self.field, self.nvars(), terms)
            .display_with(&self.var_names)
            .to_string()
    }
}

/// An element of an [`Algebra`], as coefficients over its standard basis.
#[derive(Clone, Debug)]
pub struct AlgebraElement {
    algebra: Arc<Algebra>,
    coeffs: Vec<u32>,
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.algebra, &other.algebra) && self.coeffs == other.coeffs
    }
}

impl AlgebraElement {
    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Degree of a nonzero homogeneous element.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut degs = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(s, _)| self.algebra.basis_degree[s]);
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }

    pub fn multiply(&self, other: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        if !Arc::ptr_eq(&self.algebra, &other.algebra) {
            return Err(AlgebraError::MixedAlgebras);
        }
        let a = &self.algebra;
        let f = a.field;
        let mut out = vec![0u32; a.dim()];
        for (s, &x) in self.coeffs.iter().enumerate().filter(|(_, x)| **x != 0) {
            for (t, &y) in other.coeffs.iter().enumerate().filter(|(_, y)| **y != 0) {
                let m = mul_monomials(&a.basis[s], &a.basis[t]);
                let xy = f.mul(x, y);
                for (u, z) in a.normal_form(&m) {
                    out[u] = f.add(out[u], f.mul(xy, z));
                }
            }
        }
        Ok(a.element(out))
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        if !Arc::ptr_eq(&self.algebra, &other.algebra) {
            return Err(AlgebraError::MixedAlgebras);
        }
        let f = self.algebra.field;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(self.algebra.element(coeffs))
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.algebra.format_coeffs(&self.coeffs))
    }
}
