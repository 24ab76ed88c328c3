#![allow(dead_code)]

use std::sync::Arc;

use cxlab_core::exactla::Field;
use cxlab_core::gmod::{coker_presentation, AMatrix, Module};
use cxlab_core::gralg::{Algebra, Polynomial};

pub const PERIODIC_RELATIONS: [&str; 10] = [
    "x1^2",
    "x2^2",
    "x5^2",
    "x3*x4",
    "x3*x5",
    "x4*x5",
    "x1*x4+x2*x4",
    "2*x1*x3+x2*x3",
    "x3^2-x2*x5+2*x1*x5",
    "x4^2-x2*x5+x1*x5",
];

pub const ALPHA: u32 = 2;

pub fn f5() -> Field {
    Field::new(5).unwrap()
}

pub fn periodic_ring() -> Arc<Algebra> {
    Algebra::from_text(f5(), &["x1", "x2", "x3", "x4", "x5"], &PERIODIC_RELATIONS).unwrap()
}

pub fn quadric() -> Arc<Algebra> {
    Algebra::from_text(f5(), &["x", "y"], &["x^2", "y^2"]).unwrap()
}

pub fn matrix(a: &Arc<Algebra>, rows: &[&[&str]]) -> AMatrix {
    let polys: Vec<Vec<Polynomial>> = rows
        .iter()
        .map(|r| r.iter().map(|t| Polynomial::parse(t, a.var_names(), a.field()).unwrap()).collect())
        .collect();
    AMatrix::from_polynomials(a, &polys)
}

/// `d_n = [[x1, alpha^n x3 + x4], [0, x2]]`.
pub fn periodic_d(a: &Arc<Algebra>, n: u64) -> AMatrix {
    let top = format!("{}*x3+x4", f5().pow(ALPHA, n));
    matrix(a, &[&["x1", &top], &["0", "x2"]])
}

/// `M = Im d_0 = coker d_1`.
pub fn periodic_module(a: &Arc<Algebra>) -> Arc<Module> {
    coker_presentation(&periodic_d(a, 1), &[0, 0]).unwrap()
}

pub fn cyclic(a: &Arc<Algebra>, gens: &[&str]) -> Arc<Module> {
    coker_presentation(&matrix(a, &[gens]), &[0]).unwrap()
}

/// Dense `F_p` linear algebra kept separate from the library, for oracles.
pub mod naive {
    pub fn rank(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
        let mut rank = 0;
        let cols = rows.first().map_or(0, Vec::len);
        for c in 0..cols {
            let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c] % p != 0) else {
                continue;
            };
            rows.swap(rank, piv);
            let inv = pow(rows[rank][c], p - 2, p);
            for x in rows[rank].iter_mut() {
                *x = *x * inv % p;
            }
            for r in 0..rows.len() {
                if r != rank && rows[r][c] != 0 {
                    let f = rows[r][c];
                    for k in 0..cols {
                        rows[r][k] = (rows[r][k] + p * p - f * rows[rank][k] % p) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Kernel of a `rows x cols` matrix (given as rows), as column vectors.
    pub fn kernel(rows: &[Vec<u64>], cols: usize, p: u64) -> Vec<Vec<u64>> {
        let mut m: Vec<Vec<u64>> = rows.to_vec();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            let Some(piv) = (r..m.len()).find(|&i| m[i][c] % p != 0) else {
                continue;
            };
            m.swap(r, piv);
            let inv = pow(m[r][c], p - 2, p);
            for x in m[r].iter_mut() {
                *x = *x * inv % p;
            }
            for i in 0..m.len() {
                if i != r && m[i][c] != 0 {
                    let f = m[i][c];
                    for k in 0..cols {
                        m[i][k] = (m[i][k] + p * p - f * m[r][k] % p) % p;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (0..cols)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut v = vec![0; cols];
                v[free] = 1;
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = (p - m[i][free] % p) % p;
                }
                v
            })
            .collect()
    }

    pub fn pow(mut b: u64, mut e: u64, p: u64) -> u64 {
        let mut acc = 1;
        b %= p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        acc
    }
}
