//! Generating sets for unit balls.
//!
//! Every sup over a unit ball used here is a sup over a set `A` with
//! `conv(A) = B_X` (up to closure and phases): vertex lists for polyhedral
//! balls, the whole sphere for smooth balls, and products `a (x) b` for
//! projective balls. Heuristic searches move on these parameterizations.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::Matrix;
use crate::scalar::{kron, pair, CVec, C64};
use crate::space::{NormKind, NormedSpace};

#[derive(Clone, Debug)]
pub(crate) enum Atoms {
    Finite(Arc<Vec<CVec>>),
    /// The unit sphere of the space (vectors normalized by its norm).
    Sphere(NormedSpace),
    Product {
        left: NormedSpace,
        right: NormedSpace,
        la: Box<Atoms>,
        ra: Box<Atoms>,
    },
}

#[derive(Clone, Debug)]
pub(crate) enum AtomPoint {
    Index(usize),
    Raw(CVec),
    Pair(Box<AtomPoint>, Box<AtomPoint>),
}

/// Generating set of `B_X`. With `convert`, polyhedral descriptions that
/// need a polarity conversion are used as well.
pub(crate) fn ball_atoms(space: &NormedSpace, convert: bool) -> Atoms {
    if let Some(v) = space.cheap_vertices_c() {
        return Atoms::Finite(v);
    }
    if convert && space.is_real() {
        if let Some(v) = space.vertices_c() {
            return Atoms::Finite(v);
        }
    }
    if let NormKind::TensorPi(a, b) = space.kind() {
        return Atoms::Product {
            left: a.clone(),
            right: b.clone(),
            la: Box::new(ball_atoms(a, convert)),
            ra: Box::new(ball_atoms(b, convert)),
        };
    }
    Atoms::Sphere(space.clone())
}

/// Generating set of `B_{X*}`.
pub(crate) fn dual_atoms(space: &NormedSpace, convert: bool) -> Atoms {
    ball_atoms(&space.dual(), convert)
}

fn gaussian(n: usize, complex: bool, rng: &mut ChaCha8Rng) -> CVec {
    (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = if complex { rng.sample(StandardNormal) } else { 0.0 };
            C64::new(re, im)
        })
        .collect()
}

pub(crate) fn random_unit(space: &NormedSpace, rng: &mut ChaCha8Rng) -> CVec {
    loop {
        let g = gaussian(space.dim(), !space.is_real(), rng);
        let n = space.norm_value(&g);
        if n > 1e-12 {
            return g.iter().map(|v| v / n).collect();
        }
    }
}

impl Atoms {
    pub(crate) fn realize(&self, p: &AtomPoint) -> CVec {
        match (self, p) {
            (Atoms::Finite(v), AtomPoint::Index(k)) => v[*k].clone(),
            (Atoms::Sphere(s), AtomPoint::Raw(x)) => {
                let n = s.norm_value(x);
                if n == 0.0 {
                    crate::space::some_unit_vector(s)
                } else {
                    x.iter().map(|v| v / n).collect()
                }
            }
            (Atoms::Product { la, ra, .. }, AtomPoint::Pair(a, b)) => kron(&la.realize(a), &ra.realize(b)),
            _ => unreachable!("atom point does not match its generating set"),
        }
    }

    pub(crate) fn sample(&self, rng: &mut ChaCha8Rng) -> AtomPoint {
        match self {
            Atoms::Finite(v) => AtomPoint::Index(rng.random_range(0..v.len())),
            Atoms::Sphere(s) => AtomPoint::Raw(gaussian(s.dim(), !s.is_real(), rng)),
            Atoms::Product { la, ra, .. } => AtomPoint::Pair(Box::new(la.sample(rng)), Box::new(ra.sample(rng))),
        }
    }

    /// Random local move of size roughly `step`.
    pub(crate) fn perturb(&self, p: &AtomPoint, step: f64, rng: &mut ChaCha8Rng) -> AtomPoint {
        match (self, p) {
            (Atoms::Finite(v), AtomPoint::Index(_)) => AtomPoint::Index(rng.random_range(0..v.len())),
            (Atoms::Sphere(s), AtomPoint::Raw(x)) => {
                let x = self.realize(&AtomPoint::Raw(x.clone()));
                let g = gaussian(x.len(), !s.is_real(), rng);
                AtomPoint::Raw(x.iter().zip(&g).map(|(a, b)| a + b * step).collect())
            }
            (Atoms::Product { la, ra, .. }, AtomPoint::Pair(a, b)) => match rng.random_range(0..3) {
                0 => AtomPoint::Pair(Box::new(la.perturb(a, step, rng)), b.clone()),
                1 => AtomPoint::Pair(a.clone(), Box::new(ra.perturb(b, step, rng))),
                _ => AtomPoint::Pair(Box::new(la.perturb(a, step, rng)), Box::new(ra.perturb(b, step, rng))),
            },
            _ => unreachable!("atom point does not match its generating set"),
        }
    }

    /// A point of the generating set close to (or aligned with) `v`.
    pub(crate) fn nearest(&self, v: &[C64]) -> AtomPoint {
        match self {
            Atoms::Finite(list) => {
                let mut best = (0, f64::INFINITY);
                for (k, a) in list.iter().enumerate() {
                    let d: f64 = a.iter().zip(v).map(|(x, y)| (x - y).norm_sqr()).sum();
                    if d < best.1 {
                        best = (k, d);
                    }
                }
                AtomPoint::Index(best.0)
            }
            Atoms::Sphere(_) => AtomPoint::Raw(v.to_vec()),
            Atoms::Product { left, right, la, ra } => {
                let m = Matrix::new(left.dim(), right.dim(), v.to_vec()).expect("shape");
                let svd = m.svd();
                let s = svd.singular[0].sqrt();
                let a: CVec = svd.u[0].iter().map(|z| z * s).collect();
                let b: CVec = svd.v[0].iter().map(|z| z.conj() * s).collect();
                AtomPoint::Pair(Box::new(la.nearest(&a)), Box::new(ra.nearest(&b)))
            }
        }
    }

}

/// `sup_{a in A} re <f, a>` when `A` is finite, with the maximizer.
pub(crate) fn best_finite(list: &[CVec], f: &[C64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (k, a) in list.iter().enumerate() {
        let v = pair(f, a).re;
        if v > best.1 {
            best = (k, v);
        }
    }
    best
}
