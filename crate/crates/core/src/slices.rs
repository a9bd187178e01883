//! Slices of finite point sets, convex-hull membership and a falsifier for
//! determining families of slices.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::lp::{maximize_leq, LpStatus};
use crate::scalar::{pair, CVec, C64};
use crate::space::{Functional, NormedSpace};

/// `Slice(A, x*, delta) = {x in A : re x*(x) > sup re x*(A) - delta}`.
#[derive(Clone, Debug)]
pub struct SliceSpec {
    pub set: Vec<CVec>,
    pub functional: CVec,
    pub depth: f64,
}

impl SliceSpec {
    pub fn new(set: Vec<CVec>, functional: CVec, depth: f64) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::EmptySet("slice point set"));
        }
        if !(depth > 0.0) {
            return Err(Error::InvalidArgument(format!("slice depth must be positive, got {depth}")));
        }
        let d = functional.len();
        if let Some(p) = set.iter().find(|p| p.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: p.len() });
        }
        Ok(SliceSpec { set, functional, depth })
    }

    /// Uses the vertices of a polyhedral unit ball as the point set.
    pub fn on_ball(space: &NormedSpace, functional: &Functional, depth: f64) -> Result<Self> {
        let v = space.vertices().ok_or_else(|| space.not_polyhedral())?;
        let set = v.iter().map(|x| crate::scalar::ratvec_to_c(x)).collect();
        SliceSpec::new(set, functional.coefficients().to_vec(), depth)
    }

    /// Indices of the points in the slice.
    pub fn indices(&self) -> Vec<usize> {
        let vals: Vec<f64> = self.set.iter().map(|x| pair(&self.functional, x).re).collect();
        let sup = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (0..vals.len()).filter(|&k| vals[k] > sup - self.depth).collect()
    }
}

/// Points of the slice; never empty since a maximizer always belongs to it.
pub fn slice(spec: &SliceSpec) -> Result<Vec<CVec>> {
    if spec.set.is_empty() {
        return Err(Error::EmptySet("slice point set"));
    }
    Ok(spec.indices().into_iter().map(|k| spec.set[k].clone()).collect())
}

/// Separation of `a` from `conv(B)`.
#[derive(Clone, Debug, Serialize)]
pub struct Separation {
    pub point: CVec,
    /// Real functional with `||f||_1 = 1`.
    pub functional: Vec<f64>,
    /// `f(a) - max_b f(b)`, the sup-norm distance from `a` to `conv(B)`.
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Containment {
    pub contained: bool,
    pub separation: Option<Separation>,
}

fn realify(x: &[C64]) -> Vec<f64> {
    x.iter().map(|c| c.re).chain(x.iter().map(|c| c.im)).collect()
}

/// `max {f(a) - max_b f(b) : ||f||_1 <= 1}` with its maximizer `f`, computed
/// on real coordinates (real and imaginary parts stacked).
pub fn separation_margin(a: &[C64], b: &[CVec]) -> Result<(f64, Vec<f64>)> {
    let a = realify(a);
    let d = a.len();
    let bs: Vec<Vec<f64>> = b.iter().map(|p| realify(p)).collect();
    // variables f+ (d), f- (d), s+ , s-; maximize a.(f+ - f-) - (s+ - s-)
    let mut c: Vec<f64> = a.iter().copied().chain(a.iter().map(|v| -v)).collect();
    c.extend([-1.0, 1.0]);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs = Vec::new();
    for p in &bs {
        let mut r: Vec<f64> = p.iter().copied().chain(p.iter().map(|v| -v)).collect();
        r.extend([-1.0, 1.0]);
        rows.push(r);
        rhs.push(0.0);
    }
    let mut norm_row = vec![1.0; 2 * d];
    norm_row.extend([0.0, 0.0]);
    rows.push(norm_row);
    rhs.push(1.0);
    let sol = maximize_leq(&c, &rows, &rhs)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Lp(format!("separation program ended {:?}", sol.status)));
    }
    let f: Vec<f64> = (0..d).map(|i| sol.x[i] - sol.x[d + i]).collect();
    let fa: f64 = f.iter().zip(&a).map(|(x, y)| x * y).sum();
    let fb = bs.iter().map(|p| f.iter().zip(p).map(|(x, y)| x * y).sum::<f64>()).fold(f64::NEG_INFINITY, f64::max);
    Ok((fa - fb, f))
}

/// Whether every point of `A` lies within `eta` of `conv(B)` in the sup norm
/// of the coordinates; otherwise the first violating point with a separating
/// functional.
pub fn contains_in_conv(a: &[CVec], b: &[CVec], eta: f64) -> Result<Containment> {
    if b.is_empty() {
        return Err(Error::EmptySet("hull point set"));
    }
    let d = b[0].len();
    for p in a.iter().chain(b) {
        if p.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: p.len() });
        }
    }
    for p in a {
        let (m, f) = separation_margin(p, b)?;
        // slack for the rounding of the LP on points of the hull boundary
        if m > eta + 1e-12 {
            return Ok(Containment {
                contained: false,
                separation: Some(Separation {
                    point: p.clone(),
                    functional: f,
                    margin: m,
                }),
            });
        }
    }
    Ok(Containment {
        contained: true,
        separation: None,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    /// Indices into `A` of a set meeting every slice of the family.
    pub subset: Vec<usize>,
    pub separation: Separation,
}

#[derive(Clone, Debug, Serialize)]
pub struct Resolution {
    pub eta: f64,
    pub budget: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeterminingVerdict {
    pub counterexample: Option<Counterexample>,
    pub resolution: Resolution,
}

/// Searches for `B` contained in `A`, meeting every slice of `family`, with
/// `A` not within `eta` of `conv(B)`.
///
/// Every hitting set contains a set with one point per slice, and shrinking
/// `B` shrinks `conv(B)`, so when the number of such choices fits in `budget`
/// they are all tried and the answer is conclusive. Otherwise each of `budget`
/// random attempts picks one point per slice and greedily drops points while
/// the set still meets every slice; then `None` only means nothing was found.
pub fn determining_falsifier(a: &[CVec], family: &[SliceSpec], eta: f64, budget: usize, cfg: &Config) -> Result<DeterminingVerdict> {
    if a.is_empty() {
        return Err(Error::EmptySet("point set"));
    }
    let mut slices: Vec<Vec<usize>> = Vec::with_capacity(family.len());
    for s in family {
        // map slice points back to indices of A
        let pts = slice(s)?;
        let idx: Vec<usize> = pts
            .iter()
            .filter_map(|p| a.iter().position(|q| q.iter().zip(p).all(|(x, y)| (x - y).norm() <= 1e-12)))
            .collect();
        if idx.is_empty() {
            return Err(Error::EmptySet("slice (no point of A)"));
        }
        slices.push(idx);
    }
    let resolution = Resolution { eta, budget, seed: cfg.seed };
    let pts = |ix: &[usize]| -> Vec<CVec> { ix.iter().map(|&k| a[k].clone()).collect() };
    let check = |ix: &[usize]| -> Result<Option<Separation>> { Ok(contains_in_conv(a, &pts(ix), eta)?.separation) };

    // exhaustive minimal choices (one point per slice) when affordable
    let combos: usize = slices.iter().map(|s| s.len()).try_fold(1usize, |acc, n| acc.checked_mul(n)).unwrap_or(usize::MAX);
    if combos <= budget {
        let mut choice = vec![0usize; slices.len()];
        loop {
            let mut set: Vec<usize> = choice.iter().zip(&slices).map(|(&c, s)| s[c]).collect();
            set.sort_unstable();
            set.dedup();
            if let Some(sep) = check(&set)? {
                return Ok(DeterminingVerdict {
                    counterexample: Some(Counterexample { subset: set, separation: sep }),
                    resolution,
                });
            }
            // odometer increment
            let mut k = 0;
            loop {
                if k == choice.len() {
                    return Ok(DeterminingVerdict { counterexample: None, resolution });
                }
                choice[k] += 1;
                if choice[k] < slices[k].len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
        }
    }

    let mut rng = cfg.rng(0xFA15);
    let hits_all = |set: &[usize]| slices.iter().all(|s| s.iter().any(|k| set.contains(k)));
    for _ in 0..budget {
        let mut set: Vec<usize> = Vec::new();
        for s in &slices {
            if !s.iter().any(|k| set.contains(k)) {
                set.push(s[rng.random_range(0..s.len())]);
            }
        }
        // greedy removal in random order
        let mut order = set.clone();
        order.shuffle(&mut rng);
        for k in order {
            let trial: Vec<usize> = set.iter().copied().filter(|&j| j != k).collect();
            if !trial.is_empty() && hits_all(&trial) {
                set = trial;
            }
        }
        set.sort_unstable();
        if let Some(sep) = check(&set)? {
            return Ok(DeterminingVerdict {
                counterexample: Some(Counterexample { subset: set, separation: sep }),
                resolution,
            });
        }
    }
    Ok(DeterminingVerdict { counterexample: None, resolution })
}

/// Checks on sampled unit functionals that `re y*(y0) > 1 - delta` forces
/// `||y0* - y*|| < eps`, where `y0*` is the norming functional of `y0`.
/// Returns the largest distance seen among admitted samples.
pub fn strongly_exposed_check(space: &NormedSpace, y0: &[C64], delta: f64, eps: f64, samples: usize, cfg: &Config) -> Result<(bool, f64)> {
    space.check_dim(y0.len())?;
    let n0 = space.eval_norm(y0)?;
    if (n0 - 1.0).abs() > 1e-9 {
        return Err(Error::NotOnSphere { norm: n0 });
    }
    let dual = space.dual();
    let f0 = space.eval_norm_witness(y0)?.functional;
    let mut rng = cfg.rng(0x5E1F);
    let mut worst: f64 = 0.0;
    for k in 0..samples {
        // half the samples are perturbations of y0*, the rest uniform directions
        let g: CVec = (0..space.dim())
            .map(|_| {
                let re: f64 = rng.sample(rand_distr::StandardNormal);
                let im: f64 = if space.is_real() { 0.0 } else { rng.sample(rand_distr::StandardNormal) };
                C64::new(re, im)
            })
            .collect();
        let scale = if k % 2 == 0 { delta * rng.random::<f64>() } else { 1.0 };
        let raw: CVec = if k % 2 == 0 { f0.iter().zip(&g).map(|(a, b)| a + b * scale).collect() } else { g };
        let nr = dual.eval_norm(&raw)?;
        if nr < 1e-12 {
            continue;
        }
        let f: CVec = raw.iter().map(|c| c / nr).collect();
        if pair(&f, y0).re > 1.0 - delta {
            let diff: CVec = f0.iter().zip(&f).map(|(a, b)| a - b).collect();
            worst = worst.max(dual.eval_norm(&diff)?);
        }
    }
    Ok((worst < eps, worst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::real_vec;

    fn square() -> Vec<CVec> {
        [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]].iter().map(|p| real_vec(p)).collect()
    }

    #[test]
    fn slice_examples() {
        let s = SliceSpec::new(square(), real_vec(&[1.0, 0.0]), 0.5).unwrap();
        assert_eq!(slice(&s).unwrap(), vec![real_vec(&[1.0, 1.0]), real_vec(&[1.0, -1.0])]);
        let s = SliceSpec::new(square(), real_vec(&[1.0, 0.0]), 3.0).unwrap();
        assert_eq!(slice(&s).unwrap().len(), 4);
        let two = vec![real_vec(&[-1.0, 0.0]), real_vec(&[1.0, 0.0])];
        let s = SliceSpec::new(two, real_vec(&[1.0, 0.0]), 0.1).unwrap();
        assert_eq!(slice(&s).unwrap(), vec![real_vec(&[1.0, 0.0])]);
    }

    #[test]
    fn containment_examples() {
        let simplex: Vec<CVec> = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]].iter().map(|p| real_vec(p)).collect();
        assert!(contains_in_conv(&simplex[1..2], &simplex, 0.0).unwrap().contained);
        assert!(contains_in_conv(&[real_vec(&[0.0, 0.0])], &square(), 0.0).unwrap().contained);
        let c = contains_in_conv(&[real_vec(&[2.0, 0.0])], &square(), 0.0).unwrap();
        let sep = c.separation.unwrap();
        assert!((sep.margin - 1.0).abs() < 1e-12);
        assert!((sep.functional[0] - 1.0).abs() < 1e-12 && sep.functional[1].abs() < 1e-12);
        assert!(contains_in_conv(&square(), &square(), 0.0).unwrap().contained);
        assert!(contains_in_conv(&square(), &[], 0.0).is_err());
    }

    #[test]
    fn falsifier_examples() {
        let cfg = Config::default();
        let a = square();
        let one = vec![SliceSpec::new(a.clone(), real_vec(&[1.0, 1.0]), 0.1).unwrap()];
        let v = determining_falsifier(&a, &one, 0.25, 100, &cfg).unwrap();
        let cx = v.counterexample.unwrap();
        assert_eq!(cx.subset, vec![0]);
        assert!(cx.separation.margin > 0.25);
        let again = contains_in_conv(&a, &[a[0].clone()], 0.25).unwrap().separation.unwrap();
        assert!((again.margin - cx.separation.margin).abs() < 1e-9);

        let all: Vec<SliceSpec> = a.iter().map(|p| SliceSpec::new(a.clone(), p.clone(), 0.1).unwrap()).collect();
        assert!(determining_falsifier(&a, &all, 0.25, 100, &cfg).unwrap().counterexample.is_none());

        let two = vec![real_vec(&[-1.0, 0.0]), real_vec(&[1.0, 0.0])];
        let d = 0.1;
        let fam: Vec<SliceSpec> = two.iter().map(|p| SliceSpec::new(two.clone(), p.clone(), d).unwrap()).collect();
        assert!(determining_falsifier(&two, &fam, 2.0 * d, 100, &cfg).unwrap().counterexample.is_none());
    }

    #[test]
    fn euclidean_points_are_strongly_exposed() {
        let cfg = Config::default();
        let l2 = NormedSpace::l2(2, crate::scalar::Field::Real);
        let (ok, worst) = strongly_exposed_check(&l2, &real_vec(&[0.6, 0.8]), 1e-4, 0.05, 400, &cfg).unwrap();
        assert!(ok, "{worst}");
        // a vertex of the square is not strongly exposed
        let linf = NormedSpace::linf(2);
        let (ok, _) = strongly_exposed_check(&linf, &real_vec(&[1.0, 1.0]), 1e-4, 0.05, 400, &cfg).unwrap();
        assert!(!ok);
    }
}
