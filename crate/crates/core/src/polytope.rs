//! Exact vertex enumeration for polytopes `{x : a_k . x <= 1}` by the
//! double-description method.
//!
//! The polytope is homogenized to the cone `{(x, t) : a_k . x - t <= 0, -t <= 0}`
//! and extreme rays are maintained as primitive integer vectors. Adjacency is
//! decided combinatorially from zero sets. Every norm ball contains the origin
//! in its interior, so the same routine converts vertex lists to facet lists
//! (polarity) and back.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{rat_rank, rat_solve};
use crate::scalar::{Rat, RatVec};

#[derive(Clone, Debug)]
struct Ray {
    coords: Vec<BigInt>,
    zeros: Bits,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn contains(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == *b)
    }
}

fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
    v
}

fn int_dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Scale a rational row to a primitive integer row with the same sign.
fn integer_row(row: &[Rat]) -> Vec<BigInt> {
    let l = row.iter().fold(BigInt::one(), |l, r| l.lcm(r.denom()));
    primitive(row.iter().map(|r| (r * Rat::from_integer(l.clone())).to_integer()).collect())
}

/// Vertices of the polytope `{x : a . x <= 1 for every a in normals}`.
///
/// The polytope must be bounded; this holds exactly when the normals
/// positively span the space, which is the case for the facet (or vertex)
/// list of any norm ball.
pub fn enumerate_vertices(normals: &[RatVec], max_dim: usize) -> Result<Vec<RatVec>> {
    let Some(first) = normals.first() else {
        return Err(Error::EmptySet("halfspace list"));
    };
    let d = first.len();
    if d > max_dim {
        return Err(Error::Guardrail {
            what: "polyhedral conversion dimension",
            value: d,
            limit: max_dim,
        });
    }
    if normals.iter().any(|a| a.len() != d) {
        return Err(Error::InvalidArgument("halfspace normals of mixed length".into()));
    }

    // constraint rows r . (x, t) <= 0
    let uniq: BTreeSet<RatVec> = normals.iter().filter(|a| a.iter().any(|v| !v.is_zero())).cloned().collect();
    let mut rows: Vec<Vec<BigInt>> = uniq
        .iter()
        .map(|a| {
            let mut r = a.clone();
            r.push(-Rat::one());
            integer_row(&r)
        })
        .collect();
    let mut t_row = vec![BigInt::zero(); d + 1];
    t_row[d] = -BigInt::one();
    rows.push(t_row);
    let m = rows.len();

    // initial simplicial cone from d+1 independent rows
    let as_rat = |r: &Vec<BigInt>| -> RatVec { r.iter().map(|v| Rat::from_integer(v.clone())).collect() };
    let mut basis: Vec<usize> = Vec::new();
    let mut basis_rows: Vec<RatVec> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let mut trial = basis_rows.clone();
        trial.push(as_rat(r));
        if rat_rank(&trial) == trial.len() {
            basis.push(i);
            basis_rows = trial;
            if basis.len() == d + 1 {
                break;
            }
        }
    }
    if basis.len() < d + 1 {
        return Err(Error::InvalidArgument(
            "halfspaces do not bound a polytope (normals do not span)".into(),
        ));
    }

    let mut rays: Vec<Ray> = Vec::with_capacity(d + 1);
    for j in 0..=d {
        let rhs: Vec<Rat> = (0..=d).map(|k| if k == j { -Rat::one() } else { Rat::zero() }).collect();
        let sol = rat_solve(&basis_rows, &rhs).expect("independent rows");
        let coords = integer_row(&sol);
        let mut zeros = Bits::new(m);
        for (k, &bi) in basis.iter().enumerate() {
            if k != j {
                zeros.set(bi);
            }
        }
        rays.push(Ray { coords, zeros });
    }

    let in_basis: BTreeSet<usize> = basis.iter().copied().collect();
    for (h, row) in rows.iter().enumerate() {
        if in_basis.contains(&h) {
            continue;
        }
        let vals: Vec<BigInt> = rays.iter().map(|r| int_dot(row, &r.coords)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        if pos.is_empty() {
            for (r, v) in rays.iter_mut().zip(&vals) {
                if v.is_zero() {
                    r.zeros.set(h);
                }
            }
            continue;
        }
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();

        let mut new_rays = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zeros.and(&rays[n].zeros);
                if common.count() + 1 < d {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(t, r)| t == p || t == n || !r.zeros.contains(&common));
                if !adjacent {
                    continue;
                }
                let a = &vals[p];
                let b = &vals[n];
                let coords: Vec<BigInt> = rays[n]
                    .coords
                    .iter()
                    .zip(&rays[p].coords)
                    .map(|(cn, cp)| a * cn - b * cp)
                    .collect();
                let mut zeros = common;
                zeros.set(h);
                new_rays.push(Ray {
                    coords: primitive(coords),
                    zeros,
                });
            }
        }
        let mut kept: Vec<Ray> = Vec::with_capacity(rays.len() + new_rays.len());
        for (i, mut r) in rays.into_iter().enumerate() {
            if vals[i].is_positive() {
                continue;
            }
            if vals[i].is_zero() {
                r.zeros.set(h);
            }
            kept.push(r);
        }
        kept.extend(new_rays);
        rays = kept;
    }

    let mut out = BTreeSet::new();
    for r in rays {
        let t = &r.coords[d];
        if t.is_zero() {
            return Err(Error::InvalidArgument("halfspaces do not bound a polytope".into()));
        }
        let tr = Rat::from_integer(t.clone());
        out.insert(r.coords[..d].iter().map(|c| Rat::from_integer(c.clone()) / &tr).collect::<RatVec>());
    }
    Ok(out.into_iter().collect())
}

/// Facet functionals of `conv(points)` normalized to `f . x <= 1`, i.e. the
/// vertices of the polar body. The origin must be an interior point.
pub fn polar(points: &[RatVec], max_dim: usize) -> Result<Vec<RatVec>> {
    enumerate_vertices(points, max_dim)
}

/// Canonical set form used for exact comparisons of vertex lists.
pub fn as_set(points: &[RatVec]) -> BTreeSet<RatVec> {
    points.iter().cloned().collect()
}

/// Symmetric closure: adds `-v` for every `v`.
pub fn symmetrize(points: &[RatVec]) -> Vec<RatVec> {
    let mut set = as_set(points);
    for p in points {
        set.insert(p.iter().map(|v| -v.clone()).collect());
    }
    set.into_iter().collect()
}

/// One representative per `{v, -v}` pair (the lexicographically larger one).
pub fn half_of_symmetric(points: &[RatVec]) -> Vec<RatVec> {
    let set = as_set(points);
    set.iter()
        .filter(|p| {
            let neg: RatVec = p.iter().map(|v| -v.clone()).collect();
            !set.contains(&neg) || **p > neg
        })
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    fn pts(v: &[&[i64]]) -> Vec<RatVec> {
        v.iter().map(|p| p.iter().map(|&x| rat_int(x)).collect()).collect()
    }

    #[test]
    fn square_polar_is_diamond() {
        let square = pts(&[&[1, 1], &[1, -1], &[-1, 1], &[-1, -1]]);
        let facets = polar(&square, 8).unwrap();
        assert_eq!(as_set(&facets), as_set(&pts(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]])));
        let back = polar(&facets, 8).unwrap();
        assert_eq!(as_set(&back), as_set(&square));
    }

    #[test]
    fn cube_and_cross_polytope_counts() {
        let mut cube = Vec::new();
        for s in 0..8 {
            cube.push((0..3).map(|k| rat_int(if s >> k & 1 == 1 { 1 } else { -1 })).collect::<RatVec>());
        }
        let facets = polar(&cube, 8).unwrap();
        assert_eq!(facets.len(), 6);
        let verts = enumerate_vertices(&facets, 8).unwrap();
        assert_eq!(verts.len(), 8);
    }

    #[test]
    fn redundant_points_are_pruned() {
        let mut square = pts(&[&[1, 1], &[1, -1], &[-1, 1], &[-1, -1], &[0, 0], &[1, 0]]);
        square.push(vec![rat(1, 2), rat(1, 3)]);
        let facets = polar(&square, 8).unwrap();
        assert_eq!(facets.len(), 4);
    }

    #[test]
    fn hexagon_polar_has_six_vertices() {
        let hex = vec![
            vec![rat_int(1), rat_int(0)],
            vec![rat_int(1), rat_int(1)],
            vec![rat_int(0), rat_int(1)],
            vec![rat_int(-1), rat_int(0)],
            vec![rat_int(-1), rat_int(-1)],
            vec![rat_int(0), rat_int(-1)],
        ];
        let f = polar(&hex, 8).unwrap();
        assert_eq!(f.len(), 6);
        for v in &hex {
            let tight = f.iter().filter(|g| crate::scalar::rat_dot(g, v) == rat_int(1)).count();
            assert_eq!(tight, 2);
        }
    }

    #[test]
    fn unbounded_and_guardrail_errors() {
        let half = pts(&[&[1, 0], &[-1, 0]]);
        assert!(enumerate_vertices(&half, 8).is_err());
        let big = vec![vec![rat_int(1); 9]];
        assert!(matches!(enumerate_vertices(&big, 8), Err(Error::Guardrail { .. })));
    }

    #[test]
    fn half_representatives() {
        let sq = pts(&[&[1, 1], &[1, -1], &[-1, 1], &[-1, -1]]);
        assert_eq!(half_of_symmetric(&sq).len(), 2);
        assert_eq!(symmetrize(&half_of_symmetric(&sq)).len(), 4);
    }
}
