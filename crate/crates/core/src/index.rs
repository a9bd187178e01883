//! Numerical index `n(X) = inf{v(T) : ||T|| = 1}`.
//!
//! On a real polyhedral space `v(T) = max |f(Tx)|` over incident
//! vertex/facet pairs, so `{T : v(T) <= 1}` is a polytope (or unbounded when
//! the pair functionals do not span `L(X)`, in which case `n(X) = 0`) and
//! `n(X) = 1 / max{||T|| : v(T) <= 1}`.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::linalg::{rat_nullspace, rat_rank, Matrix};
use crate::lp::{maximize_leq, LpStatus};
use crate::operator::{op_norm_raw, Operator};
use crate::optim::nelder_mead;
use crate::polytope::enumerate_vertices;
use crate::range::{euclidean_radius_matrix, numerical_radius};
use crate::scalar::{rat_dot, rat_to_f64, CVec, Rat, RatVec, C64};
use crate::space::NormedSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexMethod {
    PolyhedralEnumeration,
    Multistart,
    WitnessOnly,
}

impl IndexMethod {
    pub fn name(self) -> &'static str {
        match self {
            IndexMethod::PolyhedralEnumeration => "polyhedral-enumeration",
            IndexMethod::Multistart => "multistart",
            IndexMethod::WitnessOnly => "witness-only",
        }
    }
}

/// An index value with a norm-one witness operator `T` such that
/// `v(T) = witness_value`; `witness_value` is always an upper bound for `n(X)`.
#[derive(Clone, Debug)]
pub struct IndexCertificate {
    pub value: f64,
    pub witness_operator: Operator,
    pub witness_value: f64,
    pub exact: bool,
    pub method: IndexMethod,
}

/// Distinct (up to sign) functionals `T -> f(Tx)` of incident pairs, in the
/// row-major coordinates of `L(X)`.
fn pair_functionals(space: &NormedSpace) -> Result<Vec<RatVec>> {
    if !space.is_real() {
        return Err(Error::ComplexPolyhedral(space.label().to_string()));
    }
    let verts = space.vertices().ok_or_else(|| space.not_polyhedral())?;
    let facets = space.facets().ok_or_else(|| space.not_polyhedral())?;
    let mut out: BTreeSet<RatVec> = BTreeSet::new();
    for x in verts.iter() {
        for f in facets.iter() {
            if rat_dot(f, x).is_one() {
                let mut phi: RatVec = f.iter().flat_map(|fr| x.iter().map(move |xc| fr * xc)).collect();
                // canonical sign: first nonzero entry positive
                if phi.iter().find(|v| !v.is_zero()).is_some_and(|v| v.is_negative()) {
                    phi.iter_mut().for_each(|v| *v = -v.clone());
                }
                out.insert(phi);
            }
        }
    }
    Ok(out.into_iter().collect())
}

fn rat_operator(space: &NormedSpace, flat: &[Rat]) -> Result<Operator> {
    let n = space.dim();
    let rows: Vec<RatVec> = flat.chunks(n).map(|r| r.to_vec()).collect();
    Operator::from_rational(space, space, rows)
}

fn scale_rat(v: &[Rat], s: &Rat) -> RatVec {
    v.iter().map(|x| x * s).collect()
}

/// Zero-index certificate from the null space of the pair functionals.
fn degenerate(space: &NormedSpace, phis: &[RatVec]) -> Result<Option<IndexCertificate>> {
    let n = space.dim();
    if rat_rank(phis) == n * n {
        return Ok(None);
    }
    let null = rat_nullspace(phis, n * n);
    let t0 = rat_operator(space, &null[0])?;
    let norm = t0.norm_exact()?;
    let t = rat_operator(space, &scale_rat(&null[0], &(Rat::one() / norm)))?;
    Ok(Some(IndexCertificate {
        value: 0.0,
        witness_operator: t,
        witness_value: 0.0,
        exact: true,
        method: IndexMethod::PolyhedralEnumeration,
    }))
}

/// Exact `n(X)` for real polyhedral spaces by vertex enumeration of
/// `{T : v(T) <= 1}`.
pub fn numerical_index_exact(space: &NormedSpace) -> Result<IndexCertificate> {
    let cfg = space.config();
    let n = space.dim();
    if n * n > cfg.max_exact_index_dim {
        return Err(Error::Guardrail {
            what: "operator space dimension for exact index",
            value: n * n,
            limit: cfg.max_exact_index_dim,
        });
    }
    let phis = pair_functionals(space)?;
    if let Some(c) = degenerate(space, &phis)? {
        return Ok(c);
    }
    let normals: Vec<RatVec> = phis.iter().flat_map(|p| [p.clone(), p.iter().map(|v| -v).collect()]).collect();
    let verts = enumerate_vertices(&normals, n * n)?;
    let mut best: Option<(Rat, Operator)> = None;
    for v in &verts {
        let t = rat_operator(space, v)?;
        let m = t.norm_exact()?;
        if best.as_ref().is_none_or(|b| m > b.0) {
            best = Some((m, t));
        }
    }
    let (m, t) = best.ok_or(Error::EmptySet("index polytope vertices"))?;
    let inv = Rat::one() / &m;
    let w = rat_operator(space, &scale_rat(&t.rational().expect("rational").concat(), &inv))?;
    Ok(IndexCertificate {
        value: rat_to_f64(&inv),
        witness_operator: w,
        witness_value: rat_to_f64(&inv),
        exact: true,
        method: IndexMethod::PolyhedralEnumeration,
    })
}

/// `v(T)/||T||` for a single operator, with the normalized witness.
pub fn index_upper_certificate(t: &Operator) -> Result<IndexCertificate> {
    t.require_endomorphism()?;
    if t.is_zero() {
        return Err(Error::ZeroOperator);
    }
    let space = t.domain();
    if let (Some(rows), Ok(m)) = (t.rational(), t.norm_exact()) {
        if let Ok(v) = crate::range::numerical_radius_exact(t) {
            let inv = Rat::one() / &m;
            let w = rat_operator(space, &scale_rat(&rows.concat(), &inv))?;
            let val = rat_to_f64(&(v * inv));
            return Ok(IndexCertificate {
                value: val,
                witness_operator: w,
                witness_value: val,
                exact: true,
                method: IndexMethod::WitnessOnly,
            });
        }
    }
    let norm = t.norm();
    let w = t.scale(C64::new(1.0 / norm.value, 0.0));
    let r = numerical_radius(&w)?;
    Ok(IndexCertificate {
        value: r.value,
        witness_operator: w,
        witness_value: r.value,
        exact: r.exact && norm.exact,
        method: IndexMethod::WitnessOnly,
    })
}

/// `max ||T||` over `{T : |phi_k(T)| <= 1}` by one LP per vertex/facet pair.
fn pair_lp_sweep(space: &NormedSpace, phis: &[RatVec]) -> Option<(f64, CVec)> {
    let n = space.dim();
    let nn = n * n;
    let verts = space.vertices()?;
    let facets = space.facets()?;
    let mut a: Vec<Vec<f64>> = Vec::with_capacity(2 * phis.len());
    for p in phis {
        let pf: Vec<f64> = p.iter().map(rat_to_f64).collect();
        a.push(pf.iter().copied().chain(pf.iter().map(|v| -v)).collect());
        a.push(pf.iter().map(|v| -v).chain(pf.iter().copied()).collect());
    }
    let b = vec![1.0; a.len()];
    let mut best: Option<(f64, CVec)> = None;
    let half = crate::polytope::half_of_symmetric(&verts);
    for x in &half {
        for f in facets.iter() {
            let obj: Vec<f64> = f.iter().flat_map(|fr| x.iter().map(move |xc| rat_to_f64(&(fr * xc)))).collect();
            let c: Vec<f64> = obj.iter().copied().chain(obj.iter().map(|v| -v)).collect();
            let sol = maximize_leq(&c, &a, &b).ok()?;
            if sol.status != LpStatus::Optimal {
                return None;
            }
            if best.as_ref().is_none_or(|bb| sol.objective > bb.0) {
                let t: CVec = (0..nn).map(|i| C64::new(sol.x[i] - sol.x[nn + i], 0.0)).collect();
                best = Some((sol.objective, t));
            }
        }
    }
    best
}

struct RatioEval<'a> {
    space: &'a NormedSpace,
    complex: bool,
    weights: Option<Vec<f64>>,
    cfg: Config,
}

impl RatioEval<'_> {
    fn matrix(&self, p: &[f64]) -> Matrix {
        let n = self.space.dim();
        let nn = n * n;
        let data: CVec = if self.complex {
            (0..nn).map(|i| C64::new(p[i], p[nn + i])).collect()
        } else {
            p.iter().map(|&r| C64::new(r, 0.0)).collect()
        };
        Matrix::new(n, n, data).expect("shape")
    }

    fn pack(&self, m: &Matrix) -> Vec<f64> {
        let d = m.data();
        if self.complex {
            d.iter().map(|c| c.re).chain(d.iter().map(|c| c.im)).collect()
        } else {
            d.iter().map(|c| c.re).collect()
        }
    }

    fn norm(&self, m: &Matrix) -> f64 {
        match &self.weights {
            Some(w) => {
                let n = m.rows();
                let mut t = m.clone();
                for i in 0..n {
                    for j in 0..n {
                        t.set(i, j, m.get(i, j) * (w[i] / w[j]).sqrt());
                    }
                }
                t.spectral_norm()
            }
            None => op_norm_raw(m, self.space, self.space, &self.cfg).value,
        }
    }

    fn radius(&self, m: &Matrix) -> f64 {
        match &self.weights {
            Some(w) => euclidean_radius_matrix(m, w, self.complex),
            None => {
                let t = Operator::new(self.space, self.space, m.clone()).expect("shape");
                numerical_radius(&t).map(|r| r.value).unwrap_or(f64::INFINITY)
            }
        }
    }

    fn ratio(&self, p: &[f64]) -> f64 {
        let m = self.matrix(p);
        let nm = self.norm(&m);
        if nm < 1e-12 {
            return 1.0;
        }
        self.radius(&m) / nm
    }
}

/// Canonical operators that realize small numerical radii on familiar spaces.
fn canonical_starts(n: usize) -> Vec<Matrix> {
    let mut out = Vec::new();
    let real = |rows: Vec<Vec<f64>>| Matrix::from_real(n, n, &rows.concat()).expect("shape");
    if n >= 2 {
        let mut rot = vec![vec![0.0; n]; n];
        rot[0][1] = -1.0;
        rot[1][0] = 1.0;
        out.push(real(rot));
        let mut shift = vec![vec![0.0; n]; n];
        shift[0][1] = 1.0;
        out.push(real(shift));
        let mut cyc = vec![vec![0.0; n]; n];
        for i in 0..n {
            cyc[(i + 1) % n][i] = 1.0;
        }
        out.push(real(cyc));
        let mut alt = vec![vec![0.0; n]; n];
        for i in 0..n {
            alt[i][i] = if i % 2 == 0 { 1.0 } else { -1.0 };
        }
        out.push(real(alt));
    }
    out.push(Matrix::identity(n));
    out
}

/// Upper estimate of `n(X)`.
///
/// Real polyhedral spaces solve one LP per vertex/facet pair; other spaces
/// minimize `v(T)/||T||` by multistart simplex search.
pub fn numerical_index_estimate(space: &NormedSpace, cfg: &Config) -> Result<IndexCertificate> {
    let n = space.dim();
    if n * n > cfg.max_operator_dim {
        return Err(Error::Guardrail {
            what: "operator space dimension",
            value: n * n,
            limit: cfg.max_operator_dim,
        });
    }
    if n == 1 {
        let id = Operator::identity(space);
        return Ok(IndexCertificate {
            value: 1.0,
            witness_operator: id,
            witness_value: 1.0,
            exact: true,
            method: IndexMethod::PolyhedralEnumeration,
        });
    }
    if space.is_real() && space.vertices().is_some() && space.facets().is_some() {
        let phis = pair_functionals(space)?;
        if let Some(c) = degenerate(space, &phis)? {
            return Ok(c);
        }
        if let Some((m, t)) = pair_lp_sweep(space, &phis) {
            let mat = Matrix::new(n, n, t.iter().map(|c| c / m).collect()).expect("shape");
            let w = Operator::new(space, space, mat)?;
            let wv = numerical_radius(&w)?.value / w.norm().value;
            return Ok(IndexCertificate {
                value: 1.0 / m,
                witness_operator: w,
                witness_value: wv,
                exact: false,
                method: IndexMethod::PolyhedralEnumeration,
            });
        }
    }
    let complex = !space.is_real();
    let weights = space.euclidean_weights();
    let eval_cfg = if weights.is_some() {
        cfg.clone()
    } else {
        // inner radius and norm searches run many times; keep them small
        Config {
            pair_starts: 6,
            pair_iters: 60,
            schedule_levels: 10,
            norm_starts: 8,
            norm_iters: 100,
            ..cfg.clone()
        }
    };
    let space_eval = NormedSpace::composite(space.label().to_string(), n, space.field(), space.kind().clone(), &eval_cfg);
    let space_eval = if matches!(space.kind(), crate::space::NormKind::Lp(_) | crate::space::NormKind::WeightedEuclidean(_)) {
        space_eval
    } else {
        space.clone()
    };
    let ev = RatioEval {
        space: &space_eval,
        complex,
        weights: weights.clone(),
        cfg: eval_cfg,
    };
    let mut rng = cfg.rng(0x1DE7);
    let mut starts: Vec<Vec<f64>> = canonical_starts(n).iter().map(|m| ev.pack(m)).collect();
    let (n_random, iters) = if weights.is_some() {
        (cfg.index_starts.min(16), cfg.index_iters)
    } else {
        (cfg.index_starts.min(3), cfg.index_iters.min(60))
    };
    let dimp = if complex { 2 * n * n } else { n * n };
    for _ in 0..n_random {
        starts.push((0..dimp).map(|_| rng.sample::<f64, _>(StandardNormal)).collect());
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for s in starts {
        let (p, v) = nelder_mead(|p| ev.ratio(p), &s, 0.2, iters, 1e-14);
        if best.as_ref().is_none_or(|b| v < b.0) {
            best = Some((v, p));
        }
    }
    let (_, p) = best.expect("starts");
    let m = ev.matrix(&p);
    let nm = ev.norm(&m);
    let w = Operator::new(space, space, m.scale(C64::new(1.0 / nm, 0.0)))?;
    let wv = ev.radius(w.matrix()) / ev.norm(w.matrix());
    Ok(IndexCertificate {
        value: wv,
        witness_operator: w,
        witness_value: wv,
        exact: false,
        method: IndexMethod::Multistart,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;

    #[test]
    fn exact_examples() {
        for s in [NormedSpace::linf(2), NormedSpace::l1(2), NormedSpace::l1(3), NormedSpace::l1(1)] {
            let c = numerical_index_exact(&s).unwrap();
            assert_eq!(c.value, 1.0, "{}", s.label());
            assert!(c.exact);
            assert_eq!(c.witness_operator.norm_exact().unwrap(), Rat::one());
        }
    }

    #[test]
    fn estimate_examples() {
        let cfg = Config::default();
        let r = numerical_index_estimate(&NormedSpace::l2(2, Field::Real), &cfg).unwrap();
        assert!(r.value <= 1e-6);
        let c = numerical_index_estimate(&NormedSpace::l2(2, Field::Complex), &cfg).unwrap();
        assert!((c.value - 0.5).abs() < 1e-3, "{}", c.value);
        let l = numerical_index_estimate(&NormedSpace::linf(2), &cfg).unwrap();
        assert!((l.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn upper_certificates() {
        let l2 = NormedSpace::l2(2, Field::Real);
        let id = Operator::identity(&l2);
        assert!((index_upper_certificate(&id).unwrap().value - 1.0).abs() < 1e-9);
        let rot = Operator::from_real(&l2, &l2, &[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        assert!(index_upper_certificate(&rot).unwrap().value < 1e-6);
        let l1 = NormedSpace::l1(2);
        let swap = Operator::from_real(&l1, &l1, &[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(index_upper_certificate(&swap).unwrap().value, 1.0);
        let zero = Operator::from_real(&l1, &l1, &[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(index_upper_certificate(&zero), Err(Error::ZeroOperator)));
    }
}
