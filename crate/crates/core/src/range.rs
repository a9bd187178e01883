//! Numerical ranges, numerical radii and the Daugavet equation.
//!
//! `v_delta(T) = sup{|f(Tx)| : x in A, f in B, re f(x) > 1 - delta}` with
//! `conv(A) = B_X` and `conv(B) = B_{X*}`, and `v(T) = inf_delta v_delta(T)`.
//!
//! Real polyhedral spaces use the vertex and facet lists for `A` and `B`.
//! Then `f(x)` takes finitely many values, so once `delta` is below
//! `1 - max{f(x) : f(x) < 1}` only incident pairs (`f(x) = 1`) survive and the
//! radius is an exact finite maximum. Weighted Euclidean spaces solve the
//! inner maximization over functionals in closed form. Everything else runs a
//! multistart local search over the generating sets along the schedule
//! `delta = 4^-k`.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::atoms::{ball_atoms, dual_atoms, AtomPoint, Atoms};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::lp::{maximize_leq, LpStatus};
use crate::operator::Operator;
use crate::optim::nelder_mead;
use crate::scalar::{euclid, kron, pair, phase, rat_dot, rat_to_f64, CVec, Rat, RatVec, C64, ONE, ZERO};
use crate::space::{Functional, NormedSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Objective {
    /// `|f(Tx)|`
    Abs,
    /// `re f(Tx)`
    Re,
}

impl Objective {
    fn eval(self, z: C64) -> f64 {
        match self {
            Objective::Abs => z.norm(),
            Objective::Re => z.re,
        }
    }
}

/// A pair `(x, x*)` with `||x|| <= 1`, `||x*|| <= 1` and `gap = 1 - re x*(x)`.
#[derive(Clone, Debug)]
pub struct StatePair {
    pub x: CVec,
    pub x_star: Functional,
    pub gap: f64,
}

#[derive(Clone, Debug)]
pub struct RadiusResult {
    pub value: f64,
    pub witness: StatePair,
    pub exact: bool,
    /// `(delta, v_delta)` along the schedule, nonincreasing in the second entry.
    pub delta_schedule: Vec<(f64, f64)>,
    pub method: &'static str,
}

#[derive(Clone, Debug)]
pub struct DeltaValue {
    pub value: f64,
    pub exact: bool,
    pub witness: StatePair,
}

#[derive(Clone, Debug)]
pub struct DaugavetReport {
    /// `1 + ||T|| - ||Id + T||`.
    pub defect: f64,
    pub sup_re_v: f64,
    pub norm: f64,
    pub norm_id_plus_t: f64,
    pub exact: bool,
    pub witness: StatePair,
}

#[derive(Clone, Debug)]
pub(crate) struct Best {
    pub value: f64,
    pub x: CVec,
    pub f: CVec,
    pub exact: bool,
}

impl Best {
    fn into_pair(self, space: &NormedSpace) -> StatePair {
        let gap = 1.0 - pair(&self.f, &self.x).re;
        StatePair {
            x: self.x,
            x_star: Functional::new(space, self.f).expect("dimension"),
            gap,
        }
    }
}

/// Vertex/facet pairs of a real polyhedral space with exact pairings.
pub(crate) struct PolyPairs {
    xs: Arc<Vec<CVec>>,
    fs: Arc<Vec<CVec>>,
    xr: Arc<Vec<RatVec>>,
    fr: Arc<Vec<RatVec>>,
    dots: Vec<Rat>,
}

impl PolyPairs {
    pub(crate) fn new(space: &NormedSpace) -> Option<Self> {
        if !space.is_real() {
            return None;
        }
        let (xr, fr) = (space.vertices()?, space.facets()?);
        let (xs, fs) = (space.vertices_c()?, space.facets_c()?);
        let mut dots = Vec::with_capacity(xr.len() * fr.len());
        for x in xr.iter() {
            for f in fr.iter() {
                dots.push(rat_dot(f, x));
            }
        }
        Some(PolyPairs { xs, fs, xr, fr, dots })
    }

    fn nf(&self) -> usize {
        self.fs.len()
    }

    fn incident(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let nf = self.nf();
        self.dots.iter().enumerate().filter(|(_, d)| d.is_one()).map(move |(k, _)| (k / nf, k % nf))
    }

    fn admissible(&self, delta: &Rat) -> impl Iterator<Item = (usize, usize)> + '_ {
        let nf = self.nf();
        let bound = Rat::one() - delta;
        self.dots.iter().enumerate().filter(move |(_, d)| **d > bound).map(move |(k, _)| (k / nf, k % nf))
    }

    /// Below this depth only incident pairs are admissible.
    fn threshold(&self) -> Rat {
        let below = self.dots.iter().filter(|d| **d < Rat::one()).max().cloned();
        match below {
            Some(b) => Rat::one() - b,
            None => Rat::from_integer(2.into()),
        }
    }

    fn best(&self, m: &Matrix, pairs: impl Iterator<Item = (usize, usize)>, obj: Objective) -> Option<Best> {
        let tx: Vec<CVec> = self.xs.iter().map(|x| m.apply(x)).collect();
        let mut best: Option<(f64, usize, usize)> = None;
        for (i, j) in pairs {
            let v = obj.eval(pair(&self.fs[j], &tx[i]));
            if best.is_none_or(|b| v > b.0) {
                best = Some((v, i, j));
            }
        }
        best.map(|(v, i, j)| Best {
            value: v,
            x: self.xs[i].clone(),
            f: self.fs[j].clone(),
            exact: true,
        })
    }

    fn best_exact(&self, rows: &[RatVec], obj: Objective) -> Option<(Rat, usize, usize)> {
        let tx: Vec<RatVec> = self.xr.iter().map(|x| rows.iter().map(|r| rat_dot(r, x)).collect()).collect();
        let mut best: Option<(Rat, usize, usize)> = None;
        for (i, j) in self.incident() {
            let z = rat_dot(&self.fr[j], &tx[i]);
            let v = match obj {
                Objective::Abs => z.abs(),
                Objective::Re => z,
            };
            if best.as_ref().is_none_or(|b| v > b.0) {
                best = Some((v, i, j));
            }
        }
        best
    }
}

fn delta_rat(delta: f64) -> Rat {
    Rat::from_float(delta).expect("finite delta")
}

// ---------- weighted Euclidean spaces ----------

struct EuclidCtx {
    /// `D^{1/2} T D^{-1/2}`
    t: Matrix,
    sw: Vec<f64>,
    complex: bool,
}

impl EuclidCtx {
    fn new(m: &Matrix, w: &[f64], complex: bool) -> Self {
        let sw: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
        let n = m.rows();
        let mut t = m.clone();
        for i in 0..n {
            for j in 0..n {
                t.set(i, j, m.get(i, j) * (sw[i] / sw[j]));
            }
        }
        EuclidCtx { t, sw, complex }
    }

    fn unpack(&self, p: &[f64]) -> CVec {
        let n = self.t.rows();
        let v: CVec = if self.complex {
            (0..n).map(|i| C64::new(p[i], p[n + i])).collect()
        } else {
            p.iter().map(|&r| C64::new(r, 0.0)).collect()
        };
        let nv = euclid(&v);
        if nv == 0.0 {
            let mut e = vec![ZERO; n];
            e[0] = ONE;
            return e;
        }
        v.iter().map(|c| c / nv).collect()
    }

    fn pack(&self, x: &[C64]) -> Vec<f64> {
        if self.complex {
            x.iter().map(|c| c.re).chain(x.iter().map(|c| c.im)).collect()
        } else {
            x.iter().map(|c| c.re).collect()
        }
    }

    /// Best unit `g` for a fixed unit `x` (Hilbert coordinates); returns the
    /// value and `g`.
    fn inner(&self, x: &[C64], delta: f64, obj: Objective) -> (f64, CVec) {
        let w = self.t.apply(x);
        let ww = euclid(&w);
        let a: C64 = w.iter().zip(x).map(|(wi, xi)| wi * xi.conj()).sum();
        let perp: CVec = w.iter().zip(x).map(|(wi, xi)| wi - a * xi).collect();
        let wp = euclid(&perp);
        let u: CVec = if wp > 1e-300 { perp.iter().map(|c| c / wp).collect() } else { vec![ZERO; x.len()] };
        let c = 1.0 - delta;
        let s = (delta * (2.0 - delta)).max(0.0).sqrt();
        if ww == 0.0 {
            return (0.0, x.to_vec());
        }
        match obj {
            Objective::Abs => {
                let alpha = a.norm();
                if alpha >= c * ww {
                    let ph = phase(a).conj();
                    let g: CVec = w.iter().map(|wi| wi * ph / ww).collect();
                    (ww, g)
                } else {
                    let ph = phase(a).conj();
                    let g: CVec = x.iter().zip(&u).map(|(xi, ui)| xi * c + ui * ph * s).collect();
                    (alpha * c + wp * s, g)
                }
            }
            Objective::Re => {
                if a.re >= c * ww {
                    (ww, w.iter().map(|wi| wi / ww).collect())
                } else {
                    let r = (a.im * a.im + wp * wp).sqrt();
                    let (q, t) = if r > 0.0 { (s * a.im / r, s * wp / r) } else { (0.0, s) };
                    let beta = C64::new(c, q);
                    let g: CVec = x.iter().zip(&u).map(|(xi, ui)| xi * beta + ui * t).collect();
                    (a.re * c + s * r, g)
                }
            }
        }
    }

    /// Back to space coordinates: `x = D^{-1/2} x'`, `f = D^{1/2} conj(g)`.
    fn to_pair(&self, x: &[C64], g: &[C64], value: f64) -> Best {
        Best {
            value,
            x: x.iter().zip(&self.sw).map(|(c, s)| c / s).collect(),
            f: g.iter().zip(&self.sw).map(|(c, s)| c.conj() * s).collect(),
            exact: false,
        }
    }

    fn starts(&self, rng: &mut impl Rng, extra: usize) -> Vec<CVec> {
        let n = self.t.rows();
        let mut out = Vec::new();
        let thetas = if self.complex { 8 } else { 1 };
        for k in 0..thetas {
            let rot = C64::from_polar(1.0, std::f64::consts::PI * k as f64 / thetas as f64);
            let h = hermitian_part(&self.t.scale(rot));
            let eig = h.to_na().symmetric_eigen();
            for j in 0..n {
                out.push((0..n).map(|i| eig.eigenvectors[(i, j)]).collect());
            }
        }
        let svd = self.t.svd();
        out.push(svd.v[0].clone());
        for _ in 0..extra {
            let v: CVec = (0..n)
                .map(|_| C64::new(rng.random::<f64>() - 0.5, if self.complex { rng.random::<f64>() - 0.5 } else { 0.0 }))
                .collect();
            out.push(v);
        }
        out
    }

    fn maximize(&self, delta: f64, obj: Objective, warm: &[CVec], rng: &mut impl Rng) -> Best {
        let mut starts = self.starts(rng, 4);
        starts.extend(warm.iter().cloned());
        let mut scored: Vec<(f64, CVec)> = starts
            .into_iter()
            .map(|s| {
                let x = self.unpack(&self.pack(&s));
                (self.inner(&x, delta, obj).0, x)
            })
            .collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut best: Option<(f64, CVec)> = None;
        for (_, x0) in scored.into_iter().take(6) {
            let p0 = self.pack(&x0);
            let (p, _) = nelder_mead(|p| -self.inner(&self.unpack(p), delta, obj).0, &p0, 0.05, 4000, 1e-16);
            let (p, _) = nelder_mead(|p| -self.inner(&self.unpack(p), delta, obj).0, &p, 1e-4, 2000, 1e-17);
            let x = self.unpack(&p);
            let v = self.inner(&x, delta, obj).0;
            if best.as_ref().is_none_or(|b| v > b.0) {
                best = Some((v, x));
            }
        }
        let (_, x) = best.expect("starts");
        let (v, g) = self.inner(&x, delta, obj);
        self.to_pair(&x, &g, v)
    }
}

fn hermitian_part(m: &Matrix) -> Matrix {
    m.add(&m.conj_transpose()).expect("square").scale(C64::new(0.5, 0.0))
}

/// Largest eigenvalue of a Hermitian matrix.
pub(crate) fn herm_max_eig(h: &Matrix) -> f64 {
    if h.rows() == 2 {
        let (a, d, b) = (h.get(0, 0).re, h.get(1, 1).re, h.get(0, 1));
        return 0.5 * (a + d) + ((0.5 * (a - d)).powi(2) + b.norm_sqr()).sqrt();
    }
    h.to_na().symmetric_eigenvalues().iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Numerical radius of a matrix on (weighted) Euclidean space computed from
/// Hermitian parts: `max_theta lambda_max(Re(e^{i theta} T))`.
pub(crate) fn euclidean_radius_matrix(m: &Matrix, w: &[f64], complex: bool) -> f64 {
    let ctx = EuclidCtx::new(m, w, complex);
    let t = &ctx.t;
    if !complex {
        let h = hermitian_part(t);
        let eig = h.to_na().symmetric_eigenvalues();
        return eig.iter().map(|v| v.abs()).fold(0.0, f64::max);
    }
    let f = |th: f64| herm_max_eig(&hermitian_part(&t.scale(C64::from_polar(1.0, th))));
    let k = 96;
    let step = 2.0 * std::f64::consts::PI / k as f64;
    let vals: Vec<f64> = (0..k).map(|i| f(i as f64 * step)).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    let mut best = vals[order[0]];
    for &i in order.iter().take(4) {
        let c = i as f64 * step;
        let (_, v) = crate::optim::golden_max(f, c - step, c + step, 90);
        best = best.max(v);
    }
    best
}

/// `v(T)` for operators on weighted Euclidean spaces, from Hermitian parts.
pub fn euclidean_radius(t: &Operator) -> Option<f64> {
    let w = t.domain().euclidean_weights()?;
    t.is_endomorphism().then(|| euclidean_radius_matrix(t.matrix(), &w, !t.domain().is_real()))
}

// ---------- LP path for one-sided polyhedral data ----------

fn lp_pairs(m: &Matrix, finite_is_dual: bool, finite: &[CVec], cons: &[CVec], delta: f64, obj: Objective) -> Option<Best> {
    let n = m.rows();
    let mut best: Option<Best> = None;
    let signs: &[f64] = match obj {
        Objective::Abs => &[1.0, -1.0],
        Objective::Re => &[1.0],
    };
    for e in finite {
        let er: Vec<f64> = e.iter().map(|c| c.re).collect();
        let lin: Vec<f64> = if finite_is_dual {
            m.apply_transpose(e).iter().map(|c| c.re).collect()
        } else {
            m.apply(e).iter().map(|c| c.re).collect()
        };
        let mut a: Vec<Vec<f64>> = cons
            .iter()
            .map(|g| g.iter().map(|c| c.re).chain(g.iter().map(|c| -c.re)).collect())
            .collect();
        a.push(er.iter().map(|v| -v).chain(er.iter().copied()).collect());
        let mut b = vec![1.0; cons.len()];
        b.push(-(1.0 - delta));
        for &s in signs {
            let c: Vec<f64> = lin.iter().map(|v| s * v).chain(lin.iter().map(|v| -s * v)).collect();
            let Ok(sol) = maximize_leq(&c, &a, &b) else { continue };
            if sol.status != LpStatus::Optimal {
                continue;
            }
            let z: CVec = (0..n).map(|i| C64::new(sol.x[i] - sol.x[n + i], 0.0)).collect();
            let (x, f) = if finite_is_dual { (z, e.clone()) } else { (e.clone(), z) };
            let v = obj.eval(pair(&f, &m.apply(&x)));
            if best.as_ref().is_none_or(|bb| v > bb.value) {
                best = Some(Best { value: v, x, f, exact: false });
            }
        }
    }
    best
}

// ---------- generic local search ----------

struct Search<'a> {
    m: &'a Matrix,
    space: &'a NormedSpace,
    a: Atoms,
    b: Atoms,
    delta: f64,
    obj: Objective,
}

#[derive(Clone)]
struct State {
    pa: AtomPoint,
    pb: AtomPoint,
    x: CVec,
    f: CVec,
    val: f64,
}

impl Search<'_> {
    fn state(&self, pa: AtomPoint, pb: AtomPoint) -> Option<State> {
        let x = self.a.realize(&pa);
        let f = self.b.realize(&pb);
        if pair(&f, &x).re <= 1.0 - self.delta {
            return None;
        }
        let val = self.obj.eval(pair(&f, &self.m.apply(&x)));
        Some(State { pa, pb, x, f, val })
    }

    /// Best functional generator for a fixed point `x` realized from `pa`.
    fn snap_b(&self, pa: &AtomPoint, x: &[C64]) -> AtomPoint {
        match &self.b {
            Atoms::Finite(list) => AtomPoint::Index(crate::atoms::best_finite(list, x).0),
            b => {
                if let Some(f) = product_dual(&self.a, pa) {
                    return b.nearest(&f);
                }
                let f = self.space.norm_witness(x).functional;
                let ph = phase(pair(&f, x)).conj();
                b.nearest(&f.iter().map(|c| c * ph).collect::<CVec>())
            }
        }
    }

    fn snap_a(&self, pb: &AtomPoint, f: &[C64]) -> AtomPoint {
        match &self.a {
            Atoms::Finite(list) => AtomPoint::Index(crate::atoms::best_finite(list, f).0),
            a => {
                if let Some(x) = product_dual(&self.b, pb) {
                    return a.nearest(&x);
                }
                let x = self.space.dual().norm_witness(f).functional;
                let ph = phase(pair(f, &x)).conj();
                a.nearest(&x.iter().map(|c| c * ph).collect::<CVec>())
            }
        }
    }

    fn run(&self, cfg: &Config, warm: &[(CVec, CVec)], stream: u64) -> Option<Best> {
        let mut rng = cfg.rng(stream);
        let mut starts: Vec<State> = Vec::new();
        for (x, f) in warm {
            let pa = self.a.nearest(x);
            let pb = self.b.nearest(f);
            if let Some(s) = self.state(pa.clone(), pb) {
                starts.push(s);
            }
            let xr = self.a.realize(&pa);
            if let Some(s) = self.state(pa.clone(), self.snap_b(&pa, &xr)) {
                starts.push(s);
            }
        }
        let mut tries = 0;
        while starts.len() < cfg.pair_starts + warm.len() && tries < 20 * cfg.pair_starts.max(1) {
            tries += 1;
            let st = if tries % 2 == 0 {
                let pa = self.a.sample(&mut rng);
                let x = self.a.realize(&pa);
                let pb = self.snap_b(&pa, &x);
                self.state(pa, pb)
            } else {
                let pb = self.b.sample(&mut rng);
                let f = self.b.realize(&pb);
                self.state(self.snap_a(&pb, &f), pb)
            };
            if let Some(s) = st {
                starts.push(s);
            }
        }
        let mut best: Option<State> = None;
        for mut cur in starts {
            let mut step = 0.3;
            for it in 0..cfg.pair_iters {
                let cand = match it % 5 {
                    0 => self.state(self.a.perturb(&cur.pa, step, &mut rng), cur.pb.clone()),
                    1 => self.state(cur.pa.clone(), self.b.perturb(&cur.pb, step, &mut rng)),
                    2 => {
                        let pa = self.a.perturb(&cur.pa, step, &mut rng);
                        let x = self.a.realize(&pa);
                        let pb = self.snap_b(&pa, &x);
                        self.state(pa, pb)
                    }
                    3 => {
                        let pb = self.b.perturb(&cur.pb, step, &mut rng);
                        let f = self.b.realize(&pb);
                        self.state(self.snap_a(&pb, &f), pb)
                    }
                    _ => self.state(self.a.perturb(&cur.pa, step, &mut rng), self.b.perturb(&cur.pb, step, &mut rng)),
                };
                match cand {
                    Some(c) if c.val > cur.val => {
                        cur = c;
                        step = (step * 1.3).min(1.0);
                    }
                    _ => step = (step * 0.93).max(1e-10),
                }
            }
            if best.as_ref().is_none_or(|b| cur.val > b.val) {
                best = Some(cur);
            }
        }
        best.map(|s| Best {
            value: s.val,
            x: s.x,
            f: s.f,
            exact: false,
        })
    }
}

/// For a rank-one atom `a (x) b`, the rank-one element of the other side
/// built from norming functionals of the factors; it pairs to `1` with the atom.
fn product_dual(atoms: &Atoms, p: &AtomPoint) -> Option<CVec> {
    match (atoms, p) {
        (Atoms::Product { left, right, la, ra }, AtomPoint::Pair(a, b)) => {
            let wa = left.norm_witness(&la.realize(a)).functional;
            let wb = right.norm_witness(&ra.realize(b)).functional;
            Some(kron(&wa, &wb))
        }
        _ => None,
    }
}

// ---------- dispatch ----------

enum Path {
    Poly(PolyPairs),
    Euclid(Vec<f64>),
    FacetLp(Arc<Vec<CVec>>),
    VertexLp(Arc<Vec<CVec>>),
    Generic,
}

fn choose_path(space: &NormedSpace) -> Path {
    if let Some(p) = PolyPairs::new(space) {
        return Path::Poly(p);
    }
    if let Some(w) = space.euclidean_weights() {
        return Path::Euclid(w);
    }
    if space.is_real() {
        if let Some(f) = space.cheap_facets_c() {
            return Path::FacetLp(f);
        }
        if let Some(v) = space.cheap_vertices_c() {
            return Path::VertexLp(v);
        }
    }
    Path::Generic
}

fn level(
    m: &Matrix,
    space: &NormedSpace,
    path: &Path,
    delta: f64,
    obj: Objective,
    warm: &[(CVec, CVec)],
    cfg: &Config,
    stream: u64,
) -> Option<Best> {
    match path {
        Path::Poly(p) => p.best(m, p.admissible(&delta_rat(delta)), obj),
        Path::Euclid(w) => {
            let ctx = EuclidCtx::new(m, w, !space.is_real());
            let mut rng = cfg.rng(stream);
            let warm_x: Vec<CVec> = warm.iter().map(|(x, _)| x.iter().zip(&ctx.sw).map(|(c, s)| c * s).collect()).collect();
            Some(ctx.maximize(delta, obj, &warm_x, &mut rng))
        }
        Path::FacetLp(f) => {
            let cons = space.cheap_facets_c().expect("facets");
            lp_pairs(m, true, f, &cons, delta, obj)
        }
        Path::VertexLp(v) => {
            let cons = space.cheap_vertices_c().expect("vertices");
            lp_pairs(m, false, v, &cons, delta, obj)
        }
        Path::Generic => {
            let s = Search {
                m,
                space,
                a: ball_atoms(space, true),
                b: dual_atoms(space, true),
                delta,
                obj,
            };
            s.run(cfg, warm, stream)
        }
    }
}

/// Runs the schedule `delta = 4^-k` and returns the monotone schedule with
/// the final pair.
fn schedule(m: &Matrix, space: &NormedSpace, path: &Path, obj: Objective, cfg: &Config, stop_below: Option<f64>) -> (Vec<(f64, f64)>, Best) {
    let mut raw: Vec<(f64, Best)> = Vec::new();
    let mut warm: Vec<(CVec, CVec)> = Vec::new();
    let mut lower = f64::NEG_INFINITY;
    for k in 0..cfg.schedule_levels.max(2) {
        let delta = 0.25f64.powi(k as i32);
        let Some(b) = level(m, space, path, delta, obj, &warm, cfg, 0x5C4E_0000 + k as u64) else {
            break;
        };
        warm = vec![(b.x.clone(), b.f.clone())];
        // an exactly norming functional at x gives a point of the numerical
        // range, hence a lower bound for the limit
        let fx = space.norm_witness(&b.x).functional;
        lower = lower.max(obj.eval(pair(&fx, &m.apply(&b.x))));
        let gap = b.value - lower;
        raw.push((delta, b));
        if let Some(t) = stop_below {
            if delta <= t && raw.len() >= 2 {
                break;
            }
            continue;
        }
        if raw.len() >= 2 && gap < cfg.schedule_tol * raw[raw.len() - 1].1.value {
            break;
        }
    }
    // a pair admissible at a smaller delta is admissible at every larger one
    let mut sched: Vec<(f64, f64)> = raw.iter().map(|(d, b)| (*d, b.value)).collect();
    for k in (0..sched.len().saturating_sub(1)).rev() {
        sched[k].1 = sched[k].1.max(sched[k + 1].1);
    }
    let last = raw.pop().expect("at least one level").1;
    (sched, last)
}

fn default_pair(space: &NormedSpace) -> Best {
    let x = crate::space::some_unit_vector(space);
    let f = space.norm_witness(&x).functional;
    Best {
        value: 0.0,
        x,
        f,
        exact: true,
    }
}

/// `v(T)` with a witness pair and the `delta` schedule.
pub fn numerical_radius(t: &Operator) -> Result<RadiusResult> {
    t.require_endomorphism()?;
    let space = t.domain();
    let cfg = space.config();
    let m = t.matrix();
    let path = choose_path(space);
    match &path {
        Path::Poly(p) => {
            let (value, best) = match t.rational().and_then(|r| p.best_exact(r, Objective::Abs)) {
                Some((v, i, j)) => {
                    let f = p.fs[j].clone();
                    let x = p.xs[i].clone();
                    (rat_to_f64(&v), Best { value: rat_to_f64(&v), x, f, exact: true })
                }
                None => {
                    let b = p.best(m, p.incident(), Objective::Abs).unwrap_or_else(|| default_pair(space));
                    (b.value, b)
                }
            };
            let thr = rat_to_f64(&p.threshold());
            let (sched, _) = schedule(m, space, &path, Objective::Abs, cfg, Some(thr));
            Ok(RadiusResult {
                value,
                witness: best.into_pair(space),
                exact: true,
                delta_schedule: sched,
                method: "polyhedral-pairs",
            })
        }
        Path::FacetLp(_) | Path::VertexLp(_) => {
            let b = level(m, space, &path, 0.0, Objective::Abs, &[], cfg, 0).unwrap_or_else(|| default_pair(space));
            Ok(RadiusResult {
                value: b.value,
                witness: b.into_pair(space),
                exact: false,
                delta_schedule: vec![],
                method: "face-lp",
            })
        }
        Path::Euclid(_) | Path::Generic => {
            let (sched, b) = schedule(m, space, &path, Objective::Abs, cfg, None);
            let method = if matches!(path, Path::Euclid(_)) { "euclidean-schedule" } else { "multistart-schedule" };
            Ok(RadiusResult {
                value: b.value,
                witness: b.into_pair(space),
                exact: false,
                delta_schedule: sched,
                method,
            })
        }
    }
}

/// Exact `v(T)` for rational operators on real polyhedral spaces.
pub fn numerical_radius_exact(t: &Operator) -> Result<Rat> {
    t.require_endomorphism()?;
    let p = PolyPairs::new(t.domain()).ok_or_else(|| t.domain().not_polyhedral())?;
    let rows = t.rational().ok_or_else(|| Error::InvalidArgument("operator has no rational matrix".into()))?;
    Ok(p.best_exact(rows, Objective::Abs).map(|b| b.0).unwrap_or_else(Rat::zero))
}

/// `v_delta(T)` over the default generating sets or over caller-supplied
/// finite sets `A` (points) and `B` (functionals).
pub fn v_delta(t: &Operator, delta: f64, a: Option<&[CVec]>, b: Option<&[CVec]>) -> Result<DeltaValue> {
    t.require_endomorphism()?;
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let space = t.domain();
    let cfg = space.config();
    let m = t.matrix();
    for set in [a, b].into_iter().flatten() {
        if set.is_empty() {
            return Err(Error::EmptySet("generating set"));
        }
        for v in set {
            space.check_dim(v.len())?;
        }
    }
    let best = match (a, b) {
        (Some(a), Some(b)) => {
            let tx: Vec<CVec> = a.iter().map(|x| m.apply(x)).collect();
            let mut best: Option<Best> = None;
            for (x, txx) in a.iter().zip(&tx) {
                for f in b {
                    if pair(f, x).re > 1.0 - delta {
                        let v = pair(f, txx).norm();
                        if best.as_ref().is_none_or(|bb| v > bb.value) {
                            best = Some(Best {
                                value: v,
                                x: x.clone(),
                                f: f.clone(),
                                exact: true,
                            });
                        }
                    }
                }
            }
            best
        }
        (None, None) => {
            let path = choose_path(space);
            level(m, space, &path, delta, Objective::Abs, &[], cfg, 0xDE17A).map(|mut b| {
                b.exact = matches!(path, Path::Poly(_));
                b
            })
        }
        _ => {
            let s = Search {
                m,
                space,
                a: a.map_or_else(|| ball_atoms(space, true), |v| Atoms::Finite(Arc::new(v.to_vec()))),
                b: b.map_or_else(|| dual_atoms(space, true), |v| Atoms::Finite(Arc::new(v.to_vec()))),
                delta,
                obj: Objective::Abs,
            };
            s.run(cfg, &[], 0xDE17B)
        }
    };
    let best = best.ok_or(Error::EmptySet("admissible pairs"))?;
    Ok(DeltaValue {
        value: best.value,
        exact: best.exact,
        witness: best.into_pair(space),
    })
}

/// Elements of `V(T)`: the exact finite set on polyhedral spaces, otherwise
/// `n_samples` random unit vectors paired with their duality-map images.
pub fn numerical_range_sample(t: &Operator, n_samples: usize) -> Result<Vec<C64>> {
    t.require_endomorphism()?;
    let space = t.domain();
    let m = t.matrix();
    if let Some(p) = PolyPairs::new(space) {
        let tx: Vec<CVec> = p.xs.iter().map(|x| m.apply(x)).collect();
        return Ok(p.incident().map(|(i, j)| pair(&p.fs[j], &tx[i])).collect());
    }
    let mut rng = space.config().rng(0x5A3F);
    let atoms = ball_atoms(space, false);
    let mut out = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let x = match &atoms {
            Atoms::Sphere(_) => crate::atoms::random_unit(space, &mut rng),
            a => a.realize(&a.sample(&mut rng)),
        };
        let x = {
            let n = space.norm_value(&x);
            x.iter().map(|c| c / n).collect::<CVec>()
        };
        let w = space.norm_witness(&x);
        let ph = phase(pair(&w.functional, &x)).conj();
        let f: CVec = w.functional.iter().map(|c| c * ph).collect();
        out.push(pair(&f, &m.apply(&x)));
    }
    Ok(out)
}

/// `sup re V(T)` with a witness pair.
pub(crate) fn sup_re_v(t: &Operator) -> (f64, bool, Best) {
    let space = t.domain();
    let cfg = space.config();
    let m = t.matrix();
    let path = choose_path(space);
    match &path {
        Path::Poly(p) => match t.rational().and_then(|r| p.best_exact(r, Objective::Re)) {
            Some((v, i, j)) => {
                let vf = rat_to_f64(&v);
                (vf, true, Best { value: vf, x: p.xs[i].clone(), f: p.fs[j].clone(), exact: true })
            }
            None => {
                let b = p.best(m, p.incident(), Objective::Re).unwrap_or_else(|| default_pair(space));
                (b.value, true, b)
            }
        },
        Path::Euclid(w) => {
            let ctx = EuclidCtx::new(m, w, !space.is_real());
            let h = hermitian_part(&ctx.t);
            let eig = h.to_na().symmetric_eigen();
            let (k, v) = eig.eigenvalues.iter().enumerate().fold((0, f64::NEG_INFINITY), |b, (k, &v)| if v > b.1 { (k, v) } else { b });
            let x: CVec = (0..m.rows()).map(|i| eig.eigenvectors[(i, k)]).collect();
            let mut b = ctx.to_pair(&x, &x, v);
            b.exact = true;
            (v, true, b)
        }
        Path::FacetLp(_) | Path::VertexLp(_) => {
            let b = level(m, space, &path, 0.0, Objective::Re, &[], cfg, 0).unwrap_or_else(|| default_pair(space));
            (b.value, false, b)
        }
        Path::Generic => {
            let (_, b) = schedule(m, space, &path, Objective::Re, cfg, None);
            (b.value, false, b)
        }
    }
}

/// Daugavet defect `1 + ||T|| - ||Id + T||` together with `sup re V(T)`.
pub fn daugavet_defect(t: &Operator) -> Result<DaugavetReport> {
    t.require_endomorphism()?;
    let space = t.domain();
    let id_plus = Operator::identity(space).add(t)?;
    let (norm, norm_ip, exact_norms) = match (t.norm_exact(), id_plus.norm_exact()) {
        (Ok(a), Ok(b)) => (rat_to_f64(&a), rat_to_f64(&b), Some(Rat::one() + a - b)),
        _ => (t.norm().value, id_plus.norm().value, None),
    };
    let (sup, sup_exact, best) = sup_re_v(t);
    let defect = match &exact_norms {
        Some(d) => rat_to_f64(d),
        None => 1.0 + norm - norm_ip,
    };
    let exact = sup_exact && (exact_norms.is_some() || (t.norm().exact && id_plus.norm().exact));
    Ok(DaugavetReport {
        defect,
        sup_re_v: sup,
        norm,
        norm_id_plus_t: norm_ip,
        exact,
        witness: best.into_pair(space),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat_int, Field};

    fn rot(space: &NormedSpace) -> Operator {
        Operator::from_real(space, space, &[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn range_samples() {
        let l2 = NormedSpace::l2(2, Field::Real);
        for v in numerical_range_sample(&rot(&l2), 20).unwrap() {
            assert!(v.norm() < 1e-15);
        }
        let l1 = NormedSpace::l1(2);
        let swap = Operator::from_real(&l1, &l1, &[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let s = numerical_range_sample(&swap, 0).unwrap();
        assert!(s.iter().all(|v| v.re.abs() <= 1.0));
        assert!(s.iter().any(|v| v.re == 1.0) && s.iter().any(|v| v.re == -1.0));
        for v in numerical_range_sample(&Operator::identity(&l2), 10).unwrap() {
            assert!((v - ONE).norm() < 1e-12);
        }
    }

    #[test]
    fn v_delta_rotation() {
        let l2 = NormedSpace::l2(2, Field::Real);
        let r = rot(&l2);
        assert!((v_delta(&r, 2.0, None, None).unwrap().value - 1.0).abs() < 1e-9);
        let v = v_delta(&r, 0.02, None, None).unwrap().value;
        let bound = (1.0f64 - 0.98 * 0.98).sqrt();
        assert!(v <= bound + 1e-9 && v >= bound - 1e-6, "{v}");
        let id = Operator::identity(&l2);
        for d in [0.01, 0.5, 1.0] {
            assert!((v_delta(&id, d, None, None).unwrap().value - 1.0).abs() < 1e-9);
        }
        assert!(v_delta(&id, 0.0, None, None).is_err());
    }

    #[test]
    fn radius_examples() {
        let l2 = NormedSpace::l2(2, Field::Real);
        let r = numerical_radius(&rot(&l2)).unwrap();
        assert!(r.value < 1e-6, "{}", r.value);
        let l1 = NormedSpace::l1(2);
        let swap = Operator::from_rational(&l1, &l1, vec![vec![rat_int(0), rat_int(1)], vec![rat_int(1), rat_int(0)]]).unwrap();
        let r = numerical_radius(&swap).unwrap();
        assert_eq!(r.value, 1.0);
        assert!(r.exact);
        assert_eq!(numerical_radius_exact(&swap).unwrap(), rat_int(1));
        let w = &r.witness;
        assert!((w.x_star.apply(&swap.apply(&w.x)).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn daugavet_examples() {
        let linf = NormedSpace::linf(2);
        let id = Operator::identity(&linf);
        let d = daugavet_defect(&id).unwrap();
        assert_eq!((d.defect, d.sup_re_v), (0.0, 1.0));
        let neg = id.scale(-ONE);
        let d = daugavet_defect(&neg).unwrap();
        assert_eq!((d.defect, d.sup_re_v, d.norm), (2.0, -1.0, 1.0));
        let t = Operator::from_rational(&linf, &linf, vec![vec![rat_int(1), rat_int(0)], vec![rat_int(1), rat_int(0)]]).unwrap();
        let d = daugavet_defect(&t).unwrap();
        assert_eq!(d.norm_id_plus_t, 2.0);
        assert_eq!(d.defect, 0.0);
    }

    #[test]
    fn complex_euclidean_radius_of_nilpotent() {
        let c2 = NormedSpace::l2(2, Field::Complex);
        let n = Operator::from_real(&c2, &c2, &[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!((euclidean_radius(&n).unwrap() - 0.5).abs() < 1e-12);
        let r = numerical_radius(&n).unwrap();
        assert!((r.value - 0.5).abs() < 1e-6, "{}", r.value);
    }
}
