//! Injective and projective tensor norms, tensor spaces, lifts and the
//! nuclear norm.
//!
//! Elements of `X (x) Y` are `dim X x dim Y` coefficient matrices (left index
//! major when flattened). The injective norm is the operator norm of `u` read
//! as a map `Y* -> X`. The projective norm is solved as a linear program over
//! rank-one atoms with column generation: the LP duals give a functional `B`
//! on `X (x) Y`, pricing computes `||B||_eps` in `X* (x) Y*` together with the
//! atom that attains it, and `<B, u> / max(1, ||B||_eps)` is a lower bound.

use nalgebra::DMatrix;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::lp::{solve_standard, LpStatus};
use crate::operator::{op_norm_raw, Operator};
use crate::scalar::{kron, pair, CVec, Rat, RatVec, C64, ONE, ZERO};
use crate::space::{Exponent, NormEval, NormKind, NormedSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TensorKind {
    Pi,
    Eps,
}

/// An element of `X (x) Y`.
#[derive(Clone, Debug)]
pub struct TensorElement {
    coefficients: Matrix,
    left: NormedSpace,
    right: NormedSpace,
}

#[derive(Clone, Debug)]
pub struct EpsNorm {
    pub value: f64,
    pub exact: bool,
    pub x_star: CVec,
    pub y_star: CVec,
}

/// One term `weight * x (x) y` of a projective decomposition (`||x|| = ||y|| = 1`).
#[derive(Clone, Debug)]
pub struct RankOneTerm {
    pub weight: f64,
    pub x: CVec,
    pub y: CVec,
}

#[derive(Clone, Debug)]
pub struct PiNorm {
    /// Reported value (the primal upper bound).
    pub value: f64,
    pub primal: f64,
    pub dual: f64,
    pub exact: bool,
    pub decomposition: Vec<RankOneTerm>,
    /// `B` in `X* (x) Y*` with `||B||_eps <= 1` and `<B, u> = dual`.
    pub certificate: Matrix,
    pub method: &'static str,
}

impl TensorElement {
    pub fn new(left: &NormedSpace, right: &NormedSpace, coefficients: Matrix) -> Result<Self> {
        if left.field() != right.field() {
            return Err(Error::FieldMismatch("tensor factors over different fields".into()));
        }
        if coefficients.rows() != left.dim() || coefficients.cols() != right.dim() {
            return Err(Error::DimensionMismatch {
                expected: left.dim() * right.dim(),
                got: coefficients.rows() * coefficients.cols(),
            });
        }
        if left.is_real() && !coefficients.is_real() {
            return Err(Error::FieldMismatch("complex coefficients over real factors".into()));
        }
        Ok(TensorElement {
            coefficients,
            left: left.clone(),
            right: right.clone(),
        })
    }

    pub fn rank_one(left: &NormedSpace, right: &NormedSpace, x: &[C64], y: &[C64]) -> Result<Self> {
        left.check_dim(x.len())?;
        right.check_dim(y.len())?;
        Self::new(left, right, Matrix::new(x.len(), y.len(), kron(x, y))?)
    }

    /// Flattened (left-index major) coefficients.
    pub fn from_flat(left: &NormedSpace, right: &NormedSpace, flat: &[C64]) -> Result<Self> {
        Self::new(left, right, Matrix::new(left.dim(), right.dim(), flat.to_vec())?)
    }

    pub fn coefficients(&self) -> &Matrix {
        &self.coefficients
    }

    pub fn left(&self) -> &NormedSpace {
        &self.left
    }

    pub fn right(&self) -> &NormedSpace {
        &self.right
    }
}

/// `sup |<u, x* (x) y*>|` over the dual unit balls.
pub fn eps_norm(u: &TensorElement) -> EpsNorm {
    let r = op_norm_raw(&u.coefficients, &u.right.dual(), &u.left, u.left.config());
    EpsNorm {
        value: r.value,
        exact: r.exact,
        x_star: r.functional,
        y_star: r.arg,
    }
}

/// `inf sum ||x_i|| ||y_i||` over decompositions `u = sum x_i (x) y_i`.
pub fn pi_norm(u: &TensorElement) -> PiNorm {
    pi_norm_with(u, u.left.config())
}

pub fn pi_norm_with(u: &TensorElement, cfg: &Config) -> PiNorm {
    pi_raw(&u.coefficients, &u.left, &u.right, cfg)
}

pub(crate) fn eps_eval(x: &[C64], a: &NormedSpace, b: &NormedSpace, cfg: &Config) -> NormEval {
    let m = Matrix::new(a.dim(), b.dim(), x.to_vec()).expect("shape");
    let r = op_norm_raw(&m, &b.dual(), a, cfg);
    NormEval {
        value: r.value,
        exact: r.exact,
        functional: kron(&r.functional, &r.arg),
    }
}

pub(crate) fn pi_eval(x: &[C64], a: &NormedSpace, b: &NormedSpace, cfg: &Config) -> NormEval {
    let m = Matrix::new(a.dim(), b.dim(), x.to_vec()).expect("shape");
    let r = pi_raw(&m, a, b, cfg);
    NormEval {
        value: r.value,
        exact: r.exact,
        functional: r.certificate.into_data(),
    }
}

/// Basis `v_1..v_n` with `B_X = conv{+-v_k}` (phases in the complex case).
fn cross_basis(space: &NormedSpace) -> Option<Vec<CVec>> {
    let n = space.dim();
    if let NormKind::Lp(Exponent::Finite(p)) = space.kind() {
        if *p == 1.0 {
            return Some(
                (0..n)
                    .map(|i| {
                        let mut e = vec![ZERO; n];
                        e[i] = ONE;
                        e
                    })
                    .collect(),
            );
        }
    }
    let v = space.cheap_vertices_c()?;
    if v.len() != 2 * n {
        return None;
    }
    let half: Vec<CVec> = v
        .iter()
        .filter(|x| x.iter().find(|c| c.re != 0.0).is_some_and(|c| c.re > 0.0))
        .cloned()
        .collect();
    if half.len() != n {
        return None;
    }
    Some(half)
}

fn to_na(rows: &[CVec]) -> DMatrix<C64> {
    let n = rows.len();
    let m = rows[0].len();
    DMatrix::from_fn(n, m, |i, j| rows[i][j])
}

fn cross_left(u: &Matrix, basis: &[CVec], y: &NormedSpace) -> Option<PiRaw> {
    // u = V^t Ymat with V rows v_k
    let v = to_na(basis);
    let vinv = v.clone().try_inverse()?;
    let ymat = vinv.transpose() * u.to_na();
    let mut value = 0.0;
    let mut exact = true;
    let mut g = DMatrix::<C64>::zeros(basis.len(), y.dim());
    let mut terms = Vec::new();
    for k in 0..basis.len() {
        let yk: CVec = (0..y.dim()).map(|j| ymat[(k, j)]).collect();
        let w = y.norm_witness(&yk);
        exact &= w.exact;
        value += w.value;
        for j in 0..y.dim() {
            g[(k, j)] = w.functional[j];
        }
        if w.value > 0.0 {
            terms.push(RankOneTerm {
                weight: w.value,
                x: basis[k].clone(),
                y: yk.iter().map(|c| c / w.value).collect(),
            });
        }
    }
    let b = Matrix::from_na(&(vinv * g));
    Some(PiRaw {
        value,
        primal: value,
        dual: value,
        exact,
        terms,
        certificate: b,
        method: "cross-polytope-factor",
    })
}

pub(crate) struct PiRaw {
    pub value: f64,
    pub primal: f64,
    pub dual: f64,
    pub exact: bool,
    pub terms: Vec<RankOneTerm>,
    pub certificate: Matrix,
    pub method: &'static str,
}

impl From<PiRaw> for PiNorm {
    fn from(r: PiRaw) -> Self {
        PiNorm {
            value: r.value,
            primal: r.primal,
            dual: r.dual,
            exact: r.exact,
            decomposition: r.terms,
            certificate: r.certificate,
            method: r.method,
        }
    }
}

fn pi_raw(u: &Matrix, x: &NormedSpace, y: &NormedSpace, cfg: &Config) -> PiNorm {
    pi_raw_inner(u, x, y, cfg).into()
}

fn unit(space: &NormedSpace, v: &[C64]) -> Option<CVec> {
    let n = space.norm_value(v);
    (n > 1e-14).then(|| v.iter().map(|c| c / n).collect())
}

fn pi_raw_inner(u: &Matrix, x: &NormedSpace, y: &NormedSpace, cfg: &Config) -> PiRaw {
    let (n, m) = (x.dim(), y.dim());
    if u.data().iter().all(|c| *c == ZERO) {
        return PiRaw {
            value: 0.0,
            primal: 0.0,
            dual: 0.0,
            exact: true,
            terms: vec![],
            certificate: Matrix::zeros(n, m),
            method: "zero",
        };
    }
    if let (Some(wx), Some(wy)) = (x.euclidean_weights(), y.euclidean_weights()) {
        return euclidean_pi(u, &wx, &wy);
    }
    if let Some(b) = cross_basis(x) {
        if let Some(r) = cross_left(u, &b, y) {
            return r;
        }
    }
    if let Some(b) = cross_basis(y) {
        if let Some(r) = cross_left(&u.transpose(), &b, x) {
            return PiRaw {
                certificate: r.certificate.transpose(),
                terms: r
                    .terms
                    .into_iter()
                    .map(|t| RankOneTerm {
                        weight: t.weight,
                        x: t.y,
                        y: t.x,
                    })
                    .collect(),
                ..r
            };
        }
    }
    column_generation(u, x, y, cfg)
}

/// Weighted Euclidean factors: after rescaling, `u = sum s_k a_k (x) b_k`
/// with orthonormal `a_k`, `b_k`, and `B = sum conj(a_k) (x) conj(b_k)`
/// has injective norm one.
fn euclidean_pi(u: &Matrix, wx: &[f64], wy: &[f64]) -> PiRaw {
    let (n, m) = (u.rows(), u.cols());
    let mut scaled = u.clone();
    for i in 0..n {
        for j in 0..m {
            scaled.set(i, j, u.get(i, j) * (wx[i] * wy[j]).sqrt());
        }
    }
    let svd = scaled.svd();
    let mut cert = Matrix::zeros(n, m);
    let mut terms = Vec::new();
    let mut value = 0.0;
    for k in 0..svd.singular.len() {
        let s = svd.singular[k];
        value += s;
        let a = &svd.u[k];
        let b: CVec = svd.v[k].iter().map(|c| c.conj()).collect();
        for i in 0..n {
            for j in 0..m {
                let c = a[i].conj() * b[j].conj() * (wx[i] * wy[j]).sqrt();
                cert.set(i, j, cert.get(i, j) + c);
            }
        }
        if s > 0.0 {
            terms.push(RankOneTerm {
                weight: s,
                x: a.iter().zip(wx).map(|(c, w)| c / w.sqrt()).collect(),
                y: b.iter().zip(wy).map(|(c, w)| c / w.sqrt()).collect(),
            });
        }
    }
    let dual = pair(cert.data(), u.data()).re;
    PiRaw {
        value,
        primal: value,
        dual,
        exact: true,
        terms,
        certificate: cert,
        method: "singular-values",
    }
}

struct Pool {
    xs: Vec<CVec>,
    ys: Vec<CVec>,
}

impl Pool {
    fn push(&mut self, x: CVec, y: CVec) {
        self.xs.push(x);
        self.ys.push(y);
    }
}

fn column_generation(u: &Matrix, x: &NormedSpace, y: &NormedSpace, cfg: &Config) -> PiRaw {
    let (n, m) = (x.dim(), y.dim());
    let complex = !x.is_real();
    let phases: Vec<C64> = if complex {
        vec![ONE, C64::new(0.0, 1.0), -ONE, C64::new(0.0, -1.0)]
    } else {
        vec![ONE, -ONE]
    };
    let mut pool = Pool { xs: vec![], ys: vec![] };
    if let (Some(vx), Some(vy)) = (x.cheap_vertices_c(), y.cheap_vertices_c()) {
        let half: Vec<&CVec> = vx
            .iter()
            .filter(|v| v.iter().find(|c| c.re != 0.0).is_some_and(|c| c.re > 0.0))
            .collect();
        for a in half {
            for b in vy.iter() {
                pool.push(a.clone(), b.clone());
            }
        }
    }
    for i in 0..n {
        for j in 0..m {
            let mut ei = vec![ZERO; n];
            ei[i] = ONE;
            let mut ej = vec![ZERO; m];
            ej[j] = ONE;
            let (ei, ej) = (unit(x, &ei).expect("basis"), unit(y, &ej).expect("basis"));
            for p in &phases {
                pool.push(ei.iter().map(|c| c * p).collect(), ej.clone());
            }
        }
    }
    let svd = u.svd();
    for k in 0..svd.singular.len() {
        if svd.singular[k] <= 1e-14 * svd.singular[0] {
            continue;
        }
        let yk: CVec = svd.v[k].iter().map(|c| c.conj()).collect();
        if let (Some(a), Some(b)) = (unit(x, &svd.u[k]), unit(y, &yk)) {
            for p in &phases {
                pool.push(a.iter().map(|c| c * p).collect(), b.clone());
            }
        }
    }

    let target: Vec<f64> = if complex {
        u.data().iter().map(|c| c.re).chain(u.data().iter().map(|c| c.im)).collect()
    } else {
        u.data().iter().map(|c| c.re).collect()
    };
    let rows = target.len();
    // ||e_i (x) e_j||_pi bound for the leftover residual
    let basis_scale = {
        let norm_e = |s: &NormedSpace, k: usize| {
            let mut e = vec![ZERO; s.dim()];
            e[k] = ONE;
            s.norm_value(&e)
        };
        let bx = (0..n).map(|i| norm_e(x, i)).fold(0.0, f64::max);
        let by = (0..m).map(|j| norm_e(y, j)).fold(0.0, f64::max);
        bx * by
    };
    let xd = x.dual();
    let mut best_dual = 0.0;
    let mut best_cert = Matrix::zeros(n, m);
    let mut primal = f64::INFINITY;
    let mut terms = Vec::new();
    let mut pricing_exact = true;
    let mut converged = false;
    for _round in 0..cfg.pi_rounds.max(1) {
        let atoms: Vec<CVec> = pool.xs.iter().zip(&pool.ys).map(|(a, b)| kron(a, b)).collect();
        let mut a = vec![vec![0.0; atoms.len()]; rows];
        for (k, at) in atoms.iter().enumerate() {
            for (r, c) in at.iter().enumerate() {
                a[r][k] = c.re;
                if complex {
                    a[r + n * m][k] = c.im;
                }
            }
        }
        let cost = vec![1.0; atoms.len()];
        let Ok(sol) = solve_standard(&cost, &a, &target) else { break };
        if sol.status != LpStatus::Optimal {
            break;
        }
        let (weights, slack) = polish(&a, &target, &sol.x);
        let value = weights.iter().sum::<f64>() + slack * basis_scale;
        if value < primal {
            primal = value;
            terms = weights
                .iter()
                .enumerate()
                .filter(|(_, w)| **w > 1e-15)
                .map(|(k, w)| RankOneTerm {
                    weight: *w,
                    x: pool.xs[k].clone(),
                    y: pool.ys[k].clone(),
                })
                .collect();
        }
        let bdata: CVec = (0..n * m)
            .map(|r| if complex { C64::new(sol.y[r], -sol.y[r + n * m]) } else { C64::new(sol.y[r], 0.0) })
            .collect();
        let b = Matrix::new(n, m, bdata).expect("shape");
        // pricing: ||B||_eps over X* (x) Y* = ||B : Y -> X*||
        let pr = op_norm_raw(&b, y, &xd, cfg);
        let s = pr.value.max(1e-300);
        let bu = pair(b.data(), u.data()).re;
        let scale = s.max(1.0);
        if bu / scale > best_dual {
            best_dual = bu / scale;
            best_cert = b.scale(C64::new(1.0 / scale, 0.0));
            pricing_exact = pr.exact;
        }
        if s <= 1.0 + 1e-12 || primal - best_dual <= 1e-13 * primal.max(1.0) {
            converged = true;
            break;
        }
        // new atom xt (x) yt with <B, xt (x) yt> = s
        let yt = pr.arg.clone();
        let by = b.apply(&yt);
        let ph = pair(&pr.functional, &by);
        let mut xt: CVec = pr.functional.iter().map(|c| c * crate::scalar::phase(ph).conj()).collect();
        if let Some(v) = unit(x, &xt) {
            xt = v;
        }
        pool.push(xt, yt);
    }
    let gap = primal - best_dual;
    let exact = pricing_exact && x.exact_norms_or_smooth() && y.exact_norms_or_smooth() && gap <= cfg.opt_tol;
    let _ = converged;
    PiRaw {
        value: primal,
        primal,
        dual: best_dual,
        exact,
        terms,
        certificate: best_cert,
        method: "column-generation",
    }
}

/// Re-solves the equality system on the support of `x`, since tableau
/// roundoff can leave a visible residual, and keeps whichever solution fits
/// better. Returns nonnegative weights and the l1 size of `b - A w`.
fn polish(a: &[Vec<f64>], b: &[f64], x: &[f64]) -> (Vec<f64>, f64) {
    let slack = |w: &[f64]| -> f64 {
        (0..b.len())
            .map(|r| (b[r] - (0..w.len()).map(|k| a[r][k] * w[k]).sum::<f64>()).abs())
            .sum()
    };
    let mut best = (x.iter().map(|v| v.max(0.0)).collect::<Vec<_>>(), 0.0);
    best.1 = slack(&best.0);
    let support: Vec<usize> = (0..x.len()).filter(|&k| x[k] > 0.0).collect();
    if support.is_empty() || best.1 == 0.0 {
        return best;
    }
    let am = DMatrix::from_fn(b.len(), support.len(), |r, c| a[r][support[c]]);
    let bv = nalgebra::DVector::from_column_slice(b);
    let solved = if am.is_square() { am.lu().solve(&bv) } else { am.pseudo_inverse(1e-14).ok().map(|p| p * &bv) };
    if let Some(sol) = solved {
        if sol.iter().all(|v| *v >= -1e-12) {
            let mut w = vec![0.0; x.len()];
            for (c, &k) in support.iter().enumerate() {
                w[k] = sol[c].max(0.0);
            }
            let s = slack(&w);
            if s < best.1 {
                best = (w, s);
            }
        }
    }
    best
}

/// `X (x)_pi Y` or `X (x)_eps Y` as a normed space.
pub fn tensor_space(x: &NormedSpace, y: &NormedSpace, kind: TensorKind) -> Result<NormedSpace> {
    tensor_space_with(x, y, kind, x.config())
}

pub fn tensor_space_with(x: &NormedSpace, y: &NormedSpace, kind: TensorKind, cfg: &Config) -> Result<NormedSpace> {
    if x.field() != y.field() {
        return Err(Error::FieldMismatch("tensor factors over different fields".into()));
    }
    let dim = x.dim() * y.dim();
    if dim > cfg.max_tensor_dim {
        return Err(Error::Guardrail {
            what: "tensor space dimension",
            value: dim,
            limit: cfg.max_tensor_dim,
        });
    }
    let (label, nk) = match kind {
        TensorKind::Pi => (format!("{}(x)pi{}", x.label(), y.label()), NormKind::TensorPi(x.clone(), y.clone())),
        TensorKind::Eps => (format!("{}(x)eps{}", x.label(), y.label()), NormKind::TensorEps(x.clone(), y.clone())),
    };
    Ok(NormedSpace::composite(label, dim, x.field(), nk, cfg))
}

/// `S (x) T` between the tensor spaces of the domains and codomains.
pub fn tensor_lift(s: &Operator, t: &Operator, kind: TensorKind) -> Result<Operator> {
    let dom = tensor_space(s.domain(), t.domain(), kind)?;
    let cod = if s.domain().same_as(s.codomain()) && t.domain().same_as(t.codomain()) {
        dom.clone()
    } else {
        tensor_space(s.codomain(), t.codomain(), kind)?
    };
    let m = s.matrix().kron(t.matrix());
    match (s.rational(), t.rational()) {
        (Some(a), Some(b)) => Operator::from_rational(&dom, &cod, rat_kron_matrix(a, b)),
        _ => Operator::new(&dom, &cod, m),
    }
}

pub(crate) fn rat_kron_matrix(a: &[RatVec], b: &[RatVec]) -> Vec<RatVec> {
    let mut out = Vec::new();
    for ra in a {
        for rb in b {
            let mut row: Vec<Rat> = Vec::with_capacity(ra.len() * rb.len());
            for x in ra {
                for y in rb {
                    row.push(x * y);
                }
            }
            out.push(row);
        }
    }
    out
}

/// `N(T)` as the projective norm of `T` read in `X* (x) Y`.
pub fn nuclear_norm_operator(t: &Operator) -> PiNorm {
    let u = t.matrix().transpose();
    pi_raw(&u, &t.domain().dual(), t.codomain(), t.domain().config())
}

impl NormedSpace {
    pub(crate) fn exact_norms_or_smooth(&self) -> bool {
        match self.kind() {
            NormKind::Lp(_) | NormKind::WeightedEuclidean(_) | NormKind::Polyhedral => true,
            _ => self.exact_norms(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{real_vec, Field};

    #[test]
    fn eps_examples() {
        let l2 = NormedSpace::l2(2, Field::Real);
        let id = TensorElement::from_flat(&l2, &l2, &real_vec(&[1.0, 0.0, 0.0, 1.0])).unwrap();
        assert!((eps_norm(&id).value - 1.0).abs() < 1e-12);
        let linf = NormedSpace::linf(2);
        let id = TensorElement::from_flat(&linf, &linf, &real_vec(&[1.0, 0.0, 0.0, 1.0])).unwrap();
        let e = eps_norm(&id);
        assert_eq!(e.value, 1.0);
        assert!(e.exact);
    }

    #[test]
    fn pi_examples() {
        let l2 = NormedSpace::l2(2, Field::Real);
        let id = TensorElement::from_flat(&l2, &l2, &real_vec(&[1.0, 0.0, 0.0, 1.0])).unwrap();
        let p = pi_norm(&id);
        assert!((p.value - 2.0).abs() < 1e-9, "{p:?}");
        assert!(p.exact);
        let l1 = NormedSpace::l1(2);
        let y = NormedSpace::lp(3, Exponent::Finite(3.0), Field::Real).unwrap();
        let u = TensorElement::from_flat(&l1, &y, &real_vec(&[1.0, 2.0, -1.0, 0.5, 0.0, 3.0])).unwrap();
        let expect = y.eval_norm(&real_vec(&[1.0, 2.0, -1.0])).unwrap() + y.eval_norm(&real_vec(&[0.5, 0.0, 3.0])).unwrap();
        assert!((pi_norm(&u).value - expect).abs() < 1e-12);
    }

    #[test]
    fn nuclear_examples() {
        let l2 = NormedSpace::l2(2, Field::Real);
        assert!((nuclear_norm_operator(&Operator::identity(&l2)).value - 2.0).abs() < 1e-9);
        let linf = NormedSpace::linf(2);
        let r = nuclear_norm_operator(&Operator::identity(&linf));
        assert!((r.value - 2.0).abs() < 1e-12 && r.exact);
    }

    #[test]
    fn polyhedral_pi_ball_of_l1_pair_is_cross_polytope() {
        let l1 = NormedSpace::l1(2);
        let s = tensor_space(&l1, &l1, TensorKind::Pi).unwrap();
        assert_eq!(s.vertices().unwrap().len(), 8);
        let linf = NormedSpace::linf(2);
        let e = tensor_space(&linf, &linf, TensorKind::Eps).unwrap();
        assert_eq!(e.facets().unwrap().len(), 8);
        assert_eq!(e.vertices().unwrap().len(), 16);
    }
}
