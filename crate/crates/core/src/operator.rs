//! Operators between normed spaces, operator norms and `L(X, Y)`.
//!
//! The operator norm is computed by the first applicable route:
//! finite ball generators of the domain, finite dual generators of the
//! codomain, the singular value decomposition for weighted Euclidean pairs,
//! projective domains with a finite factor, polarity-converted vertex lists,
//! and finally a multistart alternating ascent (flagged heuristic).

use std::sync::{Arc, OnceLock};

use num_traits::Zero;

use crate::atoms::{ball_atoms, random_unit, Atoms};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{kron, rat_dot, ratvec_to_c, CVec, Field, Rat, RatVec, C64, ONE, ZERO};
use crate::space::{some_unit_vector, NormKind, NormedSpace};

#[derive(Clone, Debug)]
pub(crate) struct OpNormRaw {
    pub value: f64,
    pub exact: bool,
    /// Unit vector of the domain with `||T arg|| = value` (approximately).
    pub arg: CVec,
    /// Functional on the codomain, dual norm at most one, norming `T arg`.
    pub functional: CVec,
    pub route: &'static str,
}

/// Operator norm with certificates.
#[derive(Clone, Debug)]
pub struct OpNorm {
    pub value: f64,
    pub exact: bool,
    /// Maximizing unit vector of the domain.
    pub argument: CVec,
    /// Norming functional of `T(argument)` in the codomain dual.
    pub functional: CVec,
    /// Which computation produced the value.
    pub route: &'static str,
}

/// A linear map `domain -> codomain` given by a `dim(Y) x dim(X)` matrix.
#[derive(Clone)]
pub struct Operator {
    matrix: Matrix,
    rational: Option<Arc<Vec<RatVec>>>,
    domain: NormedSpace,
    codomain: NormedSpace,
    norm: Arc<OnceLock<OpNorm>>,
}

impl std::fmt::Debug for Operator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Operator({} -> {}, {:?})", self.domain, self.codomain, self.matrix.data())
    }
}

fn common_field(x: &NormedSpace, y: &NormedSpace) -> Result<Field> {
    if x.field() != y.field() {
        return Err(Error::FieldMismatch(format!("{} is {}, {} is {}", x, x.field(), y, y.field())));
    }
    Ok(x.field())
}

impl Operator {
    pub fn new(domain: &NormedSpace, codomain: &NormedSpace, matrix: Matrix) -> Result<Self> {
        let field = common_field(domain, codomain)?;
        if matrix.rows() != codomain.dim() || matrix.cols() != domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: codomain.dim() * domain.dim(),
                got: matrix.rows() * matrix.cols(),
            });
        }
        if field == Field::Real && !matrix.is_real() {
            return Err(Error::FieldMismatch("complex matrix between real spaces".into()));
        }
        Ok(Operator {
            matrix,
            rational: None,
            domain: domain.clone(),
            codomain: codomain.clone(),
            norm: Arc::new(OnceLock::new()),
        })
    }

    /// Row-major real matrix.
    pub fn from_real(domain: &NormedSpace, codomain: &NormedSpace, rows: &[Vec<f64>]) -> Result<Self> {
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        if rows.iter().any(|r| r.len() != domain.dim()) || rows.len() != codomain.dim() {
            return Err(Error::DimensionMismatch {
                expected: codomain.dim() * domain.dim(),
                got: data.len(),
            });
        }
        Self::new(domain, codomain, Matrix::from_real(codomain.dim(), domain.dim(), &data)?)
    }

    /// Exact rational matrix (real spaces).
    pub fn from_rational(domain: &NormedSpace, codomain: &NormedSpace, rows: Vec<RatVec>) -> Result<Self> {
        if rows.len() != codomain.dim() || rows.iter().any(|r| r.len() != domain.dim()) {
            return Err(Error::DimensionMismatch {
                expected: codomain.dim() * domain.dim(),
                got: rows.iter().map(|r| r.len()).sum(),
            });
        }
        let data: CVec = rows.iter().flat_map(|r| ratvec_to_c(r)).collect();
        let mut op = Self::new(domain, codomain, Matrix::new(codomain.dim(), domain.dim(), data)?)?;
        op.rational = Some(Arc::new(rows));
        Ok(op)
    }

    pub fn identity(space: &NormedSpace) -> Self {
        let n = space.dim();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Rat::from_integer(1.into()) } else { Rat::zero() }).collect())
            .collect();
        Self::from_rational(space, space, rows).expect("square")
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn rational(&self) -> Option<&[RatVec]> {
        self.rational.as_deref().map(|v| v.as_slice())
    }

    pub fn domain(&self) -> &NormedSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &NormedSpace {
        &self.codomain
    }

    pub fn is_endomorphism(&self) -> bool {
        self.domain.same_as(&self.codomain)
    }

    pub(crate) fn require_endomorphism(&self) -> Result<()> {
        if !self.is_endomorphism() {
            return Err(Error::NotEndomorphism {
                domain: self.domain.label().to_string(),
                codomain: self.codomain.label().to_string(),
            });
        }
        Ok(())
    }

    pub fn apply(&self, x: &[C64]) -> CVec {
        self.matrix.apply(x)
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.data().iter().all(|v| *v == ZERO)
    }

    /// `lambda T`; rational data is kept when `lambda` is rational.
    pub fn scale(&self, lambda: C64) -> Operator {
        let mut op = Operator::new(&self.domain, &self.codomain, self.matrix.scale(lambda)).expect("same shape");
        if let (Some(r), true) = (&self.rational, lambda.im == 0.0) {
            if let Some(l) = Rat::from_float(lambda.re) {
                op.rational = Some(Arc::new(r.iter().map(|row| row.iter().map(|v| v * &l).collect()).collect()));
            }
        }
        op
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        if !self.domain.same_as(&other.domain) || !self.codomain.same_as(&other.codomain) {
            return Err(Error::SpaceMismatch("operator sum over different spaces".into()));
        }
        let mut op = Operator::new(&self.domain, &self.codomain, self.matrix.add(&other.matrix)?)?;
        if let (Some(a), Some(b)) = (&self.rational, &other.rational) {
            op.rational = Some(Arc::new(
                a.iter().zip(b.iter()).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect(),
            ));
        }
        Ok(op)
    }

    /// Cached operator norm.
    pub fn norm(&self) -> &OpNorm {
        self.norm.get_or_init(|| {
            let r = op_norm_raw(&self.matrix, &self.domain, &self.codomain, self.domain.config());
            OpNorm {
                value: r.value,
                exact: r.exact,
                argument: r.arg,
                functional: r.functional,
                route: r.route,
            }
        })
    }

    /// Exact operator norm for rational operators on polyhedral domains with
    /// exact codomain norms.
    pub fn norm_exact(&self) -> Result<Rat> {
        let rows = self.rational.as_ref().ok_or_else(|| Error::InvalidArgument("operator has no rational matrix".into()))?;
        let verts = self.domain.vertices().ok_or_else(|| self.domain.not_polyhedral())?;
        rat_norm_over(rows, &verts, &self.codomain)
    }

    /// Coefficients in `operator_space(domain, codomain)`.
    pub fn to_coefficients(&self) -> CVec {
        self.matrix.data().to_vec()
    }
}

/// `||T||` with a maximizing unit vector and exact/heuristic flag.
pub fn op_norm(t: &Operator) -> OpNorm {
    t.norm().clone()
}

/// `A o B`; requires `domain(A) = codomain(B)`.
pub fn compose(a: &Operator, b: &Operator) -> Result<Operator> {
    if !a.domain.same_as(&b.codomain) {
        return Err(Error::SpaceMismatch(format!(
            "cannot compose: domain {} differs from codomain {}",
            a.domain, b.codomain
        )));
    }
    let mut op = Operator::new(&b.domain, &a.codomain, a.matrix.mul(&b.matrix)?)?;
    if let (Some(ra), Some(rb)) = (&a.rational, &b.rational) {
        op.rational = Some(Arc::new(rat_matmul(ra, rb)));
    }
    Ok(op)
}

pub(crate) fn rat_matmul(a: &[RatVec], b: &[RatVec]) -> Vec<RatVec> {
    let k = b.len();
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| (0..k).fold(Rat::zero(), |acc, l| acc + &row[l] * &b[l][j]))
                .collect()
        })
        .collect()
}

pub(crate) fn rat_transpose(a: &[RatVec]) -> Vec<RatVec> {
    let n = a.first().map_or(0, |r| r.len());
    (0..n).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// `T* : Y* -> X*`. With the bilinear pairing `f(x) = sum f_i x_i` the
/// adjoint matrix is the plain transpose over both fields.
pub fn adjoint(t: &Operator) -> Operator {
    let mut op = Operator::new(&t.codomain.dual(), &t.domain.dual(), t.matrix.transpose()).expect("transpose shape");
    if let Some(r) = &t.rational {
        op.rational = Some(Arc::new(rat_transpose(r)));
    }
    op
}

/// `L(X, Y)` as a normed space of dimension `dim X * dim Y`.
pub fn operator_space(x: &NormedSpace, y: &NormedSpace) -> Result<NormedSpace> {
    operator_space_with(x, y, x.config())
}

pub fn operator_space_with(x: &NormedSpace, y: &NormedSpace, cfg: &Config) -> Result<NormedSpace> {
    let field = common_field(x, y)?;
    let dim = x.dim() * y.dim();
    if dim > cfg.max_operator_dim {
        return Err(Error::Guardrail {
            what: "operator space dimension",
            value: dim,
            limit: cfg.max_operator_dim,
        });
    }
    Ok(NormedSpace::composite(
        format!("L({},{})", x.label(), y.label()),
        dim,
        field,
        NormKind::OperatorSpace(x.clone(), y.clone()),
        cfg,
    ))
}

/// Reads a coefficient vector of `L(X, Y)` back as an operator.
pub fn operator_from_coefficients(space: &NormedSpace, coeffs: &[C64]) -> Result<Operator> {
    let NormKind::OperatorSpace(x, y) = space.kind() else {
        return Err(Error::InvalidArgument(format!("{} is not an operator space", space)));
    };
    space.check_dim(coeffs.len())?;
    Operator::new(x, y, Matrix::new(y.dim(), x.dim(), coeffs.to_vec())?)
}

fn best_over_vectors(m: &Matrix, list: &[CVec], y: &NormedSpace) -> OpNormRaw {
    let mut best: Option<OpNormRaw> = None;
    let mut exact = true;
    for v in list {
        let w = y.norm_witness(&m.apply(v));
        exact &= w.exact;
        if best.as_ref().is_none_or(|b| w.value > b.value) {
            best = Some(OpNormRaw {
                value: w.value,
                exact: true,
                arg: v.clone(),
                functional: w.functional,
                route: "domain-vertices",
            });
        }
    }
    let mut b = best.expect("nonempty generating set");
    b.exact = exact;
    b
}

fn best_over_functionals(m: &Matrix, list: &[CVec], x: &NormedSpace) -> OpNormRaw {
    let xd = x.dual();
    let mut best: Option<OpNormRaw> = None;
    let mut exact = true;
    for g in list {
        let w = xd.norm_witness(&m.apply_transpose(g));
        exact &= w.exact;
        if best.as_ref().is_none_or(|b| w.value > b.value) {
            best = Some(OpNormRaw {
                value: w.value,
                exact: true,
                arg: w.functional,
                functional: g.clone(),
                route: "codomain-dual-vertices",
            });
        }
    }
    let mut b = best.expect("nonempty generating set");
    b.exact = exact;
    b
}

pub(crate) fn op_norm_raw(m: &Matrix, x: &NormedSpace, y: &NormedSpace, cfg: &Config) -> OpNormRaw {
    op_norm_depth(m, x, y, cfg, 0)
}

fn op_norm_depth(m: &Matrix, x: &NormedSpace, y: &NormedSpace, cfg: &Config, depth: usize) -> OpNormRaw {
    if m.data().iter().all(|v| *v == ZERO) {
        return OpNormRaw {
            value: 0.0,
            exact: true,
            arg: some_unit_vector(x),
            functional: vec![ZERO; y.dim()],
            route: "zero",
        };
    }
    if let Some(v) = x.cheap_vertices_c() {
        return best_over_vectors(m, &v, y);
    }
    if let Some(g) = y.cheap_facets_c() {
        return best_over_functionals(m, &g, x);
    }
    if let (Some(wx), Some(wy)) = (x.euclidean_weights(), y.euclidean_weights()) {
        return euclidean_route(m, &wx, &wy, y);
    }
    if depth < 3 {
        if let Some(r) = product_domain_route(m, x, y, cfg, depth) {
            return r;
        }
        if matches!(y.dual().kind(), NormKind::TensorPi(..)) {
            let yd = y.dual();
            if let Some(r) = product_domain_route(&m.transpose(), &yd, &x.dual(), cfg, depth) {
                return OpNormRaw {
                    value: r.value,
                    exact: r.exact,
                    arg: r.functional,
                    functional: r.arg,
                    route: r.route,
                };
            }
        }
    }
    if x.is_real() {
        if let Some(g) = y.facets_c() {
            return best_over_functionals(m, &g, x);
        }
        if let Some(v) = x.vertices_c() {
            return best_over_vectors(m, &v, y);
        }
    }
    power_ascent(m, x, y, cfg, 0x0A11)
}

fn euclidean_route(m: &Matrix, wx: &[f64], wy: &[f64], y: &NormedSpace) -> OpNormRaw {
    let (r, c) = (m.rows(), m.cols());
    let mut scaled = m.clone();
    for i in 0..r {
        for j in 0..c {
            scaled.set(i, j, m.get(i, j) * (wy[i].sqrt() / wx[j].sqrt()));
        }
    }
    let svd = scaled.svd();
    let arg: CVec = svd.v[0].iter().zip(wx).map(|(v, w)| v / w.sqrt()).collect();
    let w = y.norm_witness(&m.apply(&arg));
    OpNormRaw {
        value: svd.singular[0],
        exact: true,
        arg,
        functional: w.functional,
        route: "singular-values",
    }
}

/// Projective domain `L (x)_pi R` with one finite factor: the norm is the
/// max over that factor's generators of a smaller operator norm.
fn product_domain_route(m: &Matrix, x: &NormedSpace, y: &NormedSpace, cfg: &Config, depth: usize) -> Option<OpNormRaw> {
    let NormKind::TensorPi(l, r) = x.kind() else {
        return None;
    };
    let (dl, dr) = (l.dim(), r.dim());
    let rows = m.rows();
    if let Some(vl) = l.cheap_vertices_c() {
        let mut best: Option<OpNormRaw> = None;
        let mut exact = true;
        for p in vl.iter() {
            let mut sub = Matrix::zeros(rows, dr);
            for yi in 0..rows {
                for j in 0..dr {
                    let s: C64 = (0..dl).map(|i| m.get(yi, i * dr + j) * p[i]).sum();
                    sub.set(yi, j, s);
                }
            }
            let res = op_norm_depth(&sub, r, y, cfg, depth + 1);
            exact &= res.exact;
            if best.as_ref().is_none_or(|b| res.value > b.value) {
                best = Some(OpNormRaw {
                    arg: kron(p, &res.arg),
                    route: "projective-factor",
                    ..res
                });
            }
        }
        let mut b = best?;
        b.exact = exact;
        return Some(b);
    }
    if let Some(vr) = r.cheap_vertices_c() {
        let mut best: Option<OpNormRaw> = None;
        let mut exact = true;
        for q in vr.iter() {
            let mut sub = Matrix::zeros(rows, dl);
            for yi in 0..rows {
                for i in 0..dl {
                    let s: C64 = (0..dr).map(|j| m.get(yi, i * dr + j) * q[j]).sum();
                    sub.set(yi, i, s);
                }
            }
            let res = op_norm_depth(&sub, l, y, cfg, depth + 1);
            exact &= res.exact;
            if best.as_ref().is_none_or(|b| res.value > b.value) {
                best = Some(OpNormRaw {
                    arg: kron(&res.arg, q),
                    route: "projective-factor",
                    ..res
                });
            }
        }
        let mut b = best?;
        b.exact = exact;
        return Some(b);
    }
    None
}

/// Multistart alternating ascent: `x -> J_Y(Tx) -> J_{X*}(T^t J_Y(Tx))`.
/// The values `||T x_k||` are nondecreasing along each run.
pub(crate) fn power_ascent(m: &Matrix, x: &NormedSpace, y: &NormedSpace, cfg: &Config, stream: u64) -> OpNormRaw {
    let xd = x.dual();
    let atoms = ball_atoms(x, false);
    let mut rng = cfg.rng(stream);
    let mut starts: Vec<CVec> = Vec::new();
    for i in 0..x.dim() {
        let mut e = vec![ZERO; x.dim()];
        e[i] = ONE;
        starts.push(e);
    }
    let svd = m.svd();
    starts.push(svd.v[0].clone());
    while starts.len() < cfg.norm_starts.max(x.dim() + 2) {
        let s = match &atoms {
            Atoms::Sphere(_) => random_unit(x, &mut rng),
            a => a.realize(&a.sample(&mut rng)),
        };
        starts.push(s);
    }
    let mut best: Option<OpNormRaw> = None;
    for s in starts {
        let n = x.norm_value(&s);
        if n == 0.0 {
            continue;
        }
        let mut cur: CVec = s.iter().map(|v| v / n).collect();
        let mut last = -1.0;
        for _ in 0..cfg.norm_iters.max(1) {
            let w = y.norm_witness(&m.apply(&cur));
            if best.as_ref().is_none_or(|b| w.value > b.value) {
                best = Some(OpNormRaw {
                    value: w.value,
                    exact: false,
                    arg: cur.clone(),
                    functional: w.functional.clone(),
                    route: "multistart-ascent",
                });
            }
            if w.value <= last * (1.0 + 1e-15) + 1e-300 {
                break;
            }
            last = w.value;
            let h = m.apply_transpose(&w.functional);
            let back = xd.norm_witness(&h);
            if back.value == 0.0 {
                break;
            }
            let nv = x.norm_value(&back.functional);
            if nv == 0.0 {
                break;
            }
            cur = back.functional.iter().map(|v| v / nv).collect();
        }
    }
    best.expect("at least one start")
}

/// Exact `max_v ||T v||` over rational vertex lists (used by exact paths).
pub(crate) fn rat_norm_over(rows: &[RatVec], verts: &[RatVec], cod: &NormedSpace) -> Result<Rat> {
    let mut best = Rat::zero();
    for v in verts {
        let tv: RatVec = rows.iter().map(|r| rat_dot(r, v)).collect();
        let n = cod.eval_norm_exact(&tv)?;
        if n > best {
            best = n;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat_int;

    fn ri(rows: &[&[i64]]) -> Vec<RatVec> {
        rows.iter().map(|r| r.iter().map(|&v| rat_int(v)).collect()).collect()
    }

    #[test]
    fn operator_norm_examples() {
        let linf = NormedSpace::linf(2);
        let swap = Operator::from_rational(&linf, &linf, ri(&[&[0, 1], &[1, 0]])).unwrap();
        assert_eq!(swap.norm().value, 1.0);
        assert!(swap.norm().exact);
        let l1 = NormedSpace::l1(2);
        let t = Operator::from_rational(&l1, &l1, ri(&[&[1, 1], &[1, -1]])).unwrap();
        assert_eq!(t.norm().value, 2.0);
        assert_eq!(t.norm_exact().unwrap(), rat_int(2));
        for s in [NormedSpace::l2(3, Field::Real), NormedSpace::l2(2, Field::Complex), NormedSpace::l1(3)] {
            let id = Operator::identity(&s);
            assert!((id.norm().value - 1.0).abs() < 1e-12);
            assert!((s.eval_norm(&id.norm().argument).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn adjoint_is_transpose_with_equal_norm() {
        let l1 = NormedSpace::l1(2);
        let t = Operator::from_rational(&l1, &l1, ri(&[&[1, 1], &[1, -1]])).unwrap();
        let a = adjoint(&t);
        assert!(a.domain().same_as(&NormedSpace::linf(2)));
        assert_eq!(a.norm().value, 2.0);
        let id = Operator::identity(&l1);
        assert_eq!(adjoint(&id).matrix().data(), id.matrix().data());
    }

    #[test]
    fn composition_identities() {
        let linf = NormedSpace::linf(2);
        let swap = Operator::from_rational(&linf, &linf, ri(&[&[0, 1], &[1, 0]])).unwrap();
        let sq = compose(&swap, &swap).unwrap();
        assert_eq!(sq.rational().unwrap(), Operator::identity(&linf).rational().unwrap());
        let l1 = NormedSpace::l1(2);
        let bad = Operator::identity(&l1);
        assert!(compose(&swap, &bad).is_err());
    }

    #[test]
    fn operator_space_examples() {
        let one = NormedSpace::l1(1);
        let s = operator_space(&one, &one).unwrap();
        assert!((s.eval_norm(&[C64::new(-3.0, 0.0)]).unwrap() - 3.0).abs() < 1e-15);
        let linf = NormedSpace::linf(2);
        let l = operator_space(&linf, &linf).unwrap();
        assert_eq!(l.eval_norm(&crate::scalar::real_vec(&[1.0, 0.0, 0.0, 1.0])).unwrap(), 1.0);
        // L(l1, linf) is an l_inf^4 cube
        let lu = operator_space(&NormedSpace::l1(2), &linf).unwrap();
        assert_eq!(lu.vertices().unwrap().len(), 16);
        assert_eq!(lu.facets().unwrap().len(), 8);
        assert!(operator_space(&NormedSpace::linf(5), &NormedSpace::linf(4)).is_err());
    }

    #[test]
    fn heuristic_route_matches_exact() {
        let x = NormedSpace::lp(3, crate::space::Exponent::Finite(3.0), Field::Real).unwrap();
        let y = NormedSpace::linf(3);
        let m = Matrix::from_real(3, 3, &[1.0, -2.0, 0.5, 0.3, 0.0, 1.0, -1.0, 1.0, 1.0]).unwrap();
        let t = Operator::new(&x, &y, m.clone()).unwrap();
        // exact: max row norm in l_{3/2}
        let q = 1.5f64;
        let expect = (0..3)
            .map(|i| (0..3).map(|j| m.get(i, j).norm().powf(q)).sum::<f64>().powf(1.0 / q))
            .fold(0.0, f64::max);
        assert!((t.norm().value - expect).abs() < 1e-9, "{} vs {}", t.norm().value, expect);
        let r = power_ascent(&m, &x, &y, &Config::default(), 3);
        assert!((r.value - expect).abs() < 1e-6);
    }
}
