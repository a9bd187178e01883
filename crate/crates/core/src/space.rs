//! Finite-dimensional normed spaces, their duals and norming functionals.
//!
//! A [`NormedSpace`] is an immutable, cheaply clonable handle. Coordinates
//! are fixed: the dual space uses the same index set and the bilinear pairing
//! `f(x) = sum f_i x_i`. Composite spaces (tensor products and operator
//! spaces) store their factors and evaluate their norms through the operator
//! and tensor modules.
//!
//! Real polyhedral balls carry exact rational vertex and facet lists. Facets
//! are stored as functionals `f` with `f . x <= 1` on the ball, so the norm is
//! `max_f f . x` and the facet list is exactly the vertex list of the dual ball.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_traits::{Signed, Zero};

use crate::config::{Config, FACE_TOL};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::polytope;
use crate::scalar::{
    euclid, kron, pair, phase, rat_dot, rat_int, rat_to_f64, ratvec_to_c, CVec, Field, Rat, RatVec, C64, ONE, ZERO,
};

/// Exponent `p` of an `l_p` norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn conjugate(self) -> Exponent {
        match self {
            Exponent::Infinity => Exponent::Finite(1.0),
            Exponent::Finite(p) if p == 1.0 => Exponent::Infinity,
            Exponent::Finite(p) => Exponent::Finite(p / (p - 1.0)),
        }
    }

    fn is_one(self) -> bool {
        self == Exponent::Finite(1.0)
    }

    fn is_inf(self) -> bool {
        self == Exponent::Infinity
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Infinity => write!(f, "inf"),
            Exponent::Finite(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum NormKind {
    Lp(Exponent),
    Polyhedral,
    WeightedEuclidean(Vec<f64>),
    /// Projective tensor product `X (x)_pi Y`, coefficients left-index major.
    TensorPi(NormedSpace, NormedSpace),
    /// Injective tensor product `X (x)_eps Y`, coefficients left-index major.
    TensorEps(NormedSpace, NormedSpace),
    /// `L(X, Y)`; coefficients are the `dim Y x dim X` matrix, row major.
    OperatorSpace(NormedSpace, NormedSpace),
}

impl NormKind {
    pub fn name(&self) -> &'static str {
        match self {
            NormKind::Lp(_) => "lp",
            NormKind::Polyhedral => "polyhedral",
            NormKind::WeightedEuclidean(_) => "euclidean-weighted",
            NormKind::TensorPi(..) => "tensor-pi",
            NormKind::TensorEps(..) => "tensor-eps",
            NormKind::OperatorSpace(..) => "operator-space",
        }
    }
}

/// Exact vertex and facet lists of a real polyhedral unit ball. Both lists
/// are closed under negation.
#[derive(Debug)]
pub struct PolyhedralData {
    pub vertices: Vec<RatVec>,
    pub facets: Vec<RatVec>,
    vertices_c: Vec<CVec>,
    facets_c: Vec<CVec>,
}

impl PolyhedralData {
    fn new(vertices: Vec<RatVec>, facets: Vec<RatVec>) -> Self {
        let vertices_c = vertices.iter().map(|v| ratvec_to_c(v)).collect();
        let facets_c = facets.iter().map(|v| ratvec_to_c(v)).collect();
        PolyhedralData {
            vertices,
            facets,
            vertices_c,
            facets_c,
        }
    }

    pub fn vertices_c(&self) -> &[CVec] {
        &self.vertices_c
    }

    pub fn facets_c(&self) -> &[CVec] {
        &self.facets_c
    }

    fn swapped(&self) -> PolyhedralData {
        PolyhedralData::new(self.facets.clone(), self.vertices.clone())
    }
}

struct Inner {
    label: String,
    dim: usize,
    field: Field,
    kind: NormKind,
    cfg: Arc<Config>,
    /// Explicit data for `Polyhedral` spaces.
    explicit: Option<Arc<PolyhedralData>>,
    vertices: OnceLock<Option<Arc<Vec<RatVec>>>>,
    facets: OnceLock<Option<Arc<Vec<RatVec>>>>,
    vertices_c: OnceLock<Option<Arc<Vec<CVec>>>>,
    facets_c: OnceLock<Option<Arc<Vec<CVec>>>>,
    dual: OnceLock<NormedSpace>,
}

/// A finite-dimensional normed space over the real or complex field.
#[derive(Clone)]
pub struct NormedSpace(Arc<Inner>);

impl fmt::Debug for NormedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NormedSpace({}, dim {}, {}, {})", self.label(), self.dim(), self.field(), self.kind().name())
    }
}

impl fmt::Display for NormedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A norm value together with a norming functional `f` (dual norm at most 1,
/// `f(x) = value` up to the precision of the path that produced it).
#[derive(Clone, Debug)]
pub struct NormEval {
    pub value: f64,
    pub exact: bool,
    pub functional: CVec,
}

impl NormedSpace {
    fn build(label: String, dim: usize, field: Field, kind: NormKind, cfg: Arc<Config>, explicit: Option<PolyhedralData>) -> Self {
        NormedSpace(Arc::new(Inner {
            label,
            dim,
            field,
            kind,
            cfg,
            explicit: explicit.map(Arc::new),
            vertices: OnceLock::new(),
            facets: OnceLock::new(),
            vertices_c: OnceLock::new(),
            facets_c: OnceLock::new(),
            dual: OnceLock::new(),
        }))
    }

    pub(crate) fn composite(label: String, dim: usize, field: Field, kind: NormKind, cfg: &Config) -> Self {
        Self::build(label, dim, field, kind, Arc::new(cfg.clone()), None)
    }

    /// `l_p^dim` over `field`.
    pub fn lp(dim: usize, p: Exponent, field: Field) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if let Exponent::Finite(v) = p {
            if !(v >= 1.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("l_p exponent must lie in [1, inf], got {v}")));
            }
        }
        let prefix = if field == Field::Complex { "c" } else { "" };
        let label = match p {
            Exponent::Infinity => format!("{prefix}linf{dim}"),
            Exponent::Finite(v) if v == 1.0 => format!("{prefix}l1{dim}"),
            Exponent::Finite(v) if v == 2.0 => format!("{prefix}l2{dim}"),
            Exponent::Finite(v) => format!("{prefix}l{v}_{dim}"),
        };
        Ok(Self::build(label, dim, field, NormKind::Lp(p), Arc::new(Config::default()), None))
    }

    pub fn l1(dim: usize) -> Self {
        Self::lp(dim, Exponent::Finite(1.0), Field::Real).expect("valid")
    }

    pub fn linf(dim: usize) -> Self {
        Self::lp(dim, Exponent::Infinity, Field::Real).expect("valid")
    }

    pub fn l2(dim: usize, field: Field) -> Self {
        Self::lp(dim, Exponent::Finite(2.0), field).expect("valid")
    }

    pub fn weighted_euclidean(weights: Vec<f64>, field: Field) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArgument("weights must be positive and finite".into()));
        }
        let label = format!("{}l2w{}", if field == Field::Complex { "c" } else { "" }, weights.len());
        Ok(Self::build(label, weights.len(), field, NormKind::WeightedEuclidean(weights), Arc::new(Config::default()), None))
    }

    /// Real polyhedral space from an explicit vertex list and, optionally, a
    /// facet list. Missing facets are computed by polarity; supplied facets
    /// are checked against the vertices (every vertex on the sphere, every
    /// facet of dual norm one, the two lists polar to each other).
    pub fn polyhedral(label: &str, vertices: Vec<RatVec>, facets: Option<Vec<RatVec>>) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidPolyhedron {
            label: label.to_string(),
            reason,
        };
        let Some(first) = vertices.first() else {
            return Err(invalid("empty vertex list".into()));
        };
        let dim = first.len();
        if dim == 0 || vertices.iter().any(|v| v.len() != dim) {
            return Err(invalid("vertices must share one positive dimension".into()));
        }
        let vset = polytope::as_set(&vertices);
        for v in &vset {
            let neg: RatVec = v.iter().map(|x| -x.clone()).collect();
            if !vset.contains(&neg) {
                return Err(invalid("vertex list is not symmetric under negation".into()));
            }
        }
        let cfg = Config::default();
        let computed = polytope::polar(&vertices, cfg.max_poly_dim).map_err(|e| invalid(e.to_string()))?;
        let facets = match facets {
            None => computed,
            Some(given) => {
                if given.iter().any(|f| f.len() != dim) {
                    return Err(invalid("facet dimension differs from vertex dimension".into()));
                }
                for (k, v) in vertices.iter().enumerate() {
                    let n = given.iter().map(|f| rat_dot(f, v)).max().expect("nonempty");
                    if n != rat_int(1) {
                        return Err(invalid(format!("vertex #{k} has norm {} instead of 1", rat_to_f64(&n))));
                    }
                }
                for (k, f) in given.iter().enumerate() {
                    let n = vertices.iter().map(|v| rat_dot(f, v)).max().expect("nonempty");
                    if n != rat_int(1) {
                        return Err(invalid(format!("facet #{k} has dual norm {} instead of 1", rat_to_f64(&n))));
                    }
                }
                if polytope::as_set(&computed) != polytope::as_set(&given) {
                    return Err(invalid("facet list is not the polar of the vertex list".into()));
                }
                given
            }
        };
        // keep only extreme points
        let verts = polytope::polar(&facets, cfg.max_poly_dim).map_err(|e| invalid(e.to_string()))?;
        if verts.len() != vset.len() {
            return Err(invalid("vertex list contains points that are not extreme".into()));
        }
        Ok(Self::build(
            label.to_string(),
            dim,
            Field::Real,
            NormKind::Polyhedral,
            Arc::new(cfg),
            Some(PolyhedralData::new(verts, facets)),
        ))
    }

    /// Real polyhedral space whose ball is `{x : f . x <= 1}`.
    pub fn polyhedral_from_facets(label: &str, facets: Vec<RatVec>) -> Result<Self> {
        let facets = polytope::symmetrize(&facets);
        let verts = polytope::enumerate_vertices(&facets, Config::default().max_poly_dim).map_err(|e| Error::InvalidPolyhedron {
            label: label.to_string(),
            reason: e.to_string(),
        })?;
        Self::polyhedral(label, verts, None)
    }

    /// A copy of this space with a different label.
    pub fn relabel(&self, label: &str) -> Self {
        let inner = &self.0;
        let explicit = inner.explicit.as_ref().map(|d| PolyhedralData::new(d.vertices.clone(), d.facets.clone()));
        Self::build(label.to_string(), inner.dim, inner.field, inner.kind.clone(), inner.cfg.clone(), explicit)
    }

    /// The same space with a different configuration.
    pub fn with_config(&self, cfg: &Config) -> Self {
        let inner = &self.0;
        let explicit = inner.explicit.as_ref().map(|d| PolyhedralData::new(d.vertices.clone(), d.facets.clone()));
        Self::build(inner.label.clone(), inner.dim, inner.field, inner.kind.clone(), Arc::new(cfg.clone()), explicit)
    }

    pub fn label(&self) -> &str {
        &self.0.label
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn field(&self) -> Field {
        self.0.field
    }

    pub fn kind(&self) -> &NormKind {
        &self.0.kind
    }

    pub fn config(&self) -> &Config {
        &self.0.cfg
    }

    pub fn is_real(&self) -> bool {
        self.0.field == Field::Real
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.kind(), NormKind::WeightedEuclidean(_) | NormKind::Lp(Exponent::Finite(2.0)))
    }

    /// Weights of a (weighted) Euclidean norm `sqrt(sum w_i |x_i|^2)`.
    pub fn euclidean_weights(&self) -> Option<Vec<f64>> {
        match self.kind() {
            NormKind::Lp(Exponent::Finite(p)) if *p == 2.0 => Some(vec![1.0; self.dim()]),
            NormKind::WeightedEuclidean(w) => Some(w.clone()),
            _ => None,
        }
    }

    /// Structural equality: same field, dimension and norm (labels ignored).
    pub fn same_as(&self, other: &NormedSpace) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        if self.dim() != other.dim() || self.field() != other.field() {
            return false;
        }
        match (self.kind(), other.kind()) {
            (NormKind::Lp(a), NormKind::Lp(b)) => a == b || self.dim() == 1,
            (NormKind::WeightedEuclidean(a), NormKind::WeightedEuclidean(b)) => a == b,
            (NormKind::Polyhedral, NormKind::Polyhedral) => {
                let a = self.0.explicit.as_ref().expect("polyhedral data");
                let b = other.0.explicit.as_ref().expect("polyhedral data");
                polytope::as_set(&a.vertices) == polytope::as_set(&b.vertices)
            }
            (NormKind::TensorPi(a, b), NormKind::TensorPi(c, d))
            | (NormKind::TensorEps(a, b), NormKind::TensorEps(c, d))
            | (NormKind::OperatorSpace(a, b), NormKind::OperatorSpace(c, d)) => a.same_as(c) && b.same_as(d),
            _ => {
                // distinct descriptions of the same polyhedral ball
                match (self.vertices(), other.vertices()) {
                    (Some(a), Some(b)) => polytope::as_set(&a) == polytope::as_set(&b),
                    _ => false,
                }
            }
        }
    }

    pub(crate) fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got,
            });
        }
        Ok(())
    }

    fn check_field(&self, x: &[C64]) -> Result<()> {
        if self.is_real() && x.iter().any(|v| v.im != 0.0) {
            return Err(Error::FieldMismatch(format!("complex coordinates given to real space {}", self.label())));
        }
        Ok(())
    }

    /// `||x||`.
    pub fn eval_norm(&self, x: &[C64]) -> Result<f64> {
        self.check_dim(x.len())?;
        self.check_field(x)?;
        Ok(self.norm_value(x))
    }

    /// `||x||` with an exact/heuristic flag and a norming functional.
    pub fn eval_norm_witness(&self, x: &[C64]) -> Result<NormEval> {
        self.check_dim(x.len())?;
        self.check_field(x)?;
        Ok(self.norm_witness(x))
    }

    /// Exact norm of a rational vector. Available for real `l_1`, `l_inf`
    /// and every real space with an exact facet list.
    pub fn eval_norm_exact(&self, x: &[Rat]) -> Result<Rat> {
        self.check_dim(x.len())?;
        if !self.is_real() {
            return Err(Error::ComplexPolyhedral(self.label().to_string()));
        }
        match self.kind() {
            NormKind::Lp(p) if p.is_one() => Ok(x.iter().fold(Rat::zero(), |a, v| a + v.abs())),
            NormKind::Lp(p) if p.is_inf() => Ok(crate::scalar::rat_abs_max(x)),
            _ => match self.facets() {
                Some(f) => Ok(f.iter().map(|g| rat_dot(g, x)).max().unwrap_or_else(Rat::zero)),
                None => Err(self.not_polyhedral()),
            },
        }
    }

    pub(crate) fn not_polyhedral(&self) -> Error {
        if !self.is_real() {
            Error::ComplexPolyhedral(self.label().to_string())
        } else {
            Error::NotPolyhedral {
                label: self.label().to_string(),
                kind: self.kind().name().to_string(),
            }
        }
    }

    pub(crate) fn norm_value(&self, x: &[C64]) -> f64 {
        match self.kind() {
            NormKind::Lp(p) => lp_norm(x, *p),
            NormKind::WeightedEuclidean(w) => x.iter().zip(w).map(|(v, w)| w * v.norm_sqr()).sum::<f64>().sqrt(),
            NormKind::Polyhedral => max_pairing(self.facets_c().as_deref().expect("polyhedral"), x),
            _ => self.norm_witness(x).value,
        }
    }

    pub(crate) fn norm_witness(&self, x: &[C64]) -> NormEval {
        let exact = |value: f64, functional: CVec| NormEval {
            value,
            exact: true,
            functional,
        };
        match self.kind() {
            NormKind::Lp(p) => {
                let (v, f) = lp_duality(x, *p);
                exact(v, f)
            }
            NormKind::WeightedEuclidean(w) => {
                let v = x.iter().zip(w).map(|(a, w)| w * a.norm_sqr()).sum::<f64>().sqrt();
                let f = if v == 0.0 {
                    vec![ZERO; x.len()]
                } else {
                    x.iter().zip(w).map(|(a, w)| a.conj() * (*w / v)).collect()
                };
                exact(v, f)
            }
            NormKind::Polyhedral => {
                let fc = self.facets_c().expect("polyhedral");
                let (k, v) = argmax_pairing(&fc, x);
                exact(v, fc[k].clone())
            }
            NormKind::TensorEps(a, b) => crate::tensor::eps_eval(x, a, b, self.config()),
            NormKind::TensorPi(a, b) => crate::tensor::pi_eval(x, a, b, self.config()),
            NormKind::OperatorSpace(dom, cod) => {
                let m = Matrix::new(cod.dim(), dom.dim(), x.to_vec()).expect("shape");
                let r = crate::operator::op_norm_raw(&m, dom, cod, self.config());
                NormEval {
                    value: r.value,
                    exact: r.exact,
                    functional: kron(&r.functional, &r.arg),
                }
            }
        }
    }

    /// Dual space: same coordinates, norm `sup{|f(x)| : ||x|| <= 1}`.
    pub fn dual(&self) -> NormedSpace {
        self.0.dual.get_or_init(|| self.build_dual()).clone()
    }

    fn build_dual(&self) -> NormedSpace {
        let label = format!("dual({})", self.label());
        let cfg = self.0.cfg.clone();
        match self.kind() {
            NormKind::Lp(p) => {
                let mut s = NormedSpace::lp(self.dim(), p.conjugate(), self.field()).expect("valid");
                if s.label() != label {
                    s = s.relabel(s.label());
                }
                s
            }
            NormKind::WeightedEuclidean(w) => {
                let inv = w.iter().map(|v| 1.0 / v).collect();
                Self::build(label, self.dim(), self.field(), NormKind::WeightedEuclidean(inv), cfg, None)
            }
            NormKind::Polyhedral => {
                let data = self.0.explicit.as_ref().expect("polyhedral").swapped();
                Self::build(label, self.dim(), Field::Real, NormKind::Polyhedral, cfg, Some(data))
            }
            NormKind::TensorPi(a, b) => Self::build(label, self.dim(), self.field(), NormKind::TensorEps(a.dual(), b.dual()), cfg, None),
            NormKind::TensorEps(a, b) => Self::build(label, self.dim(), self.field(), NormKind::TensorPi(a.dual(), b.dual()), cfg, None),
            NormKind::OperatorSpace(dom, cod) => {
                Self::build(label, self.dim(), self.field(), NormKind::TensorPi(cod.dual(), dom.clone()), cfg, None)
            }
        }
    }

    /// `||f||_*` for a coefficient vector over this space.
    pub fn dual_norm_coeffs(&self, f: &[C64]) -> Result<f64> {
        self.dual().eval_norm(f)
    }

    /// Exact vertex list of the unit ball (real spaces only, computed on
    /// demand within the dimension guardrail).
    pub fn vertices(&self) -> Option<Arc<Vec<RatVec>>> {
        self.0.vertices.get_or_init(|| self.compute_vertices()).clone()
    }

    /// Exact facet functionals of the unit ball.
    pub fn facets(&self) -> Option<Arc<Vec<RatVec>>> {
        self.0.facets.get_or_init(|| self.compute_facets()).clone()
    }

    pub(crate) fn vertices_c(&self) -> Option<Arc<Vec<CVec>>> {
        self.0
            .vertices_c
            .get_or_init(|| self.vertices().map(|v| Arc::new(v.iter().map(|x| ratvec_to_c(x)).collect())))
            .clone()
    }

    pub(crate) fn facets_c(&self) -> Option<Arc<Vec<CVec>>> {
        self.0
            .facets_c
            .get_or_init(|| self.facets().map(|v| Arc::new(v.iter().map(|x| ratvec_to_c(x)).collect())))
            .clone()
    }

    /// Vertices that are available without a polarity conversion.
    pub(crate) fn cheap_vertices_c(&self) -> Option<Arc<Vec<CVec>>> {
        if !self.is_real() {
            return None;
        }
        match self.kind() {
            NormKind::Polyhedral => self.vertices_c(),
            NormKind::Lp(p) if (p.is_one() || p.is_inf()) && self.cube_ok() => self.vertices_c(),
            NormKind::TensorPi(a, b) if a.cheap_vertices_c().is_some() && b.cheap_vertices_c().is_some() => {
                if self.dim() <= 64 {
                    self.vertices_c()
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Facets available without a polarity conversion.
    pub(crate) fn cheap_facets_c(&self) -> Option<Arc<Vec<CVec>>> {
        self.dual().cheap_vertices_c()
    }

    fn cube_ok(&self) -> bool {
        self.dim() <= self.0.cfg.max_poly_dim.max(8)
    }

    fn compute_vertices(&self) -> Option<Arc<Vec<RatVec>>> {
        if !self.is_real() {
            return None;
        }
        let n = self.dim();
        let v = match self.kind() {
            NormKind::Polyhedral => return Some(Arc::new(self.0.explicit.as_ref()?.vertices.clone())),
            NormKind::Lp(p) if p.is_one() => signed_basis(n),
            NormKind::Lp(p) if p.is_inf() => {
                if !self.cube_ok() {
                    return None;
                }
                sign_vectors(n)
            }
            NormKind::TensorPi(a, b) => {
                let (va, vb) = (a.vertices()?, b.vertices()?);
                let mut set = BTreeSet::new();
                for x in va.iter() {
                    for y in vb.iter() {
                        set.insert(rat_kron(x, y));
                    }
                }
                set.into_iter().collect()
            }
            NormKind::TensorEps(..) | NormKind::OperatorSpace(..) => {
                let f = self.facets()?;
                polytope::enumerate_vertices(&f, self.0.cfg.max_poly_dim).ok()?
            }
            _ => return None,
        };
        Some(Arc::new(v))
    }

    fn compute_facets(&self) -> Option<Arc<Vec<RatVec>>> {
        if !self.is_real() {
            return None;
        }
        let n = self.dim();
        let f = match self.kind() {
            NormKind::Polyhedral => return Some(Arc::new(self.0.explicit.as_ref()?.facets.clone())),
            NormKind::Lp(p) if p.is_inf() => signed_basis(n),
            NormKind::Lp(p) if p.is_one() => {
                if !self.cube_ok() {
                    return None;
                }
                sign_vectors(n)
            }
            NormKind::TensorEps(a, b) => {
                let (fa, fb) = (a.facets()?, b.facets()?);
                let mut set = BTreeSet::new();
                for x in fa.iter() {
                    for y in fb.iter() {
                        set.insert(rat_kron(x, y));
                    }
                }
                set.into_iter().collect()
            }
            NormKind::OperatorSpace(dom, cod) => {
                let (vx, fy) = (dom.vertices()?, cod.facets()?);
                let mut set = BTreeSet::new();
                for g in fy.iter() {
                    for x in vx.iter() {
                        set.insert(rat_kron(g, x));
                    }
                }
                set.into_iter().collect()
            }
            NormKind::TensorPi(..) => {
                let v = self.vertices()?;
                polytope::polar(&v, self.0.cfg.max_poly_dim).ok()?
            }
            _ => return None,
        };
        Some(Arc::new(f))
    }

    /// Both vertex and facet lists, when available.
    pub fn polyhedral_data(&self) -> Option<(Arc<Vec<RatVec>>, Arc<Vec<RatVec>>)> {
        Some((self.vertices()?, self.facets()?))
    }

    pub(crate) fn exact_norms(&self) -> bool {
        self.is_real() && (matches!(self.kind(), NormKind::Lp(p) if p.is_one() || p.is_inf()) || self.facets().is_some())
    }
}

fn signed_basis(n: usize) -> Vec<RatVec> {
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        for s in [1, -1] {
            let mut v = vec![Rat::zero(); n];
            v[i] = rat_int(s);
            out.push(v);
        }
    }
    out
}

fn sign_vectors(n: usize) -> Vec<RatVec> {
    (0..1u64 << n)
        .map(|mask| (0..n).map(|k| rat_int(if mask >> k & 1 == 1 { -1 } else { 1 })).collect())
        .collect()
}

pub(crate) fn rat_kron(x: &[Rat], y: &[Rat]) -> RatVec {
    let mut out = Vec::with_capacity(x.len() * y.len());
    for a in x {
        for b in y {
            out.push(a * b);
        }
    }
    out
}

fn max_pairing(list: &[CVec], x: &[C64]) -> f64 {
    list.iter().map(|f| pair(f, x).re).fold(0.0, f64::max)
}

fn argmax_pairing(list: &[CVec], x: &[C64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (k, f) in list.iter().enumerate() {
        let v = pair(f, x).re;
        if v > best.1 {
            best = (k, v);
        }
    }
    (best.0, best.1.max(0.0))
}

fn lp_norm(x: &[C64], p: Exponent) -> f64 {
    match p {
        Exponent::Infinity => x.iter().map(|v| v.norm()).fold(0.0, f64::max),
        Exponent::Finite(p) if p == 1.0 => x.iter().map(|v| v.norm()).sum(),
        Exponent::Finite(p) if p == 2.0 => euclid(x),
        Exponent::Finite(p) => {
            let m = x.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if m == 0.0 {
                return 0.0;
            }
            m * x.iter().map(|v| (v.norm() / m).powf(p)).sum::<f64>().powf(1.0 / p)
        }
    }
}

/// Norm and duality-map image for `l_p`.
fn lp_duality(x: &[C64], p: Exponent) -> (f64, CVec) {
    let n = lp_norm(x, p);
    let mut f = vec![ZERO; x.len()];
    if n == 0.0 {
        return (0.0, f);
    }
    match p {
        Exponent::Infinity => {
            let (k, _) = x
                .iter()
                .enumerate()
                .fold((0, -1.0), |(bk, bv), (k, v)| if v.norm() > bv { (k, v.norm()) } else { (bk, bv) });
            f[k] = phase(x[k]).conj();
        }
        Exponent::Finite(q) if q == 1.0 => {
            for (fi, xi) in f.iter_mut().zip(x) {
                if xi.norm() > 0.0 {
                    *fi = phase(*xi).conj();
                }
            }
        }
        Exponent::Finite(q) => {
            for (fi, xi) in f.iter_mut().zip(x) {
                let r = xi.norm() / n;
                if r > 0.0 {
                    *fi = phase(*xi).conj() * r.powf(q - 1.0);
                }
            }
        }
    }
    (n, f)
}

/// A linear functional on a space, acting by the bilinear pairing.
#[derive(Clone, Debug)]
pub struct Functional {
    coefficients: CVec,
    space: NormedSpace,
}

impl Functional {
    pub fn new(space: &NormedSpace, coefficients: CVec) -> Result<Self> {
        space.check_dim(coefficients.len())?;
        if space.is_real() && coefficients.iter().any(|v| v.im != 0.0) {
            return Err(Error::FieldMismatch("complex functional on a real space".into()));
        }
        Ok(Functional {
            coefficients,
            space: space.clone(),
        })
    }

    pub fn from_real(space: &NormedSpace, coefficients: &[f64]) -> Result<Self> {
        Self::new(space, crate::scalar::real_vec(coefficients))
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    pub fn space(&self) -> &NormedSpace {
        &self.space
    }

    pub fn apply(&self, x: &[C64]) -> C64 {
        pair(&self.coefficients, x)
    }
}

/// `||x||` on `space`.
pub fn eval_norm(space: &NormedSpace, x: &[C64]) -> Result<f64> {
    space.eval_norm(x)
}

/// `sup{|f(x)| : ||x|| <= 1}`: vertex maximization on polyhedral spaces,
/// conjugate exponents on `l_p`, and the dual composite norm otherwise.
pub fn dual_norm(space: &NormedSpace, f: &Functional) -> Result<f64> {
    if !f.space().same_as(space) {
        return Err(Error::SpaceMismatch(format!("functional on {} evaluated on {}", f.space(), space)));
    }
    space.dual().eval_norm(f.coefficients())
}

/// Dual norm by multistart ascent over the unit sphere, independent of the
/// vertex/conjugate-exponent formulas. Returns a lower bound.
pub fn dual_norm_ascent(space: &NormedSpace, f: &Functional, cfg: &Config) -> Result<f64> {
    space.check_dim(f.coefficients().len())?;
    let g = Matrix::new(1, space.dim(), f.coefficients().to_vec())?;
    let scalars = NormedSpace::lp(1, Exponent::Finite(1.0), space.field())?;
    Ok(crate::operator::power_ascent(&g, space, &scalars, cfg, 0xD0A1).value)
}

/// Unit functionals `f` with `re f(x) > 1 - delta`.
///
/// Polyhedral spaces return facet functionals: with `delta = 0` exactly those
/// of facets containing `x` (`|f(x) - 1| <= 1e-9`). Other spaces return their
/// duality-map image, which is unique for smooth norms.
pub fn norming_functionals(space: &NormedSpace, x: &[C64], delta: f64) -> Result<Vec<Functional>> {
    let n = space.eval_norm(x)?;
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::NotOnSphere { norm: n });
    }
    if delta < 0.0 {
        return Err(Error::InvalidArgument("delta must be nonnegative".into()));
    }
    if let Some(fc) = space.facets_c() {
        let out: Vec<Functional> = fc
            .iter()
            .filter(|f| {
                let v = pair(f, x).re;
                if delta == 0.0 {
                    (v - 1.0).abs() <= FACE_TOL
                } else {
                    v > 1.0 - delta
                }
            })
            .map(|f| Functional::new(space, f.clone()).expect("dim"))
            .collect();
        return Ok(out);
    }
    let w = space.norm_witness(x);
    Ok(vec![Functional::new(space, w.functional)?])
}

/// Exact vertex list of the unit ball of a real polyhedral space.
pub fn extreme_points(space: &NormedSpace) -> Result<Vec<RatVec>> {
    match space.vertices() {
        Some(v) => Ok(v.as_ref().clone()),
        None => Err(space.not_polyhedral()),
    }
}

/// The dual space; `dual_space(dual_space(X))` has the same norm as `X`.
pub fn dual_space(space: &NormedSpace) -> NormedSpace {
    space.dual()
}

/// Canonical unit vector used when a witness is needed for the zero operator.
pub(crate) fn some_unit_vector(space: &NormedSpace) -> CVec {
    let mut e = vec![ZERO; space.dim()];
    e[0] = ONE;
    let n = space.norm_value(&e);
    e.iter().map(|v| v / n).collect()
}
