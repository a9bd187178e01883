//! Pre/post-composition embeddings and the inequality suite comparing the
//! numerical index of operator spaces and tensor products with the indices
//! of their factors.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::index::{index_upper_certificate, numerical_index_estimate, numerical_index_exact, IndexCertificate};
use crate::linalg::Matrix;
use crate::operator::{operator_space, rat_transpose, Operator};
use crate::range::{numerical_radius, numerical_radius_exact};
use crate::scalar::{rat_to_f64, Rat, RatVec};
use crate::space::NormedSpace;
use crate::tensor::{rat_kron_matrix, tensor_lift, tensor_space, TensorKind};

fn rat_identity(n: usize) -> Vec<RatVec> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
        .collect()
}

/// `Phi_J(T) = T o J` on `L(X, Y)` for an operator `J` on `X`.
pub fn embed_precompose(j: &Operator, y: &NormedSpace) -> Result<Operator> {
    j.require_endomorphism()?;
    let x = j.domain();
    let z = operator_space(x, y)?;
    match j.rational() {
        Some(r) => Operator::from_rational(&z, &z, rat_kron_matrix(&rat_identity(y.dim()), &rat_transpose(r))),
        None => Operator::new(&z, &z, Matrix::identity(y.dim()).kron(&j.matrix().transpose())),
    }
}

/// `Psi_S(T) = S o T` on `L(X, Y)` for an operator `S` on `Y`.
pub fn embed_postcompose(s: &Operator, x: &NormedSpace) -> Result<Operator> {
    s.require_endomorphism()?;
    let y = s.domain();
    let z = operator_space(x, y)?;
    match s.rational() {
        Some(r) => Operator::from_rational(&z, &z, rat_kron_matrix(r, &rat_identity(x.dim()))),
        None => Operator::new(&z, &z, s.matrix().kron(&Matrix::identity(x.dim()))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    HoldsWithinTolerance,
    Violated,
    InconclusiveHeuristic,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::HoldsWithinTolerance => "holds-within-tolerance",
            Verdict::Violated => "violated",
            Verdict::InconclusiveHeuristic => "inconclusive-heuristic",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bound {
    pub value: f64,
    pub exact: bool,
}

/// One checked inequality `lhs <= rhs` (or `lhs < rhs` when `strict`).
#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub name: String,
    pub lhs: Bound,
    pub rhs: Bound,
    /// `rhs - lhs`
    pub margin: f64,
    pub strict: bool,
    pub witnesses: Vec<String>,
    pub verdict: Verdict,
}

impl InequalityReport {
    pub fn new(name: String, lhs: Bound, rhs: Bound, strict: bool, witnesses: Vec<String>, cfg: &Config) -> Self {
        let margin = rhs.value - lhs.value;
        let both = lhs.exact && rhs.exact;
        let tol = if both { cfg.exact_tol } else { cfg.heuristic_tol };
        let verdict = if strict {
            if margin > tol {
                Verdict::Holds
            } else if both && margin <= 0.0 {
                Verdict::Violated
            } else {
                Verdict::InconclusiveHeuristic
            }
        } else if margin >= 0.0 {
            Verdict::Holds
        } else if margin >= -tol {
            Verdict::HoldsWithinTolerance
        } else if both {
            Verdict::Violated
        } else {
            Verdict::InconclusiveHeuristic
        };
        InequalityReport {
            name,
            lhs,
            rhs,
            margin,
            strict,
            witnesses,
            verdict,
        }
    }

    fn inconclusive(name: String, err: &Error) -> Self {
        let nan = Bound { value: f64::NAN, exact: false };
        InequalityReport {
            name,
            lhs: nan,
            rhs: nan,
            margin: f64::NAN,
            strict: false,
            witnesses: vec![format!("not computed: {err}")],
            verdict: Verdict::InconclusiveHeuristic,
        }
    }
}

/// Exact index when the enumeration applies, otherwise the estimate.
pub fn index_of(space: &NormedSpace, cfg: &Config) -> Result<IndexCertificate> {
    let n = space.dim();
    if space.is_real() && n * n <= cfg.max_exact_index_dim && space.polyhedral_data().is_some() {
        return numerical_index_exact(space);
    }
    numerical_index_estimate(space, cfg)
}

/// `v(T)` and `v(T)/||T||`, exact where rational data allow.
fn radius_ratio(t: &Operator) -> Result<(Bound, Bound)> {
    if let (Ok(v), Ok(m)) = (numerical_radius_exact(t), t.norm_exact()) {
        if !m.is_zero() {
            let r = &v / &m;
            return Ok((
                Bound { value: rat_to_f64(&v), exact: true },
                Bound { value: rat_to_f64(&r), exact: true },
            ));
        }
    }
    let r = numerical_radius(t)?;
    let nm = t.norm();
    if nm.value == 0.0 {
        return Err(Error::ZeroOperator);
    }
    Ok((
        Bound { value: r.value, exact: r.exact },
        Bound {
            value: r.value / nm.value,
            exact: r.exact && nm.exact,
        },
    ))
}

fn bound_of(c: &IndexCertificate) -> Bound {
    Bound { value: c.value, exact: c.exact }
}

struct Candidate {
    name: String,
    radius: Bound,
    ratio: Bound,
}

fn candidate(name: String, op: Result<Operator>) -> Result<Candidate> {
    let op = op?;
    let (radius, ratio) = radius_ratio(&op)?;
    Ok(Candidate { name, radius, ratio })
}

/// Smallest upper bound for `n(Z)` among transported witnesses and a direct
/// estimate on `Z` when `Z` is polyhedral.
fn index_upper(z: &NormedSpace, cands: &[&Candidate], cfg: &Config) -> Option<(Bound, Vec<String>)> {
    let mut best: Option<(Bound, String)> = None;
    let mut consider = |b: Bound, w: String| {
        let better = match &best {
            None => true,
            Some((cur, _)) => b.value < cur.value - 1e-12 || (b.value <= cur.value + 1e-12 && b.exact && !cur.exact),
        };
        if better {
            best = Some((b, w));
        }
    };
    for c in cands {
        consider(c.ratio, format!("{} ratio {:.12}", c.name, c.ratio.value));
    }
    if z.is_real() && z.dim() * z.dim() <= cfg.max_operator_dim && z.polyhedral_data().is_some() {
        if let Ok(est) = index_of(z, cfg) {
            consider(bound_of(&est), format!("{} on {}", est.method.name(), z.label()));
        }
    }
    best.map(|(b, w)| (b, vec![w]))
}

/// Runs the inequality suite over every ordered pair of the catalog.
pub fn verify_suite(catalog: &[NormedSpace], cfg: &Config) -> Vec<InequalityReport> {
    let indices: Vec<Result<IndexCertificate>> = std::thread::scope(|sc| {
        let hs: Vec<_> = catalog.iter().map(|s| sc.spawn(move || index_of(s, cfg))).collect();
        hs.into_iter().map(|h| h.join().expect("index worker")).collect()
    });
    let mut out = Vec::new();
    for (s, idx) in catalog.iter().zip(&indices) {
        let name = format!("n({}*) <= n({})", s.label(), s.label());
        let rep = idx.as_ref().map_err(Clone::clone).and_then(|ix| {
            let d = index_of(&s.dual(), cfg)?;
            Ok(InequalityReport::new(
                name.clone(),
                bound_of(&d),
                bound_of(ix),
                false,
                vec![format!("dual witness ratio {:.12}", d.witness_value)],
                cfg,
            ))
        });
        out.push(rep.unwrap_or_else(|e| InequalityReport::inconclusive(name, &e)));
    }
    let pairs: Vec<(usize, usize)> = (0..catalog.len()).flat_map(|i| (0..catalog.len()).map(move |j| (i, j))).collect();
    let per_pair: Vec<Vec<InequalityReport>> = std::thread::scope(|sc| {
        let hs: Vec<_> = pairs
            .iter()
            .map(|&(i, j)| {
                let (x, y) = (&catalog[i], &catalog[j]);
                let (ix, iy) = (&indices[i], &indices[j]);
                sc.spawn(move || pair_reports(x, y, ix, iy, cfg))
            })
            .collect();
        hs.into_iter().map(|h| h.join().expect("pair worker")).collect()
    });
    out.extend(per_pair.into_iter().flatten());
    out
}

fn pair_reports(x: &NormedSpace, y: &NormedSpace, ix: &Result<IndexCertificate>, iy: &Result<IndexCertificate>, cfg: &Config) -> Vec<InequalityReport> {
    let (xl, yl) = (x.label(), y.label());
    let mut out = Vec::new();
    let names = [
        format!("n(L({xl},{yl})) <= min(n({xl}),n({yl}))"),
        format!("n({xl}(x)pi{yl}) <= min(n({xl}),n({yl}))"),
        format!("n({xl}(x)eps{yl}) <= min(n({xl}),n({yl}))"),
    ];
    let (ix, iy) = match (ix, iy) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            return names.into_iter().map(|n| InequalityReport::inconclusive(n, e)).collect();
        }
    };
    if x.field() != y.field() {
        let e = Error::FieldMismatch(format!("{xl} and {yl}"));
        return names.into_iter().map(|n| InequalityReport::inconclusive(n, &e)).collect();
    }
    let (sx, sy) = (&ix.witness_operator, &iy.witness_operator);
    let (vx, vy) = (radius_ratio(sx), radius_ratio(sy));
    let min = if ix.value <= iy.value { bound_of(ix) } else { bound_of(iy) };
    let min_w = format!(
        "n({xl}) {} {:.12}, n({yl}) {} {:.12}",
        ix.method.name(),
        ix.value,
        iy.method.name(),
        iy.value
    );

    let phi = candidate(format!("Phi_J on L({xl},{yl})"), embed_precompose(sx, y));
    let psi = candidate(format!("Psi_S on L({xl},{yl})"), embed_postcompose(sy, x));
    let lift = |kind: TensorKind, left: bool| {
        let k = if kind == TensorKind::Pi { "pi" } else { "eps" };
        if left {
            candidate(format!("S(x){k}Id on {xl}(x){k}{yl}"), tensor_lift(sx, &Operator::identity(y), kind))
        } else {
            candidate(format!("Id(x){k}S on {xl}(x){k}{yl}"), tensor_lift(&Operator::identity(x), sy, kind))
        }
    };
    let pi = (lift(TensorKind::Pi, true), lift(TensorKind::Pi, false));
    let eps = (lift(TensorKind::Eps, true), lift(TensorKind::Eps, false));

    let spaces = [
        operator_space(x, y),
        tensor_space(x, y, TensorKind::Pi),
        tensor_space(x, y, TensorKind::Eps),
    ];
    let groups = [(&phi, &psi), (&pi.0, &pi.1), (&eps.0, &eps.1)];
    let mut z_bounds: Vec<Option<Bound>> = Vec::new();
    for ((name, z), (a, b)) in names.iter().zip(&spaces).zip(groups) {
        let z = match z {
            Ok(z) => z,
            Err(e) => {
                out.push(InequalityReport::inconclusive(name.clone(), e));
                z_bounds.push(None);
                continue;
            }
        };
        let cands: Vec<&Candidate> = [a, b].into_iter().filter_map(|c| c.as_ref().ok()).collect();
        match index_upper(z, &cands, cfg) {
            Some((lhs, mut w)) => {
                w.push(min_w.clone());
                out.push(InequalityReport::new(name.clone(), lhs, min, false, w, cfg));
                z_bounds.push(Some(lhs));
            }
            None => {
                let e = a.as_ref().err().or(b.as_ref().err()).cloned().unwrap_or(Error::EmptySet("witnesses"));
                out.push(InequalityReport::inconclusive(name.clone(), &e));
                z_bounds.push(None);
            }
        }
    }

    // radius transport along the witnesses
    let transport = [
        (format!("v(Phi_J) <= v(J) on L({xl},{yl})"), &phi, &vx),
        (format!("v(Psi_S) <= v(S) on L({xl},{yl})"), &psi, &vy),
        (format!("v(S(x)piId) <= v(S) on {xl}(x)pi{yl}"), &pi.0, &vx),
        (format!("v(S(x)epsId) <= v(S) on {xl}(x)eps{yl}"), &eps.0, &vx),
    ];
    for (name, c, v) in transport {
        match (c, v) {
            (Ok(c), Ok((vs, _))) => out.push(InequalityReport::new(name, c.radius, *vs, false, vec![c.name.clone()], cfg)),
            (Err(e), _) | (_, Err(e)) => out.push(InequalityReport::inconclusive(name, e)),
        }
    }

    // contrapositives: a certified n(X) < 1 or n(Y) < 1 forces n(Z) < 1
    let one = Bound { value: 1.0, exact: true };
    let hyp = ix.witness_value.min(iy.witness_value);
    if hyp < 1.0 - cfg.heuristic_tol {
        let labels = [
            format!("n(L({xl},{yl})) = 1 => n({xl}) = n({yl}) = 1 (contrapositive)"),
            format!("n({xl}(x)pi{yl}) = 1 => n({xl}) = n({yl}) = 1 (contrapositive)"),
            format!("n({xl}(x)eps{yl}) = 1 => n({xl}) = n({yl}) = 1 (contrapositive)"),
        ];
        for (name, zb) in labels.into_iter().zip(&z_bounds) {
            if let Some(zb) = zb {
                out.push(InequalityReport::new(name, *zb, one, true, vec![format!("factor witness ratio {hyp:.12}")], cfg));
            }
        }
    }
    out
}

/// Upper bound for `n(L(X, Y))` over caller-supplied operators on `L(X, Y)`,
/// starting from the trivial bound `1`. Used where `L(X, Y)` is too large for
/// the estimator.
pub fn operator_space_index_upper(x: &NormedSpace, y: &NormedSpace, extra: &[Operator]) -> Result<(Bound, String)> {
    let z = operator_space(x, y)?;
    let mut best = (Bound { value: 1.0, exact: true }, "identity".to_string());
    for (k, t) in extra.iter().enumerate() {
        if !t.domain().same_as(&z) {
            return Err(Error::SpaceMismatch(format!("candidate {k} is not an operator on {}", z.label())));
        }
        let c = index_upper_certificate(t)?;
        if c.value < best.0.value {
            best = (Bound { value: c.value, exact: c.exact }, format!("candidate {k}"));
        }
    }
    Ok(best)
}
